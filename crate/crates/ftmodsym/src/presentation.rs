//! Brute-force presentation oracle.
//!
//! The modular symbol group for Gamma_0(n) is the quotient of the free
//! Z-module on P^1(A/n) by the Manin-Teitelbaum relations
//!
//! ```text
//!   (x) + (x sigma)
//!   (x) + (x tau) + (x tau^2)
//!   (x) - (x delta)        delta = diag(lambda, 1), lambda in Fq^x
//! ```
//!
//! This module builds the full relation matrix over Z, computes its Smith
//! normal form with exact big integers, and exposes the quotient: rank,
//! torsion invariants, and exact rational coordinates of every generator in
//! a greedily chosen free-part basis. Everything downstream is validated
//! against these coordinates.
//!
//! For prime levels it also computes the boundary map to the two cusp
//! classes [0] and [infinity] and the parabolic (cuspidal) subspace, of
//! rank equal to the genus.

use crate::error::Result;
use crate::linalg::{qmat::QMat, zmat};
use crate::poly::Poly;
use crate::projective::{p1_act, p1_enumerate, LevelContext, Mat2, P1Point};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelationKind {
    TwoTerm,
    ThreeTerm,
    Diagonal,
}

/// One relation row: sparse (generator index, coefficient) pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RelationRow {
    pub support: Vec<(usize, i64)>,
}

pub struct RelationSystem {
    pub generators: Vec<P1Point>,
    pub index: HashMap<P1Point, usize>,
    pub rows: Vec<(RelationKind, RelationRow)>,
}

fn sparse_row(mut terms: Vec<(usize, i64)>) -> RelationRow {
    terms.sort_by_key(|&(i, _)| i);
    let mut support: Vec<(usize, i64)> = Vec::new();
    for (i, c) in terms {
        match support.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => support.push((i, c)),
        }
    }
    support.retain(|&(_, c)| c != 0);
    RelationRow { support }
}

/// All relation rows over the full generator list, deduplicated; zero rows
/// (diagonal relations with a fixed point) are dropped.
pub fn build_relations(ctx: &LevelContext) -> RelationSystem {
    let generators = p1_enumerate(ctx);
    let index: HashMap<P1Point, usize> = generators
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let act = |x: &P1Point, m: &Mat2| -> usize {
        let y = p1_act(x, m, ctx).expect("unimodular action is total");
        index[&y]
    };
    let sigma = Mat2::sigma(&ctx.fq);
    let tau = Mat2::tau(&ctx.fq);
    let mut seen = BTreeSet::new();
    let mut rows: Vec<(RelationKind, RelationRow)> = Vec::new();
    let mut push = |rows: &mut Vec<(RelationKind, RelationRow)>, kind, row: RelationRow| {
        if !row.support.is_empty() && seen.insert(row.clone()) {
            rows.push((kind, row));
        }
    };
    for (i, x) in generators.iter().enumerate() {
        push(
            &mut rows,
            RelationKind::TwoTerm,
            sparse_row(vec![(i, 1), (act(x, &sigma), 1)]),
        );
        let xt = act(x, &tau);
        let xt_point = generators[xt].clone();
        let xtt = act(&xt_point, &tau);
        push(
            &mut rows,
            RelationKind::ThreeTerm,
            sparse_row(vec![(i, 1), (xt, 1), (xtt, 1)]),
        );
        for lambda in ctx.fq.units().skip(1) {
            push(
                &mut rows,
                RelationKind::Diagonal,
                sparse_row(vec![(i, 1), (act(x, &Mat2::delta(lambda)), -1)]),
            );
        }
    }
    RelationSystem { generators, index, rows }
}

/// Solved presentation: the quotient structure plus exact coordinates.
pub struct PresentationResult {
    pub generators: Vec<P1Point>,
    pub index: HashMap<P1Point, usize>,
    /// Rank of the quotient over Q (g + h - 1 for prime levels).
    pub rank: usize,
    /// Invariant factors > 1 of the torsion subgroup.
    pub torsion: Vec<BigInt>,
    /// Generator index -> rational coordinates in the chosen basis.
    pub coords: Vec<Vec<BigRational>>,
    /// Indices of generators whose images form the chosen free-part basis.
    pub chosen_basis: Vec<usize>,
}

impl PresentationResult {
    pub fn coords_of(&self, x: &P1Point) -> &[BigRational] {
        &self.coords[self.index[x]]
    }
}

/// Solve the presentation by Smith normal form.
pub fn solve_presentation(ctx: &LevelContext) -> PresentationResult {
    solve_system(build_relations(ctx))
}

fn solve_system(system: RelationSystem) -> PresentationResult {
    let n = system.generators.len();
    let rel = zmat::ZMat::from_rows(
        system
            .rows
            .iter()
            .map(|(_, row)| {
                let mut dense = vec![BigInt::zero(); n];
                for &(i, c) in &row.support {
                    dense[i] = BigInt::from(c);
                }
                dense
            })
            .collect(),
    );
    let snf = zmat::smith_normal_form(rel);
    let s = snf.diag.len();
    let torsion: Vec<BigInt> = snf.diag.iter().filter(|d| !d.is_one()).cloned().collect();
    let rank = n - s;

    // generator i maps to row i of V; its free-part coordinates are the
    // entries past the s pivot columns (integral in the V-basis)
    let vcoords: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (s..n)
                .map(|j| BigRational::from_integer(snf.colv[(i, j)].clone()))
                .collect()
        })
        .collect();

    // greedy basis: first generators with independent images
    let mut chosen: Vec<usize> = Vec::new();
    let mut probe: Vec<Vec<BigRational>> = Vec::new();
    for (i, coords) in vcoords.iter().enumerate() {
        if chosen.len() == rank {
            break;
        }
        let mut trial = probe.clone();
        trial.push(coords.clone());
        if QMat::from_rows(trial.clone()).rank() == chosen.len() + 1 {
            probe = trial;
            chosen.push(i);
        }
    }
    assert_eq!(chosen.len(), rank, "free part must admit a generator basis");

    // change of basis: coords(x) = G^-1 * vcoords(x), G columns = chosen images
    let g = QMat::from_columns(chosen.iter().map(|&i| vcoords[i].clone()).collect());
    let ginv = g.inverse().expect("chosen images are independent");
    let coords: Vec<Vec<BigRational>> = vcoords.iter().map(|c| ginv.mul_vec(c)).collect();

    PresentationResult {
        generators: system.generators,
        index: system.index,
        rank,
        torsion,
        coords,
        chosen_basis: chosen,
    }
}

/// Degree-zero divisor on the two cusp classes of a prime level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspDivisor {
    pub at_zero: BigRational,
    pub at_infinity: BigRational,
}

impl CuspDivisor {
    pub fn zero() -> CuspDivisor {
        CuspDivisor { at_zero: BigRational::zero(), at_infinity: BigRational::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.at_zero.is_zero() && self.at_infinity.is_zero()
    }

    pub fn add_scaled(&mut self, other: &CuspDivisor, c: &BigRational) {
        self.at_zero += &other.at_zero * c;
        self.at_infinity += &other.at_infinity * c;
    }

    /// Total degree; boundaries of symbols always have degree zero.
    pub fn degree(&self) -> BigRational {
        &self.at_zero + &self.at_infinity
    }
}

/// Boundary of a generator at prime level. Writing (u:v) = [b/v, a/u] for a
/// unimodular lift (a b; u v), the boundary is (class of a/u) minus (class
/// of b/v), and a reduced cusp x/y falls in class [infinity] exactly when P
/// divides y. The numerators never matter: a/u and b/v are already reduced
/// because the lift is unimodular.
pub fn boundary(x: &P1Point, ctx: &LevelContext) -> Result<CuspDivisor> {
    ctx.require_prime()?;
    let fq = &ctx.fq;
    debug_assert!(x.u.gcd(&x.v, fq).is_one() || x.u.is_zero() || x.v.is_zero());
    let infinity_class = |den: &Poly| -> bool { ctx.reduce(den).is_zero() };
    let mut div = CuspDivisor::zero();
    let one = BigRational::one();
    if infinity_class(&x.u) {
        div.at_infinity += &one; // cusp a/u
    } else {
        div.at_zero += &one;
    }
    if infinity_class(&x.v) {
        div.at_infinity -= &one; // cusp b/v
    } else {
        div.at_zero -= &one;
    }
    Ok(div)
}

/// The parabolic subspace: kernel of the boundary map on the solved
/// quotient, described by a rational basis in oracle coordinates.
pub struct ParabolicSubspace {
    pub rank: usize,
    /// Basis vectors, each of length `presentation.rank`.
    pub basis: Vec<Vec<BigRational>>,
}

pub fn parabolic_subspace(
    ctx: &LevelContext,
    pres: &PresentationResult,
) -> Result<ParabolicSubspace> {
    ctx.require_prime()?;
    // boundary of each chosen-basis generator, as a 2 x rank matrix
    let mut rows = vec![Vec::with_capacity(pres.rank), Vec::with_capacity(pres.rank)];
    for &i in &pres.chosen_basis {
        let d = boundary(&pres.generators[i], ctx)?;
        rows[0].push(d.at_zero);
        rows[1].push(d.at_infinity);
    }
    let bmat = QMat::from_rows(rows);
    let kernel = bmat.kernel();
    Ok(ParabolicSubspace { rank: kernel.len(), basis: kernel })
}

/// Boundary of an arbitrary coordinate vector (in the chosen basis).
pub fn boundary_of_coords(
    ctx: &LevelContext,
    pres: &PresentationResult,
    coords: &[BigRational],
) -> Result<CuspDivisor> {
    ctx.require_prime()?;
    let mut total = CuspDivisor::zero();
    for (c, &i) in coords.iter().zip(&pres.chosen_basis) {
        if c.is_zero() {
            continue;
        }
        let d = boundary(&pres.generators[i], ctx)?;
        total.add_scaled(&d, c);
    }
    Ok(total)
}

/// A Z-basis of the full quotient's free lattice, in chosen-basis
/// coordinates scaled by a common denominator: actual lattice vectors are
/// the returned rows divided by `denom`. The lattice is the Z-span of all
/// generator images, which generate the quotient over Z.
pub fn integral_lattice_basis(pres: &PresentationResult) -> (zmat::ZMat, BigInt) {
    let mut denom = BigInt::one();
    for row in &pres.coords {
        for x in row {
            denom = num_integer::Integer::lcm(&denom, x.denom());
        }
    }
    let rows: Vec<Vec<BigInt>> = pres
        .coords
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| x.numer() * (&denom / x.denom()))
                .collect()
        })
        .collect();
    (zmat::row_basis(zmat::ZMat::from_rows(rows)), denom)
}

/// A Z-basis of the integral parabolic sublattice (prime level), returned
/// as rational vectors in chosen-basis coordinates. Kernels of integer
/// matrices are saturated, so this really is the parabolic part of the
/// integral lattice, at any degree parity.
pub fn integral_parabolic_basis(
    ctx: &LevelContext,
    pres: &PresentationResult,
) -> Result<Vec<Vec<BigRational>>> {
    ctx.require_prime()?;
    let (basis, denom) = integral_lattice_basis(pres);
    let bd: Vec<CuspDivisor> = pres
        .chosen_basis
        .iter()
        .map(|&i| boundary(&pres.generators[i], ctx))
        .collect::<Result<_>>()?;
    // integer boundary pairs of each lattice basis row (common factor 1/denom
    // does not change the kernel)
    let mut bd_rows = Vec::with_capacity(basis.rows);
    for i in 0..basis.rows {
        let mut at_zero = BigRational::zero();
        let mut at_inf = BigRational::zero();
        for (j, d) in bd.iter().enumerate() {
            let c = BigRational::from_integer(basis[(i, j)].clone());
            at_zero += &d.at_zero * &c;
            at_inf += &d.at_infinity * &c;
        }
        debug_assert!(at_zero.denom().is_one() && at_inf.denom().is_one());
        bd_rows.push(vec![at_zero.numer().clone(), at_inf.numer().clone()]);
    }
    // left kernel of the (rank x 2) boundary matrix = right kernel of its
    // transpose; SNF column transforms give a saturated Z-basis
    let transpose = zmat::ZMat::from_rows(vec![
        (0..basis.rows).map(|i| bd_rows[i][0].clone()).collect(),
        (0..basis.rows).map(|i| bd_rows[i][1].clone()).collect(),
    ]);
    let snf = zmat::smith_normal_form(transpose);
    let s = snf.diag.len();
    let denom_q = BigRational::from_integer(denom);
    let mut out = Vec::new();
    for j in s..basis.rows {
        let mut vec = vec![BigRational::zero(); pres.rank];
        for i in 0..basis.rows {
            let k = &snf.colv[(i, j)];
            if num_traits::Zero::is_zero(k) {
                continue;
            }
            let kq = BigRational::from_integer(k.clone());
            for (slot, entry) in vec.iter_mut().enumerate() {
                *entry += &kq * BigRational::from_integer(basis[(i, slot)].clone());
            }
        }
        out.push(vec.iter().map(|x| x / &denom_q).collect());
    }
    Ok(out)
}

/// Genus of the Drinfeld modular curve for a prime level of degree d:
/// (q^d - q) / (q^2 - 1) for odd d, (q^d - q^2) / (q^2 - 1) for even d.
pub fn genus(q: u64, d: usize) -> u64 {
    let qd = q.pow(d as u32);
    if d % 2 == 1 {
        (qd - q) / (q * q - 1)
    } else {
        (qd - q * q) / (q * q - 1)
    }
}

/// Order of the Eisenstein quotient of the Hecke algebra at a prime of
/// degree d: (q^d - 1)/(q - 1) for odd d, (q^d - 1)/(q^2 - 1) for even d.
pub fn eisenstein_order(q: u64, d: usize) -> u64 {
    let qd = q.pow(d as u32);
    if d % 2 == 1 {
        (qd - 1) / (q - 1)
    } else {
        (qd - 1) / (q * q - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqField;
    use crate::poly::{first_irreducible, parse_poly};

    fn ctx(q: u32, level: &str) -> LevelContext {
        let fq = FqField::new(q, 1).unwrap();
        let n = parse_poly(level, &fq).unwrap();
        LevelContext::new(fq, n).unwrap()
    }

    #[test]
    fn relation_counts_small_prime() {
        let c = ctx(2, "T^3+T+1");
        let sys = build_relations(&c);
        assert_eq!(sys.generators.len(), 9);
        // q = 2: no diagonal rows at all
        assert!(sys.rows.iter().all(|(k, _)| *k != RelationKind::Diagonal));
        // every row must be killed by the solved coordinates
        let pres = solve_presentation(&c);
        for (_, row) in &sys.rows {
            let mut acc = vec![BigRational::zero(); pres.rank];
            for &(i, coeff) in &row.support {
                for (a, b) in acc.iter_mut().zip(&pres.coords[i]) {
                    *a += b * BigRational::from_integer(BigInt::from(coeff));
                }
            }
            assert!(acc.iter().all(|x| x.is_zero()), "relation row survives");
        }
    }

    #[test]
    fn diagonal_rows_for_q3() {
        let c = ctx(3, "T^3+2*T+1");
        let sys = build_relations(&c);
        let n_diag = sys
            .rows
            .iter()
            .filter(|(k, _)| *k == RelationKind::Diagonal)
            .count();
        assert!(n_diag > 0);
        assert!(n_diag <= sys.generators.len());
    }

    #[test]
    fn quotient_structure_matches_genus_and_torsion() {
        // (q, level, expected rank, expected torsion)
        let cases: Vec<(u32, String, usize, Vec<i64>)> = vec![
            (2, "T^3+T+1".into(), 3, vec![]),   // g = 2, h = 2
            (2, "T^2+T+1".into(), 1, vec![3]),  // d even: torsion q + 1
            (3, "T^3+2*T+1".into(), 4, vec![]), // g = 3
            (3, "T^2+1".into(), 1, vec![4]),
        ];
        for (q, level, rank, torsion) in cases {
            let c = ctx(q, &level);
            let pres = solve_presentation(&c);
            assert_eq!(pres.rank, rank, "rank at q={q} level={level}");
            let got: Vec<i64> = pres.torsion.iter().map(|t| t.try_into().unwrap()).collect();
            assert_eq!(got, torsion, "torsion at q={q} level={level}");
        }
    }

    #[test]
    fn boundary_examples() {
        let c = ctx(2, "T^3+T+1");
        let one_zero = P1Point { u: Poly::one(), v: Poly::zero() };
        let d = boundary(&one_zero, &c).unwrap();
        assert_eq!(d.at_zero, BigRational::one());
        assert_eq!(d.at_infinity, -BigRational::one());

        let zero_one = P1Point { u: Poly::zero(), v: Poly::one() };
        let d = boundary(&zero_one, &c).unwrap();
        assert_eq!(d.at_zero, -BigRational::one());
        assert_eq!(d.at_infinity, BigRational::one());

        // both coordinates nonzero mod P -> parabolic generator
        let x = P1Point { u: Poly::t(), v: Poly::one() };
        assert!(boundary(&x, &c).unwrap().is_zero());

        // boundary factors through the relations
        let pres = solve_presentation(&c);
        for (_, row) in &build_relations(&c).rows {
            let mut acc = CuspDivisor::zero();
            for &(i, coeff) in &row.support {
                let d = boundary(&pres.generators[i], &c).unwrap();
                acc.add_scaled(&d, &BigRational::from_integer(BigInt::from(coeff)));
            }
            assert!(acc.is_zero());
        }
    }

    #[test]
    fn parabolic_ranks_follow_the_genus_formula() {
        for (q, d) in [(2u32, 3usize), (2, 4), (3, 3)] {
            let fq = FqField::new(q, 1).unwrap();
            let level = first_irreducible(d, &fq);
            let c = LevelContext::new(fq, level).unwrap();
            let pres = solve_presentation(&c);
            let para = parabolic_subspace(&c, &pres).unwrap();
            assert_eq!(para.rank as u64, genus(q as u64, d), "q={q} d={d}");
        }
        assert_eq!(genus(2, 3), 2);
        assert_eq!(genus(2, 4), 4);
        assert_eq!(genus(3, 3), 3);
    }

    #[test]
    fn composite_level_has_no_boundary_map() {
        let c = ctx(2, "T^2");
        let pres = solve_presentation(&c);
        assert!(parabolic_subspace(&c, &pres).is_err());
        let x = pres.generators[0].clone();
        assert!(boundary(&x, &c).is_err());
    }

    #[test]
    fn chosen_basis_generators_have_unit_coordinates() {
        let c = ctx(3, "T^3+2*T+1");
        let pres = solve_presentation(&c);
        for (slot, &i) in pres.chosen_basis.iter().enumerate() {
            for (j, x) in pres.coords[i].iter().enumerate() {
                let expected = if j == slot {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                assert_eq!(*x, expected);
            }
        }
    }
}
