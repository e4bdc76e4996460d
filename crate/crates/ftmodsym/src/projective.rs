//! The projective lines P^1(A/n) and the degree-truncated P^1(A).
//!
//! A point of P^1(A/n) is a class (u:v) of pairs coprime to n, two pairs
//! being equivalent when they differ by a unit of A/n. Canonical forms:
//!
//! * prime level P: (u:v) = (u v^-1 mod P : 1) when v is invertible,
//!   (1:0) otherwise;
//! * composite level: the minimum, over units w of A/n, of the pair
//!   (wu mod n, wv mod n) in the global (degree, coefficients) order.
//!
//! A point of P^1(A) is a class [u:v] of coprime pairs up to Fq^x; the
//! canonical representative has u monic, or is (0, 1). The truncations
//! P^1(A)_e (both degrees <= e) biject with P^1(A/P) for prime P when e is
//! maximal: e = (d-1)/2 for odd d = deg P, and the asymmetric set P_e
//! (deg u <= e, deg v <= e-1) for even d, e = d/2. The lift of a residue
//! class to its small representative is rational reconstruction.

use crate::error::{Error, Result};
use crate::field::FqField;
use crate::poly::{
    enumerate_all_deg_le, enumerate_monic, inv_mod, is_irreducible, rational_reconstruct, Degree,
    Poly,
};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// A level n = (N) with its coefficient field; N monic of degree >= 1.
#[derive(Clone, Debug)]
pub struct LevelContext {
    pub fq: FqField,
    pub modulus: Poly,
    pub degree: usize,
    pub prime: bool,
}

impl LevelContext {
    pub fn new(fq: FqField, modulus: Poly) -> Result<LevelContext> {
        if modulus.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        if !modulus.is_monic() {
            return Err(Error::NotMonic(crate::poly::format_poly(&modulus)));
        }
        let degree = match modulus.deg() {
            Degree::Finite(d) if d >= 1 => d,
            _ => return Err(Error::LevelDegreeTooSmall(1)),
        };
        let prime = is_irreducible(&modulus, &fq)?;
        Ok(LevelContext { fq, modulus, degree, prime })
    }

    pub fn require_prime(&self) -> Result<()> {
        if self.prime {
            Ok(())
        } else {
            Err(Error::NotPrimeLevel)
        }
    }

    pub fn require_odd_prime(&self) -> Result<()> {
        self.require_prime()?;
        if self.degree.is_multiple_of(2) {
            return Err(Error::EvenDegreeLevel);
        }
        Ok(())
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        p.rem(&self.modulus, &self.fq).unwrap()
    }

    /// The units of A/n (for prime levels this is every nonzero residue).
    pub fn units(&self) -> Vec<Poly> {
        enumerate_all_deg_le(self.degree - 1, &self.fq)
            .into_iter()
            .filter(|w| !w.is_zero() && w.gcd(&self.modulus, &self.fq).is_one())
            .collect()
    }
}

/// Canonical point of P^1(A/n).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct P1Point {
    pub u: Poly,
    pub v: Poly,
}

impl PartialOrd for P1Point {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for P1Point {
    fn cmp(&self, other: &Self) -> Ordering {
        pair_key(&self.u, &self.v).cmp(&pair_key(&other.u, &other.v))
    }
}

fn pair_key<'a>(u: &'a Poly, v: &'a Poly) -> (Degree, Degree, &'a Poly, &'a Poly) {
    (u.deg(), v.deg(), u, v)
}

impl fmt::Display for P1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}:{})",
            crate::poly::format_poly(&self.u),
            crate::poly::format_poly(&self.v)
        )
    }
}

/// Normalized point [u:v] of P^1(A): coprime, u monic or (u, v) = (0, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct P1APoint {
    pub u: Poly,
    pub v: Poly,
}

impl PartialOrd for P1APoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for P1APoint {
    fn cmp(&self, other: &Self) -> Ordering {
        pair_key(&self.u, &self.v).cmp(&pair_key(&other.u, &other.v))
    }
}

impl fmt::Display for P1APoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}:{})",
            crate::poly::format_poly(&self.u),
            crate::poly::format_poly(&self.v)
        )
    }
}

impl P1APoint {
    /// Normalize a coprime pair by the unit making u monic (v monic if u = 0).
    pub fn new(u: Poly, v: Poly, fq: &FqField) -> P1APoint {
        if u.is_zero() {
            return P1APoint { u, v: v.monic(fq) };
        }
        let c = fq.inv(u.lc());
        P1APoint { u: u.scale(c, fq), v: v.scale(c, fq) }
    }
}

/// 2x2 matrix over A, acting on points on the right:
/// (u:v) * M = (a u + c v : b u + d v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mat2 {
    pub a: Poly,
    pub b: Poly,
    pub c: Poly,
    pub d: Poly,
}

impl Mat2 {
    pub fn new(a: Poly, b: Poly, c: Poly, d: Poly) -> Mat2 {
        Mat2 { a, b, c, d }
    }

    pub fn identity() -> Mat2 {
        Mat2::new(Poly::one(), Poly::zero(), Poly::zero(), Poly::one())
    }

    /// sigma = (0 1; -1 0), the two-term relation matrix.
    pub fn sigma(fq: &FqField) -> Mat2 {
        Mat2::new(
            Poly::zero(),
            Poly::one(),
            Poly::constant(fq.neg(1)),
            Poly::zero(),
        )
    }

    /// tau = (0 -1; 1 -1), the three-term relation matrix.
    pub fn tau(fq: &FqField) -> Mat2 {
        Mat2::new(
            Poly::zero(),
            Poly::constant(fq.neg(1)),
            Poly::one(),
            Poly::constant(fq.neg(1)),
        )
    }

    /// delta_lambda = (lambda 0; 0 1), the diagonal relation matrices.
    pub fn delta(lambda: u32) -> Mat2 {
        Mat2::new(Poly::constant(lambda), Poly::zero(), Poly::zero(), Poly::one())
    }

    pub fn det(&self, fq: &FqField) -> Poly {
        self.a.mul(&self.d, fq).sub(&self.b.mul(&self.c, fq), fq)
    }

    /// Apply on the right to a raw pair: (u, v) -> (au + cv, bu + dv).
    pub fn apply_pair(&self, u: &Poly, v: &Poly, fq: &FqField) -> (Poly, Poly) {
        (
            self.a.mul(u, fq).add(&self.c.mul(v, fq), fq),
            self.b.mul(u, fq).add(&self.d.mul(v, fq), fq),
        )
    }
}

/// Canonical form of (u:v) in P^1(A/n). Errors when (u, v, n) fail the
/// coprimality required for the point to exist.
pub fn p1_normalize(u: &Poly, v: &Poly, ctx: &LevelContext) -> Result<P1Point> {
    let fq = &ctx.fq;
    let ur = ctx.reduce(u);
    let vr = ctx.reduce(v);
    let pair_gcd = if ur.is_zero() && vr.is_zero() {
        Poly::zero()
    } else {
        ur.gcd(&vr, fq)
    };
    let ok = if pair_gcd.is_zero() {
        false
    } else {
        pair_gcd.gcd(&ctx.modulus, fq).is_one()
    };
    if !ok {
        return Err(Error::NotCoprimeToLevel(
            crate::poly::format_poly(u),
            crate::poly::format_poly(v),
        ));
    }
    if ctx.prime {
        // fast path: v invertible -> (u/v : 1), else (1 : 0)
        if vr.is_zero() {
            return Ok(P1Point { u: Poly::one(), v: Poly::zero() });
        }
        let vinv = inv_mod(&vr, &ctx.modulus, fq).expect("nonzero residue mod a prime");
        let w = ctx.reduce(&ur.mul(&vinv, fq));
        return Ok(P1Point { u: w, v: Poly::one() });
    }
    // composite: minimize (wu, wv) over units w in the global pair order
    let mut best: Option<(Poly, Poly)> = None;
    for w in ctx.units() {
        let cu = ctx.reduce(&ur.mul(&w, fq));
        let cv = ctx.reduce(&vr.mul(&w, fq));
        let better = match &best {
            None => true,
            Some((bu, bv)) => pair_key(&cu, &cv) < pair_key(bu, bv),
        };
        if better {
            best = Some((cu, cv));
        }
    }
    let (u, v) = best.expect("unit group is nonempty");
    Ok(P1Point { u, v })
}

/// All points of P^1(A/n), each exactly once, in the global order.
/// For prime P of degree d the count is q^d + 1.
pub fn p1_enumerate(ctx: &LevelContext) -> Vec<P1Point> {
    let mut points = BTreeSet::new();
    if ctx.prime {
        points.insert(P1Point { u: Poly::one(), v: Poly::zero() });
        for w in enumerate_all_deg_le(ctx.degree - 1, &ctx.fq) {
            points.insert(P1Point { u: w, v: Poly::one() });
        }
    } else {
        let residues = enumerate_all_deg_le(ctx.degree - 1, &ctx.fq);
        for u in &residues {
            for v in &residues {
                if let Ok(pt) = p1_normalize(u, v, ctx) {
                    points.insert(pt);
                }
            }
        }
    }
    points.into_iter().collect()
}

/// Right action of an A-matrix on a point; None when the image pair is not
/// coprime to the level (the partial cases a Hecke sum skips).
pub fn p1_act(x: &P1Point, m: &Mat2, ctx: &LevelContext) -> Option<P1Point> {
    let (nu, nv) = m.apply_pair(&x.u, &x.v, &ctx.fq);
    p1_normalize(&nu, &nv, ctx).ok()
}

/// The truncated projective line P^1(A)_e: both degrees <= e.
/// |P^1(A)_e| = q^(2e+1) + 1.
pub fn p1a_truncated_enumerate(e: usize, fq: &FqField) -> Vec<P1APoint> {
    let mut out = vec![P1APoint { u: Poly::zero(), v: Poly::one() }];
    for du in 0..=e {
        for u in enumerate_monic(du, fq).unwrap() {
            for v in enumerate_all_deg_le(e, fq) {
                let coprime = if v.is_zero() {
                    u.is_one()
                } else {
                    u.gcd(&v, fq).is_one()
                };
                if coprime {
                    out.push(P1APoint { u: u.clone(), v });
                }
            }
        }
    }
    out.sort();
    out
}

/// C_k: points of P^1(A)_k with max(deg u, deg v) = k.
pub fn c_k(k: usize, fq: &FqField) -> Vec<P1APoint> {
    p1a_truncated_enumerate(k, fq)
        .into_iter()
        .filter(|p| p.u.deg() == Degree::Finite(k) || p.v.deg() == Degree::Finite(k))
        .collect()
}

/// The three-way split of C_k by degree comparison, plus the leading
/// coefficient split of the equal-degree part:
/// D^> (deg u = k > deg v), D^< (deg u < deg v = k), D^= (both k),
/// D_dot (lc u + lc v = 0), D^dot (lc u + lc v != 0).
pub struct DegreeSplit {
    pub d_gt: Vec<P1APoint>,
    pub d_lt: Vec<P1APoint>,
    pub d_eq: Vec<P1APoint>,
    pub d_balanced: Vec<P1APoint>,
    pub d_unbalanced: Vec<P1APoint>,
}

pub fn degree_split(k: usize, fq: &FqField) -> DegreeSplit {
    let mut split = DegreeSplit {
        d_gt: Vec::new(),
        d_lt: Vec::new(),
        d_eq: Vec::new(),
        d_balanced: Vec::new(),
        d_unbalanced: Vec::new(),
    };
    for p in c_k(k, fq) {
        let du = p.u.deg();
        let dv = p.v.deg();
        if du > dv {
            split.d_gt.push(p);
        } else if du < dv {
            split.d_lt.push(p);
        } else {
            if fq.add(p.u.lc(), p.v.lc()) == 0 {
                split.d_balanced.push(p.clone());
            } else {
                split.d_unbalanced.push(p.clone());
            }
            split.d_eq.push(p);
        }
    }
    split
}

/// D^{>+}: representatives in D^> with u monic and v monic or zero. These
/// index a basis of the degree-k block; there are q^(2k-1) of them for
/// k >= 1, and just [1:0] for k = 0.
pub fn d_gt_plus(k: usize, fq: &FqField) -> Vec<P1APoint> {
    if k == 0 {
        return vec![P1APoint { u: Poly::one(), v: Poly::zero() }];
    }
    let mut out = Vec::new();
    for u in enumerate_monic(k, fq).unwrap() {
        for dv in 0..k {
            for v in enumerate_monic(dv, fq).unwrap() {
                if u.gcd(&v, fq).is_one() {
                    out.push(P1APoint { u: u.clone(), v });
                }
            }
        }
    }
    out.sort();
    out
}

/// P_e = { [u:v] in P^1(A)_e : deg v <= e-1 }, the even-degree small set;
/// for prime P of degree 2e it bijects with P^1(A/P) and has q^(2e)+1
/// elements. S_e is its top layer deg u = e.
pub fn p_e(e: usize, fq: &FqField) -> Vec<P1APoint> {
    p1a_truncated_enumerate(e, fq)
        .into_iter()
        .filter(|p| p.v.deg() < Degree::Finite(e))
        .collect()
}

pub fn s_e(e: usize, fq: &FqField) -> Vec<P1APoint> {
    p_e(e, fq)
        .into_iter()
        .filter(|p| p.u.deg() == Degree::Finite(e))
        .collect()
}

/// N_{i,j}: monic coprime pairs with deg u = i, deg v = j. Closed form
/// (q-1) q^(i+j-1) when both degrees are positive, q^max(i,j) otherwise.
pub fn count_coprime(i: usize, j: usize, fq: &FqField) -> u64 {
    let q = fq.q as u64;
    if i.min(j) > 0 {
        (q - 1) * q.pow((i + j - 1) as u32)
    } else {
        q.pow(i.max(j) as u32)
    }
}

/// Act on a P^1(A) point by a unimodular matrix over A (total whenever the
/// image pair is nonzero coprime, which unimodular matrices preserve).
pub fn p1a_act(x: &P1APoint, m: &Mat2, fq: &FqField) -> P1APoint {
    let (nu, nv) = m.apply_pair(&x.u, &x.v, fq);
    P1APoint::new(nu, nv, fq)
}

/// Lift a residue-class point to its unique small representative:
/// in P^1(A)_{(d-1)/2} for odd d, in P_{d/2} for even d. Reconstruction
/// first, exhaustive search as the built-in fallback oracle.
pub fn lift_small(x: &P1Point, ctx: &LevelContext) -> Result<P1APoint> {
    ctx.require_prime()?;
    let fq = &ctx.fq;
    let d = ctx.degree;
    if x.v.is_zero() {
        return Ok(P1APoint { u: Poly::one(), v: Poly::zero() });
    }
    let (num_bound, den_bound) = if d % 2 == 1 {
        ((d - 1) / 2, (d - 1) / 2)
    } else {
        (d / 2, d / 2 - 1)
    };
    // x is canonical (w : 1); reconstruct w = u/v with bounded degrees
    let w = ctx.reduce(&x.u.mul(&inv_mod(&x.v, &ctx.modulus, fq).unwrap(), fq));
    if let Some((u, v)) = rational_reconstruct(&w, &ctx.modulus, num_bound, den_bound, fq)? {
        return Ok(P1APoint::new(u, v, fq));
    }
    // fallback: exhaustive scan of the truncated set
    let candidates = if d % 2 == 1 {
        p1a_truncated_enumerate(num_bound, fq)
    } else {
        p_e(num_bound, fq)
    };
    for cand in candidates {
        if p1_normalize(&cand.u, &cand.v, ctx)? == *x {
            return Ok(cand);
        }
    }
    unreachable!("truncated projective line surjects onto P^1(A/P)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn ctx(q: u32, level: &str) -> LevelContext {
        let fq = FqField::new(q, 1).unwrap();
        let n = parse_poly(level, &fq).unwrap();
        LevelContext::new(fq, n).unwrap()
    }

    fn pt(ctx: &LevelContext, u: &str, v: &str) -> P1Point {
        p1_normalize(
            &parse_poly(u, &ctx.fq).unwrap(),
            &parse_poly(v, &ctx.fq).unwrap(),
            ctx,
        )
        .unwrap()
    }

    #[test]
    fn normalize_prime_fast_path() {
        let c = ctx(2, "T^3+T+1");
        // v = T^2 invertible: class determined by cross-multiplication
        let x = pt(&c, "T^2+T", "T^2");
        assert_eq!(x.v, Poly::one());
        // (u1:v1) = (u2:v2) iff u1 v2 = u2 v1 mod P
        let lhs = c.reduce(&x.u.mul(&parse_poly("T^2", &c.fq).unwrap(), &c.fq));
        let rhs = c.reduce(&parse_poly("T^2+T", &c.fq).unwrap());
        assert_eq!(lhs, rhs);

        assert_eq!(pt(&c, "1", "0"), P1Point { u: Poly::one(), v: Poly::zero() });
        assert_eq!(pt(&c, "T^3+T", "0"), P1Point { u: Poly::one(), v: Poly::zero() });
        assert!(p1_normalize(&Poly::zero(), &Poly::zero(), &c).is_err());
    }

    #[test]
    fn normalize_unit_invariance() {
        for c in [ctx(3, "T^3+2*T+1"), ctx(3, "T^2"), ctx(2, "T^2+T")] {
            let pts = p1_enumerate(&c);
            for x in &pts {
                for w in c.units() {
                    let wu = x.u.mul(&w, &c.fq);
                    let wv = x.v.mul(&w, &c.fq);
                    assert_eq!(&p1_normalize(&wu, &wv, &c).unwrap(), x);
                }
                // idempotent
                assert_eq!(&p1_normalize(&x.u, &x.v, &c).unwrap(), x);
            }
        }
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(p1_enumerate(&ctx(2, "T^3+T+1")).len(), 9);
        assert_eq!(p1_enumerate(&ctx(3, "T^2+1")).len(), 10);
        // composite: count by brute-force dedup is what p1_enumerate does
        let c = ctx(2, "T^2");
        let pts = p1_enumerate(&c);
        assert_eq!(pts.len(), 6);
        let set: BTreeSet<_> = pts.iter().collect();
        assert_eq!(set.len(), pts.len());
    }

    #[test]
    fn action_examples() {
        let c = ctx(2, "T^3+T+1");
        let x = pt(&c, "T", "1");
        assert_eq!(p1_act(&x, &Mat2::identity(), &c).unwrap(), x);

        // sigma twice is projectively the identity; tau three times too
        let sigma = Mat2::sigma(&c.fq);
        let tau = Mat2::tau(&c.fq);
        for x in p1_enumerate(&c) {
            let s2 = p1_act(&p1_act(&x, &sigma, &c).unwrap(), &sigma, &c).unwrap();
            assert_eq!(s2, x);
            let t3 = p1_act(
                &p1_act(&p1_act(&x, &tau, &c).unwrap(), &tau, &c).unwrap(),
                &tau,
                &c,
            )
            .unwrap();
            assert_eq!(t3, x);
        }

        let zero_one = pt(&c, "0", "1");
        let m = Mat2::new(Poly::t(), Poly::zero(), Poly::zero(), Poly::one());
        assert_eq!(p1_act(&zero_one, &m, &c).unwrap(), zero_one);
    }

    #[test]
    fn truncated_counts_and_splits() {
        let f2 = FqField::new(2, 1).unwrap();
        let f3 = FqField::new(3, 1).unwrap();
        assert_eq!(p1a_truncated_enumerate(1, &f2).len(), 9); // 2^3 + 1
        assert_eq!(p1a_truncated_enumerate(2, &f3).len(), 3usize.pow(5) + 1);

        // k = 0 landmarks
        let split0 = degree_split(0, &f2);
        assert_eq!(split0.d_gt, vec![P1APoint { u: Poly::one(), v: Poly::zero() }]);
        assert_eq!(
            split0.d_balanced,
            vec![P1APoint { u: Poly::one(), v: Poly::constant(1) }]
        );
        assert_eq!(d_gt_plus(0, &f2), split0.d_gt);

        // |D^{>+}| = q^{2k-1}
        assert_eq!(d_gt_plus(2, &f3).len(), 27);
        assert_eq!(d_gt_plus(1, &f2).len(), 2);

        // C_k partitions
        for (fq, k) in [(&f2, 2usize), (&f3, 1), (&f3, 2)] {
            let split = degree_split(k, fq);
            let total = c_k(k, fq).len();
            assert_eq!(
                split.d_gt.len() + split.d_lt.len() + split.d_eq.len(),
                total
            );
            assert_eq!(
                split.d_balanced.len() + split.d_unbalanced.len(),
                split.d_eq.len()
            );
        }
    }

    #[test]
    fn tau_cycles_the_degree_split() {
        // tau maps D_dot -> D^>, D^> -> D^<, D^< -> D_dot; sigma swaps D^>, D^<
        for q in [2u32, 3] {
            let fq = FqField::new(q, 1).unwrap();
            let tau = Mat2::tau(&fq);
            let sigma = Mat2::sigma(&fq);
            for k in 0..3usize {
                let split = degree_split(k, &fq);
                let image = |set: &[P1APoint], m: &Mat2| -> BTreeSet<P1APoint> {
                    set.iter().map(|x| p1a_act(x, m, &fq)).collect()
                };
                let as_set = |v: &[P1APoint]| -> BTreeSet<P1APoint> { v.iter().cloned().collect() };
                assert_eq!(image(&split.d_balanced, &tau), as_set(&split.d_gt));
                assert_eq!(image(&split.d_gt, &tau), as_set(&split.d_lt));
                assert_eq!(image(&split.d_lt, &tau), as_set(&split.d_balanced));
                assert_eq!(image(&split.d_gt, &sigma), as_set(&split.d_lt));
                // sigma, tau and diagonals stabilize P^1(A)_e as a set
                let full = as_set(&p1a_truncated_enumerate(k, &fq));
                let full_vec: Vec<P1APoint> = full.iter().cloned().collect();
                assert_eq!(image(&full_vec, &sigma), full);
                assert_eq!(image(&full_vec, &tau), full);
                for lambda in fq.units() {
                    assert_eq!(image(&full_vec, &Mat2::delta(lambda)), full);
                }
            }
        }
    }

    #[test]
    fn coprime_counts_match_brute_force() {
        for q in [2u32, 3] {
            let fq = FqField::new(q, 1).unwrap();
            for i in 0..=6usize {
                for j in 0..=(6 - i) {
                    let mut brute = 0u64;
                    for u in enumerate_monic(i, &fq).unwrap() {
                        for v in enumerate_monic(j, &fq).unwrap() {
                            if u.gcd(&v, &fq).is_one() {
                                brute += 1;
                            }
                        }
                    }
                    assert_eq!(count_coprime(i, j, &fq), brute, "q={q} i={i} j={j}");
                }
            }
        }
        let f3 = FqField::new(3, 1).unwrap();
        assert_eq!(count_coprime(1, 1, &FqField::new(2, 1).unwrap()), 2);
        assert_eq!(count_coprime(0, 3, &f3), 27);
    }

    #[test]
    fn lift_small_round_trips_odd_degree() {
        let c = ctx(2, "T^3+T+1");
        let points = p1_enumerate(&c);
        let truncated = p1a_truncated_enumerate(1, &c.fq);
        assert_eq!(points.len(), truncated.len());
        let mut seen = BTreeSet::new();
        for x in &points {
            let lifted = lift_small(x, &c).unwrap();
            assert!(truncated.contains(&lifted));
            assert_eq!(&p1_normalize(&lifted.u, &lifted.v, &c).unwrap(), x);
            seen.insert(lifted);
        }
        assert_eq!(seen.len(), points.len()); // bijection
    }

    #[test]
    fn lift_small_even_degree_lands_in_p_e() {
        let c = ctx(2, "T^4+T+1");
        let target = p_e(2, &c.fq);
        assert_eq!(target.len(), 17); // q^(2e) + 1
        let mut seen = BTreeSet::new();
        for x in p1_enumerate(&c) {
            let lifted = lift_small(&x, &c).unwrap();
            assert!(target.contains(&lifted), "{lifted} outside P_e");
            assert_eq!(p1_normalize(&lifted.u, &lifted.v, &c).unwrap(), x);
            seen.insert(lifted);
        }
        assert_eq!(seen.len(), 17);
        assert_eq!(
            lift_small(&pt(&c, "1", "0"), &c).unwrap(),
            P1APoint { u: Poly::one(), v: Poly::zero() }
        );
    }

    #[test]
    fn p_e_partitions_as_lower_truncation_plus_top_layer() {
        for (q, e) in [(2u32, 2usize), (3, 1), (3, 2)] {
            let fq = FqField::new(q, 1).unwrap();
            let p = p_e(e, &fq);
            let lower: BTreeSet<P1APoint> =
                p1a_truncated_enumerate(e - 1, &fq).into_iter().collect();
            let top: BTreeSet<P1APoint> = s_e(e, &fq).into_iter().collect();
            assert!(lower.is_disjoint(&top));
            let union: BTreeSet<P1APoint> = lower.union(&top).cloned().collect();
            let p_set: BTreeSet<P1APoint> = p.into_iter().collect();
            assert_eq!(p_set, union, "q={q} e={e}");
        }
    }

    #[test]
    fn lift_requires_prime_level() {
        let c = ctx(2, "T^2");
        let x = p1_enumerate(&c)[0].clone();
        assert!(matches!(lift_small(&x, &c), Err(Error::NotPrimeLevel)));
    }
}
