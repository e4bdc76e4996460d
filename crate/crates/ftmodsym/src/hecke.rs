//! Hecke operators on Manin-Teitelbaum symbols.
//!
//! Two independent routes compute the same operator:
//!
//! * the finite matrix set S_m of all (a b; c d) over A with deg a > deg b,
//!   deg d > deg c, a and d monic and determinant the monic generator of m,
//!   acting pointwise on generators (this is the analogue of Heilbronn
//!   matrices and never references the level);
//! * the triangular coset definition T_m [r,s] = sum [(a b; 0 d) r,
//!   (a b; 0 d) s] over monic a d = m with a coprime to the level and
//!   deg b < deg d, expanded through the continued-fraction trick.
//!
//! Cross-validating the two in oracle coordinates is one of the acceptance
//! gates. Matrices act on column coordinate vectors and column j holds the
//! image of basis element j; printed matrices elsewhere sometimes use the
//! transpose convention, so characteristic polynomials are the
//! convention-free comparison.

use crate::error::{Error, Result};
use crate::explicit_basis::{basis_enumerate, rewrite_sum, ExplicitBasis};
use crate::linalg::{qmat::QMat, zmat};
use crate::poly::{enumerate_all_deg_le, enumerate_monic, format_poly, is_irreducible, xgcd, Poly};
use crate::presentation::{genus, PresentationResult};
use crate::projective::{p1_act, p1_normalize, LevelContext, Mat2, P1Point};
use crate::symbols::{xi_path, Cusp, FormalSum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::sync::Arc;

/// The matrix set implementing T_m on generators.
pub struct HeilbronnSet {
    pub modulus: Poly,
    pub matrices: Vec<Mat2>,
}

/// Enumerate S_m: loop over monic (a, d) with complementary degrees and
/// factor ad - m as bc by scanning b below deg a.
pub fn heilbronn_enumerate(m: &Poly, fq: &crate::field::FqField) -> Result<HeilbronnSet> {
    if m.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    if !m.is_monic() {
        return Err(Error::NotMonic(format_poly(m)));
    }
    let deg_m = m.deg().finite().unwrap_or(0);
    let mut matrices = Vec::new();
    for da in 0..=deg_m {
        let dd = deg_m - da;
        for a in enumerate_monic(da, fq)? {
            for d in enumerate_monic(dd, fq)? {
                let excess = a.mul(&d, fq).sub(m, fq);
                if excess.is_zero() {
                    // bc = 0: either b = 0 (c free) or c = 0 (b free)
                    if da > 0 {
                        for b in enumerate_all_deg_le(da - 1, fq) {
                            if b.is_zero() {
                                continue;
                            }
                            matrices.push(Mat2::new(a.clone(), b, Poly::zero(), d.clone()));
                        }
                    }
                    let cs = if dd > 0 {
                        enumerate_all_deg_le(dd - 1, fq)
                    } else {
                        vec![Poly::zero()]
                    };
                    for c in cs {
                        matrices.push(Mat2::new(a.clone(), Poly::zero(), c, d.clone()));
                    }
                } else {
                    if da == 0 {
                        continue; // need deg b < 0, impossible for bc != 0
                    }
                    for b in enumerate_all_deg_le(da - 1, fq) {
                        if b.is_zero() {
                            continue;
                        }
                        if !excess.divisible_by(&b, fq) {
                            continue;
                        }
                        let c = excess.divmod(&b, fq)?.0;
                        if c.deg() < d.deg() {
                            matrices.push(Mat2::new(a.clone(), b.clone(), c, d.clone()));
                        }
                    }
                }
            }
        }
    }
    matrices.sort_by(|x, y| {
        (&x.a, &x.b, &x.c, &x.d).cmp(&(&y.a, &y.b, &y.c, &y.d))
    });
    matrices.dedup();
    Ok(HeilbronnSet { modulus: m.clone(), matrices })
}

/// T_m applied to one generator: the sum of x M over S_m, restricted to the
/// matrices whose image is defined at this level.
pub fn hecke_on_generator(x: &P1Point, m: &Poly, ctx: &LevelContext) -> Result<FormalSum> {
    let set = heilbronn_enumerate(m, &ctx.fq)?;
    let mut sum = FormalSum::new();
    for mat in &set.matrices {
        if let Some(y) = p1_act(x, mat, ctx) {
            sum.add_term(y, BigRational::one());
        }
    }
    Ok(sum)
}

/// An ordered coordinate system on (a subspace of) the symbol space.
///
/// Two backings: the explicit odd-degree basis (coordinates by rewriting)
/// and an oracle-certified family (coordinates by solving against oracle
/// coordinates). Either way, `points` lists the defining generators.
pub enum SymbolBasis {
    Explicit {
        basis: ExplicitBasis,
        parabolic: bool,
    },
    OracleFamily {
        pres: Arc<PresentationResult>,
        family: Vec<P1Point>,
        /// Coprime polynomial representatives of the family members.
        rep_pairs: Vec<(Poly, Poly)>,
        /// rank x |family| matrix whose columns are oracle coordinates.
        columns: QMat,
        label: String,
    },
}

impl SymbolBasis {
    pub fn explicit(ctx: &LevelContext) -> Result<SymbolBasis> {
        Ok(SymbolBasis::Explicit { basis: basis_enumerate(ctx)?, parabolic: false })
    }

    pub fn explicit_parabolic(ctx: &LevelContext) -> Result<SymbolBasis> {
        Ok(SymbolBasis::Explicit { basis: basis_enumerate(ctx)?, parabolic: true })
    }

    /// The oracle's own free-part basis (works at any level).
    pub fn oracle_full(ctx: &LevelContext, pres: Arc<PresentationResult>) -> SymbolBasis {
        let family: Vec<P1Point> = pres
            .chosen_basis
            .iter()
            .map(|&i| pres.generators[i].clone())
            .collect();
        SymbolBasis::from_family(ctx, pres, family, "oracle".into())
            .expect("chosen basis is independent")
    }

    /// A caller-declared family of generators, certified independent.
    pub fn from_family(
        ctx: &LevelContext,
        pres: Arc<PresentationResult>,
        family: Vec<P1Point>,
        label: String,
    ) -> Result<SymbolBasis> {
        let columns = QMat::from_columns(
            family.iter().map(|p| pres.coords_of(p).to_vec()).collect(),
        );
        if columns.rank() != family.len() {
            return Err(Error::BasisMismatch(
                "declared family is linearly dependent".into(),
            ));
        }
        let rep_pairs = family.iter().map(|p| coprime_pair(p, &ctx.fq)).collect();
        Ok(SymbolBasis::OracleFamily { pres, family, rep_pairs, columns, label })
    }

    pub fn len(&self) -> usize {
        match self {
            SymbolBasis::Explicit { basis, parabolic } => {
                basis.len() - usize::from(*parabolic)
            }
            SymbolBasis::OracleFamily { family, .. } => family.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn label(&self) -> String {
        match self {
            SymbolBasis::Explicit { parabolic: false, .. } => "explicit".into(),
            SymbolBasis::Explicit { parabolic: true, .. } => "explicit-parabolic".into(),
            SymbolBasis::OracleFamily { label, .. } => label.clone(),
        }
    }

    /// The defining coprime pairs, in order.
    pub fn pairs(&self) -> Vec<(Poly, Poly)> {
        match self {
            SymbolBasis::Explicit { basis, parabolic } => basis.elements
                [usize::from(*parabolic)..]
                .iter()
                .map(|p| (p.u.clone(), p.v.clone()))
                .collect(),
            SymbolBasis::OracleFamily { rep_pairs, .. } => rep_pairs.clone(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        self.pairs()
            .iter()
            .map(|(u, v)| format!("({}:{})", format_poly(u), format_poly(v)))
            .collect()
    }

    pub fn points(&self, ctx: &LevelContext) -> Result<Vec<P1Point>> {
        self.pairs()
            .iter()
            .map(|(u, v)| p1_normalize(u, v, ctx))
            .collect()
    }

    /// Coordinates of a formal sum; `BasisMismatch` when the sum leaves the
    /// declared subspace.
    pub fn coords_sum(&self, f: &FormalSum, ctx: &LevelContext) -> Result<Vec<BigRational>> {
        match self {
            SymbolBasis::Explicit { basis, parabolic } => {
                let full = rewrite_sum(f, ctx, basis)?;
                if *parabolic {
                    if !full[0].is_zero() {
                        return Err(Error::BasisMismatch(
                            "sum has a nonzero non-parabolic component".into(),
                        ));
                    }
                    Ok(full[1..].to_vec())
                } else {
                    Ok(full)
                }
            }
            SymbolBasis::OracleFamily { pres, columns, .. } => {
                let target = f.oracle_coords(pres);
                columns.solve(&target).ok_or_else(|| {
                    Error::BasisMismatch("sum lies outside the span of the family".into())
                })
            }
        }
    }
}

/// Coprime polynomial representative of a point. Canonical pairs at
/// composite levels can share a factor (necessarily a unit modulo the
/// level); dividing it out does not change the class.
fn coprime_pair(p: &P1Point, fq: &crate::field::FqField) -> (Poly, Poly) {
    if p.u.is_zero() || p.v.is_zero() {
        return (p.u.clone(), p.v.clone());
    }
    let g = p.u.gcd(&p.v, fq);
    if g.is_one() {
        (p.u.clone(), p.v.clone())
    } else {
        (
            p.u.divmod(&g, fq).unwrap().0,
            p.v.divmod(&g, fq).unwrap().0,
        )
    }
}

/// Exact operator matrix over a declared ordered basis; columns are images.
pub struct OperatorMatrix {
    pub label: String,
    pub basis_labels: Vec<String>,
    pub mat: QMat,
}

impl OperatorMatrix {
    pub fn charpoly(&self) -> Vec<BigRational> {
        self.mat.charpoly()
    }

    /// Entries as integers; None when some entry is not integral.
    pub fn integer_entries(&self) -> Option<Vec<BigInt>> {
        let mut out = Vec::with_capacity(self.mat.rows * self.mat.cols);
        for i in 0..self.mat.rows {
            for j in 0..self.mat.cols {
                let x = &self.mat[(i, j)];
                if !x.denom().is_one() {
                    return None;
                }
                out.push(x.numer().clone());
            }
        }
        Some(out)
    }
}

/// Matrix of T_m in the declared basis, columns = images via the S_m route.
/// Columns are independent and computed in parallel; assembly order is by
/// column index, so the result is deterministic.
pub fn hecke_matrix(m: &Poly, ctx: &LevelContext, basis: &SymbolBasis) -> Result<OperatorMatrix> {
    let points = basis.points(ctx)?;
    let set = heilbronn_enumerate(m, &ctx.fq)?;
    let columns: Result<Vec<Vec<BigRational>>> = points
        .par_iter()
        .map(|x| {
            let mut sum = FormalSum::new();
            for mat in &set.matrices {
                if let Some(y) = p1_act(x, mat, ctx) {
                    sum.add_term(y, BigRational::one());
                }
            }
            basis.coords_sum(&sum, ctx)
        })
        .collect();
    Ok(OperatorMatrix {
        label: format!("T_({})", format_poly(m)),
        basis_labels: basis.labels(),
        mat: QMat::from_columns(columns?),
    })
}

/// eta_m = T_m - (q^deg m + 1).
pub fn eta_matrix(m: &Poly, ctx: &LevelContext, basis: &SymbolBasis) -> Result<OperatorMatrix> {
    let t = hecke_matrix(m, ctx, basis)?;
    let scalar = BigRational::from_integer(eisenstein_eigenvalue(&ctx.fq, m));
    let id = QMat::identity(t.mat.rows);
    Ok(OperatorMatrix {
        label: format!("eta_({})", format_poly(m)),
        basis_labels: t.basis_labels,
        mat: t.mat.sub(&id.scale(&scalar)),
    })
}

/// q^deg m + 1, the Hecke eigenvalue on the Eisenstein line.
pub fn eisenstein_eigenvalue(fq: &crate::field::FqField, m: &Poly) -> BigInt {
    let d = m.deg().finite().expect("nonzero ideal");
    BigInt::from(fq.q).pow(d as u32) + 1
}

/// T_m on a cusp path via the triangular coset definition; independent of
/// the S_m machinery.
pub fn hecke_via_definition(
    m: &Poly,
    r: &Cusp,
    s: &Cusp,
    ctx: &LevelContext,
) -> Result<FormalSum> {
    if m.is_zero() {
        return Err(Error::ZeroIdeal);
    }
    if !m.is_monic() {
        return Err(Error::NotMonic(format_poly(m)));
    }
    let fq = &ctx.fq;
    let deg_m = m.deg().finite().unwrap();
    let mut total = FormalSum::new();
    for da in 0..=deg_m {
        for a in enumerate_monic(da, fq)? {
            if !m.divisible_by(&a, fq) {
                continue;
            }
            if !a.gcd(&ctx.modulus, fq).is_one() {
                continue; // (a) + n = A required
            }
            let d = m.divmod(&a, fq)?.0;
            let dd = deg_m - da;
            let bs = if dd == 0 {
                vec![Poly::zero()]
            } else {
                enumerate_all_deg_le(dd - 1, fq)
            };
            for b in bs {
                let tr = r.moebius(&a, &b, &Poly::zero(), &d, fq);
                let ts = s.moebius(&a, &b, &Poly::zero(), &d, fq);
                total = total.add(&xi_path(&tr, &ts, ctx)?);
            }
        }
    }
    Ok(total)
}

/// Unimodular lift (a b; u v) of a coprime pair (u, v): a v - b u = 1.
/// The generator equals the path [b/v, a/u].
pub fn generator_path(u: &Poly, v: &Poly, fq: &crate::field::FqField) -> Result<(Cusp, Cusp)> {
    let (g, s, t) = xgcd(u, v, fq)?;
    if !g.is_one() {
        return Err(Error::BasisMismatch(format!(
            "pair ({}, {}) is not coprime",
            format_poly(u),
            format_poly(v)
        )));
    }
    let a = t;
    let b = s.neg(fq);
    Ok((Cusp::new(b, v.clone(), fq), Cusp::new(a, u.clone(), fq)))
}

/// Matrix of the Atkin-Lehner involution w_n: [r,s] -> [-1/(nr), -1/(ns)],
/// computed per basis element through the continued-fraction expansion.
pub fn atkin_lehner_matrix(ctx: &LevelContext, basis: &SymbolBasis) -> Result<OperatorMatrix> {
    let fq = &ctx.fq;
    let columns: Result<Vec<Vec<BigRational>>> = basis
        .pairs()
        .iter()
        .map(|(u, v)| {
            let (r, s) = generator_path(u, v, fq)?;
            let wr = r.atkin_lehner(&ctx.modulus, fq);
            let ws = s.atkin_lehner(&ctx.modulus, fq);
            basis.coords_sum(&xi_path(&wr, &ws, ctx)?, ctx)
        })
        .collect();
    Ok(OperatorMatrix {
        label: format!("w_({})", format_poly(&ctx.modulus)),
        basis_labels: basis.labels(),
        mat: QMat::from_columns(columns?),
    })
}

/// Monic polynomials of degree <= cap coprime to the level, ascending
/// degree; the degree-0 entry is the unit ideal, whose operator is the
/// identity.
pub fn monic_ideals_coprime(cap: usize, ctx: &LevelContext) -> Vec<Poly> {
    let mut out = Vec::new();
    for d in 0..=cap {
        for m in enumerate_monic(d, &ctx.fq).unwrap() {
            if m.gcd(&ctx.modulus, &ctx.fq).is_one() {
                out.push(m);
            }
        }
    }
    out
}

/// Monic irreducibles of degree <= cap, distinct from the level generator.
pub fn monic_primes_coprime(cap: usize, ctx: &LevelContext) -> Vec<Poly> {
    let mut out = Vec::new();
    for d in 1..=cap {
        for m in enumerate_monic(d, &ctx.fq).unwrap() {
            if m != ctx.modulus && is_irreducible(&m, &ctx.fq).unwrap() {
                out.push(m);
            }
        }
    }
    out
}

fn qmat_to_int_row(m: &QMat) -> Option<Vec<BigInt>> {
    let mut out = Vec::with_capacity(m.rows * m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            let x = &m[(i, j)];
            if !x.denom().is_one() {
                return None;
            }
            out.push(x.numer().clone());
        }
    }
    Some(out)
}

/// Result of the Eisenstein-ideal index computation.
pub struct AlgebraIndex {
    /// Z-rank of the Hecke-algebra lattice (must equal the genus).
    pub lattice_rank: usize,
    /// Index of the Eisenstein ideal inside the algebra lattice.
    pub eisenstein_index: BigInt,
    /// Degree cap at which the pair (rank, index) became stable.
    pub stable_at_cap: usize,
}

/// Default generation cap for the algebra lattice: deg m <= max(2, d - 2).
pub fn default_algebra_cap(level_degree: usize) -> usize {
    level_degree.saturating_sub(2).max(2)
}

/// Z-lattice spanned by the T_m matrices on the integral parabolic lattice,
/// modulo the sublattice generated by the eta_m (m prime) and their T_r
/// multiples. The index is reported once it is unchanged from one degree
/// cap to the next; anything else is an error, never a silent answer.
///
/// For odd-degree primes the explicit parabolic basis is the integral
/// lattice; for even degree the lattice is extracted from the oracle (the
/// parabolic kernel of a saturated integer boundary computation).
pub fn hecke_algebra_index(ctx: &LevelContext, start_cap: usize) -> Result<AlgebraIndex> {
    ctx.require_prime()?;
    if ctx.degree < 3 {
        return Err(Error::LevelDegreeTooSmall(3));
    }
    let g = genus(ctx.fq.q as u64, ctx.degree) as usize;
    let max_cap = ctx.degree + 2;

    // integer matrix of T_m on a Z-basis of the parabolic lattice
    let mut provider: Box<dyn FnMut(&Poly) -> Result<QMat>> = if ctx.degree % 2 == 1 {
        let basis = SymbolBasis::explicit_parabolic(ctx)?;
        let ctx = ctx.clone();
        Box::new(move |m: &Poly| Ok(hecke_matrix(m, &ctx, &basis)?.mat))
    } else {
        let pres = Arc::new(crate::presentation::solve_presentation(ctx));
        let lattice = crate::presentation::integral_parabolic_basis(ctx, &pres)?;
        if lattice.len() != g {
            return Err(Error::BasisMismatch(format!(
                "integral parabolic lattice has rank {}, expected {g}",
                lattice.len()
            )));
        }
        let solver = QMat::from_columns(lattice.clone());
        let full = SymbolBasis::oracle_full(ctx, pres);
        let ctx = ctx.clone();
        Box::new(move |m: &Poly| {
            let action = hecke_matrix(m, &ctx, &full)?.mat;
            let mut columns = Vec::with_capacity(lattice.len());
            for w in &lattice {
                let image = action.mul_vec(w);
                let x = solver.solve(&image).ok_or_else(|| {
                    Error::BasisMismatch(
                        "Hecke image escapes the parabolic lattice".into(),
                    )
                })?;
                columns.push(x);
            }
            Ok(QMat::from_columns(columns))
        })
    };

    let mut cache: Vec<(Poly, QMat)> = Vec::new();
    let mut mat_of = move |m: &Poly| -> Result<QMat> {
        if let Some((_, cached)) = cache.iter().find(|(p, _)| p == m) {
            return Ok(cached.clone());
        }
        let t = provider(m)?;
        cache.push((m.clone(), t.clone()));
        Ok(t)
    };

    let mut compute = |cap: usize| -> Result<(usize, Option<BigInt>)> {
        let ideals = monic_ideals_coprime(cap, ctx);
        let primes = monic_primes_coprime(cap, ctx);
        let mut t_rows = Vec::new();
        let mut t_mats = Vec::new();
        for m in &ideals {
            let t = mat_of(m)?;
            t_rows.push(qmat_to_int_row(&t).ok_or_else(|| {
                Error::BasisMismatch("Hecke matrix not integral on the parabolic lattice".into())
            })?);
            t_mats.push(t);
        }
        let t_lattice = zmat::ZMat::from_rows(t_rows);
        let rank = zmat::rank(&t_lattice);

        let mut e_rows = Vec::new();
        for p in &primes {
            let eta = {
                let t = mat_of(p)?;
                let scalar = BigRational::from_integer(eisenstein_eigenvalue(&ctx.fq, p));
                t.sub(&QMat::identity(t.rows).scale(&scalar))
            };
            for t in &t_mats {
                let prod = t.mul(&eta);
                e_rows.push(qmat_to_int_row(&prod).ok_or_else(|| {
                    Error::BasisMismatch("eta product not integral".into())
                })?);
            }
        }
        let e_lattice = zmat::ZMat::from_rows(e_rows);
        let index = zmat::lattice_index(&t_lattice, &e_lattice);
        Ok((rank, index))
    };

    let mut cap = start_cap.max(1);
    let mut prev: Option<(usize, BigInt)> = None;
    while cap <= max_cap {
        let (rank, index) = compute(cap)?;
        if rank == g {
            if let Some(idx) = index {
                if let Some((prank, pidx)) = &prev {
                    if *prank == rank && *pidx == idx {
                        return Ok(AlgebraIndex {
                            lattice_rank: rank,
                            eisenstein_index: idx,
                            stable_at_cap: cap - 1,
                        });
                    }
                }
                prev = Some((rank, idx));
                cap += 1;
                continue;
            }
        }
        prev = None;
        cap += 1;
    }
    Err(Error::Unstable(max_cap))
}

/// Product of the absolute values of the invariant factors of an integer
/// square system; helper for rank/index style assertions in tests.
pub fn abs_det(m: &QMat) -> BigRational {
    m.det().abs()
}
