//! Cusps, formal sums of generators, and the continued-fraction expansion
//! of a cusp path into Manin-Teitelbaum generators.
//!
//! A generator (u:v) stands for the path [g0, ginf] = [b/v, a/u] where
//! g = (a b; u v) is any unimodular lift. Conversely any path [r, s] between
//! cusps equals a sum of generators: expanding [0, x] along the Euclidean
//! convergents p_k/q_k of x contributes xi(0:1) plus one generator
//! (q_k : q_{k-1}) per convergent, because (p_k p_{k-1}; q_k q_{k-1}) is
//! unimodular. Teitelbaum's original orientation is the reverse of the one
//! used here; conversions carry the orientation tag in their JSON output.

use crate::error::Result;
use crate::field::FqField;
use crate::poly::{format_poly, parse_poly, Poly};
use crate::presentation::{boundary, CuspDivisor};
use crate::projective::{p1_normalize, LevelContext, P1Point};
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A point of P^1(K): num/den with gcd 1, den monic, or (1, 0) = infinity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cusp {
    pub num: Poly,
    pub den: Poly,
}

impl Cusp {
    pub fn new(num: Poly, den: Poly, fq: &FqField) -> Cusp {
        if den.is_zero() {
            return Cusp { num: Poly::one(), den: Poly::zero() };
        }
        if num.is_zero() {
            return Cusp { num: Poly::zero(), den: Poly::one() };
        }
        let g = num.gcd(&den, fq);
        let num = num.divmod(&g, fq).unwrap().0;
        let den = den.divmod(&g, fq).unwrap().0;
        let c = fq.inv(den.lc());
        Cusp { num: num.scale(c, fq), den: den.scale(c, fq) }
    }

    pub fn zero() -> Cusp {
        Cusp { num: Poly::zero(), den: Poly::one() }
    }

    pub fn infinity() -> Cusp {
        Cusp { num: Poly::one(), den: Poly::zero() }
    }

    pub fn is_infinity(&self) -> bool {
        self.den.is_zero()
    }

    /// Moebius action of (a b; c d) on column vectors: x/y -> (ax+by)/(cx+dy).
    pub fn moebius(&self, a: &Poly, b: &Poly, c: &Poly, d: &Poly, fq: &FqField) -> Cusp {
        let nn = a.mul(&self.num, fq).add(&b.mul(&self.den, fq), fq);
        let nd = c.mul(&self.num, fq).add(&d.mul(&self.den, fq), fq);
        Cusp::new(nn, nd, fq)
    }

    /// Atkin-Lehner transform r -> -1/(n r) with n the level generator.
    pub fn atkin_lehner(&self, level: &Poly, fq: &FqField) -> Cusp {
        Cusp::new(self.den.neg(fq), level.mul(&self.num, fq), fq)
    }

    pub fn parse(s: &str, fq: &FqField) -> Result<Cusp> {
        let s = s.trim();
        if s == "inf" || s == "infinity" {
            return Ok(Cusp::infinity());
        }
        match s.split_once('/') {
            None => Ok(Cusp::new(parse_poly(s, fq)?, Poly::one(), fq)),
            Some((n, d)) => Ok(Cusp::new(parse_poly(n, fq)?, parse_poly(d, fq)?, fq)),
        }
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.den.is_one() {
            write!(f, "{}", format_poly(&self.num))
        } else {
            write!(f, "{}/{}", format_poly(&self.num), format_poly(&self.den))
        }
    }
}

/// Sparse rational combination of canonical generators.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FormalSum {
    pub terms: BTreeMap<P1Point, BigRational>,
}

impl FormalSum {
    pub fn new() -> FormalSum {
        FormalSum { terms: BTreeMap::new() }
    }

    pub fn generator(x: P1Point) -> FormalSum {
        let mut s = FormalSum::new();
        s.add_term(x, BigRational::one());
        s
    }

    pub fn add_term(&mut self, x: P1Point, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&x) {
            Some(entry) => {
                *entry += c;
                if entry.is_zero() {
                    self.terms.remove(&x);
                }
            }
            None => {
                self.terms.insert(x, c);
            }
        }
    }

    pub fn add(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FormalSum) -> FormalSum {
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(x.clone(), -c.clone());
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> FormalSum {
        if c.is_zero() {
            return FormalSum::new();
        }
        FormalSum {
            terms: self
                .terms
                .iter()
                .map(|(x, v)| (x.clone(), v * c))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Oracle coordinates: coefficient-weighted sum of generator coordinates.
    pub fn oracle_coords(
        &self,
        pres: &crate::presentation::PresentationResult,
    ) -> Vec<BigRational> {
        let mut acc = vec![BigRational::zero(); pres.rank];
        for (x, c) in &self.terms {
            for (a, b) in acc.iter_mut().zip(pres.coords_of(x)) {
                *a += b * c;
            }
        }
        acc
    }
}

/// Expand [0, x] as a formal sum of generators via Euclidean convergents.
fn expand_from_zero(x: &Cusp, ctx: &LevelContext) -> Result<FormalSum> {
    let fq = &ctx.fq;
    let mut sum = FormalSum::new();
    if !x.is_infinity() && x.num.is_zero() {
        return Ok(sum); // [0, 0]
    }
    // [0, inf] = xi(0:1)
    sum.add_term(
        p1_normalize(&Poly::zero(), &Poly::one(), ctx)?,
        BigRational::one(),
    );
    if x.is_infinity() {
        return Ok(sum);
    }
    // convergent denominators: q_{-2} = 1, q_{-1} = 0, and the telescope
    // starts at infinity = p_{-1}/q_{-1}
    let (mut r0, mut r1) = (x.num.clone(), x.den.clone());
    let (mut q_prev, mut q_cur) = (Poly::one(), Poly::zero());
    let mut q_hist = vec![q_cur.clone()];
    while !r1.is_zero() {
        let (quot, rem) = r0.divmod(&r1, fq)?;
        let q_next = quot.mul(&q_cur, fq).add(&q_prev, fq);
        (q_prev, q_cur) = (q_cur, q_next);
        q_hist.push(q_cur.clone());
        (r0, r1) = (r1, rem);
    }
    // one generator (q_k : q_{k-1}) per consecutive pair, k = 0..
    for w in q_hist.windows(2) {
        sum.add_term(p1_normalize(&w[1], &w[0], ctx)?, BigRational::one());
    }
    Ok(sum)
}

/// The Manin trick: a formal sum F with xi(F) = [r, s], computed as
/// [0, s] - [0, r].
pub fn xi_path(r: &Cusp, s: &Cusp, ctx: &LevelContext) -> Result<FormalSum> {
    Ok(expand_from_zero(s, ctx)?.sub(&expand_from_zero(r, ctx)?))
}

/// Linear extension of the generator boundary map (prime level).
pub fn boundary_sum(f: &FormalSum, ctx: &LevelContext) -> Result<CuspDivisor> {
    ctx.require_prime()?;
    let mut total = CuspDivisor::zero();
    for (x, c) in &f.terms {
        let d = boundary(x, ctx)?;
        total.add_scaled(&d, c);
    }
    Ok(total)
}

/// Class of a cusp at prime level: true means [infinity] (P divides the
/// reduced denominator), false means [0].
pub fn cusp_class_is_infinity(r: &Cusp, ctx: &LevelContext) -> Result<bool> {
    ctx.require_prime()?;
    Ok(ctx.reduce(&r.den).is_zero())
}

/// Boundary of the path [r, s]: (class of s) - (class of r).
pub fn path_boundary(r: &Cusp, s: &Cusp, ctx: &LevelContext) -> Result<CuspDivisor> {
    let mut div = CuspDivisor::zero();
    let one = BigRational::one();
    if cusp_class_is_infinity(s, ctx)? {
        div.at_infinity += &one;
    } else {
        div.at_zero += &one;
    }
    if cusp_class_is_infinity(r, ctx)? {
        div.at_infinity -= &one;
    } else {
        div.at_zero -= &one;
    }
    Ok(div)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FqField;
    use crate::poly::xgcd;
    use crate::presentation::solve_presentation;
    use crate::projective::Mat2;
    use rand::{Rng, SeedableRng};

    fn ctx(q: u32, level: &str) -> LevelContext {
        let fq = FqField::new(q, 1).unwrap();
        let n = parse_poly(level, &fq).unwrap();
        LevelContext::new(fq, n).unwrap()
    }

    fn gen(ctx: &LevelContext, u: &str, v: &str) -> P1Point {
        p1_normalize(
            &parse_poly(u, &ctx.fq).unwrap(),
            &parse_poly(v, &ctx.fq).unwrap(),
            ctx,
        )
        .unwrap()
    }

    #[test]
    fn zero_infinity_path_is_the_zero_one_generator() {
        let c = ctx(2, "T^3+T+1");
        let f = xi_path(&Cusp::zero(), &Cusp::infinity(), &c).unwrap();
        let expected = FormalSum::generator(gen(&c, "0", "1"));
        assert_eq!(f, expected);
        // degenerate path
        let r = Cusp::parse("T/T+1", &c.fq).unwrap();
        assert!(xi_path(&r, &r, &c).unwrap().is_zero());
    }

    /// Random unimodular g with bottom row (u, v): xi_path(g0, ginf) must have
    /// the oracle coordinates of the single generator (u:v).
    #[test]
    fn manin_trick_soundness_random_matrices() {
        for (q, level) in [(2u32, "T^3+T+1"), (3, "T^3+2*T+1"), (2, "T^4+T+1")] {
            let c = ctx(q, level);
            let pres = solve_presentation(&c);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
            let mut found = 0;
            while found < 200 {
                let mut randpoly = |maxd: usize| {
                    let d = rng.gen_range(0..=maxd);
                    Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..c.fq.q)).collect())
                };
                let u = randpoly(3);
                let v = randpoly(3);
                if u.is_zero() && v.is_zero() {
                    continue;
                }
                let (g, s, t) = xgcd(&u, &v, &c.fq).unwrap();
                if !g.is_one() {
                    continue;
                }
                found += 1;
                // a v - b u = 1 so (a b; u v) is unimodular
                let (a, b) = (t.clone(), s.neg(&c.fq));
                let g0 = Cusp::new(b.clone(), v.clone(), &c.fq);
                let ginf = Cusp::new(a.clone(), u.clone(), &c.fq);
                let path = xi_path(&g0, &ginf, &c).unwrap();
                let direct = FormalSum::generator(p1_normalize(&u, &v, &c).unwrap());
                assert_eq!(
                    path.oracle_coords(&pres),
                    direct.oracle_coords(&pres),
                    "bottom row ({u}, {v}) at q={q} level={level}"
                );
            }
        }
    }

    #[test]
    fn path_concatenation_is_additive() {
        let c = ctx(2, "T^3+T+1");
        let pres = solve_presentation(&c);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut randcusp = || {
                let d = rng.gen_range(0..=2usize);
                let num = Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..2)).collect());
                let den = Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..2)).collect());
                Cusp::new(num, den, &c.fq)
            };
            let (r, s, t) = (randcusp(), randcusp(), randcusp());
            let lhs = xi_path(&r, &t, &c).unwrap().oracle_coords(&pres);
            let mid = xi_path(&r, &s, &c).unwrap().add(&xi_path(&s, &t, &c).unwrap());
            assert_eq!(lhs, mid.oracle_coords(&pres));
        }
    }

    #[test]
    fn boundary_of_paths_matches_cusp_classes() {
        let c = ctx(2, "T^3+T+1");
        let f = FormalSum::generator(gen(&c, "1", "0"));
        let d = boundary_sum(&f, &c).unwrap();
        assert_eq!(d.at_zero, BigRational::one());
        assert_eq!(d.at_infinity, -BigRational::one());

        let cancel = FormalSum::generator(gen(&c, "0", "1")).add(&f);
        assert!(boundary_sum(&cancel, &c).unwrap().is_zero());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let mut randcusp = || {
                let d = rng.gen_range(0..=3usize);
                let num = Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..2)).collect());
                let den = Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..2)).collect());
                Cusp::new(num, den, &c.fq)
            };
            let (r, s) = (randcusp(), randcusp());
            let via_sum = boundary_sum(&xi_path(&r, &s, &c).unwrap(), &c).unwrap();
            let direct = path_boundary(&r, &s, &c).unwrap();
            assert_eq!(via_sum, direct, "r={r} s={s}");
        }
    }

    #[test]
    fn composite_levels_expand_too() {
        // the Manin trick only needs coprime convergent pairs, any level works
        let c = ctx(2, "T^2+T");
        let pres = solve_presentation(&c);
        let sigma = Mat2::sigma(&c.fq);
        for x in pres.generators.clone() {
            let y = crate::projective::p1_act(&x, &sigma, &c).unwrap();
            let two_term = FormalSum::generator(x).add(&FormalSum::generator(y));
            assert!(
                two_term.oracle_coords(&pres).iter().all(|v| v.is_zero()),
                "two-term relation must vanish in the quotient"
            );
        }
    }

    #[test]
    fn cusp_parse_and_display() {
        let fq = FqField::new(3, 1).unwrap();
        let c = Cusp::parse("T^2+1/2*T", &fq).unwrap();
        // denominator normalized monic: 2T -> T scales num by 2^{-1} = 2
        assert!(c.den.is_monic());
        assert_eq!(Cusp::parse("inf", &fq).unwrap(), Cusp::infinity());
        assert_eq!(Cusp::parse("0", &fq).unwrap(), Cusp::zero());
        let i = Cusp::new(Poly::constant(2), Poly::zero(), &fq);
        assert_eq!(i, Cusp::infinity());
    }
}
