//! Dense polynomials over Fq — the ring A = Fq[T].
//!
//! Ideals of A are always represented by their monic generator. The degree
//! of the zero polynomial is a dedicated [`Degree::NegInf`] value that
//! compares strictly below every finite degree; none of the degree case
//! splits downstream do -1 arithmetic.

use crate::error::{Error, Result};
use crate::field::{Fq, FqField};
use std::cmp::Ordering;
use std::fmt;

/// deg 0 = -infinity, everything else finite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInf => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// deg f + deg g for nonzero f, g.
    pub fn plus(self, other: Degree) -> Degree {
        match (self, other) {
            (Degree::Finite(a), Degree::Finite(b)) => Degree::Finite(a + b),
            _ => Degree::NegInf,
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInf => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Coefficients stored low to high, no trailing zeros; empty = 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    pub coeffs: Vec<Fq>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![1] }
    }

    /// The generator T of A.
    pub fn t() -> Poly {
        Poly { coeffs: vec![0, 1] }
    }

    pub fn constant(c: Fq) -> Poly {
        if c == 0 {
            Poly::zero()
        } else {
            Poly { coeffs: vec![c] }
        }
    }

    pub fn from_coeffs(mut coeffs: Vec<Fq>) -> Poly {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// c * T^k.
    pub fn monomial(c: Fq, k: usize) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn deg(&self) -> Degree {
        if self.coeffs.is_empty() {
            Degree::NegInf
        } else {
            Degree::Finite(self.coeffs.len() - 1)
        }
    }

    /// Leading coefficient; 0 for the zero polynomial.
    pub fn lc(&self) -> Fq {
        *self.coeffs.last().unwrap_or(&0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    pub fn coeff(&self, k: usize) -> Fq {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly, fq: &FqField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| fq.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn neg(&self, fq: &FqField) -> Poly {
        Poly {
            coeffs: self.coeffs.iter().map(|&c| fq.neg(c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly, fq: &FqField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| fq.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::from_coeffs(coeffs)
    }

    pub fn mul(&self, other: &Poly, fq: &FqField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = fq.add(coeffs[i + j], fq.mul(a, b));
            }
        }
        Poly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: Fq, fq: &FqField) -> Poly {
        if c == 0 {
            return Poly::zero();
        }
        Poly {
            coeffs: self.coeffs.iter().map(|&a| fq.mul(a, c)).collect(),
        }
    }

    /// Scale by the inverse of the leading coefficient.
    pub fn monic(&self, fq: &FqField) -> Poly {
        if self.is_zero() || self.is_monic() {
            return self.clone();
        }
        self.scale(fq.inv(self.lc()), fq)
    }

    /// Euclidean division: a = q*b + r with deg r < deg b.
    pub fn divmod(&self, b: &Poly, fq: &FqField) -> Result<(Poly, Poly)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let db = b.coeffs.len() - 1;
        let lead_inv = fq.inv(b.lc());
        let mut r = self.coeffs.clone();
        let mut q = vec![0; self.coeffs.len().saturating_sub(db)];
        while r.len() > db {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let c = fq.mul(lead, lead_inv);
                let shift = r.len() - 1 - db;
                q[shift] = c;
                for (i, &bi) in b.coeffs.iter().enumerate() {
                    r[shift + i] = fq.sub(r[shift + i], fq.mul(c, bi));
                }
            }
            r.pop();
        }
        Ok((Poly::from_coeffs(q), Poly::from_coeffs(r)))
    }

    pub fn rem(&self, b: &Poly, fq: &FqField) -> Result<Poly> {
        Ok(self.divmod(b, fq)?.1)
    }

    /// True iff `d` divides `self` exactly.
    pub fn divisible_by(&self, d: &Poly, fq: &FqField) -> bool {
        match self.rem(d, fq) {
            Ok(r) => r.is_zero(),
            Err(_) => false,
        }
    }

    /// Evaluate at a field element.
    pub fn eval(&self, x: Fq, fq: &FqField) -> Fq {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| fq.add(fq.mul(acc, x), c))
    }

    /// Monic gcd (or 0 when both inputs are 0).
    pub fn gcd(&self, other: &Poly, fq: &FqField) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b, fq).unwrap();
            a = b;
            b = r;
        }
        a.monic(fq)
    }

    /// Compare by (degree, then coefficients from the highest power down).
    /// This is the global deterministic order used for points and bases.
    pub fn cmp_order(&self, other: &Poly) -> Ordering {
        self.deg().cmp(&other.deg()).then_with(|| {
            self.coeffs
                .iter()
                .rev()
                .cmp(other.coeffs.iter().rev())
        })
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_order(other)
    }
}

/// Extended gcd: returns (g, s, t) with g = s*a + t*b, g monic (or 0).
pub fn xgcd(a: &Poly, b: &Poly, fq: &FqField) -> Result<(Poly, Poly, Poly)> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::XgcdBothZero);
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1, fq)?;
        let s = s0.sub(&q.mul(&s1, fq), fq);
        let t = t0.sub(&q.mul(&t1, fq), fq);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    // normalize to monic gcd
    let lc = r0.lc();
    if lc != 1 {
        let c = fq.inv(lc);
        r0 = r0.scale(c, fq);
        s0 = s0.scale(c, fq);
        t0 = t0.scale(c, fq);
    }
    Ok((r0, s0, t0))
}

/// Inverse of `a` modulo `m`, when gcd(a, m) = 1.
pub fn inv_mod(a: &Poly, m: &Poly, fq: &FqField) -> Option<Poly> {
    let (g, s, _) = xgcd(a, m, fq).ok()?;
    if !g.is_one() {
        return None;
    }
    Some(s.rem(m, fq).unwrap())
}

/// Deterministic irreducibility test by trial division against every monic
/// polynomial of degree 1..=deg/2.
pub fn is_irreducible(f: &Poly, fq: &FqField) -> Result<bool> {
    let deg = match f.deg() {
        Degree::Finite(d) if d >= 1 => d,
        _ => return Err(Error::ConstantPolynomial),
    };
    for d in 1..=deg / 2 {
        for g in enumerate_monic(d, fq)? {
            if f.divisible_by(&g, fq) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The q^d monic polynomials of degree d, in ascending order of the base-q
/// integer whose digits are the coefficients below the leading term. This
/// coincides with the (degree, coefficients-from-the-top) order.
pub fn enumerate_monic(d: usize, fq: &FqField) -> Result<Vec<Poly>> {
    let q = fq.q as u64;
    let count = q.checked_pow(d as u32).expect("enumeration too large");
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = k;
        for _ in 0..d {
            coeffs.push((rest % q) as Fq);
            rest /= q;
        }
        coeffs.push(1);
        out.push(Poly { coeffs });
    }
    Ok(out)
}

/// All polynomials of degree <= d (including 0), in the global order.
pub fn enumerate_all_deg_le(d: usize, fq: &FqField) -> Vec<Poly> {
    let q = fq.q as u64;
    let count = q.checked_pow(d as u32 + 1).expect("enumeration too large");
    let mut out = Vec::with_capacity(count as usize);
    for k in 0..count {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut rest = k;
        for _ in 0..=d {
            coeffs.push((rest % q) as Fq);
            rest /= q;
        }
        out.push(Poly::from_coeffs(coeffs));
    }
    out.sort();
    out
}

/// The smallest monic irreducible of degree d, in enumeration order.
pub fn first_irreducible(d: usize, fq: &FqField) -> Poly {
    enumerate_monic(d, fq)
        .unwrap()
        .into_iter()
        .find(|f| is_irreducible(f, fq).unwrap())
        .expect("irreducibles of every degree exist")
}

/// Rational reconstruction: recover (u, v) with u = v*x mod modulus,
/// deg u <= num_bound, deg v <= den_bound, gcd(u, v) = 1, v monic, by the
/// truncated extended Euclidean algorithm on (modulus, x). Returns None when
/// no such pair exists.
pub fn rational_reconstruct(
    x: &Poly,
    modulus: &Poly,
    num_bound: usize,
    den_bound: usize,
    fq: &FqField,
) -> Result<Option<(Poly, Poly)>> {
    let dm = match modulus.deg() {
        Degree::Finite(d) => d,
        Degree::NegInf => return Err(Error::DivisionByZero),
    };
    if num_bound + den_bound >= dm {
        return Err(Error::BoundViolation);
    }
    if x.deg() >= modulus.deg() {
        return Err(Error::Parse(format!(
            "residue degree {} not below modulus degree {}",
            x.deg(),
            dm
        )));
    }
    if x.is_zero() {
        return Ok(Some((Poly::zero(), Poly::one())));
    }
    // invariant: r_k = s_k * modulus + t_k * x
    let (mut r0, mut r1) = (modulus.clone(), x.clone());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while r1.deg() > Degree::Finite(num_bound) {
        let (q, r) = r0.divmod(&r1, fq)?;
        let t = t0.sub(&q.mul(&t1, fq), fq);
        (r0, r1) = (r1, r);
        (t0, t1) = (t1, t);
    }
    let (u, v) = (r1, t1);
    if v.deg() > Degree::Finite(den_bound) || v.is_zero() {
        return Ok(None);
    }
    if !u.gcd(&v, fq).is_one() {
        return Ok(None);
    }
    let c = fq.inv(v.lc());
    Ok(Some((u.scale(c, fq), v.scale(c, fq))))
}

/// Parse the text format: monomials "c*T^k" joined by '+', e.g. "T^3+T+1",
/// "2*T^2+1", "0". Coefficients are element codes in [0, q).
pub fn parse_poly(s: &str, fq: &FqField) -> Result<Poly> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    if s == "0" {
        return Ok(Poly::zero());
    }
    let mut acc = Poly::zero();
    for term in s.split('+') {
        let term = term.trim();
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in '{s}'")));
        }
        let (coef_str, pow): (&str, usize) = match term.find('T') {
            None => (term, 0),
            Some(pos) => {
                let c = term[..pos].trim().trim_end_matches('*').trim();
                let rest = &term[pos + 1..];
                let k = if rest.is_empty() {
                    1
                } else if let Some(exp) = rest.strip_prefix('^') {
                    exp.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad exponent in '{term}'")))?
                } else {
                    return Err(Error::Parse(format!("unexpected '{rest}' after T")));
                };
                (c, k)
            }
        };
        let c: Fq = if coef_str.is_empty() {
            1
        } else {
            coef_str
                .parse::<Fq>()
                .map_err(|_| Error::Parse(format!("bad coefficient '{coef_str}'")))?
        };
        if c >= fq.q {
            return Err(Error::Parse(format!(
                "coefficient {c} out of range [0, {})",
                fq.q
            )));
        }
        acc = acc.add(&Poly::monomial(c, pow), fq);
    }
    Ok(acc)
}

/// Render in the canonical text format (inverse of [`parse_poly`]).
pub fn format_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut parts = Vec::new();
    for (k, &c) in p.coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let part = match (k, c) {
            (0, c) => format!("{c}"),
            (1, 1) => "T".to_string(),
            (1, c) => format!("{c}*T"),
            (k, 1) => format!("T^{k}"),
            (k, c) => format!("{c}*T^{k}"),
        };
        parts.push(part);
    }
    parts.join("+")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FqField {
        FqField::new(2, 1).unwrap()
    }

    fn f3() -> FqField {
        FqField::new(3, 1).unwrap()
    }

    fn p(s: &str, fq: &FqField) -> Poly {
        parse_poly(s, fq).unwrap()
    }

    #[test]
    fn divmod_examples() {
        let fq = f2();
        let a = p("T^3+T+1", &fq);
        let b = p("T^2+T", &fq);
        let (q, r) = a.divmod(&b, &fq).unwrap();
        assert_eq!(q, p("T+1", &fq));
        assert_eq!(r, p("1", &fq));
        // a = q*b + r
        assert_eq!(q.mul(&b, &fq).add(&r, &fq), a);

        let (q, r) = a.divmod(&a, &fq).unwrap();
        assert_eq!((q, r), (Poly::one(), Poly::zero()));
        let (q, r) = Poly::zero().divmod(&b, &fq).unwrap();
        assert_eq!((q, r), (Poly::zero(), Poly::zero()));
        assert!(a.divmod(&Poly::zero(), &fq).is_err());
    }

    #[test]
    fn xgcd_examples() {
        let fq = f2();
        // T^2+1 = (T+1)^2 over F2
        let (g, s, t) = xgcd(&p("T^2+1", &fq), &p("T+1", &fq), &fq).unwrap();
        assert_eq!(g, p("T+1", &fq));
        assert_eq!(
            s.mul(&p("T^2+1", &fq), &fq).add(&t.mul(&p("T+1", &fq), &fq), &fq),
            g
        );

        let a = p("T^2+T+1", &fq);
        let (g, s, t) = xgcd(&a, &Poly::zero(), &fq).unwrap();
        assert_eq!(g, a.monic(&fq));
        assert!(t.is_zero());
        assert_eq!(s.mul(&a, &fq), g);

        let fq3 = f3();
        let (g, _, _) = xgcd(&p("T", &fq3), &p("T+1", &fq3), &fq3).unwrap();
        assert!(g.is_one());
        assert!(xgcd(&Poly::zero(), &Poly::zero(), &fq).is_err());
    }

    #[test]
    fn xgcd_bezout_random_sweep() {
        // re-multiplication check over 1000 random pairs per q in {2,3,4,5}
        use rand::{Rng, SeedableRng};
        for (p_char, e) in [(2, 1), (3, 1), (2, 2), (5, 1)] {
            let fq = FqField::new(p_char, e).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42 + fq.q as u64);
            for _ in 0..1000 {
                let mut randpoly = || {
                    let d = rng.gen_range(0..=8usize);
                    Poly::from_coeffs((0..=d).map(|_| rng.gen_range(0..fq.q)).collect())
                };
                let a = randpoly();
                let b = randpoly();
                if a.is_zero() && b.is_zero() {
                    continue;
                }
                let (g, s, t) = xgcd(&a, &b, &fq).unwrap();
                assert_eq!(s.mul(&a, &fq).add(&t.mul(&b, &fq), &fq), g);
                assert!(g.is_zero() || g.is_monic());
                if !a.is_zero() {
                    assert!(a.divisible_by(&g, &fq));
                }
                if !b.is_zero() {
                    assert!(b.divisible_by(&g, &fq));
                }
            }
        }
    }

    #[test]
    fn irreducibility_examples() {
        let fq = f2();
        assert!(is_irreducible(&p("T^3+T+1", &fq), &fq).unwrap());
        assert!(!is_irreducible(&p("T^2+1", &fq), &fq).unwrap());
        assert!(is_irreducible(&p("T^4+T+1", &fq), &fq).unwrap());
        assert!(is_irreducible(&Poly::one(), &fq).is_err());
    }

    #[test]
    fn monic_enumeration_matches_counts_and_order() {
        let fq = f2();
        let m2 = enumerate_monic(2, &fq).unwrap();
        let strings: Vec<String> = m2.iter().map(format_poly).collect();
        assert_eq!(strings, vec!["T^2", "T^2+1", "T^2+T", "T^2+T+1"]);

        let fq3 = f3();
        assert_eq!(enumerate_monic(1, &fq3).unwrap().len(), 3);
        assert_eq!(enumerate_monic(0, &fq).unwrap(), vec![Poly::one()]);
        for d in 0..5 {
            let all = enumerate_monic(d, &fq3).unwrap();
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), 3usize.pow(d as u32));
        }
    }

    #[test]
    fn text_format_round_trips() {
        let fq5 = FqField::new(5, 1).unwrap();
        for s in ["0", "1", "T", "T^3+T+1", "2*T^2+4*T+3", "4*T^7+1", "3"] {
            let poly = p(s, &fq5);
            assert_eq!(format_poly(&poly), s);
        }
        assert!(parse_poly("T^2-1", &fq5).is_err());
        assert!(parse_poly("7*T", &fq5).is_err());
        assert!(parse_poly("", &fq5).is_err());
    }

    #[test]
    fn reconstruction_small_cases() {
        let fq = f2();
        let modulus = p("T^3+T+1", &fq);
        // x = 0
        assert_eq!(
            rational_reconstruct(&Poly::zero(), &modulus, 1, 1, &fq).unwrap(),
            Some((Poly::zero(), Poly::one()))
        );
        // x already small
        assert_eq!(
            rational_reconstruct(&p("T", &fq), &modulus, 1, 1, &fq).unwrap(),
            Some((p("T", &fq), Poly::one()))
        );
        // bound violation
        assert!(rational_reconstruct(&p("T", &fq), &modulus, 2, 1, &fq).is_err());
        // no pair exists for T^2 mod T^4 within (1, 1)
        assert_eq!(
            rational_reconstruct(&p("T^2", &fq), &p("T^4", &fq), 1, 1, &fq).unwrap(),
            None
        );
    }

    #[test]
    fn reconstruction_agrees_with_exhaustive_search() {
        // every residue mod P, q in {2,3}, deg P in {3,5}
        for (q, d) in [(2u32, 3usize), (2, 5), (3, 3), (3, 5)] {
            let fq = FqField::new(q, 1).unwrap();
            let modulus = first_irreducible(d, &fq);
            let nb = (d - 1) / 2;
            let db = (d - 1) / 2;
            let small: Vec<Poly> = enumerate_all_deg_le(nb, &fq);
            for x in enumerate_all_deg_le(d - 1, &fq) {
                let got = rational_reconstruct(&x, &modulus, nb, db, &fq).unwrap();
                // exhaustive oracle over bounded pairs with v monic
                let mut expected = None;
                'outer: for du in 0..=db {
                    for v in enumerate_monic(du, &fq).unwrap() {
                        let vx = v.mul(&x, &fq).rem(&modulus, &fq).unwrap();
                        for u in &small {
                            if *u == vx && u.gcd(&v, &fq).is_one() {
                                expected = Some((u.clone(), v));
                                break 'outer;
                            }
                        }
                    }
                }
                let expected_pair = expected.expect("every residue has a bounded representative");
                let got_pair = got.expect("reconstruction must succeed when a pair exists");
                // both must name the same residue class and satisfy the bounds
                assert_eq!(
                    got_pair.1.mul(&x, &fq).rem(&modulus, &fq).unwrap(),
                    got_pair.0.rem(&modulus, &fq).unwrap()
                );
                assert_eq!(got_pair, expected_pair);
            }
        }
    }

    #[test]
    fn degree_laws() {
        let fq = f3();
        let a = p("T^2+1", &fq);
        let b = p("2*T^3+T", &fq);
        assert_eq!(a.mul(&b, &fq).deg(), a.deg().plus(b.deg()));
        assert!(a.add(&b, &fq).deg() <= a.deg().max(b.deg()));
        assert_eq!(Poly::zero().deg(), Degree::NegInf);
        assert!(Degree::NegInf < Degree::Finite(0));
    }
}
