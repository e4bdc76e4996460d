//! The coefficient field Fq, q = p^e.
//!
//! Elements are encoded as integers in `[0, q)`: the base-p digits of the
//! code are the coordinates in the polynomial basis of Fp[x]/(modulus).
//! For e = 1 this is plain arithmetic mod p. The defining modulus is the
//! lexicographically least monic irreducible of degree e over Fp, so the
//! encoding is reproducible across runs and implementations.
//!
//! All four operation tables are precomputed at construction; q stays small
//! here (desk scale is q <= 25), so the tables are a few KiB at most.

use crate::error::{Error, Result};

pub type Fq = u32;

#[derive(Clone, Debug)]
pub struct FqField {
    /// Prime characteristic.
    pub p: u32,
    /// Extension degree over Fp.
    pub e: u32,
    /// Field size p^e.
    pub q: u32,
    /// Coefficients (degree 0..=e) of the defining monic irreducible over Fp.
    /// Empty when e = 1.
    pub modulus: Vec<u32>,
    add: Vec<Fq>,
    mul: Vec<Fq>,
    neg: Vec<Fq>,
    inv: Vec<Fq>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e
    }
}
impl Eq for FqField {}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Digits of `code` in base p, least significant first, padded to `e`.
fn digits(code: u32, p: u32, e: u32) -> Vec<u32> {
    let mut c = code;
    (0..e)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn code(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Multiply two Fp[x] coefficient vectors and reduce by the monic `modulus`.
fn mul_mod_fp(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + ai * bj) % p;
        }
    }
    // reduce: x^e = -(modulus below leading term)
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for (i, &mi) in modulus.iter().enumerate().take(e) {
            let idx = k - e + i;
            let sub = (c * mi) % p;
            prod[idx] = (prod[idx] + p * p - sub) % p;
        }
    }
    prod.truncate(e.max(1));
    prod
}

/// Irreducibility over Fp by trial division against all monic polynomials of
/// degree <= deg/2 (coefficient-vector arithmetic, used only at field setup).
fn fp_poly_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    let rem_by = |g: &[u32]| -> bool {
        // returns true iff g divides f exactly
        let mut r: Vec<u32> = f.to_vec();
        let dg = g.len() - 1;
        while r.len() > dg {
            let lead = *r.last().unwrap();
            if lead != 0 {
                let shift = r.len() - 1 - dg;
                // g is monic
                for (i, &gi) in g.iter().enumerate() {
                    let idx = shift + i;
                    let sub = (lead * gi) % p;
                    r[idx] = (r[idx] + p * p - sub) % p;
                }
            }
            r.pop();
            while r.len() > 1 && *r.last().unwrap() == 0 {
                r.pop();
            }
            if r.len() <= dg {
                break;
            }
        }
        r.iter().all(|&c| c == 0)
    };
    for d in 1..=deg / 2 {
        // all monic polys of degree d over Fp
        let count = p.pow(d as u32);
        for k in 0..count {
            let mut g = digits(k, p, d as u32);
            g.push(1);
            if rem_by(&g) {
                return false;
            }
        }
    }
    true
}

impl FqField {
    /// Construct GF(p^e). For e > 1 the modulus is the lexicographically
    /// least monic irreducible of degree e over Fp.
    pub fn new(p: u32, e: u32) -> Result<FqField> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::BadExtensionDegree);
        }
        let q = p.checked_pow(e).expect("q overflow");
        let modulus: Vec<u32> = if e == 1 {
            Vec::new()
        } else {
            let mut found = None;
            for k in 0..p.pow(e) {
                let mut f = digits(k, p, e);
                f.push(1);
                if fp_poly_irreducible(&f, p) {
                    found = Some(f);
                    break;
                }
            }
            found.expect("an irreducible polynomial of every degree exists over Fp")
        };

        let mut add = vec![0; (q * q) as usize];
        let mut mul = vec![0; (q * q) as usize];
        let mut neg = vec![0; q as usize];
        let mut inv = vec![0; q as usize];
        for a in 0..q {
            let da = digits(a, p, e);
            let negd: Vec<u32> = da.iter().map(|&x| (p - x) % p).collect();
            neg[a as usize] = code(&negd, p);
            for b in 0..q {
                let db = digits(b, p, e);
                let sum: Vec<u32> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = code(&sum, p);
                let prod = if e == 1 {
                    vec![(a * b) % p]
                } else {
                    mul_mod_fp(&da, &db, &modulus, p)
                };
                mul[(a * q + b) as usize] = code(&prod, p);
            }
        }
        for a in 1..q {
            for b in 1..q {
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b;
                    break;
                }
            }
        }
        Ok(FqField { p, e, q, modulus, add, mul, neg, inv })
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.neg[a as usize]
    }

    /// Multiplicative inverse; panics on 0 (callers guard).
    #[inline]
    pub fn inv(&self, a: Fq) -> Fq {
        assert!(a != 0, "inverse of zero in Fq");
        self.inv[a as usize]
    }

    pub fn div(&self, a: Fq, b: Fq) -> Fq {
        self.mul(a, self.inv(b))
    }

    /// All field elements in code order, 0 first.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.q
    }

    /// The nonzero elements (the unit group Fq^x).
    pub fn units(&self) -> impl Iterator<Item = Fq> {
        1..self.q
    }
}
