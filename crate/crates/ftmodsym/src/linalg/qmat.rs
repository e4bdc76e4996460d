//! Dense matrices over Q (arbitrary-precision rationals): reduced row
//! echelon, solving, inversion, kernels, characteristic polynomials and
//! rational eigenvalues. Sizes here are tiny (at most a few hundred), so
//! plain Gaussian elimination over BigRational is the right tool.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

pub fn q_zero() -> BigRational {
    BigRational::zero()
}

pub fn q_one() -> BigRational {
    BigRational::one()
}

pub fn q_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> QMat {
        QMat { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> QMat {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> QMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        QMat { rows: r, cols: c, data }
    }

    pub fn from_columns(cols: Vec<Vec<BigRational>>) -> QMat {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        let mut m = QMat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigRational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> QMat {
        let mut m = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut m = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let t = &self[(i, k)] * &other[(k, j)];
                    m[(i, j)] += t;
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigRational::zero();
                for j in 0..self.cols {
                    acc += &self[(i, j)] * &v[j];
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for i in 0..m.data.len() {
            m.data[i] += other.data[i].clone();
        }
        m
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for i in 0..m.data.len() {
            m.data[i] -= other.data[i].clone();
        }
        m
    }

    pub fn scale(&self, c: &BigRational) -> QMat {
        let mut m = self.clone();
        for x in &mut m.data {
            *x *= c.clone();
        }
        m
    }

    pub fn trace(&self) -> BigRational {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// In-place reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            for k in 0..self.cols {
                self.data.swap(r * self.cols + k, p * self.cols + k);
            }
            let inv = self[(r, c)].clone();
            for k in c..self.cols {
                let t = &self[(r, k)] / &inv;
                self[(r, k)] = t;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for k in c..self.cols {
                        let t = &self[(r, k)] * &f;
                        self[(i, k)] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Solve self * x = b; returns one solution or None when inconsistent.
    pub fn solve(&self, b: &[BigRational]) -> Option<Vec<BigRational>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = BigRational::one();
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        let mut inv = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Basis of the right kernel {x : self * x = 0}.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[fc] = BigRational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, fc)].clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> BigRational {
        assert_eq!(self.rows, self.cols);
        let cp = self.charpoly();
        // det = (-1)^n * constant coefficient
        let c = cp.last().unwrap().clone();
        if self.rows.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    /// Characteristic polynomial det(XI - A) by the Faddeev-LeVerrier
    /// recursion; coefficients returned from X^n down to the constant term,
    /// leading coefficient 1.
    pub fn charpoly(&self) -> Vec<BigRational> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut coeffs = vec![BigRational::one()];
        let mut m = QMat::zeros(n, n); // M_0 = 0
        for k in 1..=n {
            // M_k = A * M_{k-1} + c_{k-1} * I
            let mut am = self.mul(&m);
            let c_prev = coeffs.last().unwrap().clone();
            for i in 0..n {
                am[(i, i)] += c_prev.clone();
            }
            m = am;
            let c_k = -(self.mul(&m).trace() / BigRational::from_integer(BigInt::from(k as i64)));
            coeffs.push(c_k);
        }
        coeffs
    }

    /// Rational eigenvalues, found exactly from the characteristic polynomial
    /// by the rational root theorem, in ascending order.
    pub fn rational_eigenvalues(&self) -> Vec<BigRational> {
        let cp = self.charpoly();
        rational_roots(&cp)
    }
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        &mut self.data[i * self.cols + j]
    }
}

fn eval_poly(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in coeffs {
        acc = acc * x.clone() + c.clone();
    }
    acc
}

fn positive_divisors(n: &BigInt) -> Vec<BigInt> {
    // trial-division factorization; inputs at desk scale are modest
    let mut n = n.abs();
    let mut factors: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2);
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e > 0 {
            factors.push((d.clone(), e));
        }
        d += 1;
    }
    if n > BigInt::one() {
        factors.push((n, 1));
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in factors {
        let mut next = Vec::new();
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk = &pk * &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Exact rational roots of a polynomial with rational coefficients
/// (leading coefficient first), each listed once, ascending.
pub fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    // strip leading zeros, factor out roots at 0
    let mut c: Vec<BigRational> = coeffs.to_vec();
    while c.first().is_some_and(|x| x.is_zero()) {
        c.remove(0);
    }
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    while c.last().is_some_and(|x| x.is_zero()) {
        c.pop();
        if !roots.contains(&BigRational::zero()) {
            roots.push(BigRational::zero());
        }
    }
    if c.len() <= 1 {
        roots.sort();
        return roots;
    }
    // clear denominators to an integer polynomial
    let denom_lcm = c.iter().fold(BigInt::one(), |acc, x| {
        let d = x.denom().clone();
        let g = num_integer::Integer::gcd(&acc, &d);
        acc / g * d
    });
    let ints: Vec<BigInt> = c
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let lead = ints.first().unwrap().clone();
    let tail = ints.last().unwrap().clone();
    for p in positive_divisors(&tail) {
        for q in positive_divisors(&lead) {
            for sign in [1i64, -1] {
                let cand = BigRational::new(&p * BigInt::from(sign), q.clone());
                if eval_poly(&c, &cand).is_zero() && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> QMat {
        QMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| q_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn solve_and_inverse() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let x = a.solve(&[q_int(3), q_int(2)]).unwrap();
        assert_eq!(x, vec![q_int(1), q_int(1)]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), QMat::identity(2));

        let singular = m(&[&[1, 2], &[2, 4]]);
        assert!(singular.inverse().is_none());
        assert!(singular.solve(&[q_int(1), q_int(3)]).is_none());
    }

    #[test]
    fn charpoly_of_companion() {
        // companion matrix of X^2 + 2X - 1
        let a = m(&[&[0, 1], &[1, -2]]);
        assert_eq!(a.charpoly(), vec![q_one(), q_int(2), q_int(-1)]);
        assert_eq!(a.det(), q_int(-1));
    }

    #[test]
    fn kernel_dimension() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = a.kernel();
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(a.rank(), 1);
    }

    #[test]
    fn rational_eigenvalues_exact() {
        let a = m(&[&[2, 0, 0], &[0, 3, 1], &[0, 0, 3]]);
        assert_eq!(a.rational_eigenvalues(), vec![q_int(2), q_int(3)]);
        // X^2 + 2X - 1 has no rational roots
        let b = m(&[&[0, 1], &[1, -2]]);
        assert!(b.rational_eigenvalues().is_empty());
        // halves: 2X - 1 root 1/2
        let roots = rational_roots(&[q_int(2), q_int(-1)]);
        assert_eq!(roots, vec![BigRational::new(BigInt::from(1), BigInt::from(2))]);
    }
}
