//! Integer matrices with arbitrary-precision entries: Smith normal form with
//! a tracked column transform, Hermite-style row bases, and lattice indices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl ZMat {
    pub fn zeros(rows: usize, cols: usize) -> ZMat {
        ZMat { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> ZMat {
        let mut m = ZMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> ZMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        ZMat { rows: r, cols: c, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> ZMat {
        ZMat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(i * self.cols + k, j * self.cols + k);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + i, r * self.cols + j);
        }
    }

    /// row i -= q * row j
    fn row_axpy(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for k in 0..self.cols {
            let t = &self.data[j * self.cols + k] * q;
            self.data[i * self.cols + k] -= t;
        }
    }

    /// col i -= q * col j
    fn col_axpy(&mut self, i: usize, j: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let t = &self.data[r * self.cols + j] * q;
            self.data[r * self.cols + i] -= t;
        }
    }

    fn negate_col(&mut self, i: usize) {
        for r in 0..self.rows {
            let v = -self.data[r * self.cols + i].clone();
            self.data[r * self.cols + i] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for ZMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ZMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

pub struct Snf {
    /// Nonzero invariant factors d_1 | d_2 | ..., all positive.
    pub diag: Vec<BigInt>,
    /// Unimodular column transform: diag = U * A * V for some unimodular U.
    pub colv: ZMat,
}

/// Smith normal form, tracking only the column transform V (the row
/// transform is not needed by any caller). Pivoting picks the entry of
/// least absolute value to limit coefficient growth.
pub fn smith_normal_form(mut a: ZMat) -> Snf {
    let n = a.rows.min(a.cols);
    let mut v = ZMat::identity(a.cols);
    let mut k = 0;
    while k < n {
        // locate a pivot of minimal |value| in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..a.rows {
            for j in k..a.cols {
                if a[(i, j)].is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if a[(i, j)].abs() < a[(pi, pj)].abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap_rows(k, pi);
        a.swap_cols(k, pj);
        v.swap_cols(k, pj);

        // clear row and column k, repeating until both settle
        loop {
            let mut dirty = false;
            for i in k + 1..a.rows {
                if !a[(i, k)].is_zero() {
                    let q = div_round(&a[(i, k)], &a[(k, k)]);
                    a.row_axpy(i, k, &q);
                    if !a[(i, k)].is_zero() {
                        a.swap_rows(k, i);
                        dirty = true;
                    }
                }
            }
            for j in k + 1..a.cols {
                if !a[(k, j)].is_zero() {
                    let q = div_round(&a[(k, j)], &a[(k, k)]);
                    a.col_axpy(j, k, &q);
                    v.col_axpy(j, k, &q);
                    if !a[(k, j)].is_zero() {
                        a.swap_cols(k, j);
                        v.swap_cols(k, j);
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }

        // divisibility: a[k][k] must divide every trailing entry
        let mut fixed = true;
        'scan: for i in k + 1..a.rows {
            for j in k + 1..a.cols {
                if !(&a[(i, j)] % &a[(k, k)]).is_zero() {
                    // fold row i into row k and restart the pivot step
                    let one = BigInt::one();
                    a.row_axpy(k, i, &-&one);
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if fixed {
            if a[(k, k)].is_negative() {
                a.negate_col(k);
                v.negate_col(k);
            }
            k += 1;
        }
    }
    let diag: Vec<BigInt> = (0..n)
        .map(|i| a[(i, i)].clone())
        .take_while(|d| !d.is_zero())
        .collect();
    Snf { diag, colv: v }
}

/// Quotient rounding toward the nearest integer keeps remainders small.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    if &r.abs() * 2 > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Row-echelon basis of the row space over Z (a Hermite-style form):
/// returns the basis rows with strictly increasing pivot columns and
/// positive pivots.
pub fn row_basis(mut a: ZMat) -> ZMat {
    let mut basis_row = 0;
    for col in 0..a.cols {
        // gcd-reduce all rows below basis_row on this column down to one
        loop {
            let mut best: Option<usize> = None;
            for i in basis_row..a.rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if a[(i, col)].abs() < a[(b, col)].abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            a.swap_rows(basis_row, b);
            let mut again = false;
            for i in basis_row + 1..a.rows {
                if !a[(i, col)].is_zero() {
                    let q = div_round(&a[(i, col)], &a[(basis_row, col)]);
                    a.row_axpy(i, basis_row, &q);
                    if !a[(i, col)].is_zero() {
                        again = true;
                    }
                }
            }
            if !again {
                break;
            }
        }
        if basis_row < a.rows && !a[(basis_row, col)].is_zero() {
            if a[(basis_row, col)].is_negative() {
                for k in 0..a.cols {
                    let t = -a[(basis_row, k)].clone();
                    a[(basis_row, k)] = t;
                }
            }
            basis_row += 1;
        }
    }
    // reduce rows above pivots for a canonical-ish echelon (not required for
    // membership tests, but keeps entries small)
    let pivots: Vec<(usize, usize)> = (0..basis_row)
        .map(|i| {
            let j = (0..a.cols).find(|&j| !a[(i, j)].is_zero()).unwrap();
            (i, j)
        })
        .collect();
    for &(i, j) in pivots.iter().rev() {
        for above in 0..i {
            let q = a[(above, j)].div_floor(&a[(i, j)]);
            a.row_axpy(above, i, &q);
        }
    }
    ZMat::from_rows((0..basis_row).map(|i| a.row(i).to_vec()).collect())
}

/// Express `vec` as an integer combination of the echelon `basis` rows.
/// Returns None when `vec` is outside the lattice they span.
pub fn express_in_row_basis(basis: &ZMat, vec: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(vec.len(), basis.cols);
    let mut rest: Vec<BigInt> = vec.to_vec();
    let mut coeffs = vec![BigInt::zero(); basis.rows];
    for i in 0..basis.rows {
        let j = (0..basis.cols).find(|&j| !basis[(i, j)].is_zero()).unwrap();
        if rest[j].is_zero() {
            continue;
        }
        let (q, r) = rest[j].div_rem(&basis[(i, j)]);
        if !r.is_zero() {
            return None;
        }
        for k in 0..basis.cols {
            let t = &basis[(i, k)] * &q;
            rest[k] -= t;
        }
        coeffs[i] = q;
    }
    if rest.iter().all(|x| x.is_zero()) {
        Some(coeffs)
    } else {
        None
    }
}

/// Index of the sublattice spanned by `sub_rows` inside the lattice spanned
/// by `ambient_rows`. Returns None when the sublattice is not of full rank
/// in the ambient lattice or some generator falls outside it.
pub fn lattice_index(ambient_rows: &ZMat, sub_rows: &ZMat) -> Option<BigInt> {
    let basis = row_basis(ambient_rows.clone());
    let mut coeff_rows = Vec::with_capacity(sub_rows.rows);
    for i in 0..sub_rows.rows {
        coeff_rows.push(express_in_row_basis(&basis, sub_rows.row(i))?);
    }
    let coeffs = ZMat::from_rows(coeff_rows);
    let snf = smith_normal_form(coeffs);
    if snf.diag.len() < basis.rows {
        return None; // not finite index
    }
    Some(snf.diag.iter().product())
}

/// Rank of the row space over Q.
pub fn rank(a: &ZMat) -> usize {
    row_basis(a.clone()).rows
}
