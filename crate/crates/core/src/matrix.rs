//! Dense matrices over arbitrary-precision integers.
//!
//! Only what the lattice code needs: products, fraction-free determinants,
//! Smith normal form with both transforms, row-echelon bases and integer kernels.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{LatticeError, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors; all rows must share one length.
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LatticeError::DimensionMismatch {
                    expected: c,
                    actual: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(IntMatrix {
            rows: r,
            cols: c,
            data,
        })
    }

    /// Convenience constructor for small literal matrices. Panics on ragged input.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(v).expect("ragged literal matrix")
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<BigInt>]) -> Result<Self> {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != r {
                return Err(LatticeError::DimensionMismatch {
                    expected: r,
                    actual: col.len(),
                });
            }
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if self.cols != v.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `selfᵀ · inner · self`, the Gram matrix after a change of basis.
    pub fn congruence(&self, inner: &IntMatrix) -> Result<IntMatrix> {
        self.transpose().mul(&inner.mul(self)?)
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Block-diagonal sum.
    pub fn block_diag(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        out
    }

    /// Principal submatrix on the given index set.
    pub fn submatrix(&self, idx: &[usize]) -> IntMatrix {
        let mut out = Self::zeros(idx.len(), idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Determinant by Bareiss fraction-free elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    pub fn gcd_of_entries(&self) -> BigInt {
        self.data.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;

    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| {
                self.row(i)
                    .iter()
                    .map(ToString::to_string)
                    .collect::<Vec<_>>()
                    .join(" ")
            }))
            .finish()
    }
}

/// Smith normal form `left · A · right = diag(invariants)`, padded with zeros.
#[derive(Clone, Debug)]
pub struct Smith {
    pub left: IntMatrix,
    pub right: IntMatrix,
    /// Nonnegative diagonal entries `d₁ | d₂ | …`, length `min(rows, cols)`.
    pub diagonal: Vec<BigInt>,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|d| !d.is_zero()).count()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Smith {
    let (r, c) = (a.rows(), a.cols());
    let mut m = a.clone();
    let mut left = IntMatrix::identity(r);
    let mut right = IntMatrix::identity(c);
    let n = r.min(c);

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = &m[(i, j)];
                    if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < m[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(m, left, right, n);
            };
            m.swap_rows(t, pi);
            left.swap_rows(t, pi);
            m.swap_cols(t, pj);
            right.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                let q = m[(i, t)].div_floor(&m[(t, t)]);
                let nq = -q;
                m.add_row(i, t, &nq);
                left.add_row(i, t, &nq);
                if !m[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let q = m[(t, j)].div_floor(&m[(t, t)]);
                let nq = -q;
                m.add_col(j, t, &nq);
                right.add_col(j, t, &nq);
                if !m[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let pivot = m[(t, t)].clone();
            let offender =
                (t + 1..r).find(|&i| (t + 1..c).any(|j| !m[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    m.add_row(t, i, &one);
                    left.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if m[(t, t)].is_negative() {
            m.negate_row(t);
            left.negate_row(t);
        }
    }
    finish(m, left, right, n)
}

fn finish(m: IntMatrix, left: IntMatrix, right: IntMatrix, n: usize) -> Smith {
    Smith {
        diagonal: (0..n).map(|i| m[(i, i)].clone()).collect(),
        left,
        right,
    }
}

/// Basis of the integer kernel `{x ∈ Zᶜ : A x = 0}`, returned as column vectors.
/// The kernel is saturated, so the basis spans every integral solution.
pub fn integer_kernel(a: &IntMatrix) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    (rank..a.cols()).map(|j| snf.right.column(j)).collect()
}

/// Echelon basis of the Z-span of the given row vectors (zero rows dropped).
pub fn row_span_basis(generators: &[Vec<BigInt>], width: usize) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = generators.to_vec();
    let mut basis = Vec::new();
    for col in 0..width {
        // gcd-reduce column `col` among the remaining rows until one pivot survives
        loop {
            let mut nz: Vec<usize> = (0..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let p = nz[0];
            let pivot_row = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col].div_floor(&pivot_row[col]);
                for (x, y) in rows[i].iter_mut().zip(&pivot_row) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            let mut r = rows.swap_remove(i);
            if r[col].is_negative() {
                r.iter_mut().for_each(|x| *x = -&*x);
            }
            basis.push(r);
        }
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn det_small_cases() {
        assert_eq!(IntMatrix::from_i64(&[&[0, 1], &[1, 0]]).det(), big(-1));
        assert_eq!(IntMatrix::from_i64(&[&[-6, -3], &[-3, -6]]).det(), big(27));
        assert_eq!(
            IntMatrix::from_i64(&[&[0, 0, -1], &[0, 2, 0], &[-1, 0, 0]]).det(),
            big(-2)
        );
        assert_eq!(IntMatrix::from_i64(&[&[1, 2], &[2, 4]]).det(), big(0));
    }

    #[test]
    fn smith_of_fermat_gram() {
        let a = IntMatrix::from_i64(&[&[-6, -3], &[-3, -6]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, vec![big(3), big(9)]);
        let d = s.left.mul(&a).unwrap().mul(&s.right).unwrap();
        assert_eq!(d, IntMatrix::from_i64(&[&[3, 0], &[0, 9]]));
        assert_eq!(s.left.det().abs(), big(1));
        assert_eq!(s.right.det().abs(), big(1));
    }

    #[test]
    fn smith_rectangular_and_singular() {
        let a = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, vec![big(2), big(6), big(12)]);
        let b = IntMatrix::from_i64(&[&[1, 1, 1]]);
        let s = smith_normal_form(&b);
        assert_eq!(s.diagonal, vec![big(1)]);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn kernel_of_linear_form() {
        // ⟨·, e+f⟩ in U is x ↦ x₁ + x₀
        let a = IntMatrix::from_i64(&[&[1, 1]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(&k[0][0] + &k[0][1], big(0));
        assert_eq!(k[0][0].abs(), big(1));
    }

    #[test]
    fn kernel_is_saturated() {
        let a = IntMatrix::from_i64(&[&[2, 4, 6]]);
        let k = integer_kernel(&a);
        let m = IntMatrix::from_columns(&k).unwrap();
        // span contains (2,-1,0) and (3,0,-1) exactly, so the 2×2 minors have gcd 1
        let minors = [
            &m[(0, 0)] * &m[(1, 1)] - &m[(0, 1)] * &m[(1, 0)],
            &m[(0, 0)] * &m[(2, 1)] - &m[(0, 1)] * &m[(2, 0)],
            &m[(1, 0)] * &m[(2, 1)] - &m[(1, 1)] * &m[(2, 0)],
        ];
        let g = minors.iter().fold(big(0), |g, x| g.gcd(x));
        assert_eq!(g, big(1));
    }

    #[test]
    fn row_span_of_glue() {
        let gens = vec![
            vec![big(2), big(0)],
            vec![big(0), big(2)],
            vec![big(1), big(1)],
        ];
        let b = row_span_basis(&gens, 2);
        assert_eq!(b.len(), 2);
        let m = IntMatrix::from_rows(b).unwrap();
        assert_eq!(m.det().abs(), big(2));
    }
}
