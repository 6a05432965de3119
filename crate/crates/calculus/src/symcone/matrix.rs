use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use libm::{hypot, sqrt};

use crate::error::{input, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

/// Dense square matrix of dimension `1..=MAX_DIM`, stored inline.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    n: usize,
    a: [[f64; MAX_DIM]; MAX_DIM],
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.n {
            list.entry(&&self.a[i][..self.n]);
        }
        list.finish()
    }
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&n), "matrix dimension {n} out of range");
        Matrix {
            n,
            a: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &x) in d.iter().enumerate() {
            m.a[i][i] = x;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.a[i][j] = f(i, j);
            }
        }
        m
    }

    /// Builds an `n×n` matrix from `n²` row-major entries.
    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&n) {
            return input(alloc::format!("dimension {n} not in 1..={MAX_DIM}"));
        }
        if entries.len() != n * n {
            return input(alloc::format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                entries.len()
            ));
        }
        Ok(Self::from_fn(n, |i, j| entries[i * n + j]))
    }

    pub fn from_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |i, j| rows[i][j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i][j] = v;
    }

    pub fn row_major(&self) -> alloc::vec::Vec<f64> {
        let mut v = alloc::vec::Vec::with_capacity(self.n * self.n);
        for i in 0..self.n {
            v.extend_from_slice(&self.a[i][..self.n]);
        }
        v
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.a[j][i])
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.a[i][i]).sum()
    }

    /// Frobenius inner product `⟨A,B⟩ = Tr(ABᵀ)`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.n, other.n);
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j] * other.a[i][j];
            }
        }
        s
    }

    pub fn frobenius(&self) -> f64 {
        sqrt(self.inner(self))
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.a[i][j].abs());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        (0..self.n).all(|i| self.a[i][..self.n].iter().all(|x| x.is_finite()))
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::from_fn(self.n, |i, j| t * self.a[i][j])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        Self::from_fn(n, |i, j| (0..n).map(|l| self.a[i][l] * other.a[l][j]).sum())
    }

    pub fn mul_vec(&self, v: &[f64], out: &mut [f64]) {
        for i in 0..self.n {
            out[i] = (0..self.n).map(|j| self.a[i][j] * v[j]).sum();
        }
    }

    /// Largest deviation from symmetry, `max |a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.max((self.a[i][j] - self.a[j][i]).abs());
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        let n = self.n;
        match n {
            1 => return self.a[0][0],
            2 => return self.a[0][0] * self.a[1][1] - self.a[0][1] * self.a[1][0],
            _ => {}
        }
        let mut m = self.a;
        let mut det = 1.0;
        for c in 0..n {
            let mut p = c;
            for r in (c + 1)..n {
                if m[r][c].abs() > m[p][c].abs() {
                    p = r;
                }
            }
            if m[p][c] == 0.0 {
                return 0.0;
            }
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= m[c][c];
            for r in (c + 1)..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        det
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> ([f64; MAX_DIM], usize) {
        let ata = SymMatrix::from_matrix_unchecked(self.transpose().matmul(self));
        let spec = super::eigen::jacobi(&ata);
        let mut s = [0.0; MAX_DIM];
        for i in 0..self.n {
            s[i] = sqrt(spec.values()[i].max(0.0));
        }
        (s, self.n)
    }

    /// Operator norm `‖A‖ = max |Ax|/|x|`.
    pub fn op_norm(&self) -> f64 {
        if self.n == 2 {
            let [a, b] = [self.a[0][0], self.a[0][1]];
            let [c, d] = [self.a[1][0], self.a[1][1]];
            // Conformal and anticonformal parts; cancellation-free, so
            // conformal matrices have ‖A‖² = det A to rounding.
            let conf = hypot(a + d, c - b);
            let anti = hypot(a - d, b + c);
            return 0.5 * (conf + anti);
        }
        self.singular_values().0[0]
    }

    pub fn symmetric_part(&self) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| 0.5 * (self.a[i][j] + self.a[j][i]))
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, o: Matrix) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.a[i][j] + o.a[i][j])
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, o: Matrix) -> Matrix {
        Matrix::from_fn(self.n, |i, j| self.a[i][j] - o.a[i][j])
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Matrix {
    type Output = Matrix;
    fn mul(self, t: f64) -> Matrix {
        self.scale(t)
    }
}

/// Symmetric matrix; the upper triangle is authoritative and mirrored, so
/// `get(i,j) == get(j,i)` holds bit for bit.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMatrix(Matrix);

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl SymMatrix {
    /// Builds from a function read on the upper triangle `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                m.a[i][j] = v;
                m.a[j][i] = v;
            }
        }
        SymMatrix(m)
    }

    pub fn zeros(n: usize) -> Self {
        SymMatrix(Matrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diag(d: &[f64]) -> Self {
        SymMatrix(Matrix::diag(d))
    }

    /// Accepts a general matrix whose asymmetry is at most `tol·max(1,|A|)`;
    /// the upper triangle is kept.
    pub fn from_matrix(m: Matrix, tol: f64) -> Result<Self> {
        if !m.is_finite() {
            return input("non-finite matrix entry");
        }
        if m.asymmetry() > tol * m.max_abs().max(1.0) {
            return input("matrix is not symmetric");
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix) -> Self {
        Self::from_fn(m.n, |i, j| m.a[i][j])
    }

    pub fn from_row_major(n: usize, entries: &[f64]) -> Result<Self> {
        Self::from_matrix(Matrix::from_row_major(n, entries)?, 1e-12)
    }

    #[inline]
    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.a[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn inner(&self, other: &SymMatrix) -> f64 {
        self.0.inner(&other.0)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.frobenius()
    }

    pub fn det(&self) -> f64 {
        self.0.det()
    }

    pub fn scale(&self, t: f64) -> Self {
        SymMatrix(self.0.scale(t))
    }

    /// `Q·A·Qᵀ` for an orthogonal (or any) `Q`.
    pub fn conjugate(&self, q: &Matrix) -> Self {
        let m = q.matmul(&self.0).matmul(&q.transpose());
        Self::from_fn(self.dim(), |i, j| 0.5 * (m.a[i][j] + m.a[j][i]))
    }

    /// `frame·diag(d)·frameᵀ`.
    pub fn from_spectral(frame: &Matrix, d: &[f64]) -> Self {
        let n = frame.n;
        Self::from_fn(n, |i, j| {
            (0..n).map(|l| frame.a[i][l] * d[l] * frame.a[j][l]).sum()
        })
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
}

impl Add for SymMatrix {
    type Output = SymMatrix;
    fn add(self, o: SymMatrix) -> SymMatrix {
        SymMatrix(self.0 + o.0)
    }
}

impl Sub for SymMatrix {
    type Output = SymMatrix;
    fn sub(self, o: SymMatrix) -> SymMatrix {
        SymMatrix(self.0 - o.0)
    }
}

impl Neg for SymMatrix {
    type Output = SymMatrix;
    fn neg(self) -> SymMatrix {
        SymMatrix(-self.0)
    }
}

impl Mul<f64> for SymMatrix {
    type Output = SymMatrix;
    fn mul(self, t: f64) -> SymMatrix {
        self.scale(t)
    }
}

impl From<SymMatrix> for Matrix {
    fn from(s: SymMatrix) -> Matrix {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = Matrix::from_rows([[2.0, -1.0, 0.5], [0.3, 4.0, 1.0], [1.0, 0.0, -2.0]]);
        let cof = 2.0 * (4.0 * -2.0 - 1.0 * 0.0) - (-1.0) * (0.3 * -2.0 - 1.0 * 1.0)
            + 0.5 * (0.3 * 0.0 - 4.0 * 1.0);
        assert!((m.det() - cof).abs() < 1e-13);
    }

    #[test]
    fn op_norm_of_rotation_scaled() {
        let m = Matrix::from_rows([[0.0, -3.0], [3.0, 0.0]]);
        assert!((m.op_norm() - 3.0).abs() < 1e-14);
        let d = Matrix::from_rows([[1.0, 0.0, 0.0], [0.0, -5.0, 0.0], [0.0, 0.0, 2.0]]);
        assert!((d.op_norm() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_storage_is_mirrored() {
        let s = SymMatrix::from_fn(4, |i, j| (i * 10 + j) as f64);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(s.get(i, j), s.get(j, i));
            }
        }
        assert!(SymMatrix::from_row_major(2, &[1.0, 2.0, 3.0, 4.0]).is_err());
    }
}
