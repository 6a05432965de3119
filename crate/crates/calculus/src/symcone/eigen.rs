use libm::sqrt;

use super::matrix::{Matrix, SymMatrix, MAX_DIM};
use crate::error::{input, Result};

/// Eigen-decomposition of a symmetric matrix: eigenvalues sorted descending
/// and the orthogonal frame whose columns are the matching eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Spectrum {
    n: usize,
    values: [f64; MAX_DIM],
    frame: Matrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.n]
    }

    pub fn frame(&self) -> &Matrix {
        &self.frame
    }

    pub fn reconstruct(&self) -> SymMatrix {
        SymMatrix::from_spectral(&self.frame, self.values())
    }

    /// `frame·diag(d)·frameᵀ` for a new diagonal in this frame.
    pub fn with_values(&self, d: &[f64]) -> SymMatrix {
        SymMatrix::from_spectral(&self.frame, d)
    }
}

/// Eigenvalues (descending) and orthonormal eigenvectors of `a`.
pub fn eigen_sym(a: &SymMatrix) -> Result<Spectrum> {
    if !a.is_finite() {
        return input("non-finite matrix entry");
    }
    Ok(jacobi(a))
}

/// Cyclic Jacobi rotations, run until the off-diagonal mass is at rounding
/// level relative to the Frobenius norm.
pub(crate) fn jacobi(s: &SymMatrix) -> Spectrum {
    let n = s.dim();
    let mut a = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in a.iter_mut().enumerate().take(n) {
        for (j, x) in row.iter_mut().enumerate().take(n) {
            *x = s.get(i, j);
        }
    }
    let mut v = [[0.0; MAX_DIM]; MAX_DIM];
    for (i, row) in v.iter_mut().enumerate().take(n) {
        row[i] = 1.0;
    }
    let scale = s.frobenius();
    let floor = (f64::EPSILON * scale) * (f64::EPSILON * scale) * 1e-4;

    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p][q] * a[p][q];
            }
        }
        if off <= floor || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let mag = 1.0 / (theta.abs() + sqrt(theta * theta + 1.0));
                    if theta < 0.0 {
                        -mag
                    } else {
                        mag
                    }
                };
                let c = 1.0 / sqrt(t * t + 1.0);
                let sn = t * c;
                a[p][p] -= t * apq;
                a[q][q] += t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[r][p];
                        let arq = a[r][q];
                        a[r][p] = c * arp - sn * arq;
                        a[p][r] = a[r][p];
                        a[r][q] = sn * arp + c * arq;
                        a[q][r] = a[r][q];
                    }
                }
                for row in v.iter_mut().take(n) {
                    let vrp = row[p];
                    let vrq = row[q];
                    row[p] = c * vrp - sn * vrq;
                    row[q] = sn * vrp + c * vrq;
                }
            }
        }
    }

    let mut order = [0usize; MAX_DIM];
    for (i, o) in order.iter_mut().enumerate().take(n) {
        *o = i;
    }
    order[..n].sort_by(|&x, &y| a[y][y].total_cmp(&a[x][x]));
    let mut values = [0.0; MAX_DIM];
    let mut frame = Matrix::zeros(n);
    for (col, &src) in order[..n].iter().enumerate() {
        values[col] = a[src][src];
        for (r, row) in v.iter().enumerate().take(n) {
            frame.set(r, col, row[src]);
        }
    }
    Spectrum { n, values, frame }
}
