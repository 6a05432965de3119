//! 2×2 quasiconformal tools: the Burkholder integrand and conformal
//! coordinates.

use libm::pow;

use super::matrix::Matrix;
use super::poly::OUTSIDE;

/// `B_K(A) = (K det A − ‖A‖²)^{(K−1)/(2K)}·‖A‖^{1/K}` with the operator norm;
/// [`OUTSIDE`] when the radicand is negative, i.e. off `Q_2^+(K)`.
pub fn burkholder_eval(a: &Matrix, distortion: f64) -> f64 {
    debug_assert_eq!(a.dim(), 2);
    let k = distortion;
    let norm = a.op_norm();
    let rad = k * a.det() - norm * norm;
    if rad < 0.0 {
        return OUTSIDE;
    }
    pow(rad, (k - 1.0) / (2.0 * k)) * pow(norm, 1.0 / k)
}

/// Coordinates `(b1, b2, b3, b4)` in the basis splitting a 2×2 matrix into
/// conformal (`b1`, `b4`) and anti-conformal (`b2`, `b3`) parts.
pub fn conformal_coords(a: &Matrix) -> [f64; 4] {
    debug_assert_eq!(a.dim(), 2);
    let (a11, a12, a21, a22) = (a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1));
    [
        0.5 * (a11 + a22),
        0.5 * (a12 + a21),
        0.5 * (a11 - a22),
        0.5 * (a12 - a21),
    ]
}

pub fn from_conformal(b: [f64; 4]) -> Matrix {
    Matrix::from_rows([[b[0] + b[2], b[1] + b[3]], [b[1] - b[3], b[0] - b[2]]])
}

/// `det A = b1² − b2² − b3² + b4²`.
pub fn conformal_det(b: [f64; 4]) -> f64 {
    b[0] * b[0] - b[1] * b[1] - b[2] * b[2] + b[3] * b[3]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let a = Matrix::from_rows([[1.0, 2.0], [3.0, 4.0]]);
        let b = conformal_coords(&a);
        assert_eq!(b, [2.5, 2.5, -1.5, -0.5]);
        assert_eq!(conformal_det(b), -2.0);
        assert_eq!(from_conformal(b), a);
    }

    #[test]
    fn burkholder_identity_and_sign() {
        assert!((burkholder_eval(&Matrix::identity(2), 2.0) - 1.0).abs() < 1e-15);
        let refl = Matrix::from_rows([[1.0, 0.0], [0.0, -1.0]]);
        assert_eq!(burkholder_eval(&refl, 3.0), OUTSIDE);
    }
}
