//! Seeded random matrices for property tests and experiment corpora.

use libm::{cos, log, sqrt};
use rand::Rng;

use super::matrix::{Matrix, SymMatrix, MAX_DIM};
use super::poly::{elementary, grad_fk};
use crate::error::{Error, Result};

/// Box–Muller normal deviate.
pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    sqrt(-2.0 * log(u1)) * cos(core::f64::consts::TAU * u2)
}

/// Haar-ish orthogonal matrix: Gram–Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    loop {
        let mut cols = [[0.0; MAX_DIM]; MAX_DIM];
        let mut ok = true;
        for j in 0..n {
            for i in 0..n {
                cols[j][i] = standard_normal(rng);
            }
            for p in 0..j {
                let d: f64 = (0..n).map(|i| cols[j][i] * cols[p][i]).sum();
                for i in 0..n {
                    cols[j][i] -= d * cols[p][i];
                }
            }
            let r = sqrt((0..n).map(|i| cols[j][i] * cols[j][i]).sum());
            if r < 1e-8 {
                ok = false;
                break;
            }
            for i in 0..n {
                cols[j][i] /= r;
            }
        }
        if ok {
            return Matrix::from_fn(n, |i, j| cols[j][i]);
        }
    }
}

pub fn random_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(n, |_, _| standard_normal(rng))
}

pub fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymMatrix {
    SymMatrix::from_fn(n, |_, _| standard_normal(rng))
}

/// Eigenvalue vector in `int Γ_k`: a Gaussian vector shifted along
/// `(1,…,1)` by a random amount, rejected until every `σ_j > 0`.
pub fn random_gamma_vector<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<[f64; MAX_DIM]> {
    for _ in 0..10_000 {
        let shift = 3.0 * rng.random::<f64>();
        let mut l = [0.0; MAX_DIM];
        for x in l.iter_mut().take(n) {
            *x = standard_normal(rng) + shift;
        }
        let e = elementary(&l[..n]);
        if (1..=k).all(|j| e[j] > 0.0) {
            return Ok(l);
        }
    }
    Err(Error::Generation(alloc::format!(
        "no interior Gamma_{k} sample in 10000 draws (n = {n})"
    )))
}

/// Random `A ∈ int Γ_k` in a random frame.
pub fn random_in_gamma<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SymMatrix> {
    let l = random_gamma_vector(n, k, rng)?;
    let q = random_orthogonal(n, rng);
    Ok(SymMatrix::from_spectral(&q, &l[..n]))
}

/// Random `B ∈ int Γ_k*` as the image of an interior point under `∇F_k`,
/// which maps `int Γ_k` onto `int Γ_k*`.
pub fn random_in_gamma_star<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SymMatrix> {
    let a = random_in_gamma(n, k, rng)?;
    grad_fk(&a, k)
}

/// Random symmetric matrix with a zero eigenvalue (the Div wave cone).
pub fn random_wave_cone_div<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SymMatrix {
    let mut l = [0.0; MAX_DIM];
    for x in l.iter_mut().take(n - 1) {
        *x = standard_normal(rng);
    }
    let q = random_orthogonal(n, rng);
    SymMatrix::from_spectral(&q, &l[..n])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn orthogonal_frames_are_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=8 {
            let q = random_orthogonal(n, &mut rng);
            let dev = (q.transpose().matmul(&q) - Matrix::identity(n)).frobenius();
            assert!(dev < 1e-13);
        }
    }
}
