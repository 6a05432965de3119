//! Elementary symmetric functions `σ_k`, the normalized `F_k = σ_k/C(n,k)`
//! and `ρ_k = F_k^{1/k}` on the closed cone `Γ_k`.

use libm::pow;

use super::eigen::jacobi;
use super::matrix::{SymMatrix, MAX_DIM};
use crate::error::{input, Result};

/// Value of `ρ_k` and `ρ_k*` outside their cones.
pub const OUTSIDE: f64 = f64::NEG_INFINITY;

pub fn is_outside(x: f64) -> bool {
    x == OUTSIDE
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

/// `e[j] = σ_j(λ)` for `j = 0..=len`, skipping the indices in `skip`.
pub fn elementary_skip(lambda: &[f64], skip: &[usize]) -> [f64; MAX_DIM + 1] {
    let mut e = [0.0; MAX_DIM + 1];
    e[0] = 1.0;
    let mut m = 0;
    for (i, &x) in lambda.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        m += 1;
        for j in (1..=m).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

pub fn elementary(lambda: &[f64]) -> [f64; MAX_DIM + 1] {
    elementary_skip(lambda, &[])
}

pub fn sigma(lambda: &[f64], k: usize) -> f64 {
    elementary(lambda)[k]
}

/// Closed `Γ_k` membership of a vector: `σ_j ≥ 0` for `j = 1..=k`.
pub fn in_gamma(lambda: &[f64], k: usize) -> bool {
    let e = elementary(lambda);
    (1..=k).all(|j| e[j] >= 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymPoly {
    pub sigma: f64,
    pub f: f64,
    /// `F^{1/k}` on `Γ_k`, otherwise [`OUTSIDE`].
    pub rho: f64,
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if n == 0 || n > MAX_DIM {
        return input(alloc::format!("dimension {n} not in 1..={MAX_DIM}"));
    }
    if k == 0 || k > n {
        return input(alloc::format!("order k = {k} not in 1..={n}"));
    }
    Ok(())
}

pub fn sym_poly(lambda: &[f64], k: usize) -> Result<SymPoly> {
    let n = lambda.len();
    check_k(n, k)?;
    let e = elementary(lambda);
    let sigma = e[k];
    let f = sigma / binomial(n, k);
    let inside = (1..=k).all(|j| e[j] >= 0.0);
    let rho = if inside { pow(f.max(0.0), 1.0 / k as f64) } else { OUTSIDE };
    Ok(SymPoly { sigma, f, rho })
}

/// `ρ_k` of the vector `λ`, without validation.
pub(crate) fn rho_vec(lambda: &[f64], k: usize) -> f64 {
    let n = lambda.len();
    let e = elementary(lambda);
    if (1..=k).all(|j| e[j] >= 0.0) {
        pow((e[k] / binomial(n, k)).max(0.0), 1.0 / k as f64)
    } else {
        OUTSIDE
    }
}

/// `∂σ_k/∂λ_i = σ_{k−1}(λ without i)`.
pub fn grad_sigma(lambda: &[f64], k: usize, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate().take(lambda.len()) {
        *o = if k == 0 { 0.0 } else { elementary_skip(lambda, &[i])[k - 1] };
    }
}

/// `∂²σ_k/∂λ_i∂λ_j = σ_{k−2}(λ without i, j)` off the diagonal, 0 on it.
pub fn hess_sigma(lambda: &[f64], k: usize, out: &mut [[f64; MAX_DIM]; MAX_DIM]) {
    let n = lambda.len();
    for i in 0..n {
        out[i][i] = 0.0;
        for j in (i + 1)..n {
            let v = if k < 2 { 0.0 } else { elementary_skip(lambda, &[i, j])[k - 2] };
            out[i][j] = v;
            out[j][i] = v;
        }
    }
}

pub fn sigma_k(a: &SymMatrix, k: usize) -> Result<f64> {
    check_k(a.dim(), k)?;
    Ok(sigma(jacobi(a).values(), k))
}

pub fn f_k(a: &SymMatrix, k: usize) -> Result<f64> {
    Ok(sigma_k(a, k)? / binomial(a.dim(), k))
}

/// `ρ_k(A)`, or [`OUTSIDE`] when `λ(A) ∉ Γ_k`.
pub fn rho_k(a: &SymMatrix, k: usize) -> Result<f64> {
    check_k(a.dim(), k)?;
    if !a.is_finite() {
        return input("non-finite matrix entry");
    }
    Ok(rho_vec(jacobi(a).values(), k))
}

/// `∇F_k(A) = frame·diag(σ_{k−1}(λ without i)/C(n,k))·frameᵀ`.
pub fn grad_fk(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let n = a.dim();
    check_k(n, k)?;
    if !a.is_finite() {
        return input("non-finite matrix entry");
    }
    let sp = jacobi(a);
    let mut d = [0.0; MAX_DIM];
    grad_sigma(sp.values(), k, &mut d[..n]);
    let c = binomial(n, k);
    for x in d.iter_mut().take(n) {
        *x /= c;
    }
    Ok(sp.with_values(&d[..n]))
}

/// `∇ρ_k(A) = ρ_k^{1−k}∇F_k/k` on `int Γ_k`.
pub fn grad_rho_k(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let r = rho_k(a, k)?;
    if !(r > 0.0) {
        return crate::error::domain("gradient of rho_k needs an interior point");
    }
    Ok(grad_fk(a, k)?.scale(pow(r, 1.0 - k as f64) / k as f64))
}
