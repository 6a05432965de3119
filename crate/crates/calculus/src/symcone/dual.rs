//! The dual functional `ρ_k*`, its minimizer and the inverse of `∇F_k`.
//!
//! Everything reduces to the vector problem on sorted eigenvalues: for `B`
//! with spectrum `μ` in frame `Q`,
//! `ρ_k*(B) = inf { μ·λ/n : λ ∈ Γ_k, ρ_k(λ) ≥ 1 }` and the minimizing matrix
//! is `Q·diag(λ)·Qᵀ`.

use libm::{pow, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eigen::{jacobi, Spectrum};
use super::matrix::{SymMatrix, MAX_DIM};
use super::sample::standard_normal;
use super::poly::{elementary, grad_sigma, hess_sigma, rho_vec, OUTSIDE};
use crate::error::{domain, input, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualMethod {
    Newton,
    SamplingFallback,
    ClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualEvaluation {
    /// `ρ_k*(B)`, or [`OUTSIDE`] when `B ∉ Γ_k*`.
    pub value: f64,
    /// Attaining `A ∈ Γ_k` with `ρ_k(A) = 1`; absent outside the cone and on
    /// boundary points where the infimum is not attained.
    pub minimizer: Option<SymMatrix>,
    pub method: DualMethod,
}

impl DualEvaluation {
    pub fn is_outside(&self) -> bool {
        self.value == OUTSIDE
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DualOptions {
    /// Use the closed forms for `k ∈ {1, 2, n}`.
    pub prefer_closed_form: bool,
    /// Relative membership band, scaled by `|B|`.
    pub tol: f64,
    pub max_newton: usize,
    /// Skip Newton and go straight to sampling (testing hook).
    pub force_fallback: bool,
    /// Seed of the multistart and sampling stages.
    pub seed: u64,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            prefer_closed_form: true,
            tol: 1e-8,
            max_newton: 100,
            force_fallback: false,
            seed: 0x5eed_c0de,
        }
    }
}

pub fn rho_k_star(b: &SymMatrix, k: usize) -> Result<DualEvaluation> {
    rho_k_star_with(b, k, &DualOptions::default())
}

fn validate(b: &SymMatrix, k: usize) -> Result<()> {
    let n = b.dim();
    if n < 2 {
        return input("dual functional needs dimension >= 2");
    }
    if k == 0 || k > n {
        return input(alloc::format!("order k = {k} not in 1..={n}"));
    }
    if !b.is_finite() {
        return input("non-finite matrix entry");
    }
    Ok(())
}

pub fn rho_k_star_with(b: &SymMatrix, k: usize, opts: &DualOptions) -> Result<DualEvaluation> {
    validate(b, k)?;
    let n = b.dim();
    let sp = jacobi(b);
    let mu = sp.values();
    let scale = norm(mu);
    if scale == 0.0 {
        return Ok(DualEvaluation {
            value: 0.0,
            minimizer: None,
            method: DualMethod::ClosedForm,
        });
    }
    let band = opts.tol * scale;
    if k == 1 || (opts.prefer_closed_form && (k == 2 || k == n)) {
        return Ok(closed_form(&sp, k, band));
    }
    // Γ_k ⊃ Γ_n = Sym⁺ contains every e_i⊗e_i, so Γ_k* ⊂ Sym⁺.
    if mu[n - 1] < -band {
        return Ok(outside(DualMethod::ClosedForm));
    }
    if !opts.force_fallback {
        if let Some(lam) = newton(mu, k, opts.max_newton) {
            let (value, hat) = normalize(mu, &lam[..n], k);
            if value.is_finite() {
                return Ok(DualEvaluation {
                    value,
                    minimizer: Some(sp.with_values(&hat[..n])),
                    method: DualMethod::Newton,
                });
            }
        }
    }
    fallback(&sp, k, opts)
}

fn outside(method: DualMethod) -> DualEvaluation {
    DualEvaluation {
        value: OUTSIDE,
        minimizer: None,
        method,
    }
}

fn norm(v: &[f64]) -> f64 {
    sqrt(v.iter().map(|x| x * x).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Rescales `λ` to `ρ_k = 1` and returns `(μ·λ̂/n, λ̂)`.
fn normalize(mu: &[f64], lam: &[f64], k: usize) -> (f64, [f64; MAX_DIM]) {
    let n = mu.len();
    let r = rho_vec(lam, k);
    let mut hat = [0.0; MAX_DIM];
    if !(r > 0.0) {
        return (f64::NAN, hat);
    }
    for i in 0..n {
        hat[i] = lam[i] / r;
    }
    (dot(mu, &hat[..n]) / n as f64, hat)
}

fn closed_form(sp: &Spectrum, k: usize, band: f64) -> DualEvaluation {
    let mu = sp.values();
    let n = mu.len();
    let trace: f64 = mu.iter().sum();
    let method = DualMethod::ClosedForm;
    if k == 1 {
        // Γ_1* is the ray {tI : t ≥ 0}.
        let t = trace / n as f64;
        let dev = sqrt(mu.iter().map(|x| (x - t) * (x - t)).sum());
        if dev > band || t < -band {
            return outside(method);
        }
        let ones = [1.0; MAX_DIM];
        return DualEvaluation {
            value: t.max(0.0),
            minimizer: if t > band { Some(sp.with_values(&ones[..n])) } else { None },
            method,
        };
    }
    if k == n {
        let least = mu[n - 1];
        if least < -band {
            return outside(method);
        }
        if least <= band {
            return DualEvaluation { value: 0.0, minimizer: None, method };
        }
        let g = pow(mu.iter().product::<f64>(), 1.0 / n as f64);
        let mut inv = [0.0; MAX_DIM];
        for i in 0..n {
            inv[i] = g / mu[i];
        }
        return DualEvaluation {
            value: g,
            minimizer: Some(sp.with_values(&inv[..n])),
            method,
        };
    }
    // k = 2: Γ_2* = {Tr ≥ 0, Tr² ≥ (n−1)|B|²}.
    let sq: f64 = mu.iter().map(|x| x * x).sum();
    let rad = (trace * trace - (n - 1) as f64 * sq) / n as f64;
    if trace < -band || rad < -band * band {
        return outside(method);
    }
    let value = sqrt(rad.max(0.0));
    if value <= band {
        return DualEvaluation { value, minimizer: None, method };
    }
    let mut a = [0.0; MAX_DIM];
    for i in 0..n {
        a[i] = trace / (n - 1) as f64 - mu[i];
    }
    let (_, hat) = normalize(mu, &a[..n], 2);
    DualEvaluation {
        value,
        minimizer: Some(sp.with_values(&hat[..n])),
        method,
    }
}

fn strictly_inside(lam: &[f64], k: usize) -> bool {
    let e = elementary(lam);
    (1..=k).all(|j| e[j] > 0.0)
}

/// Damped Newton on `m·λ − log σ_k(λ)` over `int Γ_k`, `m = μ/|μ|`.
/// Stationary points satisfy `∇σ_k(λ) ∝ m`; the objective is unbounded below
/// exactly when `μ ∉ int Γ_k*`, which shows up as divergence.
fn newton(mu: &[f64], k: usize, max_iter: usize) -> Option<[f64; MAX_DIM]> {
    let n = mu.len();
    let s = norm(mu);
    let mut m = [0.0; MAX_DIM];
    for i in 0..n {
        m[i] = mu[i] / s;
    }
    let msum: f64 = m[..n].iter().sum();
    if !(msum > 0.0) {
        return None;
    }
    let mut lam = [k as f64 / msum; MAX_DIM];
    let start = norm(&lam[..n]);
    let mut grad = [0.0; MAX_DIM];
    let mut hs = [[0.0; MAX_DIM]; MAX_DIM];
    let mut prev_dec = f64::INFINITY;
    for _ in 0..max_iter {
        let sk = elementary(&lam[..n])[k];
        grad_sigma(&lam[..n], k, &mut grad[..n]);
        hess_sigma(&lam[..n], k, &mut hs);
        let mut g = [0.0; MAX_DIM];
        let mut h = [[0.0; MAX_DIM]; MAX_DIM];
        for i in 0..n {
            g[i] = m[i] - grad[i] / sk;
            for j in 0..n {
                h[i][j] = -hs[i][j] / sk + grad[i] * grad[j] / (sk * sk);
            }
        }
        let step = cholesky_solve(&h, &g[..n], n)?;
        let dec2 = dot(&g[..n], &step[..n]);
        if !(dec2 >= 0.0) {
            return None;
        }
        let dec = sqrt(dec2);
        // Near ∂Γ_k* the decrement bottoms out at the rounding floor of σ_k
        // instead of reaching 1e-12; a small decrement that stops halving
        // has converged as far as it can.
        if dec < 1e-12 || (dec < 1e-8 && dec > 0.5 * prev_dec) {
            return Some(lam);
        }
        prev_dec = dec;
        let mut t = if dec > 0.25 { 1.0 / (1.0 + dec) } else { 1.0 };
        let mut next = lam;
        loop {
            for i in 0..n {
                next[i] = lam[i] - t * step[i];
            }
            if strictly_inside(&next[..n], k) {
                break;
            }
            t *= 0.5;
            if t < 1e-12 {
                return None;
            }
        }
        lam = next;
        if !(norm(&lam[..n]) < 1e10 * start) {
            return None;
        }
    }
    None
}

fn cholesky_solve(
    h: &[[f64; MAX_DIM]; MAX_DIM],
    rhs: &[f64],
    n: usize,
) -> Option<[f64; MAX_DIM]> {
    let mut l = [[0.0; MAX_DIM]; MAX_DIM];
    for i in 0..n {
        for j in 0..=i {
            let mut s = h[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[i][i] = sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = [0.0; MAX_DIM];
    for i in 0..n {
        let mut s = rhs[i];
        for p in 0..i {
            s -= l[i][p] * y[p];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; MAX_DIM];
    for i in (0..n).rev() {
        let mut s = y[i];
        for p in (i + 1)..n {
            s -= l[p][i] * x[p];
        }
        x[i] = s / l[i][i];
    }
    Some(x)
}

/// Random unit vector orthogonal to `(1,…,1)`.
fn random_tangent(rng: &mut ChaCha8Rng, n: usize) -> [f64; MAX_DIM] {
    loop {
        let mut d = [0.0; MAX_DIM];
        for x in d.iter_mut().take(n) {
            *x = standard_normal(rng);
        }
        if let Some(u) = project_tangent(&d, n) {
            return u;
        }
    }
}

fn project_tangent(d: &[f64; MAX_DIM], n: usize) -> Option<[f64; MAX_DIM]> {
    let mean = d[..n].iter().sum::<f64>() / n as f64;
    let mut u = [0.0; MAX_DIM];
    for i in 0..n {
        u[i] = d[i] - mean;
    }
    let r = norm(&u[..n]);
    if r < 1e-12 {
        return None;
    }
    for x in u.iter_mut().take(n) {
        *x /= r;
    }
    Some(u)
}

/// Exit parameter of the ray `1 + s·d` from the closed cone `Γ_k`, `k ≥ 2`.
fn exit_parameter(d: &[f64], k: usize) -> f64 {
    let n = d.len();
    let point = |s: f64| {
        let mut x = [0.0; MAX_DIM];
        for i in 0..n {
            x[i] = 1.0 + s * d[i];
        }
        x
    };
    let (mut lo, mut hi) = (0.0, n as f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if super::poly::in_gamma(&point(mid)[..n], k) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `min μ·x/|x|` over the boundary of `Γ_k` (`2 ≤ k`), by multistart over
/// boundary directions followed by compass refinement of the best starts.
fn boundary_margin(mu: &[f64], k: usize, seed: u64) -> f64 {
    let n = mu.len();
    let eval = |d: &[f64; MAX_DIM]| {
        let s = exit_parameter(&d[..n], k);
        let mut x = [0.0; MAX_DIM];
        for i in 0..n {
            x[i] = 1.0 + s * d[i];
        }
        dot(mu, &x[..n]) / norm(&x[..n])
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: [(f64, [f64; MAX_DIM]); 6] = [(f64::INFINITY, [0.0; MAX_DIM]); 6];
    // Opposite sorting pairs the largest μ with the smallest λ, so seed the
    // search with the few directions that exploit that pairing.
    let consider = |v: f64, d: [f64; MAX_DIM], best: &mut [(f64, [f64; MAX_DIM]); 6]| {
        if v < best[5].0 {
            best[5] = (v, d);
            best.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
    };
    for j in 0..n {
        let mut d = [1.0; MAX_DIM];
        d[j] = -(n as f64 - 1.0);
        if let Some(u) = project_tangent(&d, n) {
            consider(eval(&u), u, &mut best);
        }
        let mut d = [0.0; MAX_DIM];
        d[j] = 1.0;
        for (i, x) in d.iter_mut().enumerate().take(n) {
            *x = if i > j { -1.0 } else { 1.0 };
        }
        if let Some(u) = project_tangent(&d, n) {
            consider(eval(&u), u, &mut best);
        }
    }
    for _ in 0..2000 {
        let d = random_tangent(&mut rng, n);
        consider(eval(&d), d, &mut best);
    }
    let mut overall = best[0].0;
    for (v0, d0) in best {
        if !v0.is_finite() {
            continue;
        }
        let (mut v, mut d) = (v0, d0);
        let mut step = 0.25;
        while step > 1e-9 {
            let mut improved = false;
            for i in 0..n {
                for sgn in [1.0, -1.0] {
                    let mut trial = d;
                    trial[i] += sgn * step;
                    if let Some(u) = project_tangent(&trial, n) {
                        let tv = eval(&u);
                        if tv < v {
                            v = tv;
                            d = u;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        overall = overall.min(v);
    }
    overall
}

fn fallback(sp: &Spectrum, k: usize, opts: &DualOptions) -> Result<DualEvaluation> {
    let mu = sp.values();
    let n = mu.len();
    let scale = norm(mu);
    let band = opts.tol * scale;
    let margin = boundary_margin(mu, k, opts.seed);
    if margin < -band {
        return Ok(outside(DualMethod::SamplingFallback));
    }
    if margin <= band {
        return Ok(DualEvaluation {
            value: 0.0,
            minimizer: None,
            method: DualMethod::SamplingFallback,
        });
    }
    // Interior point that Newton could not handle: sample the section
    // {1 + s·d} of Γ_k and refine by compass search.
    let objective = |lam: &[f64; MAX_DIM]| {
        let r = rho_vec(&lam[..n], k);
        if r > 0.0 {
            dot(mu, &lam[..n]) / (n as f64 * r)
        } else {
            f64::INFINITY
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut best = (objective(&[1.0; MAX_DIM]), [1.0; MAX_DIM]);
    for _ in 0..10_000 {
        let d = random_tangent(&mut rng, n);
        let s = exit_parameter(&d[..n], k) * rng.random::<f64>();
        let mut x = [0.0; MAX_DIM];
        for i in 0..n {
            x[i] = 1.0 + s * d[i];
        }
        let v = objective(&x);
        if v < best.0 {
            best = (v, x);
        }
    }
    let (mut v, mut x) = best;
    let mut step = 0.1;
    while step > 1e-10 {
        let mut improved = false;
        for i in 0..n {
            for sgn in [1.0, -1.0] {
                let mut trial = x;
                trial[i] += sgn * step;
                let tv = objective(&trial);
                if tv < v {
                    v = tv;
                    x = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    if !v.is_finite() {
        return Err(Error::Indeterminate { lower: 0.0, upper: best.0 });
    }
    let (value, hat) = normalize(mu, &x[..n], k);
    Ok(DualEvaluation {
        value,
        minimizer: Some(sp.with_values(&hat[..n])),
        method: DualMethod::SamplingFallback,
    })
}

/// Minimizer `A ∈ Γ_k`, `ρ_k(A) = 1`, attaining `ρ_k*(B) = ⟨A,B⟩/n`.
pub fn duality_minimizer(b: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let ev = rho_k_star(b, k)?;
    match ev.minimizer {
        Some(a) if !ev.is_outside() && ev.value > 0.0 => Ok(a),
        _ => domain("matrix is not in the interior of the dual cone"),
    }
}

/// Inverse of `∇F_k : int Γ_k → int Γ_k*`, `k ≥ 2`.
pub fn grad_fk_inverse(b: &SymMatrix, k: usize) -> Result<SymMatrix> {
    validate(b, k)?;
    if k < 2 {
        return input("gradient of F_1 is constant and has no inverse");
    }
    let ev = rho_k_star(b, k)?;
    let a = match ev.minimizer {
        Some(a) if !ev.is_outside() && ev.value > 0.0 => a,
        _ => return domain("matrix is not in the interior of the dual cone"),
    };
    let n = b.dim() as f64;
    let c = pow(n * ev.value / k as f64, 1.0 / (k as f64 - 1.0));
    Ok(a.scale(c))
}

/// `Γ_k*` membership of a symmetric matrix with band `tol·|B|`.
pub(crate) fn gamma_star_membership(
    b: &SymMatrix,
    k: usize,
    tol: f64,
) -> Result<super::cone::Membership> {
    use super::cone::Membership;
    validate(b, k)?;
    let n = b.dim();
    let sp = jacobi(b);
    let mu = sp.values();
    let scale = norm(mu);
    if scale == 0.0 {
        return Ok(Membership::Boundary);
    }
    let band = tol * scale;
    let opts = DualOptions { tol, ..DualOptions::default() };
    if k == 1 || k == 2 || k == n {
        let ev = closed_form(&sp, k, band);
        return Ok(if ev.is_outside() {
            Membership::Outside
        } else if ev.value <= band {
            Membership::Boundary
        } else {
            Membership::Inside
        });
    }
    if mu[n - 1] < -band {
        return Ok(Membership::Outside);
    }
    if let Some(lam) = newton(mu, k, opts.max_newton) {
        let (value, _) = normalize(mu, &lam[..n], k);
        if value > band {
            return Ok(Membership::Inside);
        }
    }
    let margin = boundary_margin(mu, k, opts.seed);
    Ok(if margin < -band {
        Membership::Outside
    } else if margin <= band {
        Membership::Boundary
    } else {
        Membership::Inside
    })
}

/// `(Tr(X)² − (n−1)|X|²)/√n`. On a singular `X` with nonzero eigenvalues
/// `λ_1..λ_{n−1}` this is `−Σ_{i<j}(λ_i − λ_j)²/√n ≤ 0`.
pub fn f2_form(x: &SymMatrix) -> f64 {
    let n = x.dim() as f64;
    let t = x.trace();
    (t * t - (n - 1.0) * x.inner(x)) / sqrt(n)
}

/// `∇F_k(A)` normalized so that `ρ_k*` of the result is 1 when `ρ_k(A) = 1`:
/// the attainment map `A ↦ n∇ρ_k(A)`.
pub fn attainment_map(a: &SymMatrix, k: usize) -> Result<SymMatrix> {
    let g = super::poly::grad_rho_k(a, k)?;
    Ok(g.scale(a.dim() as f64))
}
