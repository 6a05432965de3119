//! Pointwise checks of the cone calculus on random matrices.

use std::time::Instant;

use cone_calculus::symcone::sample::{random_in_gamma, random_in_gamma_star};
use cone_calculus::symcone::{
    attainment_map, eigen_sym, grad_fk, grad_fk_inverse, power_concavity_profile, rho_k, rho_k_star, rho_k_star_with,
    DualOptions, LineSpec, SymMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::LabResult;

fn optimizer() -> DualOptions {
    DualOptions { prefer_closed_form: false, ..DualOptions::default() }
}

/// Random `(n, k)` with `2 ≤ k ≤ n ≤ 8`.
fn order_pair(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = rng.random_range(2..=8);
    (n, rng.random_range(2..=n))
}

fn rel_err(a: &SymMatrix, b: &SymMatrix) -> f64 {
    (*a - *b).frobenius() / b.frobenius()
}

/// `(max error, violations)` over `count` seeded samples.
fn sweep(cfg: &ExperimentConfig, count: usize, f: impl Fn(&mut ChaCha8Rng) -> LabResult<(f64, bool)> + Sync) -> LabResult<(f64, usize)> {
    let out: LabResult<Vec<(f64, bool)>> = (0..count)
        .into_par_iter()
        .map(|i| f(&mut ChaCha8Rng::seed_from_u64(cfg.sample_seed(i))))
        .collect();
    let out = out?;
    Ok((out.iter().map(|o| o.0).fold(0.0, f64::max), out.iter().filter(|o| o.1).count()))
}

pub fn cone_calculus(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("cone_calculus", &["pairs", "samples", "tol"])?;
    let pairs = cfg.get("pairs", 10_000usize)?;
    let samples = cfg.get("samples", 1_000usize)?;
    let tol = cfg.get("tol", 1e-8)?;
    let start = Instant::now();
    let mut rep = ExperimentReport::new("cone_calculus");

    // ρ_k*(I) = 1, solved by the optimizer rather than the closed forms.
    let mut identity_err: f64 = 0.0;
    for n in 2..=8 {
        for k in 2..=n {
            let v = rho_k_star_with(&SymMatrix::identity(n), k, &optimizer())?.value;
            identity_err = identity_err.max((v - 1.0).abs());
        }
    }
    rep.row("check", "dual_of_identity", 0, identity_err, tol, Verdict::IdentityOk.or_fail(identity_err <= tol));

    // ⟨A,B⟩/n ≥ ρ_k(A)ρ_k*(B) on A ∈ Γ_k, B ∈ Γ_k*.
    let (_, pairing_bad) = sweep(cfg, pairs, |rng| {
        let (n, k) = order_pair(rng);
        let a = random_in_gamma(n, k, rng)?;
        let b = random_in_gamma_star(n, k, rng)?;
        let lhs = a.inner(&b) / n as f64;
        let rhs = rho_k(&a, k)? * rho_k_star(&b, k)?.value;
        Ok((0.0, lhs < rhs - 1e-9 * a.frobenius() * b.frobenius()))
    })?;
    rep.row("check", "duality_pairing", 0, pairing_bad as f64, pairs as f64, Verdict::Bounded.or_fail(pairing_bad == 0));

    // ρ_k*(n∇ρ_k(A)) = 1.
    let (attain_err, _) = sweep(cfg, samples, |rng| {
        let (n, k) = order_pair(rng);
        let a = random_in_gamma(n, k, rng)?;
        let v = rho_k_star(&attainment_map(&a, k)?, k)?.value;
        Ok(((v - 1.0).abs(), false))
    })?;
    rep.row("check", "attainment", 0, attain_err, tol, Verdict::IdentityOk.or_fail(attain_err <= tol));

    // (∇F_k)⁻¹ ∘ ∇F_k = id on int Γ_k.
    let (trip_err, _) = sweep(cfg, samples, |rng| {
        let (n, k) = order_pair(rng);
        let a = random_in_gamma(n, k, rng)?;
        let back = grad_fk_inverse(&grad_fk(&a, k)?, k)?;
        Ok((rel_err(&back, &a), false))
    })?;
    rep.row("check", "gradient_round_trip", 0, trip_err, tol, Verdict::IdentityOk.or_fail(trip_err <= tol));

    let runtime = start.elapsed().as_secs_f64();
    rep.metric("identity_err", identity_err);
    rep.metric("pairing_violations", pairing_bad as f64);
    rep.metric("attainment_err", attain_err);
    rep.metric("round_trip_err", trip_err);
    rep.metric("runtime_s", runtime);
    let ok = rep.rows.iter().all(|r| r.verdict.passed());
    let summary = format!(
        "dual(I) err {identity_err:.2e}, pairing violations {pairing_bad}/{pairs}, attainment err {attain_err:.2e}, round trip {trip_err:.2e}"
    );
    Ok(rep.finish(Verdict::IdentityOk.or_fail(ok), summary))
}

pub fn maclaurin(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("maclaurin", &["samples"])?;
    let samples = cfg.get("samples", 1_000usize)?;
    let mut rep = ExperimentReport::new("maclaurin");
    // ρ_k ≤ ρ_l on Γ_k for l < k.
    let (_, primal_bad) = sweep(cfg, samples, |rng| {
        let (n, k) = order_pair(rng);
        let a = random_in_gamma(n, k, rng)?;
        let top = rho_k(&a, k)?;
        let mut bad = false;
        for l in 1..k {
            bad |= top > rho_k(&a, l)? * (1.0 + 1e-12);
        }
        Ok((0.0, bad))
    })?;
    // ρ_l* ≤ ρ_k* on Γ_l* ⊂ Γ_k* for l < k.
    let (_, dual_bad) = sweep(cfg, samples, |rng| {
        let (n, k) = order_pair(rng);
        let l = rng.random_range(1..k);
        let b = random_in_gamma_star(n, l, rng)?;
        let low = rho_k_star(&b, l)?.value;
        let high = rho_k_star(&b, k)?.value;
        Ok((0.0, low > high + 1e-9 * b.frobenius()))
    })?;
    rep.row("check", "primal_nesting", 0, primal_bad as f64, samples as f64, Verdict::Bounded.or_fail(primal_bad == 0));
    rep.row("check", "dual_nesting", 0, dual_bad as f64, samples as f64, Verdict::Bounded.or_fail(dual_bad == 0));
    rep.metric("primal_violations", primal_bad as f64);
    rep.metric("dual_violations", dual_bad as f64);
    let ok = primal_bad == 0 && dual_bad == 0;
    Ok(rep.finish(Verdict::Bounded.or_fail(ok), format!("violations: primal {primal_bad}, dual {dual_bad} of {samples}")))
}

pub fn closed_forms(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("closed_forms", &["samples", "tol"])?;
    let samples = cfg.get("samples", 1_000usize)?;
    let tol = cfg.get("tol", 1e-6)?;
    let mut rep = ExperimentReport::new("closed_forms");
    let dim = |rng: &mut ChaCha8Rng| rng.random_range(3..=8usize);
    // k = 2: closed form against the optimizer.
    let (err2, _) = sweep(cfg, samples, |rng| {
        let n = dim(rng);
        let b = random_in_gamma_star(n, 2, rng)?;
        let closed = rho_k_star(&b, 2)?.value;
        let solved = rho_k_star_with(&b, 2, &optimizer())?.value;
        Ok(((closed - solved).abs() / closed.abs().max(1e-300), false))
    })?;
    // k = n: det^{1/n} from the spectrum against the optimizer.
    let (errn, _) = sweep(cfg, samples, |rng| {
        let n = dim(rng);
        let b = random_in_gamma_star(n, n, rng)?;
        let det: f64 = eigen_sym(&b)?.values().iter().product();
        let closed = det.powf(1.0 / n as f64);
        let solved = rho_k_star_with(&b, n, &optimizer())?.value;
        Ok(((closed - solved).abs() / closed, false))
    })?;
    rep.row("k", "2", 0, err2, tol, Verdict::IdentityOk.or_fail(err2 <= tol));
    rep.row("k", "n", 0, errn, tol, Verdict::IdentityOk.or_fail(errn <= tol));
    rep.metric("rho2_err", err2);
    rep.metric("rhon_err", errn);
    let ok = err2 <= tol && errn <= tol;
    Ok(rep.finish(Verdict::IdentityOk.or_fail(ok), format!("relative gap: k=2 {err2:.2e}, k=n {errn:.2e}")))
}

/// Worst (largest) finite second difference of `ρ_k*^α` along the pushed
/// forward diagonal.
fn worst_second_difference(n: usize, k: usize, alpha: f64, t_grid: &[f64]) -> LabResult<f64> {
    let d = power_concavity_profile(k, alpha, &LineSpec::PushedForwardDiagonal { dim: n }, t_grid)?;
    Ok(d.into_iter().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max))
}

pub fn sharpness(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("sharpness", &["max_n", "excess", "tol"])?;
    let max_n = cfg.get("max_n", 6usize)?;
    let excess = cfg.get("excess", 0.1)?;
    let tol = cfg.get("tol", 1e-9)?;
    let t_grid: Vec<f64> = (0..=50).map(|i| -0.5 + 0.05 * i as f64).collect();
    let mut rep = ExperimentReport::new("sharpness");
    let mut ok = true;
    let mut worst_critical = f64::NEG_INFINITY;
    let mut least_excess = f64::INFINITY;
    for n in 2..=max_n {
        for k in 2..=n {
            let critical = k as f64 / (k as f64 - 1.0);
            let key = format!("n{n}_k{k}");
            let at = worst_second_difference(n, k, critical, &t_grid)?;
            let above = worst_second_difference(n, k, critical + excess, &t_grid)?;
            let one = worst_second_difference(n, k, 1.0, &t_grid)?;
            worst_critical = worst_critical.max(at).max(one);
            least_excess = least_excess.min(above);
            ok &= at <= tol && one <= tol && above > tol;
            rep.row(&key, "critical", 0, at, tol, Verdict::Bounded.or_fail(at <= tol));
            rep.row(&key, "excess", 0, above, tol, Verdict::Blowup.or_fail(above > tol));
            rep.row(&key, "one", 0, one, tol, Verdict::Bounded.or_fail(one <= tol));
        }
    }
    rep.metric("worst_critical", worst_critical);
    rep.metric("least_excess", least_excess);
    let summary = format!("critical exponent worst second difference {worst_critical:.2e}, excess exponent least {least_excess:.2e}");
    Ok(rep.finish(Verdict::IdentityOk.or_fail(ok), summary))
}
