//! Radial k-Hessian solver checks.

use cone_calculus::hessian::{radial_fk, solve_radial_khessian};

use super::stats::order;
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::LabResult;

fn bump(r: f64) -> f64 {
    1.0 + (-r * r / 0.05).exp()
}

/// `max |F_k(ü_fd, u̇/r) − f|` over `r ≥ r_min`, with `ü` replaced by the
/// central difference of `u̇` on the uniform grid `r_i = i/points`.
pub fn bump_residual(n: usize, k: usize, points: usize, r_min: f64) -> LabResult<f64> {
    let h = 1.0 / points as f64;
    let r: Vec<f64> = (1..=points).map(|i| i as f64 * h).collect();
    let f: Vec<f64> = r.iter().map(|&x| bump(x)).collect();
    let prof = solve_radial_khessian(&r, &f, k, n)?;
    let mut worst: f64 = 0.0;
    for i in 1..r.len() - 1 {
        if r[i] < r_min {
            continue;
        }
        let ddu = (prof.du[i + 1] - prof.du[i - 1]) / (2.0 * h);
        worst = worst.max((radial_fk(ddu, prof.du[i] / r[i], k, n) - f[i]).abs());
    }
    Ok(worst)
}

/// `max |u − (r² − 1)/2|` for `f ≡ 1`.
pub fn paraboloid_error(n: usize, k: usize, points: usize) -> LabResult<f64> {
    let r: Vec<f64> = (1..=points).map(|i| i as f64 / points as f64).collect();
    let prof = solve_radial_khessian(&r, &vec![1.0; r.len()], k, n)?;
    Ok(r.iter().zip(&prof.u).map(|(x, u)| (u - 0.5 * (x * x - 1.0)).abs()).fold(0.0, f64::max))
}

pub fn khessian_radial(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("khessian_radial", &["points", "r_min"])?;
    let levels = cfg.list("points", &[200usize, 400])?;
    let r_min = cfg.get("r_min", 0.1)?;
    let mut rep = ExperimentReport::new("khessian_radial");
    let mut para: f64 = 0.0;
    let mut worst_order = f64::INFINITY;
    for n in 2..=4 {
        for k in 1..=n {
            let key = format!("n{n}_k{k}");
            let e = paraboloid_error(n, k, levels[levels.len() - 1])?;
            para = para.max(e);
            rep.row(&key, "paraboloid", levels[levels.len() - 1], e, 1e-6, Verdict::IdentityOk.or_fail(e <= 1e-6));
            let res: Vec<f64> = levels.iter().map(|&p| bump_residual(n, k, p, r_min)).collect::<LabResult<_>>()?;
            for (i, &p) in levels.iter().enumerate() {
                rep.row(&key, "bump", p, res[i], 0.0, Verdict::Exploratory);
            }
            for (i, w) in res.windows(2).enumerate() {
                let p = order(w[0], w[1], levels[i + 1] as f64 / levels[i] as f64);
                worst_order = worst_order.min(p);
            }
        }
    }
    rep.metric("paraboloid_err", para);
    rep.metric("bump_order", worst_order);
    let ok = para <= 1e-6 && worst_order >= 1.9;
    Ok(rep.finish(
        Verdict::IdentityOk.or_fail(ok),
        format!("paraboloid error {para:.2e}, bump residual order >= {worst_order:.3}"),
    ))
}
