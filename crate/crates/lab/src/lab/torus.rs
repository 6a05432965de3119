//! Torus experiments on Div-free and Curl-free cone-valued fields: the
//! quasiconcavity inequality and the reverse Hölder improvement.

use cone_calculus::fieldgrid::{apply_operator, field_mean, Grid, GridField, Operator};
use cone_calculus::gallery::{build_family, curlfree_gamma_sample, divfree_gamma_star_sample, CounterexampleFamily, PhiSpec};
use cone_calculus::symcone::{cone_contains, rho_k_star, ConeId, SymMatrix};
use rayon::prelude::*;

use super::stats::max_drift;
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::{LabError, LabResult};

/// Discrete Div above `DIV_BUDGET·h²·max|A|` means the field is not a
/// Div-free sample at all.
const DIV_BUDGET: f64 = 1e3;

fn dual_power(m: &SymMatrix, k: usize, experiment: &str, cell: usize) -> LabResult<f64> {
    let ev = rho_k_star(m, k)?;
    if ev.is_outside() || ev.value < 0.0 {
        return Err(LabError::Precondition { experiment: experiment.into(), cell, what: format!("Gamma_{k}*") });
    }
    Ok(ev.value.powf(k as f64 / (k as f64 - 1.0)))
}

/// `(mean ρ_k*(A)^{k/(k−1)}, ρ_k*(mean A)^{k/(k−1)})` for a Div-free
/// `Γ_k*`-valued torus field.
pub fn quasiconcavity_check(field: &GridField, k: usize) -> LabResult<(f64, f64)> {
    let grid = field.grid();
    let h = grid.spacing();
    let div = apply_operator(field, Operator::Div)?.max_abs();
    if div > DIV_BUDGET * h * h * field.max_abs().max(1.0) {
        return Err(LabError::Precondition {
            experiment: "quasiconcavity".into(),
            cell: 0,
            what: format!("Div-free to O(h^2) (max |Div| = {div:.3e})"),
        });
    }
    let mut lhs = 0.0;
    for cell in 0..grid.len() {
        lhs += dual_power(&field.sym_at(cell), k, "quasiconcavity", cell)?;
    }
    lhs /= grid.len() as f64;
    let n = grid.dim();
    let mean = field_mean(field)?;
    let rhs = dual_power(&SymMatrix::from_fn(n, |i, j| mean[i * n + j]), k, "quasiconcavity", 0)?;
    Ok((lhs, rhs))
}

fn equality_field(n: usize, k: usize, points: usize) -> LabResult<GridField> {
    let amplitude = if n == 2 { 0.01 } else { 0.005 };
    let fam = CounterexampleFamily::EqualityCase { k, base: SymMatrix::identity(n), phi: PhiSpec::product(amplitude) };
    Ok(build_family(&fam, Grid::torus(n, points)?)?.field)
}

pub fn quasiconcavity(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("quasiconcavity", &["samples", "points_2d", "points_3d"])?;
    let samples = cfg.get("samples", 1_000usize)?;
    let points_2d = cfg.get("points_2d", 32usize)?;
    let points_3d = cfg.get("points_3d", 12usize)?;
    let mut rep = ExperimentReport::new("quasiconcavity");
    let mut ok = true;

    // Equality cases: |lhs − rhs| ≤ 10h².
    let mut eq_worst: f64 = 0.0;
    for (n, k, levels) in [(2usize, 2usize, [128usize, 256]), (3, 2, [32, 64]), (3, 3, [32, 64])] {
        for points in levels {
            let (lhs, rhs) = quasiconcavity_check(&equality_field(n, k, points)?, k)?;
            let budget = 10.0 / (points * points) as f64;
            let gap = (lhs - rhs).abs();
            eq_worst = eq_worst.max(gap / budget);
            ok &= gap <= budget;
            rep.row(&format!("equality_n{n}_k{k}"), points, points, lhs, rhs, Verdict::IdentityOk.or_fail(gap <= budget));
        }
    }
    rep.metric("equality_gap_over_budget", eq_worst);

    // Generator samples: half planar with k = 2, half in 3-D with k = 2, 3.
    let out: LabResult<Vec<(f64, f64, f64)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let (n, k, points) = if i % 2 == 0 { (2, 2, points_2d) } else { (3, 2 + (i / 2) % 2, points_3d) };
            let grid = Grid::torus(n, points)?;
            let field = divfree_gamma_star_sample(grid, k, 1, cfg.sample_seed(i))?.remove(0);
            let (lhs, rhs) = quasiconcavity_check(&field, k)?;
            Ok((lhs, rhs, 10.0 * grid.spacing().powi(2)))
        })
        .collect();
    let out = out?;
    let bad = out.iter().filter(|(l, r, b)| l > &(r + b)).count();
    let worst = out.iter().map(|(l, r, _)| l / r).fold(0.0, f64::max);
    ok &= bad == 0;
    rep.row("samples", samples, 0, bad as f64, samples as f64, Verdict::Bounded.or_fail(bad == 0));
    rep.metric("sample_violations", bad as f64);
    rep.metric("sample_worst_ratio", worst);
    let summary = format!("equality gap <= {eq_worst:.3} of budget; {bad}/{samples} sample violations, worst lhs/rhs {worst:.4}");
    Ok(rep.finish(Verdict::Bounded.or_fail(ok), summary))
}

/// Cells in the inner ball `|x − c| < θR` and in the annulus
/// `θR ≤ |x − c| < R`, `c` the torus centre.
fn ball_masks(grid: &Grid, radius: f64, theta: f64) -> (Vec<bool>, Vec<bool>) {
    let n = grid.dim();
    let c = 0.5 * grid.extent();
    let mut inner = vec![false; grid.len()];
    let mut annulus = vec![false; grid.len()];
    for cell in 0..grid.len() {
        let x = grid.position(cell);
        let r = x[..n].iter().map(|v| (v - c) * (v - c)).sum::<f64>().sqrt();
        inner[cell] = r < theta * radius;
        annulus[cell] = r >= theta * radius && r < radius;
    }
    (inner, annulus)
}

/// `(inner, annulus, ratio)`: the `L^q` average of `|A|` on `θB` against the
/// `L¹` average on `B \ θB`.
pub fn reverse_holder_check(field: &GridField, cone: &ConeId, q: f64, theta: f64, radius: f64) -> LabResult<(f64, f64, f64)> {
    let grid = field.grid();
    let (inner, annulus) = ball_masks(grid, radius, theta);
    let (ni, na) = (inner.iter().filter(|&&b| b).count(), annulus.iter().filter(|&&b| b).count());
    if ni == 0 || na == 0 {
        return Err(LabError::Usage(format!("ball of radius {radius} is empty at {} points", grid.points())));
    }
    let mut top = 0.0;
    let mut bottom = 0.0;
    for cell in 0..grid.len() {
        if !(inner[cell] || annulus[cell]) {
            continue;
        }
        let m = field.matrix_at(cell);
        if !cone_contains(&m, cone, 1e-9)?.is_member() {
            return Err(LabError::Precondition { experiment: "reverse_holder".into(), cell, what: cone.to_string() });
        }
        let a = m.frobenius();
        if inner[cell] {
            top += a.powf(q);
        } else {
            bottom += a;
        }
    }
    let top = (top / ni as f64).powf(1.0 / q);
    let bottom = bottom / na as f64;
    Ok((top, bottom, super::report::guarded_ratio(top, bottom)))
}

fn reverse_holder(cfg: &ExperimentConfig, id: &str, curl: bool) -> LabResult<ExperimentReport> {
    cfg.check_keys(id, &["samples", "k", "theta", "radius", "points"])?;
    let samples = cfg.get("samples", 100usize)?;
    let k = cfg.get("k", 2usize)?;
    let theta = cfg.get("theta", 0.5)?;
    let radius = cfg.get("radius", 0.4)?;
    let levels = cfg.list("points", &[32usize, 64, 128])?;
    let (cone, q) = if curl { (ConeId::Gamma(k), k as f64) } else { (ConeId::GammaStar(k), k as f64 / (k as f64 - 1.0)) };
    let n = 2;
    let mut rep = ExperimentReport::new(id);
    let mut sup = Vec::new();
    let mut worst_sample_drift: f64 = 0.0;
    let mut per_level = Vec::new();
    for &points in &levels {
        let grid = Grid::torus(n, points)?;
        let out: LabResult<Vec<(f64, f64, f64)>> = (0..samples)
            .into_par_iter()
            .map(|i| {
                let seed = cfg.sample_seed(i);
                let field = if curl {
                    curlfree_gamma_sample(grid, k, 1, seed)?.remove(0)
                } else {
                    divfree_gamma_star_sample(grid, k, 1, seed)?.remove(0)
                };
                reverse_holder_check(&field, &cone, q, theta, radius)
            })
            .collect();
        let out = out?;
        let (best, at) = out.iter().enumerate().fold((0.0, 0), |acc, (i, o)| if o.2 > acc.0 { (o.2, i) } else { acc });
        rep.row("points", points, points, out[at].0, out[at].1, Verdict::Bounded);
        sup.push(best);
        per_level.push(out.iter().map(|o| o.2).collect::<Vec<f64>>());
    }
    for i in 0..samples {
        let series: Vec<f64> = per_level.iter().map(|l| l[i]).collect();
        worst_sample_drift = worst_sample_drift.max(max_drift(&series));
    }
    let drift = max_drift(&sup);
    let ok = drift <= 0.25;
    let verdict = Verdict::Bounded.or_fail(ok);
    for row in &mut rep.rows {
        row.verdict = verdict;
    }
    for (i, s) in sup.iter().enumerate() {
        rep.metric(&format!("constant_{}", levels[i]), *s);
    }
    rep.metric("constant_drift", drift);
    rep.metric("sample_drift", worst_sample_drift);
    let summary = format!("empirical constants {sup:.4?}, drift {:.2}% (per-sample {:.2}%)", 100.0 * drift, 100.0 * worst_sample_drift);
    Ok(rep.finish(verdict, summary))
}

pub fn reverse_holder_div(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    reverse_holder(cfg, "reverse_holder_div", false)
}

pub fn reverse_holder_curl(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    reverse_holder(cfg, "reverse_holder_curl", true)
}
