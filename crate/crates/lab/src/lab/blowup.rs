//! Blow-up sweeps over the constructed families.

use cone_calculus::fieldgrid::{apply_operator, norm_eval, Grid, NormSpec, Operator, PointNorm};
use cone_calculus::gallery::{build_family, loglog_div_expected_growth, CounterexampleFamily, LoglogRadial};
use cone_calculus::symcone::eigen_sym;

use super::stats::{fit_line, increments_shrink};
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::LabResult;

/// Sharpness by refinement: the excision shrinks with `h`, the norm at the
/// critical exponent must converge and the norm at the supercritical one
/// must diverge like `log(1/h)`.
struct Refinement {
    family: CounterexampleFamily,
    dim: usize,
    /// Converging exponent.
    critical: f64,
    /// Log-diverging exponent.
    beyond: f64,
}

fn refinement_sweep(id: &str, spec: &Refinement, levels: &[usize]) -> LabResult<ExperimentReport> {
    let mut rep = ExperimentReport::new(id);
    let mut conv = Vec::new();
    let mut div = Vec::new();
    let mut x = Vec::new();
    for &points in levels {
        let grid = Grid::unit_box(spec.dim, points)?;
        let fam = build_family(&spec.family, grid)?;
        if let Some(cell) = fam.first_violation(1e-9)? {
            return Err(crate::LabError::Precondition { experiment: id.into(), cell, what: format!("{:?}", fam.targets) });
        }
        let mask = NormSpec::lp(spec.critical).with_mask(fam.checked.clone());
        let a = norm_eval(&fam.field, &mask)?;
        let b = norm_eval(&fam.field, &NormSpec::lp(spec.beyond).with_mask(fam.checked.clone()))?;
        conv.push(a);
        div.push(b.powf(spec.beyond));
        x.push((1.0 / grid.spacing()).ln());
        rep.row("q_critical", spec.critical, points, a, 0.0, Verdict::Exploratory);
        rep.row("q_beyond", spec.beyond, points, b, 0.0, Verdict::Exploratory);
    }
    let converges = increments_shrink(&conv, 0.9);
    let fit = fit_line(&x, &div);
    let diverges = fit.slope > 0.0 && fit.r2 >= 0.9;
    let verdict = Verdict::Blowup.or_fail(converges && diverges);
    for row in &mut rep.rows {
        row.verdict = verdict;
    }
    let inc: Vec<f64> = conv.windows(2).map(|w| w[1] - w[0]).collect();
    let shrink = inc.windows(2).map(|w| (w[1] / w[0]).abs()).fold(0.0, f64::max);
    rep.metric("critical_increment_ratio", shrink);
    rep.metric("beyond_log_slope", fit.slope);
    rep.metric("beyond_r2", fit.r2);
    let summary = format!(
        "L^{:.3} norms {conv:.4?} (increment ratio {shrink:.3}); L^{:.3} norm^q slope {:.4} vs log(1/h), R^2 {:.4}",
        spec.critical, spec.beyond, fit.slope, fit.r2
    );
    Ok(rep.finish(verdict, summary))
}

fn levels(cfg: &ExperimentConfig, dim: usize) -> LabResult<Vec<usize>> {
    let default: &[usize] = if dim == 2 { &[64, 128, 256, 512] } else { &[16, 24, 32, 48] };
    cfg.list("points", default)
}

pub fn optimal_div(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("optimal_div", &["n", "k", "eps", "points"])?;
    let dim = cfg.get("n", 2usize)?;
    let k = cfg.get("k", 2usize)?;
    let eps = cfg.get("eps", 0.5)?;
    let critical = k as f64 / (k as f64 - 1.0);
    let spec = Refinement { family: CounterexampleFamily::OptimalDiv { k, eps }, dim, critical, beyond: critical + eps };
    refinement_sweep("optimal_div", &spec, &levels(cfg, dim)?)
}

pub fn curl_optimal(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("curl_optimal", &["n", "k", "eps", "points"])?;
    let dim = cfg.get("n", 2usize)?;
    let k = cfg.get("k", 2usize)?;
    let eps = cfg.get("eps", 0.5)?;
    let spec = Refinement { family: CounterexampleFamily::CurlOptimal { k, eps }, dim, critical: k as f64, beyond: k as f64 + eps };
    refinement_sweep("curl_optimal", &spec, &levels(cfg, dim)?)
}

pub fn quasiconformal_radial(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("quasiconformal_radial", &["n", "eps", "points"])?;
    let dim = cfg.get("n", 2usize)?;
    let eps = cfg.get("eps", 1.0)?;
    let n = dim as f64;
    let spec = Refinement { family: CounterexampleFamily::QuasiconformalRadial { eps }, dim, critical: n, beyond: n + eps };
    refinement_sweep("quasiconformal_radial", &spec, &levels(cfg, dim)?)
}

pub fn radial_power_map(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("radial_power_map", &["p", "points"])?;
    let p = cfg.get("p", 4.0)?;
    // |Du| ~ r^{−2/p}: every q < p converges, q = p diverges logarithmically.
    let spec = Refinement { family: CounterexampleFamily::RadialPowerMap { p }, dim: 2, critical: p - 0.5, beyond: p };
    refinement_sweep("radial_power_map", &spec, &levels(cfg, 2)?)
}

/// `‖D²u‖ⁿ/det D²u = 1 + n/ε` at every checked cell.
pub fn radial_fixed_point(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("radial_fixed_point", &["eps"])?;
    let eps_list = cfg.list("eps", &[0.5, 1.0, 2.0])?;
    let mut rep = ExperimentReport::new("radial_fixed_point");
    let mut worst: f64 = 0.0;
    for (n, points) in [(2usize, 128usize), (3, 32)] {
        let grid = Grid::unit_box(n, points)?;
        for &eps in &eps_list {
            let fam = build_family(&CounterexampleFamily::QuasiconformalRadial { eps }, grid)?;
            let want = 1.0 + n as f64 / eps;
            let mut err: f64 = 0.0;
            for cell in 0..grid.len() {
                if !fam.checked[cell] {
                    continue;
                }
                let sp = eigen_sym(&fam.field.sym_at(cell))?;
                let det: f64 = sp.values().iter().product();
                if det <= 1e-300 {
                    continue;
                }
                err = err.max((sp.values()[0].powi(n as i32) / det - want).abs() / want);
            }
            worst = worst.max(err);
            rep.row(&format!("eps_n{n}"), eps, points, want + err * want, want, Verdict::IdentityOk.or_fail(err <= 1e-10));
        }
    }
    rep.metric("max_rel_err", worst);
    Ok(rep.finish(Verdict::IdentityOk.or_fail(worst <= 1e-10), format!("max relative error {worst:.2e}")))
}

/// `∫det` over the mollified Green field grows like `log(1/ε)/(2π)` while the
/// Div mass stays bounded.
pub fn green_conformal(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("green_conformal", &["eps", "points"])?;
    let eps_list = cfg.list("eps", &[0.2, 0.1, 0.05, 0.025])?;
    let points = cfg.get("points", 512usize)?;
    let grid = Grid::unit_box(2, points)?;
    let mut rep = ExperimentReport::new("green_conformal");
    let (mut x, mut dets, mut masses) = (Vec::new(), Vec::new(), Vec::new());
    for &eps in &eps_list {
        let fam = build_family(&CounterexampleFamily::GreenConformal { eps }, grid)?;
        let det: f64 = (0..grid.len()).map(|c| fam.field.matrix_at(c).det()).sum::<f64>() * grid.cell_volume();
        let mass = norm_eval(&apply_operator(&fam.field, Operator::Div)?, &NormSpec::lp(1.0))?;
        rep.row("eps", eps, points, det, mass * mass, Verdict::Blowup);
        x.push((1.0 / eps).ln());
        dets.push(det);
        masses.push(mass);
    }
    let fit = fit_line(&x, &dets);
    let mass_drift = super::stats::max_drift(&masses);
    let ok = fit.slope > 0.0 && fit.r2 >= 0.9 && mass_drift <= 0.25;
    let verdict = Verdict::Blowup.or_fail(ok);
    for row in &mut rep.rows {
        row.verdict = verdict;
    }
    rep.metric("det_log_slope", fit.slope);
    rep.metric("det_r2", fit.r2);
    rep.metric("div_mass_drift", mass_drift);
    let summary = format!("det slope {:.4} (continuum 1/2pi = {:.4}), Div mass drift {:.1}%", fit.slope, 1.0 / std::f64::consts::TAU, 100.0 * mass_drift);
    Ok(rep.finish(verdict, summary))
}

/// Div mass of the step field approaches the jump `2|(A₂ − A₁)e₁|`, below
/// the separated mass.
pub fn step(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("step", &["points"])?;
    let levels = cfg.list("points", &[128usize, 256])?;
    let fam = CounterexampleFamily::default_step();
    let mut rep = ExperimentReport::new("step");
    let mut ok = true;
    for &points in &levels {
        let grid = Grid::unit_box(2, points)?;
        let h = grid.spacing();
        let built = build_family(&fam, grid)?;
        let jump = built.expected("div_mass").unwrap_or(0.0);
        let separated = built.expected("separated_mass").unwrap_or(0.0);
        let mask = (0..grid.len()).map(|c| grid.position(c)[..2].iter().all(|v| v.abs() <= 1.0 - 8.0 * h)).collect();
        let div = apply_operator(&built.field, Operator::Div)?;
        let mass = norm_eval(&div, &NormSpec::lp(1.0).with_point(PointNorm::Euclidean).with_mask(mask))?;
        let good = (mass - jump).abs() <= 10.0 * h * jump && mass < separated;
        ok &= good;
        rep.row("points", points, points, mass, separated, Verdict::IdentityOk.or_fail(good));
    }
    Ok(rep.finish(Verdict::IdentityOk.or_fail(ok), "Div mass tracks the jump, below the separated mass".into()))
}

/// Composite Simpson on `[a, b]` with at least `steps` (even) panels.
fn simpson(a: f64, b: f64, steps: usize, f: impl Fn(f64) -> f64) -> f64 {
    let m = steps + steps % 2;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Sides of the endpoint counterexample by radial quadrature in `s = log r`.
pub struct LoglogSides {
    /// `‖ρ_k*(A)‖_{L^{k/(k−1)}}`.
    pub lhs: f64,
    /// `‖Div A‖_{L^p}`.
    pub rhs: f64,
    /// The `δ → 0` limit of `rhs`.
    pub rhs_limit: f64,
}

pub fn loglog_sides(n: usize, k: usize, delta: f64) -> LabResult<LoglogSides> {
    let prof = LoglogRadial::new(n, k, delta, delta * delta)?;
    let (nf, kf) = (n as f64, k as f64);
    let area = prof.sphere_area();
    let outer = prof.support();
    let per_unit = 400.0;
    // r = e^s, dr = r ds.
    let lo = (1e-4 * prof.eps).ln();
    let lhs_q = simpson(lo, outer.ln(), ((outer.ln() - lo) * per_unit * 10.0) as usize, |s| {
        let r = s.exp();
        prof.lhs_density(r) * area * r.powf(nf)
    });
    let lhs = lhs_q.powf((kf - 1.0) / kf);
    let p = prof.div_exponent();
    let dlo = delta.ln();
    let rhs_p = simpson(dlo, outer.ln(), ((outer.ln() - dlo) * per_unit * 10.0) as usize, |s| {
        let r = s.exp();
        prof.div_magnitude(r).powf(p) * area * r.powf(nf)
    });
    let rhs = rhs_p.powf(1.0 / p);
    // Limit: data of unit mass concentrated at the origin, a_r⁰ = c₀ r^{−n(k−1)/k}
    // and g = χ·log log(1 + 1/r). In σ = log(1/r) the integrand tends to
    // |S|c₀^p σ^{−p}, integrated analytically beyond σ = 200.
    let c0 = (kf / nf) * (nf / area).powf((kf - 1.0) / kf);
    let limit_density = |sigma: f64| {
        let r = (-sigma).exp();
        // r^n·r^{−p·n(k−1)/k} = r^p exactly, since p(1 + n(k−1)/k) = n.
        area * (c0 * r * limit_slope(&prof, r)).abs().powf(p)
    };
    let cut = 200.0;
    let body = simpson(-outer.ln(), cut, ((cut + outer.ln()) * per_unit) as usize, limit_density);
    let tail = area * c0.powf(p) * cut.powf(1.0 - p) / (p - 1.0);
    let rhs_limit = (body + tail).powf(1.0 / p);
    Ok(LoglogSides { lhs, rhs, rhs_limit })
}

/// `d/dr [χ(r)·log log(1 + 1/r)]`: the weight slope without the flattening
/// below `δ`.
fn limit_slope(prof: &LoglogRadial, r: f64) -> f64 {
    if r >= prof.delta {
        prof.weight_slope(r)
    } else {
        -1.0 / (r * (1.0 + r) * (1.0 + 1.0 / r).ln())
    }
}

pub fn loglog_div(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("loglog_div", &["n", "k", "delta", "band"])?;
    let n = cfg.get("n", 4usize)?;
    let k = cfg.get("k", 2usize)?;
    let deltas = cfg.list("delta", &[0.1, 0.01, 0.001])?;
    let band = cfg.get("band", 0.3)?;
    let factor = 2.0 * k as f64 / n as f64;
    let mut rep = ExperimentReport::new("loglog_div");
    let (mut lhs, mut rhs, mut track, mut raw) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut limit = 0.0;
    for &delta in &deltas {
        let s = loglog_sides(n, k, delta)?;
        let g = loglog_div_expected_growth(delta);
        rep.row("delta", delta, 0, s.lhs, s.rhs, Verdict::Blowup);
        track.push(s.lhs / (factor * g));
        raw.push(s.lhs / g);
        lhs.push(s.lhs);
        rhs.push(s.rhs);
        limit = s.rhs_limit;
    }
    // Sweep order: δ need not be sorted, so compare along decreasing δ.
    let mut order: Vec<usize> = (0..deltas.len()).collect();
    order.sort_by(|&a, &b| deltas[b].total_cmp(&deltas[a]));
    let monotone = order.windows(2).all(|w| lhs[w[1]] > lhs[w[0]]);
    let tracks = track.iter().all(|t| (t - 1.0).abs() <= band);
    let bounded = rhs.iter().all(|r| *r <= 1.05 * limit);
    let verdict = Verdict::Blowup.or_fail(monotone && tracks && bounded);
    for row in &mut rep.rows {
        row.verdict = verdict;
    }
    let dev = |v: &[f64]| v.iter().map(|t| (t - 1.0).abs()).fold(0.0, f64::max);
    rep.metric("tracking_factor", factor);
    rep.metric("tracking_dev", dev(&track));
    rep.metric("raw_dev", dev(&raw));
    rep.metric("rhs_max", rhs.iter().cloned().fold(0.0, f64::max));
    rep.metric("rhs_limit", limit);
    let summary = format!(
        "lhs/(1/2 loglog) = {raw:.4?} (expected factor {factor:.3}); rhs {rhs:.4?} <= limit {limit:.4}"
    );
    Ok(rep.finish(verdict, summary))
}
