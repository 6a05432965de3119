//! Both sides of a constrained estimate `‖G(A)‖_{L^q} ≲ ‖𝒜A‖_{L^p}`.

use cone_calculus::fieldgrid::{apply_operator, norm_eval, Grid, GridField, NormSpec, Operator, Rank};
use cone_calculus::gallery::random_cone_field;
use cone_calculus::symcone::{eigen_sym, rho_k, rho_k_star, ConeId};
use rayon::prelude::*;

use super::report::guarded_ratio;
use super::stats::max_drift;
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::{LabError, LabResult};

/// Pointwise functional on the left-hand side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Functional {
    /// Frobenius norm.
    Norm,
    RhoKStar(usize),
    RhoK(usize),
    /// `|det A|^{1/n}`.
    DetPower,
    Trace,
}

impl Functional {
    fn eval(self, field: &GridField, cell: usize) -> LabResult<f64> {
        let m = field.matrix_at(cell);
        let outside = |what: String| LabError::Precondition { experiment: "ineq_ratio".into(), cell, what };
        Ok(match self {
            Functional::Norm => m.frobenius(),
            Functional::RhoKStar(k) => {
                let ev = rho_k_star(&m.symmetric_part(), k)?;
                if ev.is_outside() {
                    return Err(outside(format!("Gamma_{k}*")));
                }
                ev.value.max(0.0)
            }
            Functional::RhoK(k) => {
                let r = rho_k(&m.symmetric_part(), k)?;
                if !(r >= 0.0) {
                    return Err(outside(format!("Gamma_{k}")));
                }
                r
            }
            Functional::DetPower => {
                let d: f64 = eigen_sym(&m.symmetric_part())?.values().iter().product();
                d.abs().powf(1.0 / m.dim() as f64)
            }
            Functional::Trace => m.trace().abs(),
        })
    }
}

/// `(lhs, rhs, ratio)` with `lhs = ‖G(A)‖_{L^q}`, `rhs = ‖𝒜A‖_{L^p}` and
/// `0/0 = 0`.
pub fn ineq_ratio(field: &GridField, op: Operator, p: f64, q: f64, functional: Functional) -> LabResult<(f64, f64, f64)> {
    let grid = *field.grid();
    let values: Vec<f64> = (0..grid.len()).map(|c| functional.eval(field, c)).collect::<LabResult<_>>()?;
    let g = GridField::new(grid, Rank::Scalar, values)?;
    let lhs = norm_eval(&g, &NormSpec::lp(q))?;
    let rhs = norm_eval(&apply_operator(field, op)?, &NormSpec::lp(p))?;
    Ok((lhs, rhs, guarded_ratio(lhs, rhs)))
}

/// `(k/(k−1))_* = nk/(nk − n + k)`, the Sobolev-dual exponent.
pub fn lower_star(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    n * k / (n * k - n + k)
}

/// Empirical constant of the Div estimate on compactly supported
/// `Γ_k*`-valued fields, with `p = (k/(k−1))_* + 0.25`.
pub fn div_estimate(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("div_estimate", &["fields", "k", "points", "p"])?;
    let fields = cfg.get("fields", 20usize)?;
    let k = cfg.get("k", 2usize)?;
    let levels = cfg.list("points", &[64usize, 128, 256])?;
    let n = 2;
    let p = cfg.get("p", lower_star(n, k) + 0.25)?;
    let q = k as f64 / (k as f64 - 1.0);
    let mut rep = ExperimentReport::new("div_estimate");
    let mut sup = Vec::new();
    for &points in &levels {
        let grid = Grid::unit_box(n, points)?;
        let out: LabResult<Vec<(f64, f64, f64)>> = (0..fields)
            .into_par_iter()
            .map(|i| {
                let a = random_cone_field(grid, &ConeId::GammaStar(k), cfg.sample_seed(i))?;
                ineq_ratio(&a, Operator::Div, p, q, Functional::RhoKStar(k))
            })
            .collect();
        let out = out?;
        let best = out.iter().cloned().fold((0.0, 0.0, 0.0), |a, b| if b.2 > a.2 { b } else { a });
        rep.row("points", points, points, best.0, best.1, Verdict::Bounded);
        sup.push(best.2);
    }
    let drift = max_drift(&sup);
    let verdict = Verdict::Bounded.or_fail(drift <= 0.25);
    for row in &mut rep.rows {
        row.verdict = verdict;
    }
    rep.metric("constant_drift", drift);
    rep.metric("constant", sup.iter().cloned().fold(0.0, f64::max));
    Ok(rep.finish(verdict, format!("empirical constants {sup:.4?} at p = {p:.3}, q = {q:.3}")))
}

/// Ratios over the conjectural full range of `(p, q)`; no pass/fail.
pub fn exploratory(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("exploratory", &["k", "points", "seed_index"])?;
    let k = cfg.get("k", 2usize)?;
    let points = cfg.get("points", 128usize)?;
    let index = cfg.get("seed_index", 0usize)?;
    let n = 2;
    let grid = Grid::unit_box(n, points)?;
    let a = random_cone_field(grid, &ConeId::GammaStar(k), cfg.sample_seed(index))?;
    let q_max = k as f64 / (k as f64 - 1.0);
    let mut rep = ExperimentReport::new("exploratory");
    for &p in &[1.0, 1.25, 1.5, 2.0] {
        for step in 0..=4 {
            let q = 1.0 + (q_max - 1.0) * step as f64 / 4.0;
            let (lhs, rhs, _) = ineq_ratio(&a, Operator::Div, p, q, Functional::RhoKStar(k))?;
            rep.row(&format!("p{p}"), q, points, lhs, rhs, Verdict::Exploratory);
        }
    }
    Ok(rep.finish(Verdict::Exploratory, "full-range (p, q) ratios, no pass/fail".into()))
}
