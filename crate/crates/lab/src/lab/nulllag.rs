//! Quantitative null-Lagrangian bound `|Div ∇F_k(A)| ≲ |Curl A||A|^{k−2}`.

use std::f64::consts::FRAC_PI_2;

use cone_calculus::fieldgrid::{apply_operator, magnitudes, Grid, GridField, Operator, PointNorm, Rank};
use cone_calculus::gallery::{random_cone_field, PhiSpec};
use cone_calculus::symcone::{f_k, grad_fk, ConeId, SymMatrix};
use rayon::prelude::*;

use super::stats::{max_drift, order};
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::LabResult;

/// `∇F_k(A)` cell by cell.
pub fn grad_fk_field(field: &GridField, k: usize) -> LabResult<GridField> {
    let grid = *field.grid();
    let mut values = Vec::with_capacity(field.values().len());
    for cell in 0..grid.len() {
        let g = grad_fk(&field.sym_at(cell), k)?;
        values.extend(g.as_matrix().row_major());
    }
    Ok(GridField::new(grid, Rank::Matrix, values)?)
}

/// `(∫|Div ∇F_k(A)|, ∫|Curl A||A|^{k−2})`.
pub fn null_lagrangian_sides(field: &GridField, k: usize) -> LabResult<(f64, f64)> {
    let grid = field.grid();
    let w = grid.cell_volume();
    let div = apply_operator(&grad_fk_field(field, k)?, Operator::Div)?;
    let curl = apply_operator(field, Operator::Curl)?;
    let lhs: f64 = magnitudes(&div, PointNorm::Euclidean).iter().sum::<f64>() * w;
    let curl_mag = magnitudes(&curl, PointNorm::Euclidean);
    let a_mag = magnitudes(field, PointNorm::Euclidean);
    let rhs: f64 = curl_mag.iter().zip(&a_mag).map(|(c, a)| c * a.powi(k as i32 - 2)).sum::<f64>() * w;
    Ok((lhs, rhs))
}

/// `I + D²φ` with unequal modes, so the discrete residual is a genuine
/// O(h²) truncation error rather than an exact stencil cancellation.
fn hessian_field(n: usize, points: usize) -> LabResult<GridField> {
    let grid = Grid::torus(n, points)?;
    let phi = PhiSpec { amplitude: 0.01, modes: [1, 2, 1], phases: [0.0, FRAC_PI_2, 0.3] };
    Ok(GridField::from_fn(grid, Rank::Matrix, |x, o| {
        let m = SymMatrix::identity(n) + phi.hessian(x, 1.0);
        o.copy_from_slice(&m.as_matrix().row_major());
    }))
}

pub fn null_lagrangian(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("null_lagrangian", &["fields", "drift"])?;
    let fields = cfg.get("fields", 100usize)?;
    let band = cfg.get("drift", 0.2)?;
    let mut rep = ExperimentReport::new("null_lagrangian");
    let mut ok = true;

    // Hessian fields: sup |Div ∇F_k(A)| → 0 at second order; mean of F_k
    // equals F_k(I) = 1.
    let mut worst_order = f64::INFINITY;
    let mut worst_mean: f64 = 0.0;
    for (n, k, levels) in [(2usize, 2usize, [64usize, 128]), (3, 2, [32, 64]), (3, 3, [32, 64])] {
        let mut sup = Vec::new();
        for &points in &levels {
            let a = hessian_field(n, points)?;
            let div = apply_operator(&grad_fk_field(&a, k)?, Operator::Div)?.max_abs();
            let mut mean = 0.0;
            for cell in 0..a.grid().len() {
                mean += f_k(&a.sym_at(cell), k)?;
            }
            mean /= a.grid().len() as f64;
            let h2 = 1.0 / (points * points) as f64;
            worst_mean = worst_mean.max((mean - 1.0).abs() / h2);
            ok &= (mean - 1.0).abs() <= 10.0 * h2;
            rep.row(&format!("hessian_n{n}_k{k}"), points, points, div, 0.0, Verdict::IdentityOk);
            sup.push(div);
        }
        let p = order(sup[0], sup[1], levels[1] as f64 / levels[0] as f64);
        worst_order = worst_order.min(p);
        rep.metric(&format!("order_n{n}_k{k}"), p);
        ok &= p >= 1.9;
    }
    rep.metric("hessian_order", worst_order);
    rep.metric("mean_err_over_h2", worst_mean);

    // Random fields: the integrated ratio stays put under refinement.
    let mut worst_drift: f64 = 0.0;
    for (n, k, levels) in [(2usize, 2usize, vec![64usize, 128, 256]), (3, 3, vec![16, 24, 32])] {
        let grids: Vec<Grid> = levels.iter().map(|&p| Grid::unit_box(n, p)).collect::<Result<_, _>>()?;
        let out: LabResult<Vec<Vec<f64>>> = (0..fields)
            .into_par_iter()
            .map(|i| {
                grids
                    .iter()
                    .map(|g| {
                        let a = random_cone_field(*g, &ConeId::Gamma(k), cfg.sample_seed(i))?;
                        let (l, r) = null_lagrangian_sides(&a, k)?;
                        Ok(l / r)
                    })
                    .collect()
            })
            .collect();
        let out = out?;
        let drift = out.iter().map(|s| max_drift(s)).fold(0.0, f64::max);
        worst_drift = worst_drift.max(drift);
        for (j, &points) in levels.iter().enumerate() {
            let sup = out.iter().map(|s| s[j]).fold(0.0, f64::max);
            rep.row(&format!("random_n{n}_k{k}"), points, points, sup, 1.0, Verdict::Bounded.or_fail(drift <= band));
        }
        rep.metric(&format!("ratio_drift_n{n}_k{k}"), drift);
        ok &= drift <= band;
    }
    rep.metric("ratio_drift", worst_drift);
    let summary = format!("Hessian order {worst_order:.3}, random ratio drift {:.1}%", 100.0 * worst_drift);
    Ok(rep.finish(Verdict::Bounded.or_fail(ok), summary))
}
