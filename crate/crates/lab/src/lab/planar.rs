//! Planar experiments: the determinant slicing bound and the Ornstein
//! scaling.

use std::f64::consts::TAU;

use cone_calculus::fieldgrid::{apply_operator, norm_eval, Grid, GridField, NormSpec, Operator, PointNorm};
use cone_calculus::gallery::{build_family, random_cone_field, CounterexampleFamily};
use cone_calculus::symcone::{ConeId, Sign};
use rayon::prelude::*;

use super::identity::row_div_l1;
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::LabResult;

fn det_integral(field: &GridField) -> f64 {
    let area = field.grid().cell_volume();
    (0..field.grid().len()).map(|c| field.matrix_at(c).det()).sum::<f64>() * area
}

pub fn slicing(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("slicing", &["fields", "points", "index"])?;
    let fields = cfg.get("fields", 100usize)?;
    let points = cfg.get("points", 256usize)?;
    let index = cfg.get("index", 1u8)?;
    let grid = Grid::unit_box(2, points)?;
    let budget = 10.0 * grid.spacing().powi(2);
    let cone = ConeId::Entrywise { index, sign: Sign::Plus };
    let out: LabResult<Vec<(f64, f64)>> = (0..fields)
        .into_par_iter()
        .map(|i| {
            let a = random_cone_field(grid, &cone, cfg.sample_seed(i))?;
            let (d1, d2) = row_div_l1(&a);
            Ok((det_integral(&a), d1 * d2))
        })
        .collect();
    let out = out?;
    let mut rep = ExperimentReport::new("slicing");
    let mut bad = 0;
    let mut worst_gap = f64::NEG_INFINITY;
    let mut worst_ratio: f64 = 0.0;
    for (i, (lhs, rhs)) in out.iter().enumerate() {
        let ok = *lhs <= rhs + budget;
        bad += usize::from(!ok);
        worst_gap = worst_gap.max(lhs - rhs);
        worst_ratio = worst_ratio.max(lhs / rhs);
        rep.row("sample", i, points, *lhs, *rhs, Verdict::Bounded.or_fail(ok));
    }
    rep.metric("violations", bad as f64);
    rep.metric("worst_gap", worst_gap);
    rep.metric("worst_ratio", worst_ratio);
    rep.metric("budget", budget);
    let summary = format!("{bad} of {fields} fields above budget {budget:.2e}; worst lhs/rhs {worst_ratio:.3}");
    Ok(rep.finish(Verdict::Bounded.or_fail(bad == 0), summary))
}

fn l1(field: &GridField, op: Operator, point: PointNorm) -> LabResult<f64> {
    Ok(norm_eval(&apply_operator(field, op)?, &NormSpec::lp(1.0).with_point(point))?)
}

/// Largest relative deviation from the mean.
fn spread(values: &[f64]) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v / mean - 1.0).abs()).fold(0.0, f64::max)
}

pub fn ornstein(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("ornstein", &["points", "eps", "factor"])?;
    let points = cfg.get("points", 512usize)?;
    let eps_list = cfg.list("eps", &[0.5, 0.25, 0.125])?;
    let factor = cfg.get("factor", 1.3)?;
    let grid = Grid::torus_with_side(2, points, TAU)?;
    let mut rep = ExperimentReport::new("ornstein");
    let mut ok = true;
    for mirrored in [false, true] {
        let key = if mirrored { "eps_mirrored" } else { "eps" };
        let mut ratios = Vec::new();
        let mut scaled = Vec::new();
        let mut euclid = Vec::new();
        for &eps in &eps_list {
            let fam = build_family(&CounterexampleFamily::Ornstein { eps, mirrored }, grid)?;
            let div = l1(&fam.field, Operator::Div, PointNorm::Componentwise)?;
            let curl = l1(&fam.field, Operator::Curl, PointNorm::Componentwise)?;
            // Growing side over the fixed side.
            let (lhs, rhs) = if mirrored { (curl, div) } else { (div, curl) };
            let e_div = l1(&fam.field, Operator::Div, PointNorm::Euclidean)?;
            let e_curl = l1(&fam.field, Operator::Curl, PointNorm::Euclidean)?;
            let e_ratio = if mirrored { e_curl / e_div } else { e_div / e_curl };
            ratios.push(lhs / rhs);
            scaled.push(eps * lhs / rhs);
            euclid.push(eps * e_ratio);
            rep.row(key, eps, points, lhs, rhs, Verdict::Blowup);
        }
        // The sweep runs in decreasing ε, so the ratio must grow.
        let grows = ratios.windows(2).all(|w| w[1] >= factor * w[0]);
        let s = spread(&scaled);
        let tag = if mirrored { "_mirrored" } else { "" };
        let c = scaled.iter().sum::<f64>() / scaled.len() as f64;
        rep.metric(&format!("c{tag}"), c);
        rep.metric(&format!("c_spread{tag}"), s);
        rep.metric(&format!("c_euclidean{tag}"), euclid.iter().sum::<f64>() / euclid.len() as f64);
        ok &= grows && s < 0.03;
    }
    let verdict = Verdict::Blowup.or_fail(ok);
    for row in &mut rep.rows {
        row.verdict = verdict;
    }
    let summary = format!(
        "Div/Curl ~ c/eps with c = {:.4} (spread {:.2}%), mirrored c = {:.4} (spread {:.2}%)",
        rep.expect("c"),
        100.0 * rep.expect("c_spread"),
        rep.expect("c_mirrored"),
        100.0 * rep.expect("c_spread_mirrored")
    );
    Ok(rep.finish(verdict, summary))
}
