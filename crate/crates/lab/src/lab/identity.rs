//! Deterministic algebraic identities: the conformal determinant, the
//! discrete trace identity, the sign of F₂ on the Div wave cone and the
//! principal-block slicing bound.

use std::f64::consts::TAU;

use cone_calculus::fieldgrid::{apply_operator, curl_row_sums, diff, pn_pairs, Grid, GridField, Operator, Rank};
use cone_calculus::gallery::random_cone_field;
use cone_calculus::symcone::sample::{random_matrix, random_orthogonal, random_wave_cone_div};
use cone_calculus::symcone::{conformal_coords, conformal_det, eigen_sym, f2_form, ConeId, Sign, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::stats::order;
use super::{ExperimentConfig, ExperimentReport, Verdict};
use crate::LabResult;

/// `a_ij = c_ij sin(2π(p_ij x₁ + q_ij x₂) + θ_ij)`, with its exact
/// derivatives, so the continuum value of `Div A − D Tr A` is known.
struct TrigField {
    amp: [[f64; 2]; 2],
    modes: [[[f64; 2]; 2]; 2],
    phase: [[f64; 2]; 2],
}

impl TrigField {
    fn fixed() -> Self {
        TrigField {
            amp: [[1.0, 0.5], [-0.75, 0.8]],
            modes: [[[1.0, 2.0], [2.0, 1.0]], [[1.0, 3.0], [3.0, 2.0]]],
            phase: [[0.1, 0.7], [1.3, 2.9]],
        }
    }

    fn arg(&self, i: usize, j: usize, x: &[f64]) -> f64 {
        TAU * (self.modes[i][j][0] * x[0] + self.modes[i][j][1] * x[1]) + self.phase[i][j]
    }

    fn value(&self, x: &[f64], out: &mut [f64]) {
        for i in 0..2 {
            for j in 0..2 {
                out[i * 2 + j] = self.amp[i][j] * self.arg(i, j, x).sin();
            }
        }
    }

    fn partial(&self, i: usize, j: usize, axis: usize, x: &[f64]) -> f64 {
        self.amp[i][j] * TAU * self.modes[i][j][axis] * self.arg(i, j, x).cos()
    }

    /// Row `i` of `Div A − D Tr A`.
    fn q(&self, i: usize, x: &[f64]) -> f64 {
        (0..2).map(|j| self.partial(i, j, j, x)).sum::<f64>() - (0..2).map(|j| self.partial(j, j, i, x)).sum::<f64>()
    }
}

/// `(stencil-level residual, max error against the continuum)` at `points`².
fn trace_identity(points: usize) -> LabResult<(f64, f64)> {
    let grid = Grid::torus(2, points)?;
    let trig = TrigField::fixed();
    let a = GridField::from_fn(grid, Rank::Matrix, |x, o| trig.value(x, o));
    let q = apply_operator(&a, Operator::Q)?;
    let sums = curl_row_sums(&apply_operator(&a.transpose()?, Operator::Curl)?)?;
    let mut stencil: f64 = 0.0;
    let mut continuum: f64 = 0.0;
    for cell in 0..grid.len() {
        let x = grid.position(cell);
        for i in 0..2 {
            stencil = stencil.max((q.at(cell)[i] - sums.at(cell)[i]).abs());
            continuum = continuum.max((q.at(cell)[i] - trig.q(i, &x[..2])).abs());
        }
    }
    Ok((stencil, continuum))
}

/// The stencil identity on a 3-D torus field (no continuum comparison).
fn trace_identity_3d(points: usize) -> LabResult<f64> {
    let grid = Grid::torus(3, points)?;
    let a = GridField::from_fn(grid, Rank::Matrix, |x, o| {
        for (e, v) in o.iter_mut().enumerate() {
            let (i, j) = (e / 3, e % 3);
            *v = (TAU * (x[i] + 2.0 * x[j]) + e as f64).sin() + 0.3 * (TAU * x[(i + j) % 3]).cos();
        }
    });
    let q = apply_operator(&a, Operator::Q)?;
    let sums = curl_row_sums(&apply_operator(&a.transpose()?, Operator::Curl)?)?;
    Ok(q.values().iter().zip(sums.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// Worst `∫_slice det(block) − ‖top‖₁‖bottom‖₁` over principal pairs and
/// planar slices, and the number of slices beyond `budget`.
fn pn_slicing(field: &GridField, budget: f64) -> LabResult<(f64, usize)> {
    let grid = *field.grid();
    let n = grid.dim();
    let pn = apply_operator(field, Operator::Pn)?;
    let area = grid.spacing() * grid.spacing();
    let m = pn.components();
    let mut worst = f64::NEG_INFINITY;
    let mut bad = 0;
    for (slot, (p, q)) in pn_pairs(n).into_iter().enumerate() {
        // One slice in 2-D; one per index along the remaining axis in 3-D.
        let third = (0..n).find(|&c| c != p && c != q);
        let slices = if third.is_some() { grid.points() } else { 1 };
        let mut det = vec![0.0; slices];
        let mut top = vec![0.0; slices];
        let mut bottom = vec![0.0; slices];
        for cell in 0..grid.len() {
            let s = third.map_or(0, |c| grid.multi_index(cell)[c]);
            let a = field.at(cell);
            det[s] += (a[p * n + p] * a[q * n + q] - a[p * n + q] * a[q * n + p]) * area;
            let v = pn.at(cell);
            debug_assert_eq!(v.len(), m);
            top[s] += v[2 * slot].abs() * area;
            bottom[s] += v[2 * slot + 1].abs() * area;
        }
        for s in 0..slices {
            let gap = det[s] - top[s] * bottom[s];
            worst = worst.max(gap);
            if gap > budget {
                bad += 1;
            }
        }
    }
    Ok((worst, bad))
}

pub fn identity_suite(cfg: &ExperimentConfig) -> LabResult<ExperimentReport> {
    cfg.check_keys("identity_suite", &["matrices", "wave_samples", "fields", "distortion"])?;
    let matrices = cfg.get("matrices", 10_000usize)?;
    let wave_samples = cfg.get("wave_samples", 10_000usize)?;
    let fields = cfg.get("fields", 50usize)?;
    let distortion = cfg.get("distortion", 2.0)?;
    let mut rep = ExperimentReport::new("identity_suite");
    let rng_for = |i: usize| ChaCha8Rng::seed_from_u64(cfg.sample_seed(i));

    // (a) det A = b₁² − b₂² − b₃² + b₄², relative to ‖A‖².
    let conformal_err = (0..matrices)
        .into_par_iter()
        .map(|i| {
            let a = random_matrix(2, &mut rng_for(i));
            (conformal_det(conformal_coords(&a)) - a.det()).abs() / a.frobenius().powi(2).max(1.0)
        })
        .reduce(|| 0.0, f64::max);
    let witness = conformal_det(conformal_coords(&cone_calculus::symcone::Matrix::from_rows([[1.0, 2.0], [3.0, 4.0]])));
    let conformal_ok = conformal_err <= 1e-12 && (witness + 2.0).abs() <= 1e-12;
    rep.row("check", "conformal_det", 0, conformal_err, 1e-12, Verdict::IdentityOk.or_fail(conformal_ok));
    rep.metric("conformal_err", conformal_err);

    // (b) Div A − D Tr A = Σ_j (curl of column j)_{ij}.
    let (stencil_c, cont_c) = trace_identity(128)?;
    let (stencil_f, cont_f) = trace_identity(256)?;
    let stencil_3d = trace_identity_3d(24)?;
    let trace_order = order(cont_c, cont_f, 2.0);
    let stencil = stencil_c.max(stencil_f).max(stencil_3d);
    let trace_ok = stencil <= 1e-9 && trace_order >= 1.9;
    rep.row("trace_identity", "stencil", 256, stencil, 1e-9, Verdict::IdentityOk.or_fail(stencil <= 1e-9));
    rep.row("trace_identity", "continuum", 128, cont_c, 0.0, Verdict::Exploratory);
    rep.row("trace_identity", "continuum", 256, cont_f, 0.0, Verdict::Exploratory);
    rep.row("trace_identity", "order", 256, trace_order, 1.9, Verdict::IdentityOk.or_fail(trace_order >= 1.9));
    rep.metric("trace_stencil_residual", stencil);
    rep.metric("trace_order", trace_order);

    // (c) F₂ ≤ 0 on the Div wave cone, with the eigenvalue closed form.
    let (f2_max, f2_form_err) = (0..wave_samples)
        .into_par_iter()
        .map(|i| -> LabResult<(f64, f64)> {
            let mut rng = rng_for(i);
            let n = rng.random_range(2..=8);
            let x = random_wave_cone_div(n, &mut rng);
            let scale = x.inner(&x);
            let f = f2_form(&x);
            let sp = eigen_sym(&x)?;
            let mut l: Vec<f64> = sp.values().to_vec();
            // Drop the eigenvalue closest to zero.
            let zero = (0..n).min_by(|&a, &b| l[a].abs().total_cmp(&l[b].abs())).unwrap_or(0);
            l.remove(zero);
            let mut spread = 0.0;
            for a in 0..l.len() {
                for b in a + 1..l.len() {
                    spread += (l[a] - l[b]).powi(2);
                }
            }
            let closed = -spread / (n as f64).sqrt();
            Ok((f / scale, (f - closed).abs() / scale))
        })
        .try_reduce(|| (f64::NEG_INFINITY, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))?;
    // Equality: first n − 1 eigenvalues equal.
    let mut eq_err: f64 = 0.0;
    let mut rng = rng_for(usize::MAX / 2);
    for n in 2..=8 {
        let mut d = vec![rng.random_range(0.5..2.0); n];
        d[n - 1] = 0.0;
        let x = SymMatrix::from_spectral(&random_orthogonal(n, &mut rng), &d);
        eq_err = eq_err.max(f2_form(&x).abs() / x.inner(&x));
    }
    let example = f2_form(&SymMatrix::diag(&[1.0, -1.0, 0.0])) + 4.0 / 3f64.sqrt();
    let f2_ok = f2_max <= 1e-12 && f2_form_err <= 1e-9 && eq_err <= 1e-12 && example.abs() <= 1e-12;
    rep.row("check", "f2_wave_cone", 0, f2_max, 1e-12, Verdict::IdentityOk.or_fail(f2_ok));
    rep.metric("f2_max", f2_max);
    rep.metric("f2_closed_form_err", f2_form_err);
    rep.metric("f2_equality_err", eq_err);

    // (d) principal-block slicing on Sym⁺ ∩ Q_n⁺(K) fields.
    let mut pn_bad = 0;
    for (n, points) in [(2usize, 128usize), (3, 32)] {
        let grid = Grid::unit_box(n, points)?;
        let budget = 10.0 * grid.spacing().powi(2);
        let cone = ConeId::QuasiConformal { dim: n, distortion, sign: Sign::Plus };
        let out: LabResult<Vec<(f64, usize)>> = (0..fields)
            .into_par_iter()
            .map(|i| pn_slicing(&random_cone_field(grid, &cone, cfg.sample_seed(1_000_000 + 100 * n + i))?, budget))
            .collect();
        let out = out?;
        let worst = out.iter().map(|o| o.0).fold(f64::NEG_INFINITY, f64::max);
        let bad: usize = out.iter().map(|o| o.1).sum();
        pn_bad += bad;
        rep.row("pn_slicing_n", n, points, worst, budget, Verdict::Bounded.or_fail(bad == 0));
        rep.metric(&format!("pn_worst_gap_n{n}"), worst);
    }
    rep.metric("pn_violations", pn_bad as f64);

    let ok = conformal_ok && trace_ok && f2_ok && pn_bad == 0;
    let summary = format!(
        "conformal {conformal_err:.1e}, trace stencil {stencil:.1e} order {trace_order:.3}, F2 max {f2_max:.1e}, slicing violations {pn_bad}"
    );
    Ok(rep.finish(Verdict::IdentityOk.or_fail(ok), summary))
}

/// Row-wise divergence L¹ norms for a planar matrix field.
pub(crate) fn row_div_l1(field: &GridField) -> (f64, f64) {
    let grid = field.grid();
    let area = grid.cell_volume();
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        let d0 = diff(grid, &field.component(i * 2), 0);
        let d1 = diff(grid, &field.component(i * 2 + 1), 1);
        *o = d0.iter().zip(&d1).map(|(a, b)| (a + b).abs()).sum::<f64>() * area;
    }
    (out[0], out[1])
}
