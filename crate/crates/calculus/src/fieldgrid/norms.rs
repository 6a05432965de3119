use alloc::vec;
use alloc::vec::Vec;

use libm::{log, pow, sqrt};

use super::field::GridField;
use crate::error::{input, Result};

/// How a multi-component value is reduced to a magnitude at each node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum PointNorm {
    /// Root of the sum of squares (Frobenius for matrices).
    #[default]
    Euclidean,
    /// Sum of component moduli.
    Componentwise,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NormKind {
    /// `p = f64::INFINITY` gives the max norm.
    Lp(f64),
    WeakLp(f64),
    /// Luxemburg norm of `t^p·log(e + t)`.
    LpLogL(f64),
    /// Iterated one-axis `L^p` norms, innermost over axis 0.
    Mixed(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormSpec {
    pub kind: NormKind,
    /// Nodes to integrate over; `None` means the whole grid.
    pub mask: Option<Vec<bool>>,
    pub point: PointNorm,
}

impl NormSpec {
    pub fn lp(p: f64) -> Self {
        NormSpec { kind: NormKind::Lp(p), mask: None, point: PointNorm::Euclidean }
    }

    pub fn weak_lp(p: f64) -> Self {
        NormSpec { kind: NormKind::WeakLp(p), mask: None, point: PointNorm::Euclidean }
    }

    pub fn lp_log_l(p: f64) -> Self {
        NormSpec { kind: NormKind::LpLogL(p), mask: None, point: PointNorm::Euclidean }
    }

    pub fn mixed(ps: Vec<f64>) -> Self {
        NormSpec { kind: NormKind::Mixed(ps), mask: None, point: PointNorm::Euclidean }
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Self {
        self.mask = Some(mask);
        self
    }

    pub fn with_point(mut self, point: PointNorm) -> Self {
        self.point = point;
        self
    }
}

/// Per-node magnitudes under `point`.
pub fn magnitudes(field: &GridField, point: PointNorm) -> Vec<f64> {
    let m = field.components();
    field
        .values()
        .chunks(m)
        .map(|c| match point {
            PointNorm::Euclidean => sqrt(c.iter().map(|x| x * x).sum()),
            PointNorm::Componentwise => c.iter().map(|x| x.abs()).sum(),
        })
        .collect()
}

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        input(alloc::format!("exponent {p} is below 1"))
    }
}

pub fn norm_eval(field: &GridField, spec: &NormSpec) -> Result<f64> {
    let grid = field.grid();
    let mut mags = magnitudes(field, spec.point);
    if let Some(mask) = &spec.mask {
        if mask.len() != mags.len() {
            return input("mask length does not match the grid");
        }
        if !mask.iter().any(|&m| m) {
            return input("empty mask");
        }
        for (v, &keep) in mags.iter_mut().zip(mask) {
            if !keep {
                *v = 0.0;
            }
        }
    }
    let w = grid.cell_volume();
    match &spec.kind {
        NormKind::Lp(p) => {
            check_p(*p)?;
            Ok(lp(&mags, *p, w))
        }
        NormKind::WeakLp(p) => {
            check_p(*p)?;
            mags.sort_by(|a, b| b.total_cmp(a));
            Ok(mags
                .iter()
                .enumerate()
                .map(|(i, &v)| v * pow((i + 1) as f64 * w, 1.0 / p))
                .fold(0.0, f64::max))
        }
        NormKind::LpLogL(p) => {
            check_p(*p)?;
            let count = match &spec.mask {
                Some(mask) => mask.iter().filter(|&&m| m).count(),
                None => mags.len(),
            } as f64;
            Ok(luxemburg(&mags, *p, count))
        }
        NormKind::Mixed(ps) => {
            if ps.len() != grid.dim() {
                return input("mixed norm needs one exponent per axis");
            }
            for &p in ps {
                check_p(p)?;
            }
            Ok(mixed(&mags, grid.points(), grid.dim(), ps, grid.spacing()))
        }
    }
}

fn lp(v: &[f64], p: f64, w: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().fold(0.0, |m, &x| m.max(x));
    }
    pow(v.iter().map(|&x| pow(x, p)).sum::<f64>() * w, 1.0 / p)
}

/// Smallest `λ` with `Σ(v/λ)^p·log(e + v/λ) ≤ count`, by 60 bisection steps
/// in `log λ`.
fn luxemburg(v: &[f64], p: f64, count: f64) -> f64 {
    let peak = v.iter().fold(0.0, |m: f64, &x| m.max(x));
    if peak == 0.0 {
        return 0.0;
    }
    let functional = |lam: f64| {
        v.iter()
            .map(|&x| {
                let t = x / lam;
                pow(t, p) * log(core::f64::consts::E + t)
            })
            .sum::<f64>()
            / count
    };
    // Bracket the crossing, then bisect.
    let mut hi = peak;
    while functional(hi) > 1.0 {
        hi *= 2.0;
    }
    let mut lo = hi;
    while functional(lo) <= 1.0 && lo > peak * 1e-300 {
        lo *= 0.5;
    }
    let (mut a, mut b) = (log(lo), log(hi));
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        if functional(libm::exp(mid)) > 1.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    libm::exp(b)
}

fn mixed(v: &[f64], points: usize, dim: usize, ps: &[f64], h: f64) -> f64 {
    // Collapse axis 0 first; the flat layout has axis 0 slowest, so after each
    // collapse the remaining array keeps its row-major order.
    let mut cur = v.to_vec();
    let mut remaining = dim;
    for &p in ps.iter().take(dim) {
        let inner = points.pow((remaining - 1) as u32);
        let mut next = vec![0.0; inner];
        for (j, out) in next.iter_mut().enumerate() {
            let line: Vec<f64> = (0..points).map(|i| cur[i * inner + j]).collect();
            *out = lp(&line, p, h);
        }
        cur = next;
        remaining -= 1;
    }
    cur[0]
}
