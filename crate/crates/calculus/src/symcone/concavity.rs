use alloc::vec::Vec;

use libm::pow;

use super::cone::{cone_contains, ConeId, Membership};
use super::dual::rho_k_star;
use super::matrix::{SymMatrix, MAX_DIM};
use super::poly::grad_fk;
use crate::error::{input, Result};

/// A line `t ↦ B(t)` along which `ρ_k*(B(t))^α` is probed.
#[derive(Clone, Copy, Debug)]
pub enum LineSpec {
    /// `base + t·direction`; the direction must lie in the Div wave cone.
    Segment { base: SymMatrix, direction: SymMatrix },
    /// `(1/k)∇F_k(diag(1+t, 1, …, 1))`: along it `ρ_k*^α` behaves like
    /// `(b + mt)^{(k−1)α/k}`.
    PushedForwardDiagonal { dim: usize },
}

impl LineSpec {
    pub fn point(&self, k: usize, t: f64) -> Result<SymMatrix> {
        match *self {
            LineSpec::Segment { base, direction } => Ok(base + direction.scale(t)),
            LineSpec::PushedForwardDiagonal { dim } => {
                let mut d = [1.0; MAX_DIM];
                d[0] = 1.0 + t;
                Ok(grad_fk(&SymMatrix::diag(&d[..dim]), k)?.scale(1.0 / k as f64))
            }
        }
    }
}

/// Centered second differences `f(t+dt) − 2f(t) + f(t−dt)` of
/// `f(t) = ρ_k*(B(t))^α` at the interior nodes of a uniform `t_grid`
/// (length `t_grid.len() − 2`). Nodes whose stencil leaves `Γ_k*` are NaN.
pub fn power_concavity_profile(
    k: usize,
    alpha: f64,
    line: &LineSpec,
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    if t_grid.len() < 3 {
        return input("need at least three grid points");
    }
    let dt = t_grid[1] - t_grid[0];
    if !(dt > 0.0)
        || t_grid
            .windows(2)
            .any(|w| ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.max(1.0))
    {
        return input("t grid must be increasing and uniform");
    }
    if let LineSpec::Segment { direction, .. } = line {
        let m = cone_contains(direction.as_matrix(), &ConeId::WaveConeDiv, 1e-10)?;
        if m != Membership::Inside {
            return input("line direction is not in the Div wave cone");
        }
    }
    let mut f = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let ev = rho_k_star(&line.point(k, t)?, k)?;
        f.push(if ev.is_outside() || ev.value < 0.0 {
            f64::NAN
        } else {
            pow(ev.value, alpha)
        });
    }
    Ok(f.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect())
}
