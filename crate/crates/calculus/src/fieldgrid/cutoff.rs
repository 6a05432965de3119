use libm::{log, sqrt};

use super::field::GridField;
use super::grid::Boundary;
use crate::error::{input, Result};

/// Radial multipliers centred at the origin of the box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    /// 1 on `r ≤ inner`, 0 on `r ≥ outer`, seventh-order smoothstep between.
    SmoothBump { inner: f64, outer: f64 },
    /// `log log(1 + 1/max(r, δ))`.
    LogLog { delta: f64 },
    /// 1 on `r < R − ε`, `(R − r)/ε` on the ramp, 0 beyond `R`.
    LipschitzRadial { eps: f64, radius: f64 },
}

/// `t⁴(35 − 84t + 70t² − 20t³)`: monotone from 0 to 1 on `[0,1]`, flat to
/// third order at both ends.
pub fn smoothstep7(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    let t4 = t * t * t * t;
    // Rounding can overshoot 1 near t = 1, which would flip the sign of
    // `1 − s` and push a cut-off cone field out of its cone.
    (t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)))).min(1.0)
}

impl Cutoff {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Cutoff::SmoothBump { inner, outer } if !(0.0 <= inner && inner < outer) => {
                input("smooth bump needs 0 <= inner < outer")
            }
            Cutoff::LogLog { delta } if !(delta > 0.0) => input("loglog cutoff needs delta > 0"),
            Cutoff::LipschitzRadial { eps, radius } if !(eps > 0.0 && eps <= radius) => {
                input("Lipschitz cutoff needs 0 < eps <= radius")
            }
            _ => Ok(()),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Cutoff::SmoothBump { inner, outer } => 1.0 - smoothstep7((r - inner) / (outer - inner)),
            Cutoff::LogLog { delta } => log(log(1.0 + 1.0 / r.max(delta))),
            Cutoff::LipschitzRadial { eps, radius } => {
                if r < radius - eps {
                    1.0
                } else if r <= radius {
                    (radius - r) / eps
                } else {
                    0.0
                }
            }
        }
    }
}

/// Multiplies every component by the profile evaluated at `|x|`.
pub fn cutoff_apply(field: &GridField, profile: &Cutoff) -> Result<GridField> {
    profile.validate()?;
    let grid = *field.grid();
    if grid.boundary() != Boundary::Box {
        return input("radial cutoffs need a box grid centred at the origin");
    }
    let m = field.components();
    let mut values = field.values().to_vec();
    for (cell, chunk) in values.chunks_mut(m).enumerate() {
        let x = grid.position(cell);
        let r = sqrt(x[..grid.dim()].iter().map(|v| v * v).sum());
        let c = profile.value(r);
        for v in chunk {
            *v *= c;
        }
    }
    GridField::new(grid, field.rank(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldgrid::{Grid, Rank};

    #[test]
    fn bump_never_negative() {
        let c = Cutoff::SmoothBump { inner: 0.5, outer: 0.9 };
        for i in 0..=200_000 {
            let r = 0.4 + 0.6 * i as f64 / 200_000.0;
            let v = c.value(r);
            assert!((0.0..=1.0).contains(&v), "r = {r}: {v}");
        }
    }

    #[test]
    fn loglog_value() {
        let c = Cutoff::LogLog { delta: 0.1 };
        assert!((c.value(0.05) - log(log(11.0))).abs() < 1e-15);
        assert!((c.value(0.05) - 0.874_591).abs() < 1e-6);
    }

    #[test]
    fn bump_support_and_plateau() {
        let g = Grid::unit_box(2, 32).unwrap();
        let f = GridField::from_fn(g, Rank::Scalar, |_, o| o[0] = 2.0);
        let c = cutoff_apply(&f, &Cutoff::SmoothBump { inner: 0.3, outer: 0.6 }).unwrap();
        for cell in 0..g.len() {
            let x = g.position(cell);
            let r = sqrt(x[0] * x[0] + x[1] * x[1]);
            if r >= 0.6 {
                assert_eq!(c.at(cell)[0], 0.0);
            }
            if r <= 0.3 && !g.in_collar(cell) {
                assert_eq!(c.at(cell)[0], 2.0);
            }
        }
        assert!(cutoff_apply(&f, &Cutoff::SmoothBump { inner: 0.6, outer: 0.3 }).is_err());
    }
}
