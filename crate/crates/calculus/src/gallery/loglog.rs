use libm::{log, pow};

use super::families::radial_grad_fk;
use crate::error::{input, Result};
use crate::fieldgrid::{smoothstep7, Cutoff};
use crate::hessian::{sphere_area, MassTable, Mollifier};

/// `½·log log(1 + 1/δ)`, the growth the endpoint counterexample must show.
pub fn loglog_div_expected_growth(delta: f64) -> f64 {
    0.5 * log(log(1.0 + 1.0 / delta))
}

/// Inner and outer radii of the test function `χ`.
const TEST_INNER: f64 = 0.25;
const TEST_OUTER: f64 = 0.5;

/// Radial description of `A = χ·φ^δ·∇F_k(D²w)`, where `w` solves
/// `F_k(D²w) = η^ε + ε` on the unit ball with `w = 0` on the sphere and
/// `φ^δ = log log(1 + 1/max(r, δ))`.
///
/// `A` is radial with eigenvalues `g(r)·(a_r, a_t)`, `g = χφ^δ`, and since
/// `∇F_k(D²w)` is Div-free, `Div A = g'(r)·a_r·ν`.
#[derive(Clone, Debug)]
pub struct LoglogRadial {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub eps: f64,
    bump: Mollifier,
    mass: MassTable,
    area: f64,
}

impl LoglogRadial {
    pub fn new(n: usize, k: usize, delta: f64, eps: f64) -> Result<Self> {
        if !(2 <= k && k < n) {
            return input(alloc::format!("loglog_div needs 2 <= k < n, got k = {k}, n = {n}"));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return input("loglog_div needs 0 < delta < 0.5");
        }
        if !(eps > 0.0 && eps < delta) {
            return input("loglog_div needs 0 < eps < delta");
        }
        Ok(LoglogRadial {
            n,
            k,
            delta,
            eps,
            bump: Mollifier::new(n)?,
            mass: Mollifier::new(n)?.mass_table(20_000),
            area: sphere_area(n),
        })
    }

    /// Right-hand side `f = η^ε + ε`.
    pub fn data(&self, r: f64) -> f64 {
        self.bump.value(r, self.eps) + self.eps
    }

    /// `∫₀^r f(t)t^{n−1}dt`.
    pub fn inner(&self, r: f64) -> f64 {
        self.mass.mass_within(r, self.eps) / self.area + self.eps * pow(r, self.n as f64) / self.n as f64
    }

    /// Hessian eigenvalues `(ẅ, ẇ/r)` of the radial solution.
    pub fn hessian_eigen(&self, r: f64) -> (f64, f64) {
        let (n, k) = (self.n as f64, self.k as f64);
        let r = r.max(1e-4 * self.eps);
        let inner = self.inner(r);
        let t = pow(n, 1.0 / k) * pow(r, -n / k) * pow(inner, 1.0 / k);
        let du = t * r;
        let ddu = du * ((1.0 - n / k) / r + self.data(r) * pow(r, n - 1.0) / (k * inner));
        (ddu, t)
    }

    /// Eigenvalues `(a_r, a_t)` of `∇F_k(D²w)`.
    pub fn grad_eigen(&self, r: f64) -> (f64, f64) {
        let (radial, tangential) = self.hessian_eigen(r);
        radial_grad_fk(radial, tangential, self.k, self.n)
    }

    fn test_fn(r: f64) -> (f64, f64) {
        let w = TEST_OUTER - TEST_INNER;
        let s = (r - TEST_INNER) / w;
        let slope = if (0.0..=1.0).contains(&s) {
            -140.0 * s * s * s * pow(1.0 - s, 3.0) / w
        } else {
            0.0
        };
        (1.0 - smoothstep7(s), slope)
    }

    fn phi(&self, r: f64) -> (f64, f64) {
        let value = Cutoff::LogLog { delta: self.delta }.value(r);
        let slope = if r >= self.delta { -1.0 / (r * (1.0 + r) * log(1.0 + 1.0 / r)) } else { 0.0 };
        (value, slope)
    }

    /// `g = χ·φ^δ`.
    pub fn weight(&self, r: f64) -> f64 {
        Self::test_fn(r).0 * self.phi(r).0
    }

    /// `g'(r)`.
    pub fn weight_slope(&self, r: f64) -> f64 {
        let (c, dc) = Self::test_fn(r);
        let (p, dp) = self.phi(r);
        dc * p + c * dp
    }

    /// `ρ_k*(A)^{k/(k−1)}` at radius `r`, from the attainment identity
    /// `ρ_k*(∇F_k(M)) = (k/n)·ρ_k(M)^{k−1}` and `ρ_k(D²w)^k = f`.
    pub fn lhs_density(&self, r: f64) -> f64 {
        let (n, k) = (self.n as f64, self.k as f64);
        let q = k / (k - 1.0);
        let value = self.weight(r) * (k / n) * pow(self.data(r), (k - 1.0) / k);
        pow(value.abs(), q)
    }

    /// `|Div A|` at radius `r`.
    pub fn div_magnitude(&self, r: f64) -> f64 {
        (self.weight_slope(r) * self.grad_eigen(r).0).abs()
    }

    /// `p = nk/(nk − n + k)`.
    pub fn div_exponent(&self) -> f64 {
        let (n, k) = (self.n as f64, self.k as f64);
        n * k / (n * k - n + k)
    }

    pub fn sphere_area(&self) -> f64 {
        self.area
    }

    /// Support radius of `χ`.
    pub fn support(&self) -> f64 {
        TEST_OUTER
    }
}
