use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, log, pow, sqrt};

use crate::error::{domain, input, Result};
use crate::symcone::{binomial, SymMatrix};

/// Samples of a radial potential `u(r)` with `u̇` and `ü` on an increasing
/// grid of positive radii. The first radius is the excision radius.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub ddu: Vec<f64>,
}

/// `count` radii spaced geometrically from `r_min` to `r_max`.
pub fn geometric_radii(r_min: f64, r_max: f64, count: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) || count < 2 {
        return input("geometric radii need 0 < r_min < r_max and at least two points");
    }
    let step = log(r_max / r_min) / (count - 1) as f64;
    let mut r: Vec<f64> = (0..count).map(|i| r_min * exp(step * i as f64)).collect();
    r[count - 1] = r_max;
    Ok(r)
}

impl RadialProfile {
    pub fn new(r: Vec<f64>, u: Vec<f64>, du: Vec<f64>, ddu: Vec<f64>) -> Result<Self> {
        let m = r.len();
        if m < 2 || u.len() != m || du.len() != m || ddu.len() != m {
            return input("profile columns need equal lengths of at least two");
        }
        if !(r[0] > 0.0) || r.windows(2).any(|w| !(w[1] > w[0])) {
            return input("profile radii must be positive and strictly increasing");
        }
        if [&r, &u, &du, &ddu].iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return input("profile contains non-finite samples");
        }
        Ok(RadialProfile { r, u, du, ddu })
    }

    /// Tabulates an analytic profile `r ↦ (u, u̇, ü)`.
    pub fn from_fn(r: Vec<f64>, mut f: impl FnMut(f64) -> (f64, f64, f64)) -> Result<Self> {
        let m = r.len();
        let (mut u, mut du, mut ddu) = (Vec::with_capacity(m), Vec::with_capacity(m), Vec::with_capacity(m));
        for &s in &r {
            let (a, b, c) = f(s);
            u.push(a);
            du.push(b);
            ddu.push(c);
        }
        Self::new(r, u, du, ddu)
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn excision(&self) -> f64 {
        self.r[0]
    }

    pub fn outer(&self) -> f64 {
        self.r[self.r.len() - 1]
    }

    /// `(u, u̇, ü)` at `s`: cubic Hermite for `u` and `u̇`, linear for `ü`.
    /// `None` outside the tabulated range.
    pub fn sample(&self, s: f64) -> Option<(f64, f64, f64)> {
        if !(s >= self.excision() && s <= self.outer()) {
            return None;
        }
        let i = match self.r.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(i) => return Some((self.u[i], self.du[i], self.ddu[i])),
            Err(i) => i - 1,
        };
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let w = r1 - r0;
        let t = (s - r0) / w;
        let hermite = |y0: f64, y1: f64, d0: f64, d1: f64| {
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * w * d0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * w * d1
        };
        Some((
            hermite(self.u[i], self.u[i + 1], self.du[i], self.du[i + 1]),
            hermite(self.du[i], self.du[i + 1], self.ddu[i], self.ddu[i + 1]),
            self.ddu[i] + t * (self.ddu[i + 1] - self.ddu[i]),
        ))
    }

    /// Hessian eigenvalues at radius `s`: `ü` once and `u̇/s` with
    /// multiplicity `n − 1`, returned as `(radial, tangential)`.
    pub fn eigen_pair(&self, s: f64) -> Option<(f64, f64)> {
        self.sample(s).map(|(_, du, ddu)| (ddu, du / s))
    }

    /// `D²u(x) = (u̇/r)·I + (ü − u̇/r)·ν⊗ν` with `ν = x/|x|`.
    pub fn hessian_at(&self, x: &[f64]) -> Option<SymMatrix> {
        let s = sqrt(x.iter().map(|v| v * v).sum());
        let (radial, tangential) = self.eigen_pair(s)?;
        let n = x.len();
        Some(SymMatrix::from_fn(n, |i, j| {
            let id = if i == j { tangential } else { 0.0 };
            id + (radial - tangential) * x[i] * x[j] / (s * s)
        }))
    }
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if n == 0 || k == 0 || k > n {
        return input(alloc::format!("need 1 <= k <= n, got k = {k}, n = {n}"));
    }
    Ok(())
}

/// Radial solution of `F_k(D²u) = f` in `n` dimensions with `u(1) = 0`:
///
/// `u̇(r) = n^{1/k}·r^{1−n/k}·(∫₀^r f(t)t^{n−1}dt)^{1/k}`,
///
/// with `f` taken piecewise linear between the given radii. The radii
/// must reach 1; on `[0, r₀]` the inner integral takes `f` as constant.
/// `ü` comes from differentiating the closed form, so `F_k` of the assembled
/// Hessian equals `f` at every node up to the quadrature error in the
/// inner integral.
pub fn solve_radial_khessian(r: &[f64], f: &[f64], k: usize, n: usize) -> Result<RadialProfile> {
    check_order(n, k)?;
    if r.len() != f.len() || r.len() < 2 {
        return input("radii and right-hand side need equal lengths of at least two");
    }
    if !(r[0] > 0.0) || r.windows(2).any(|w| !(w[1] > w[0])) {
        return input("radii must be positive and strictly increasing");
    }
    if !(r[r.len() - 1] >= 1.0) {
        return input("radii must reach 1 for the boundary condition");
    }
    if let Some(v) = f.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return domain(alloc::format!("right-hand side must be finite and nonnegative, found {v}"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let c = pow(nf, 1.0 / kf);
    let weight = |i: usize| f[i] * pow(r[i], nf - 1.0);

    let m = r.len();
    let mut inner = vec![0.0; m];
    inner[0] = f[0] * pow(r[0], nf) / nf;
    for i in 1..m {
        // f linear on the interval, times t^{n−1}, integrated exactly.
        let (a, b) = (r[i - 1], r[i]);
        let mass = (pow(b, nf) - pow(a, nf)) / nf;
        let moment = (pow(b, nf + 1.0) - pow(a, nf + 1.0)) / (nf + 1.0) - a * mass;
        inner[i] = inner[i - 1] + f[i - 1] * mass + (f[i] - f[i - 1]) * moment / (b - a);
    }
    let mut du = vec![0.0; m];
    let mut ddu = vec![0.0; m];
    for i in 0..m {
        if inner[i] > 0.0 {
            du[i] = c * pow(r[i], 1.0 - nf / kf) * pow(inner[i], 1.0 / kf);
            ddu[i] = du[i] * ((1.0 - nf / kf) / r[i] + weight(i) / (kf * inner[i]));
        }
    }
    // u(r) = −∫_r^1 u̇: accumulate from r₀, then shift so u(1) = 0.
    let mut u = vec![0.0; m];
    for i in 1..m {
        // Trapezoid with the endpoint-derivative correction, exact for cubics.
        let w = r[i] - r[i - 1];
        u[i] = u[i - 1] + 0.5 * w * (du[i] + du[i - 1]) - w * w * (ddu[i] - ddu[i - 1]) / 12.0;
    }
    let mut profile = RadialProfile::new(r.to_vec(), u, du, ddu)?;
    let (at_one, _, _) = profile.sample(1.0).expect("radii reach 1");
    for v in profile.u.iter_mut() {
        *v -= at_one;
    }
    Ok(profile)
}

/// `F_k` of the radial Hessian with eigenvalues `(radial, tangential × (n−1))`.
pub fn radial_fk(radial: f64, tangential: f64, k: usize, n: usize) -> f64 {
    let t = pow(tangential, (k - 1) as f64);
    (binomial(n - 1, k) * t * tangential + binomial(n - 1, k - 1) * radial * t) / binomial(n, k)
}

/// Surface area of the unit sphere in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => core::f64::consts::TAU,
        _ => core::f64::consts::TAU / (n - 2) as f64 * sphere_area(n - 2),
    }
}

/// The standard bump `exp(−1/(1−|x|²))` normalized to unit mass in `R^n`,
/// rescaled as `η^ε(x) = ε^{−n}η(x/ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    dim: usize,
    norm: f64,
}

fn bump(t: f64) -> f64 {
    if t < 1.0 {
        exp(-1.0 / (1.0 - t * t))
    } else {
        0.0
    }
}

/// `∫₀^a bump(t)·t^{n−1} dt`; the integrand is flat to all orders at 1, so
/// the trapezoid rule converges fast.
fn radial_moment(n: usize, a: f64) -> f64 {
    let a = a.clamp(0.0, 1.0);
    let steps = 4000;
    let h = a / steps as f64;
    let g = |t: f64| bump(t) * pow(t, (n - 1) as f64);
    // Simpson's rule; the bump is smooth up to the rim.
    let mut s = g(0.0) + g(a);
    for i in 1..steps {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(h * i as f64);
    }
    s * h / 3.0
}

impl Mollifier {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return input("mollifier needs a positive dimension");
        }
        Ok(Mollifier { dim, norm: 1.0 / (sphere_area(dim) * radial_moment(dim, 1.0)) })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `η^ε` at radius `r`.
    pub fn value(&self, r: f64, eps: f64) -> f64 {
        self.norm * pow(eps, -(self.dim as f64)) * bump(r / eps)
    }

    /// Mass of `η^ε` inside the ball of radius `r`.
    pub fn mass_within(&self, r: f64, eps: f64) -> f64 {
        if r >= eps {
            return 1.0;
        }
        self.norm * sphere_area(self.dim) * radial_moment(self.dim, r / eps)
    }

    /// Tabulated [`Mollifier::mass_within`] for repeated evaluation.
    pub fn mass_table(&self, steps: usize) -> MassTable {
        let steps = steps.max(16);
        let h = 1.0 / steps as f64;
        let scale = self.norm * sphere_area(self.dim);
        let slope: Vec<f64> = (0..=steps)
            .map(|i| {
                let t = h * i as f64;
                scale * bump(t) * pow(t, (self.dim - 1) as f64)
            })
            .collect();
        let mut mass = vec![0.0; steps + 1];
        for i in 1..=steps {
            // Trapezoid with end correction; the second derivative of the
            // mass is approximated by differences of the slope.
            let d0 = if i >= 2 { (slope[i] - slope[i - 2]) / (2.0 * h) } else { (slope[1] - slope[0]) / h };
            let d1 = if i < steps { (slope[i + 1] - slope[i - 1]) / (2.0 * h) } else { (slope[i] - slope[i - 1]) / h };
            mass[i] = mass[i - 1] + 0.5 * h * (slope[i] + slope[i - 1]) - h * h * (d1 - d0) / 12.0;
        }
        let total = mass[steps];
        let mut slope = slope;
        for (m, s) in mass.iter_mut().zip(slope.iter_mut()) {
            *m /= total;
            *s /= total;
        }
        MassTable { h, mass, slope, dim: self.dim, scale: scale / total }
    }
}

/// Cumulative mass of the unit-scale bump on a uniform grid, interpolated by
/// cubic Hermite with the exact slope.
#[derive(Clone, Debug, PartialEq)]
pub struct MassTable {
    h: f64,
    mass: Vec<f64>,
    slope: Vec<f64>,
    dim: usize,
    scale: f64,
}

impl MassTable {
    pub fn mass_within(&self, r: f64, eps: f64) -> f64 {
        let t = r / eps;
        if !(t < 1.0) {
            return 1.0;
        }
        if t <= 0.0 {
            return 0.0;
        }
        if t < 8.0 * self.h {
            // Near the centre the mass is tiny; integrate directly to keep
            // relative accuracy.
            let steps = 64;
            let w = t / steps as f64;
            let g = |s: f64| self.scale * bump(s) * pow(s, (self.dim - 1) as f64);
            let mut acc = g(0.0) + g(t);
            for i in 1..steps {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(w * i as f64);
            }
            return acc * w / 3.0;
        }
        let x = t / self.h;
        let i = (x as usize).min(self.mass.len() - 2);
        let s = x - i as f64;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.mass[i]
            + (s3 - 2.0 * s2 + s) * self.h * self.slope[i]
            + (-2.0 * s3 + 3.0 * s2) * self.mass[i + 1]
            + (s3 - s2) * self.h * self.slope[i + 1]
    }

    /// Density of `η^ε` integrated over spheres: `d/dr` of the mass.
    pub fn shell_density(&self, r: f64, eps: f64) -> f64 {
        let t = r / eps;
        if !(t < 1.0) || t < 0.0 {
            return 0.0;
        }
        let x = t / self.h;
        let i = (x as usize).min(self.slope.len() - 2);
        let s = x - i as f64;
        (self.slope[i] + s * (self.slope[i + 1] - self.slope[i])) / eps
    }
}
