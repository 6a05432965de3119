use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, pow, sin, sqrt};

use super::loglog::{loglog_div_expected_growth, LoglogRadial};
use super::FamilyField;
use crate::error::{domain, input, Result};
use crate::fieldgrid::{Boundary, Cutoff, Grid, GridField, Rank};
use crate::hessian::Mollifier;
use crate::symcone::{binomial, eigen_sym, grad_fk, in_gamma, ConeId, Sign, SymMatrix};

/// Outer cutoff of the box families: 1 on the half ball, 0 beyond 0.9.
const OUTER: Cutoff = Cutoff::SmoothBump { inner: 0.5, outer: 0.9 };

/// Default excision radius in grid spacings.
const EXCISION_CELLS: f64 = 4.0;

/// Test potential `φ(x) = a·Π_i sin(2π m_i x_i / L + θ_i)` on a torus of
/// side `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhiSpec {
    pub amplitude: f64,
    pub modes: [u32; 3],
    pub phases: [f64; 3],
}

impl PhiSpec {
    /// `a·Π sin(2π x_i/L)`.
    pub fn product(amplitude: f64) -> Self {
        PhiSpec { amplitude, modes: [1; 3], phases: [0.0; 3] }
    }

    /// Analytic Hessian at `x` on a torus of side `side`.
    pub fn hessian(&self, x: &[f64], side: f64) -> SymMatrix {
        let n = x.len();
        let mut s = [0.0; 3];
        let mut c = [0.0; 3];
        let mut kappa = [0.0; 3];
        for a in 0..n {
            kappa[a] = core::f64::consts::TAU * self.modes[a] as f64 / side;
            let arg = kappa[a] * x[a] + self.phases[a];
            s[a] = sin(arg);
            c[a] = cos(arg);
        }
        SymMatrix::from_fn(n, |i, j| {
            let mut v = self.amplitude;
            for a in 0..n {
                v *= if a == i && a == j {
                    -kappa[a] * kappa[a] * s[a]
                } else if a == i || a == j {
                    kappa[a] * c[a]
                } else {
                    s[a]
                };
            }
            v
        })
    }
}

/// One summand of a divergence-free combination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ComboPart {
    /// `∇F_k(S + D²φ)`.
    Equality { base: SymMatrix, phi: PhiSpec },
    Constant(SymMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CounterexampleFamily {
    /// `diag(1 + ¼sin(x₁/ε)sin x₂, 1 + ¼sin(x₂/ε)sin x₁)` on the torus of
    /// side 2π; `mirrored` swaps the oscillating arguments.
    Ornstein { eps: f64, mirrored: bool },
    /// Conformal field of derivatives of the mollified planar Green's
    /// function, cut off outside the half ball.
    GreenConformal { eps: f64 },
    /// Differential of `x ↦ |x|^{1−2/p}·x/|x|` at the rotated point.
    RadialPowerMap { p: f64 },
    /// `A₁` left of the line `x₁ = 0`, `A₂` right of it, smoothed over four
    /// cells.
    Step { a1: SymMatrix, a2: SymMatrix },
    /// `(1/k)∇F_k(D²u)` for the radial power `u = ±r^{2−α}`.
    OptimalDiv { k: usize, eps: f64 },
    /// `χ·φ^δ·∇F_k(D²w)` with `F_k(D²w) = η^ε + ε`; `eps` defaults to `δ²`.
    LoglogDiv { k: usize, delta: f64, eps: Option<f64> },
    /// `D²u` for `u = r^{1+ε/(n+ε)}`.
    QuasiconformalRadial { eps: f64 },
    /// Hessian of `u(x₁,…,x_k)` with the quasiconformal radial `u` in `k`
    /// variables.
    CurlOptimal { k: usize, eps: f64 },
    /// `∇F_k(S + D²φ)` on the torus.
    EqualityCase { k: usize, base: SymMatrix, phi: PhiSpec },
    /// Nonnegative combination of equality-case and constant fields.
    DivfreeCombo { k: usize, weights: Vec<f64>, components: Vec<ComboPart> },
}

impl CounterexampleFamily {
    pub fn id(&self) -> &'static str {
        match self {
            CounterexampleFamily::Ornstein { .. } => "ornstein",
            CounterexampleFamily::GreenConformal { .. } => "green_conformal",
            CounterexampleFamily::RadialPowerMap { .. } => "radial_power_map",
            CounterexampleFamily::Step { .. } => "step",
            CounterexampleFamily::OptimalDiv { .. } => "optimal_div",
            CounterexampleFamily::LoglogDiv { .. } => "loglog_div",
            CounterexampleFamily::QuasiconformalRadial { .. } => "quasiconformal_radial",
            CounterexampleFamily::CurlOptimal { .. } => "curl_optimal",
            CounterexampleFamily::EqualityCase { .. } => "equality_case",
            CounterexampleFamily::DivfreeCombo { .. } => "divfree_combo",
        }
    }

    /// The default step pair: positive and negative definite, with a segment
    /// that misses the origin.
    pub fn default_step() -> Self {
        CounterexampleFamily::Step {
            a1: SymMatrix::from_fn(2, |i, j| [[2.0, 1.0], [1.0, 1.0]][i][j]),
            a2: SymMatrix::from_fn(2, |i, j| [[-1.0, 1.0], [1.0, -2.0]][i][j]),
        }
    }
}

fn need_box(grid: &Grid, what: &str) -> Result<()> {
    if grid.boundary() != Boundary::Box {
        return input(format!("{what} is built on a box grid"));
    }
    Ok(())
}

fn need_torus(grid: &Grid, what: &str) -> Result<()> {
    if grid.boundary() != Boundary::Torus {
        return input(format!("{what} is built on a torus grid"));
    }
    Ok(())
}

fn need_dim(grid: &Grid, n: usize, what: &str) -> Result<()> {
    if grid.dim() != n {
        return input(format!("{what} needs a {n}-dimensional grid"));
    }
    Ok(())
}

fn ipow(x: f64, e: usize) -> f64 {
    (0..e).fold(1.0, |acc, _| acc * x)
}

fn norm(x: &[f64]) -> f64 {
    sqrt(x.iter().map(|v| v * v).sum())
}

/// Eigenvalues `(radial, tangential)` of `∇F_k` at a radial matrix with
/// eigenvalues `(radial, tangential × (n−1))`.
pub fn radial_grad_fk(radial: f64, tangential: f64, k: usize, n: usize) -> (f64, f64) {
    let c = binomial(n, k);
    if k == 1 {
        return (1.0 / c, 1.0 / c);
    }
    let along = binomial(n - 1, k - 1) * ipow(tangential, k - 1) / c;
    let across = if n >= 2 {
        (binomial(n - 2, k - 1) * ipow(tangential, k - 1) + binomial(n - 2, k - 2) * radial * ipow(tangential, k - 2)) / c
    } else {
        0.0
    };
    (along, across)
}

/// `t·I + (ρ − t)·ν⊗ν` with `ν = x/|x|` (`e₁` at the origin), written into a
/// row-major `n×n` block of stride `stride`.
fn write_radial(x: &[f64], radial: f64, tangential: f64, stride: usize, out: &mut [f64]) {
    let n = x.len();
    let r = norm(x);
    for i in 0..n {
        for j in 0..n {
            let (ni, nj) = if r > 0.0 {
                (x[i] / r, x[j] / r)
            } else {
                (if i == 0 { 1.0 } else { 0.0 }, if j == 0 { 1.0 } else { 0.0 })
            };
            let id = if i == j { tangential } else { 0.0 };
            out[i * stride + j] = id + (radial - tangential) * ni * nj;
        }
    }
}

/// Box field `χ(|x|)·(radial matrix)` with eigenvalues `eigen(max(r, r₀))`.
fn radial_family(grid: Grid, excision: f64, eigen: impl Fn(f64) -> (f64, f64)) -> GridField {
    let n = grid.dim();
    GridField::from_fn(grid, Rank::Matrix, |x, out| {
        let r = norm(x);
        let (radial, tangential) = eigen(r.max(excision));
        let chi = OUTER.value(r);
        write_radial(x, chi * radial, chi * tangential, n, out);
    })
}

fn outside_excision(grid: &Grid, excision: f64, radius: impl Fn(&[f64]) -> f64) -> Vec<bool> {
    (0..grid.len())
        .map(|cell| {
            let x = grid.position(cell);
            !grid.in_collar(cell) && radius(&x[..grid.dim()]) >= excision
        })
        .collect()
}

fn all_cells(grid: &Grid) -> Vec<bool> {
    (0..grid.len()).map(|c| !grid.in_collar(c)).collect()
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 4.0) {
        return input(format!("epsilon = {eps} outside (0, 4]"));
    }
    Ok(())
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if !(2 <= k && k <= n) {
        return input(format!("need 2 <= k <= n, got k = {k}, n = {n}"));
    }
    Ok(())
}

/// `∇F_k(S + D²φ)` at every torus node; errors if `S + D²φ` leaves `Γ_k`.
pub(crate) fn equality_values(grid: &Grid, k: usize, base: &SymMatrix, phi: &PhiSpec) -> Result<Vec<f64>> {
    let n = grid.dim();
    if base.dim() != n {
        return input("base matrix dimension does not match the grid");
    }
    if k == 0 || k > n {
        return input(format!("order k = {k} not in 1..={n}"));
    }
    let mut values = vec![0.0; grid.len() * n * n];
    for cell in 0..grid.len() {
        let x = grid.position(cell);
        let m = *base + phi.hessian(&x[..n], grid.extent());
        if !in_gamma(eigen_sym(&m)?.values(), k) {
            return domain(format!("S + D²φ leaves Gamma_{k} at cell {cell}"));
        }
        let a = grad_fk(&m, k)?;
        for i in 0..n {
            for j in 0..n {
                values[cell * n * n + i * n + j] = a.get(i, j);
            }
        }
    }
    Ok(values)
}

/// Builds a family on `grid`.
pub fn build_family(family: &CounterexampleFamily, grid: Grid) -> Result<FamilyField> {
    let n = grid.dim();
    let h = grid.spacing();
    let excision = EXCISION_CELLS * h;
    let mut notes = String::new();
    match family {
        CounterexampleFamily::Ornstein { eps, mirrored } => {
            need_torus(&grid, "ornstein")?;
            need_dim(&grid, 2, "ornstein")?;
            if (grid.extent() - core::f64::consts::TAU).abs() > 1e-12 {
                return input("ornstein lives on the torus of side 2π");
            }
            let m = libm::round(1.0 / eps);
            if !(*eps > 0.0 && *eps <= 1.0) || (m * eps - 1.0).abs() > 1e-9 {
                return input("ornstein needs eps = 1/m for an integer m >= 1");
            }
            let eps = *eps;
            let mirrored = *mirrored;
            let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
                let (fast, slow) = if mirrored { (1, 0) } else { (0, 1) };
                out[0] = 1.0 + 0.25 * sin(x[fast] / eps) * sin(x[slow]);
                out[1] = 0.0;
                out[2] = 0.0;
                out[3] = 1.0 + 0.25 * sin(x[slow] / eps) * sin(x[fast]);
            });
            let (div, curl) = if mirrored { (8.0, 8.0 / eps) } else { (8.0 / eps, 8.0) };
            Ok(FamilyField {
                field,
                excision: 0.0,
                targets: vec![ConeId::SymPos],
                claim: "no L1 bound of Div by Curl (or Curl by Div) on Sym+",
                checked: all_cells(&grid),
                expected: vec![("div_l1_componentwise", div), ("curl_l1_componentwise", curl)],
                notes,
            })
        }
        CounterexampleFamily::GreenConformal { eps } => {
            need_box(&grid, "green_conformal")?;
            need_dim(&grid, 2, "green_conformal")?;
            if !(*eps > 0.0 && *eps < 0.5) {
                return input("green_conformal needs 0 < eps < 0.5");
            }
            let table = Mollifier::new(2)?.mass_table(20_000);
            let eps = *eps;
            let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
                let r2 = x[0] * x[0] + x[1] * x[1];
                if r2 == 0.0 {
                    out.fill(0.0);
                    return;
                }
                let r = sqrt(r2);
                let c = OUTER.value(r) * table.mass_within(r, eps) / (core::f64::consts::TAU * r2);
                let (g1, g2) = (c * x[0], c * x[1]);
                out.copy_from_slice(&[g2, -g1, g1, g2]);
            });
            Ok(FamilyField {
                field,
                excision: 0.0,
                targets: vec![ConeId::QuasiConformal { dim: 2, distortion: 1.0, sign: Sign::Plus }],
                claim: "det >= 0 alone gives no bound of the integral of det by the squared L1 norm of Div",
                checked: all_cells(&grid),
                expected: vec![("det_log_slope", 1.0 / core::f64::consts::TAU)],
                notes,
            })
        }
        CounterexampleFamily::RadialPowerMap { p } => {
            need_box(&grid, "radial_power_map")?;
            need_dim(&grid, 2, "radial_power_map")?;
            if !(*p > 2.0 && p.is_finite()) {
                return input("radial_power_map needs p > 2");
            }
            let p = *p;
            let distortion = p / (p - 2.0);
            let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
                let y = [x[1], -x[0]];
                let r = norm(&y);
                let t = pow(r.max(excision), -2.0 / p);
                let chi = OUTER.value(r);
                write_radial(&y, chi * (1.0 - 2.0 / p) * t, chi * t, 2, out);
            });
            Ok(FamilyField {
                field,
                excision,
                targets: vec![ConeId::QuasiConformal { dim: 2, distortion, sign: Sign::Plus }],
                claim: "Div estimate on Q2+(K) fails at the endpoint 2K/(K-1): W^{1,q} for q < p only",
                checked: outside_excision(&grid, excision, norm),
                expected: vec![("distortion", distortion), ("critical_exponent", p)],
                notes,
            })
        }
        CounterexampleFamily::Step { a1, a2 } => {
            need_box(&grid, "step")?;
            need_dim(&grid, 2, "step")?;
            if a1.dim() != 2 || a2.dim() != 2 {
                return input("step matrices are 2x2");
            }
            let l1 = eigen_sym(a1)?;
            let l2 = eigen_sym(a2)?;
            if !(l1.values()[1] > 0.0) || !(l2.values()[0] < 0.0) {
                return input("step needs A1 positive definite and A2 negative definite");
            }
            // The segment [A1, A2] passes through 0 iff A2 = −c·A1 for c > 0.
            let c = -a2.trace() / a1.trace();
            if (*a2 + a1.scale(c)).frobenius() <= 1e-12 * a2.frobenius() {
                return input("segment [A1, A2] passes through the origin");
            }
            let (a1, a2) = (*a1, *a2);
            let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
                let w = crate::fieldgrid::smoothstep7((x[0] + 2.0 * h) / (4.0 * h));
                let layer: f64 = x
                    .iter()
                    .map(|v| crate::fieldgrid::smoothstep7((1.0 - 1.5 * h - v.abs()) / (5.0 * h)))
                    .product();
                for i in 0..2 {
                    for j in 0..2 {
                        out[i * 2 + j] = layer * ((1.0 - w) * a1.get(i, j) + w * a2.get(i, j));
                    }
                }
            });
            let jump = sqrt(ipow(a2.get(0, 0) - a1.get(0, 0), 2) + ipow(a2.get(1, 0) - a1.get(1, 0), 2));
            let sep = sqrt(ipow(a1.get(0, 0), 2) + ipow(a1.get(1, 0), 2)) + sqrt(ipow(a2.get(0, 0), 2) + ipow(a2.get(1, 0), 2));
            let checked = (0..grid.len())
                .map(|cell| !grid.in_collar(cell) && grid.position(cell)[0].abs() >= 2.0 * h)
                .collect();
            Ok(FamilyField {
                field,
                excision: 0.0,
                targets: vec![ConeId::SymPos, ConeId::SymNeg],
                claim: "no smooth approximation in the strict BV^Div topology within Sym+ ∪ Sym-",
                checked,
                expected: vec![("div_mass", 2.0 * jump), ("separated_mass", 2.0 * sep)],
                notes,
            })
        }
        CounterexampleFamily::OptimalDiv { k, eps } => {
            need_box(&grid, "optimal_div")?;
            check_order(*k, n)?;
            check_eps(*eps)?;
            let (k, eps) = (*k, *eps);
            let alpha = n as f64 / (k as f64 + eps * (k - 1) as f64);
            let beta = 2.0 - alpha;
            let tn = 1e-12;
            if beta.abs() < tn {
                return domain("alpha = 2: neither ±r^(2-alpha) is admissible");
            }
            // Both eigenvalues scale like r^{β−2}; test admissibility at r = 1.
            let admissible = |s: f64| {
                let mut l = vec![s * beta * (beta - 1.0)];
                l.extend(core::iter::repeat(s * beta).take(n - 1));
                let e = crate::symcone::elementary(&l);
                (1..=k).all(|j| e[j] > 0.0)
            };
            let sign = if admissible(1.0) {
                1.0
            } else if admissible(-1.0) {
                -1.0
            } else {
                return domain(format!("neither sign of r^(2-alpha) is Gamma_{k}-admissible (alpha = {alpha})"));
            };
            notes = format!("u = {}r^{beta}", if sign > 0.0 { "+" } else { "-" });
            let field = radial_family(grid, excision, |r| {
                let t = sign * beta * pow(r, beta - 2.0);
                let (a, b) = radial_grad_fk((beta - 1.0) * t, t, k, n);
                (a / k as f64, b / k as f64)
            });
            Ok(FamilyField {
                field,
                excision,
                targets: vec![ConeId::GammaStar(k)],
                claim: "Div-free Gamma_k*-valued field in L^{k/(k-1)} but not L^{k/(k-1)+eps}",
                checked: outside_excision(&grid, excision, norm),
                expected: vec![("alpha", alpha), ("q_max", k as f64 / (k - 1) as f64), ("sign", sign)],
                notes,
            })
        }
        CounterexampleFamily::LoglogDiv { k, delta, eps } => {
            need_box(&grid, "loglog_div")?;
            let eps = eps.unwrap_or(delta * delta);
            let profile = LoglogRadial::new(n, *k, *delta, eps)?;
            let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
                let r = norm(x);
                let g = profile.weight(r);
                let (a, b) = profile.grad_eigen(r);
                write_radial(x, g * a, g * b, n, out);
            });
            Ok(FamilyField {
                field,
                excision: 0.0,
                targets: vec![ConeId::GammaStar(*k)],
                claim: "endpoint k < n: rho_k* in L^{k/(k-1)} is not controlled by Div in L^p, p = (k/(k-1))_*",
                checked: all_cells(&grid),
                expected: vec![
                    ("growth", loglog_div_expected_growth(*delta)),
                    ("tracking_factor", 2.0 * *k as f64 / n as f64),
                    ("eps", eps),
                ],
                notes,
            })
        }
        CounterexampleFamily::QuasiconformalRadial { eps } => {
            need_box(&grid, "quasiconformal_radial")?;
            check_eps(*eps)?;
            let beta = eps / (n as f64 + eps);
            let field = radial_family(grid, excision, |r| {
                let t = (beta + 1.0) * pow(r, beta - 1.0);
                (beta * t, t)
            });
            let distortion = 1.0 + n as f64 / eps;
            Ok(FamilyField {
                field,
                excision,
                targets: vec![ConeId::QuasiConformal { dim: n, distortion, sign: Sign::Plus }],
                claim: "Hessian in Sym+ ∩ Q_n+(1+n/eps), in L^n but not L^{n+eps}",
                checked: outside_excision(&grid, excision, norm),
                expected: vec![("distortion", distortion), ("q_max", n as f64)],
                notes,
            })
        }
        CounterexampleFamily::CurlOptimal { k, eps } => {
            need_box(&grid, "curl_optimal")?;
            check_order(*k, n)?;
            check_eps(*eps)?;
            let k = *k;
            let beta = eps / (k as f64 + eps);
            let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
                let rk = norm(&x[..k]);
                let t = (beta + 1.0) * pow(rk.max(excision), beta - 1.0);
                let chi = OUTER.value(norm(x));
                out.fill(0.0);
                write_radial(&x[..k], chi * beta * t, chi * t, n, out);
            });
            Ok(FamilyField {
                field,
                excision,
                targets: vec![ConeId::Gamma(k)],
                claim: "Curl-free Gamma_k-valued field in L^k but not L^{k+eps}",
                checked: outside_excision(&grid, excision, |x| norm(&x[..k])),
                expected: vec![("distortion", 1.0 + k as f64 / eps), ("q_max", k as f64)],
                notes,
            })
        }
        CounterexampleFamily::EqualityCase { k, base, phi } => {
            need_torus(&grid, "equality_case")?;
            let values = equality_values(&grid, *k, base, phi)?;
            Ok(FamilyField {
                field: GridField::new(grid, Rank::Matrix, values)?,
                excision: 0.0,
                targets: vec![ConeId::GammaStar(*k)],
                claim: "equality in the torus quasiconcavity inequality",
                checked: all_cells(&grid),
                expected: vec![],
                notes,
            })
        }
        CounterexampleFamily::DivfreeCombo { k, weights, components } => {
            need_torus(&grid, "divfree_combo")?;
            if weights.len() != components.len() || weights.is_empty() {
                return input("divfree_combo needs one weight per component");
            }
            if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
                return input("divfree_combo weights must be finite and nonnegative");
            }
            let mut values = vec![0.0; grid.len() * n * n];
            for (w, part) in weights.iter().zip(components) {
                if *w == 0.0 {
                    continue;
                }
                match part {
                    ComboPart::Equality { base, phi } => {
                        for (v, e) in values.iter_mut().zip(equality_values(&grid, *k, base, phi)?) {
                            *v += w * e;
                        }
                    }
                    ComboPart::Constant(c) => {
                        if c.dim() != n {
                            return input("constant component dimension does not match the grid");
                        }
                        for (idx, v) in values.iter_mut().enumerate() {
                            let e = idx % (n * n);
                            *v += w * c.get(e / n, e % n);
                        }
                    }
                }
            }
            Ok(FamilyField {
                field: GridField::new(grid, Rank::Matrix, values)?,
                excision: 0.0,
                targets: vec![ConeId::GammaStar(*k)],
                claim: "Div-free Gamma_k*-valued combination",
                checked: all_cells(&grid),
                expected: vec![],
                notes,
            })
        }
    }
}
