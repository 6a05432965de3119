use alloc::vec;
use alloc::vec::Vec;

use libm::{pow, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::radial::RadialProfile;
use crate::error::{input, Result};
use crate::fieldgrid::{apply_operator, Boundary, Grid, GridField, Operator, Rank, COLLAR};
use crate::symcone::sample::random_in_gamma_star;
use crate::symcone::{elementary, eigen_sym, is_outside, rho_k, SymMatrix, MAX_DIM};

/// A matrix field with the cells that carry no value.
#[derive(Clone, Debug, PartialEq)]
pub struct MaskedField {
    pub field: GridField,
    /// `true` where the cell is excluded.
    pub masked: Vec<bool>,
}

impl MaskedField {
    pub fn masked_count(&self) -> usize {
        self.masked.iter().filter(|&&m| m).count()
    }
}

/// Samples `D²u` of a radial profile on a box grid. Cells inside the
/// excision radius, beyond the tabulated range or in the collar are masked
/// and hold zero.
pub fn radial_hessian_assemble(profile: &RadialProfile, grid: Grid) -> Result<MaskedField> {
    radial_hessian_from_fn(grid, |s| profile.eigen_pair(s))
}

/// Radial Hessian `(u̇/r)·I + (ü − u̇/r)·ν⊗ν` from a closed-form eigenvalue
/// pair `r ↦ (ü, u̇/r)`; `None` masks the cell. Box grids only.
pub fn radial_hessian_from_fn(grid: Grid, eigen: impl Fn(f64) -> Option<(f64, f64)>) -> Result<MaskedField> {
    if grid.boundary() != Boundary::Box {
        return input("radial Hessians are assembled on a box grid");
    }
    let n = grid.dim();
    let mut values = vec![0.0; grid.len() * n * n];
    let mut masked = vec![true; grid.len()];
    for cell in 0..grid.len() {
        if grid.in_collar(cell) {
            continue;
        }
        let x = grid.position(cell);
        let s2: f64 = x[..n].iter().map(|v| v * v).sum();
        let s = sqrt(s2);
        let Some((radial, tangential)) = eigen(s) else { continue };
        masked[cell] = false;
        let out = &mut values[cell * n * n..(cell + 1) * n * n];
        for i in 0..n {
            for j in 0..n {
                let id = if i == j { tangential } else { 0.0 };
                out[i * n + j] = id + (radial - tangential) * x[i] * x[j] / s2;
            }
        }
    }
    Ok(MaskedField { field: GridField::new(grid, Rank::Matrix, values)?, masked })
}

/// What [`admissibility_check`] looks at.
#[derive(Clone, Copy, Debug)]
pub enum HessianInput<'a> {
    /// Matrix field of Hessians; masked cells are skipped.
    Field { hessian: &'a GridField, mask: Option<&'a [bool]> },
    /// Scalar potential: its discrete Hessian is tested cell-wise and the
    /// weak pairing is spot-checked.
    Potential(&'a GridField),
    /// Radial profile in dimension `dim`, tested at every tabulated radius.
    Profile { profile: &'a RadialProfile, dim: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub fraction_admissible: f64,
    /// Largest `max_j −σ_j(λ)/|λ|^j` over tested points, 0 if none is negative.
    pub worst_violation: f64,
    /// Smallest `σ_j(λ)` for `j = 1..=k`.
    pub sigma_minima: Vec<f64>,
    pub points_tested: usize,
    /// Smallest normalized weak pairing, when a potential was given.
    pub weak_min: Option<f64>,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self, tol: f64) -> bool {
        self.worst_violation <= tol && self.weak_min.is_none_or(|w| w >= -tol)
    }
}

/// Number of `(A, φ)` pairs in the weak spot check.
pub const WEAK_PAIRS: usize = 10;
const WEAK_SEED: u64 = 0x0ad3_1551;

struct Tally {
    k: usize,
    tol: f64,
    good: usize,
    total: usize,
    worst: f64,
    minima: Vec<f64>,
}

impl Tally {
    fn new(k: usize, tol: f64) -> Self {
        Tally { k, tol, good: 0, total: 0, worst: 0.0, minima: vec![f64::INFINITY; k] }
    }

    fn push(&mut self, lambda: &[f64]) {
        let e = elementary(lambda);
        let size = sqrt(lambda.iter().map(|v| v * v).sum());
        let mut violation: f64 = 0.0;
        for j in 1..=self.k {
            self.minima[j - 1] = self.minima[j - 1].min(e[j]);
            if size > 0.0 {
                violation = violation.max(-e[j] / pow(size, j as f64));
            }
        }
        self.total += 1;
        if violation <= self.tol {
            self.good += 1;
        }
        self.worst = self.worst.max(violation);
    }

    fn finish(self, weak_min: Option<f64>) -> AdmissibilityReport {
        AdmissibilityReport {
            fraction_admissible: if self.total == 0 { 0.0 } else { self.good as f64 / self.total as f64 },
            worst_violation: self.worst,
            sigma_minima: self.minima,
            points_tested: self.total,
            weak_min,
        }
    }
}

/// Cells whose width-two Hessian stencil stays off the box collar.
fn stencil_interior(grid: &Grid, cell: usize) -> bool {
    if grid.boundary() == Boundary::Torus {
        return true;
    }
    let p = grid.points();
    let idx = grid.multi_index(cell);
    idx[..grid.dim()].iter().all(|&i| i >= COLLAR + 2 && i + COLLAR + 2 < p)
}

pub fn admissibility_check(source: HessianInput<'_>, k: usize, tol: f64) -> Result<AdmissibilityReport> {
    match source {
        HessianInput::Field { hessian, mask } => {
            if hessian.rank() != Rank::Matrix {
                return input("admissibility needs a matrix field");
            }
            let grid = hessian.grid();
            check_k(grid.dim(), k)?;
            if mask.is_some_and(|m| m.len() != grid.len()) {
                return input("mask length does not match the grid");
            }
            let mut t = Tally::new(k, tol);
            for cell in 0..grid.len() {
                if mask.is_some_and(|m| m[cell]) {
                    continue;
                }
                let sp = eigen_sym(&hessian.sym_at(cell))?;
                t.push(sp.values());
            }
            Ok(t.finish(None))
        }
        HessianInput::Potential(u) => {
            if u.rank() != Rank::Scalar {
                return input("admissibility of a potential needs a scalar field");
            }
            let grid = *u.grid();
            check_k(grid.dim(), k)?;
            let h = apply_operator(u, Operator::Hessian)?;
            let mut t = Tally::new(k, tol);
            for cell in 0..grid.len() {
                if stencil_interior(&grid, cell) {
                    t.push(eigen_sym(&h.sym_at(cell))?.values());
                }
            }
            let weak = weak_pairing_min(u, k, WEAK_SEED)?;
            Ok(t.finish(Some(weak)))
        }
        HessianInput::Profile { profile, dim } => {
            check_k(dim, k)?;
            let mut t = Tally::new(k, tol);
            let mut lambda = [0.0; MAX_DIM];
            for i in 0..profile.len() {
                let tangential = profile.du[i] / profile.r[i];
                lambda[0] = profile.ddu[i];
                for l in lambda.iter_mut().take(dim).skip(1) {
                    *l = tangential;
                }
                t.push(&lambda[..dim]);
            }
            Ok(t.finish(None))
        }
    }
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n || n > MAX_DIM {
        return input(alloc::format!("need 1 <= k <= n <= {MAX_DIM}, got k = {k}, n = {n}"));
    }
    Ok(())
}

/// Minimum over seeded pairs of `∫u⟨A, D²φ⟩ / ∫|u|·|A|·|D²φ|`, with
/// constant `A ∈ Γ_k*` and nonnegative bumps `φ` supported away from the
/// collar. For a `k`-admissible `u` every pairing is `≥ 0`; this is a
/// necessary condition only.
pub fn weak_pairing_min(u: &GridField, k: usize, seed: u64) -> Result<f64> {
    let grid = *u.grid();
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = match grid.boundary() {
        Boundary::Torus => (0.0, grid.extent()),
        Boundary::Box => (-1.0 + (COLLAR + 4) as f64 * grid.spacing(), 1.0 - (COLLAR + 4) as f64 * grid.spacing()),
    };
    let span = hi - lo;
    let mut worst = f64::INFINITY;
    for _ in 0..WEAK_PAIRS {
        let a = random_in_gamma_star(n, k, &mut rng)?;
        let radius = span * rng.random_range(0.1..0.3);
        let mut centre = [0.0; 3];
        for c in centre.iter_mut().take(n) {
            *c = match grid.boundary() {
                Boundary::Torus => rng.random_range(lo..hi),
                Boundary::Box => rng.random_range(lo + radius..hi - radius),
            };
        }
        let phi = bump_field(&grid, &centre[..n], radius);
        let hp = apply_operator(&phi, Operator::Hessian)?;
        let (mut pairing, mut scale) = (0.0, 0.0);
        for cell in 0..grid.len() {
            let d = hp.sym_at(cell);
            let uv = u.at(cell)[0];
            pairing += uv * a.inner(&d);
            scale += uv.abs() * a.frobenius() * d.frobenius();
        }
        if scale > 0.0 {
            worst = worst.min(pairing / scale);
        }
    }
    Ok(if worst.is_finite() { worst } else { 0.0 })
}

/// `(1 − |x−c|²/ρ²)⁴₊`, with periodic distance on the torus.
fn bump_field(grid: &Grid, centre: &[f64], radius: f64) -> GridField {
    let side = grid.extent();
    let torus = grid.boundary() == Boundary::Torus;
    GridField::from_fn(*grid, Rank::Scalar, |x, o| {
        let mut d2 = 0.0;
        for (xi, ci) in x.iter().zip(centre) {
            let mut d = xi - ci;
            if torus {
                d -= side * libm::round(d / side);
            }
            d2 += d * d;
        }
        let t = 1.0 - d2 / (radius * radius);
        o[0] = if t > 0.0 { t * t * t * t } else { 0.0 };
    })
}

/// `‖ρ_k(D²u) − f‖_{L²}` over unmasked cells, with the discrete Hessian.
/// On a box, cells whose stencil touches the collar are left out. A cell
/// where `D²u ∉ Γ_k` contributes `|f|`.
pub fn khessian_residual(u: &GridField, f: &GridField, k: usize, mask: Option<&[bool]>) -> Result<f64> {
    if u.rank() != Rank::Scalar || f.rank() != Rank::Scalar {
        return input("residual needs scalar potential and right-hand side");
    }
    if u.grid() != f.grid() {
        return input("potential and right-hand side live on different grids");
    }
    let grid = *u.grid();
    check_k(grid.dim(), k)?;
    if mask.is_some_and(|m| m.len() != grid.len()) {
        return input("mask length does not match the grid");
    }
    let h = apply_operator(u, Operator::Hessian)?;
    let mut acc = 0.0;
    for cell in 0..grid.len() {
        if mask.is_some_and(|m| m[cell]) || !stencil_interior(&grid, cell) {
            continue;
        }
        let target = f.at(cell)[0];
        let r = rho_k(&h.sym_at(cell), k)?;
        let d = if is_outside(r) { target.abs() } else { r - target };
        acc += d * d;
    }
    Ok(sqrt(acc * grid.cell_volume()))
}

/// `ρ_k` at each cell of a Hessian field, with outside cells flagged.
pub fn rho_k_field(hessian: &GridField, k: usize) -> Result<MaskedField> {
    if hessian.rank() != Rank::Matrix {
        return input("expected a matrix field");
    }
    check_k(hessian.grid().dim(), k)?;
    let grid = *hessian.grid();
    let mut values = vec![0.0; grid.len()];
    let mut masked = vec![false; grid.len()];
    for cell in 0..grid.len() {
        let s: SymMatrix = hessian.sym_at(cell);
        let r = rho_k(&s, k)?;
        if is_outside(r) {
            masked[cell] = true;
        } else {
            values[cell] = r;
        }
    }
    Ok(MaskedField { field: GridField::raw(grid, Rank::Scalar, values), masked })
}
