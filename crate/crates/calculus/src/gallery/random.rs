use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use libm::{cos, pow, sqrt};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::families::{equality_values, PhiSpec};
use crate::error::{input, Error, Result};
use crate::fieldgrid::{Boundary, Cutoff, Grid, GridField, Rank};
use crate::symcone::sample::{random_in_gamma, random_in_gamma_star, standard_normal};
use crate::symcone::{cone_contains, conformal_coords, eigen_sym, elementary, from_conformal, ConeId, Matrix, Sign, SymMatrix, MAX_DIM};

const RETRIES: usize = 12;

fn random_phi<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PhiSpec {
    let mut modes = [1u32; 3];
    let mut phases = [0.0; 3];
    for a in 0..n {
        modes[a] = rng.random_range(1..=2);
        phases[a] = core::f64::consts::TAU * rng.random::<f64>();
    }
    let top = modes[..n].iter().map(|&m| (m * m) as f64).sum::<f64>();
    // ‖D²φ‖ ≲ a·(2π)²·Σm², so this keeps the perturbation of order one.
    let amplitude = rng.random_range(0.2..1.0) / (core::f64::consts::TAU * core::f64::consts::TAU * top);
    PhiSpec { amplitude, modes, phases }
}

/// Base matrix in `int Γ_k` with `ρ_k = 1` up to the sampler's spread.
fn random_base<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<SymMatrix> {
    let s = random_in_gamma(n, k, rng)?;
    let f = elementary(eigen_sym(&s)?.values())[k] / crate::symcone::binomial(n, k);
    Ok(s.scale(1.0 / pow(f, 1.0 / k as f64)))
}

/// `S + D²φ` with the retries shrinking `φ`; `None` if every attempt leaves
/// `Γ_k` somewhere.
fn admissible_part<R: Rng + ?Sized>(grid: &Grid, k: usize, rng: &mut R) -> Result<Option<Vec<f64>>> {
    let n = grid.dim();
    let base = random_base(n, k, rng)?;
    let mut phi = random_phi(n, rng);
    for _ in 0..RETRIES {
        match equality_values(grid, k, &base, &phi) {
            Ok(v) => return Ok(Some(v)),
            Err(Error::Domain(_)) => phi.amplitude *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

fn check_torus(grid: &Grid, k: usize) -> Result<()> {
    if grid.boundary() != Boundary::Torus {
        return input("Div-free samples live on the torus");
    }
    if k == 0 || k > grid.dim() {
        return input(format!("order k = {k} not in 1..={}", grid.dim()));
    }
    Ok(())
}

/// Div-free `Γ_k*`-valued torus fields: nonnegative combinations of one or
/// two equality-case fields `∇F_k(S + D²φ)` and a constant matrix in
/// `int Γ_k*`.
pub fn divfree_gamma_star_sample(grid: Grid, k: usize, count: usize, seed: u64) -> Result<Vec<GridField>> {
    check_torus(&grid, k)?;
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for sample in 0..count {
        let parts = rng.random_range(1..=2);
        let mut values = vec![0.0; grid.len() * n * n];
        for _ in 0..parts {
            let w: f64 = rng.random();
            let Some(part) = admissible_part(&grid, k, &mut rng)? else {
                return Err(Error::Generation(format!(
                    "sample {sample}: S + D²φ left Gamma_{k} after {RETRIES} amplitude halvings"
                )));
            };
            for (v, p) in values.iter_mut().zip(part) {
                *v += w * p;
            }
        }
        let c = random_in_gamma_star(n, k, &mut rng)?.scale(rng.random::<f64>());
        for (idx, v) in values.iter_mut().enumerate() {
            let e = idx % (n * n);
            *v += c.get(e / n, e % n);
        }
        out.push(GridField::new(grid, Rank::Matrix, values)?);
    }
    Ok(out)
}

/// Curl-free `Γ_k`-valued torus fields `S + D²φ`.
pub fn curlfree_gamma_sample(grid: Grid, k: usize, count: usize, seed: u64) -> Result<Vec<GridField>> {
    check_torus(&grid, k)?;
    let n = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for sample in 0..count {
        let base = random_base(n, k, &mut rng)?;
        let mut phi = random_phi(n, &mut rng);
        let mut done = None;
        for _ in 0..RETRIES {
            let mut ok = true;
            let field = GridField::from_fn(grid, Rank::Matrix, |x, o| {
                let m = base + phi.hessian(x, grid.extent());
                match eigen_sym(&m) {
                    Ok(sp) if (1..=k).all(|j| elementary(sp.values())[j] > 0.0) => {}
                    _ => ok = false,
                }
                for i in 0..n {
                    for j in 0..n {
                        o[i * n + j] = m.get(i, j);
                    }
                }
            });
            if ok {
                done = Some(field);
                break;
            }
            phi.amplitude *= 0.5;
        }
        match done {
            Some(f) => out.push(f),
            None => {
                return Err(Error::Generation(format!(
                    "sample {sample}: S + D²φ left Gamma_{k} after {RETRIES} amplitude halvings"
                )))
            }
        }
    }
    Ok(out)
}

/// One band-limited term `a·cos(π m·x + θ)`.
#[derive(Clone, Copy)]
struct Wave {
    amp: f64,
    modes: [f64; 3],
    phase: f64,
}

fn random_waves<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> [Wave; 4] {
    core::array::from_fn(|_| {
        let mut modes = [0.0; 3];
        for m in modes.iter_mut().take(dim) {
            *m = rng.random_range(0..=4) as f64;
        }
        Wave {
            amp: 0.5 * standard_normal(rng),
            modes,
            phase: core::f64::consts::TAU * rng.random::<f64>(),
        }
    })
}

fn eval_waves(waves: &[Wave; 4], x: &[f64]) -> f64 {
    waves
        .iter()
        .map(|w| {
            let arg: f64 = x.iter().zip(&w.modes).map(|(a, b)| a * b).sum();
            w.amp * cos(core::f64::consts::PI * arg + w.phase)
        })
        .sum()
}

/// Interior point used to shift raw samples toward the cone.
fn interior(cone: &ConeId, n: usize) -> Result<Matrix> {
    Ok(match *cone {
        ConeId::Gamma(_) | ConeId::GammaStar(_) | ConeId::SymPos | ConeId::TraceHalfSpace => Matrix::identity(n),
        ConeId::SymNeg => Matrix::identity(n).scale(-1.0),
        ConeId::QuasiConformal { sign: Sign::Plus, .. } => Matrix::identity(n),
        ConeId::QuasiConformal { sign: Sign::Minus, .. } => Matrix::diag(&[1.0, -1.0]),
        ConeId::Entrywise { index, sign } => {
            let mut p = Matrix::zeros(2);
            for (i, j, c) in crate::symcone::entrywise_constraints(index, sign) {
                p.set(i, j, c);
            }
            p
        }
        ConeId::WaveConeDiv | ConeId::WaveConeCurl => return input("wave cones have empty interior"),
    })
}

/// Shift `λ ↦ λ + s·1` with the least `s ≥ 0` that lands in closed `Γ_k`.
fn shift_into_gamma(lambda: &mut [f64], k: usize) {
    let inside = |l: &[f64], s: f64| {
        let mut v = [0.0; MAX_DIM];
        for (a, b) in v.iter_mut().zip(l) {
            *a = b + s;
        }
        let e = elementary(&v[..l.len()]);
        (1..=k).all(|j| e[j] >= 0.0)
    };
    if inside(lambda, 0.0) {
        return;
    }
    let mut hi = lambda.iter().fold(0.0f64, |m, v| m.max(v.abs())) + 1.0;
    while !inside(lambda, hi) {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(lambda, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    for v in lambda.iter_mut() {
        *v += hi;
    }
}

/// Retraction of `m` into the closed cone (a subset of it for `Γ_k*` and the
/// quasiconformal cones).
fn retract(m: &Matrix, cone: &ConeId) -> Result<Matrix> {
    let n = m.dim();
    let spectral = |f: &dyn Fn(&mut [f64])| -> Result<Matrix> {
        let sp = eigen_sym(&m.symmetric_part())?;
        let mut l = [0.0; MAX_DIM];
        l[..n].copy_from_slice(sp.values());
        f(&mut l[..n]);
        Ok(SymMatrix::from_spectral(sp.frame(), &l[..n]).into())
    };
    match *cone {
        ConeId::SymPos => spectral(&|l| l.iter_mut().for_each(|v| *v = v.max(0.0))),
        // Γ_k* ⊂ Sym⁺ is convex and contains the ray of the identity: clip to
        // Sym⁺, then slide toward the trace part until inside.
        ConeId::GammaStar(k) => {
            let psd = retract(m, &ConeId::SymPos)?;
            let center = Matrix::identity(n).scale(psd.trace() / n as f64);
            if k == 1 {
                return Ok(center);
            }
            let at = |s: f64| psd.scale(1.0 - s) + center.scale(s);
            if cone_contains(&psd, cone, 1e-12)?.is_member() {
                return Ok(psd);
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..40 {
                let mid = 0.5 * (lo + hi);
                if cone_contains(&at(mid), cone, 1e-12)?.is_member() {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Ok(at(hi))
        }
        ConeId::SymNeg => spectral(&|l| l.iter_mut().for_each(|v| *v = v.min(0.0))),
        ConeId::Gamma(k) => spectral(&|l| shift_into_gamma(l, k)),
        ConeId::TraceHalfSpace => {
            let t = m.trace();
            Ok(if t < 0.0 { *m + Matrix::identity(n).scale(-t / n as f64) } else { *m })
        }
        ConeId::Entrywise { index, sign } => {
            let mut out = *m;
            for (i, j, c) in crate::symcone::entrywise_constraints(index, sign) {
                out.set(i, j, c * (c * m.get(i, j)).max(0.0));
            }
            Ok(out)
        }
        ConeId::QuasiConformal { dim, distortion, sign } => {
            // Aim a little inside: distortion 1 + 0.9(K − 1).
            let k = 1.0 + 0.9 * (distortion - 1.0);
            match sign {
                Sign::Plus => {
                    // Symmetric positive with λ_min ≥ λ_max·K^{−1/(n−1)}.
                    let floor = pow(k, -1.0 / (dim - 1) as f64);
                    spectral(&|l| {
                        let top = l.iter().fold(0.0f64, |a, v| a.max(*v)).max(1e-12);
                        l.iter_mut().for_each(|v| *v = v.max(top * floor));
                    })
                }
                Sign::Minus => {
                    if n != 2 {
                        return input("orientation-reversing samples are planar only");
                    }
                    // Conformal part a, anticonformal part b: |a| ≤ κ|b|.
                    let b = conformal_coords(m);
                    let kappa = (k - 1.0) / (k + 1.0);
                    // Conformal coordinates are b1, b4; anticonformal b2, b3.
                    let conf = sqrt(b[0] * b[0] + b[3] * b[3]);
                    let anti = sqrt(b[1] * b[1] + b[2] * b[2]);
                    let s = if conf > kappa * anti { kappa * anti / conf } else { 1.0 };
                    Ok(from_conformal([s * b[0], b[1], b[2], s * b[3]]))
                }
            }
        }
        ConeId::WaveConeDiv | ConeId::WaveConeCurl => input("wave cones are not sampled"),
    }
}

/// Smooth compactly supported cone-valued field on a box: four random
/// harmonics per entry, shifted by an interior matrix, retracted into the
/// cone, nudged inside (convex cones) and cut off outside `|x| = 0.9`.
pub fn random_cone_field(grid: Grid, cone: &ConeId, seed: u64) -> Result<GridField> {
    if grid.boundary() != Boundary::Box {
        return input("random cone fields are compactly supported on a box");
    }
    let n = grid.dim();
    cone.validate(n)?;
    let p = interior(cone, n)?;
    let symmetric = cone.symmetric_only() || matches!(cone, ConeId::QuasiConformal { sign: Sign::Plus, .. });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<[Wave; 4]> = (0..n * n).map(|_| random_waves(n, &mut rng)).collect();
    let shift = 1.0 + rng.random::<f64>();
    let cutoff = Cutoff::SmoothBump { inner: 0.3, outer: 0.9 };
    let nudge = !matches!(cone, ConeId::QuasiConformal { sign: Sign::Minus, .. });
    let mut failure = None;
    let field = GridField::from_fn(grid, Rank::Matrix, |x, out| {
        let mut m = Matrix::from_fn(n, |i, j| eval_waves(&waves[i * n + j], x)) + p.scale(shift);
        if symmetric {
            m = m.symmetric_part().into();
        }
        let r = sqrt(x.iter().map(|v| v * v).sum());
        match retract(&m, cone) {
            Ok(a) => {
                // Q_2⁻ is not convex, so it takes no nudge; its retraction
                // already aims strictly inside.
                let a = if nudge { a + p.scale(0.05) } else { a };
                let a = a.scale(cutoff.value(r));
                for i in 0..n {
                    for j in 0..n {
                        out[i * n + j] = a.get(i, j);
                    }
                }
            }
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(field),
    }
}
