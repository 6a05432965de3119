//! Lab-level quantities against oracles computed another way: the optimizer
//! instead of the attainment identity, finite differences instead of the
//! closed-form divergence, and fields whose norms are known by hand.

use std::f64::consts::{PI, TAU};

use cone_calculus::fieldgrid::{Grid, GridField, Operator, Rank};
use cone_calculus::gallery::LoglogRadial;
use cone_calculus::symcone::{rho_k_star, ConeId, SymMatrix};
use cone_lab::lab::{
    bump_residual, ineq_ratio, loglog_sides, lower_star, null_lagrangian_sides, paraboloid_error, quasiconcavity_check,
    reverse_holder_check, run_experiment, ExperimentConfig, Functional, Verdict,
};

fn radial_matrix(prof: &LoglogRadial, r: f64) -> SymMatrix {
    let g = prof.weight(r);
    let (a, b) = prof.grad_eigen(r);
    let mut d = vec![g * b; prof.n];
    d[0] = g * a;
    SymMatrix::diag(&d)
}

#[test]
fn loglog_lhs_matches_optimizer_quadrature() {
    for (n, k, delta) in [(3usize, 2usize, 0.1), (4, 2, 0.1), (4, 3, 0.05)] {
        let prof = LoglogRadial::new(n, k, delta, delta * delta).unwrap();
        let q = k as f64 / (k as f64 - 1.0);
        // Trapezoid in log r with the dual functional from the optimizer.
        let (lo, hi) = ((1e-4 * prof.eps).ln(), prof.support().ln());
        let steps = 6000;
        let h = (hi - lo) / steps as f64;
        let mut sum = 0.0;
        for i in 0..=steps {
            let r = (lo + i as f64 * h).exp();
            let v = rho_k_star(&radial_matrix(&prof, r), k).unwrap().value.powf(q) * prof.sphere_area() * r.powi(n as i32);
            sum += if i == 0 || i == steps { 0.5 * v } else { v };
        }
        let oracle = (sum * h).powf(1.0 / q);
        let got = loglog_sides(n, k, delta).unwrap().lhs;
        assert!((got / oracle - 1.0).abs() < 1e-4, "n={n} k={k}: {got} vs {oracle}");
    }
}

#[test]
fn loglog_div_magnitude_matches_finite_differences() {
    // Div of g(r)·(a ν⊗ν + b(I − ν⊗ν)) is radial with size
    // d(ga)/dr + (n − 1)(ga − gb)/r.
    for (n, k) in [(3usize, 2usize), (4, 2), (4, 3)] {
        let prof = LoglogRadial::new(n, k, 0.05, 0.0025).unwrap();
        let ga = |r: f64| prof.weight(r) * prof.grad_eigen(r).0;
        let gb = |r: f64| prof.weight(r) * prof.grad_eigen(r).1;
        for r in [0.07, 0.1, 0.2, 0.3, 0.45] {
            let e = 1e-6 * r;
            let fd = (ga(r + e) - ga(r - e)) / (2.0 * e) + (n as f64 - 1.0) * (ga(r) - gb(r)) / r;
            let want = prof.div_magnitude(r);
            assert!((fd.abs() - want).abs() <= 1e-6 * want.max(1e-3), "n={n} k={k} r={r}: {fd} vs {want}");
        }
    }
}

#[test]
fn loglog_rhs_is_bounded_as_delta_shrinks() {
    let limit = loglog_sides(4, 2, 0.1).unwrap().rhs_limit;
    let mut last = 0.0;
    for delta in [0.1, 0.01, 0.001, 0.0001] {
        let s = loglog_sides(4, 2, delta).unwrap();
        assert!(s.rhs > last && s.rhs < limit, "delta={delta}: {} vs limit {limit}", s.rhs);
        last = s.rhs;
    }
}

fn constant_field(grid: Grid, entries: [f64; 4]) -> GridField {
    GridField::from_fn(grid, Rank::Matrix, |_, out| out.copy_from_slice(&entries))
}

#[test]
fn constant_fields_are_equality_cases() {
    let grid = Grid::torus(2, 16).unwrap();
    let f = constant_field(grid, [2.0, 0.3, 0.3, 1.0]);
    let (lhs, rhs) = quasiconcavity_check(&f, 2).unwrap();
    assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{lhs} vs {rhs}");

    let (inner, annulus, ratio) = reverse_holder_check(&f, &ConeId::GammaStar(2), 3.0, 0.5, 0.4).unwrap();
    let norm = (4.0f64 + 0.09 + 0.09 + 1.0).sqrt();
    assert!((inner - norm).abs() < 1e-12 && (annulus - norm).abs() < 1e-12 && (ratio - 1.0).abs() < 1e-12);

    let (a, b) = null_lagrangian_sides(&f, 2).unwrap();
    assert_eq!((a, b), (0.0, 0.0));
}

#[test]
fn reverse_holder_rejects_fields_outside_the_cone() {
    let f = constant_field(Grid::torus(2, 16).unwrap(), [1.0, 0.0, 0.0, -2.0]);
    assert!(reverse_holder_check(&f, &ConeId::GammaStar(2), 2.0, 0.5, 0.4).is_err());
}

#[test]
fn planar_null_lagrangian_is_the_curl() {
    // In 2-D ∇F_2 is the cofactor matrix, whose Div is the Curl up to sign
    // with the same stencil, so both sides agree to rounding.
    let grid = Grid::torus(2, 48).unwrap();
    let f = GridField::from_fn(grid, Rank::Matrix, |x, out| {
        let (s, c) = ((TAU * x[0]).sin(), (TAU * x[1]).cos());
        let off = 0.2 * s * c;
        out.copy_from_slice(&[2.0 + 0.5 * s, off, off, 1.5 + 0.3 * c * c]);
    });
    let (lhs, rhs) = null_lagrangian_sides(&f, 2).unwrap();
    assert!(rhs > 0.1);
    assert!((lhs / rhs - 1.0).abs() < 1e-12, "{lhs} vs {rhs}");
}

#[test]
fn ratio_of_a_single_mode() {
    // A = diag(sin 2πx, 0): ‖A‖₂ = 1/√2 and ‖Div A‖₂ = 2π/√2 up to the
    // central-difference factor sin(2πh)/(2πh).
    let points = 256;
    let grid = Grid::torus(2, points).unwrap();
    let f = GridField::from_fn(grid, Rank::Matrix, |x, out| out.copy_from_slice(&[(TAU * x[0]).sin(), 0.0, 0.0, 0.0]));
    let (lhs, rhs, ratio) = ineq_ratio(&f, Operator::Div, 2.0, 2.0, Functional::Norm).unwrap();
    let h = 1.0 / points as f64;
    let damp = (TAU * h).sin() / (TAU * h);
    assert!((lhs - 0.5f64.sqrt()).abs() < 1e-12);
    assert!((rhs - TAU * damp / 2f64.sqrt()).abs() < 1e-9, "{rhs}");
    assert!((ratio - 1.0 / (TAU * damp)).abs() < 1e-9);
    assert!((ratio * 2.0 * PI - 1.0).abs() < 1e-3);
}

#[test]
fn sobolev_dual_exponents() {
    assert_eq!(lower_star(2, 2), 1.0);
    assert!((lower_star(3, 2) - 1.2).abs() < 1e-15);
    assert!((lower_star(4, 2) - 4.0 / 3.0).abs() < 1e-15);
    for n in 2..=8 {
        // q = n/(n−1) at k = n gives q_* = 1.
        assert!((lower_star(n, n) - 1.0).abs() < 1e-15);
    }
}

#[test]
fn radial_solver_checks() {
    for n in 2..=4 {
        for k in 1..=n {
            assert!(paraboloid_error(n, k, 50).unwrap() < 1e-13);
            let (a, b) = (bump_residual(n, k, 100, 0.1).unwrap(), bump_residual(n, k, 200, 0.1).unwrap());
            assert!(a / b > 3.6 && a / b < 4.4, "n={n} k={k}: {a} {b}");
        }
    }
}

#[test]
fn loglog_sweep_tracks_the_dimension_factor_in_three_dimensions() {
    let cfg = ExperimentConfig::default().set("n", 3).set("k", 2).set("delta", "0.1,0.01,0.001");
    let rep = run_experiment("loglog_div", &cfg).unwrap();
    assert_eq!(rep.verdict, Verdict::Blowup);
    assert!((rep.expect("tracking_factor") - 4.0 / 3.0).abs() < 1e-15);
    assert!(rep.expect("tracking_dev") < 0.01);
}

#[test]
fn experiments_reject_unknown_keys_and_ids() {
    let cfg = ExperimentConfig::default().set("no_such", 1);
    assert!(run_experiment("maclaurin", &cfg).is_err());
    assert!(run_experiment("no_such", &ExperimentConfig::default()).is_err());
}
