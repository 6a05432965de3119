use std::f64::consts::TAU;

use cone_calculus::fieldgrid::{apply_operator, norm_eval, Grid, GridField, NormSpec, Operator, PointNorm};
use cone_calculus::gallery::*;
use cone_calculus::symcone::{binomial, eigen_sym, elementary, grad_fk, in_gamma, rho_k_star, SymMatrix};

fn div_l1(field: &GridField, point: PointNorm, mask: Option<Vec<bool>>) -> f64 {
    let div = apply_operator(field, Operator::Div).unwrap();
    let mut spec = NormSpec::lp(1.0).with_point(point);
    if let Some(m) = mask {
        spec = spec.with_mask(m);
    }
    norm_eval(&div, &spec).unwrap()
}

fn curl_l1(field: &GridField, point: PointNorm) -> f64 {
    let curl = apply_operator(field, Operator::Curl).unwrap();
    norm_eval(&curl, &NormSpec::lp(1.0).with_point(point)).unwrap()
}

fn radius(grid: &Grid, cell: usize) -> f64 {
    let x = grid.position(cell);
    x[..grid.dim()].iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[test]
fn ornstein_ratio_scales_like_inverse_eps() {
    let grid = Grid::torus_with_side(2, 256, TAU).unwrap();
    let mut scaled = Vec::new();
    for m in [2.0, 4.0, 8.0] {
        let eps = 1.0 / m;
        let fam = build_family(&CounterexampleFamily::Ornstein { eps, mirrored: false }, grid).unwrap();
        let div = div_l1(&fam.field, PointNorm::Componentwise, None);
        let curl = curl_l1(&fam.field, PointNorm::Componentwise);
        // Row-wise: each row of Div has L1 norm (1/(4ε))·4·4.
        assert!((div / (8.0 / eps) - 1.0).abs() < 0.02, "eps={eps}: {div}");
        assert!((curl / 8.0 - 1.0).abs() < 0.02, "eps={eps}: {curl}");
        assert!((fam.expected("div_l1_componentwise").unwrap() - 8.0 / eps).abs() < 1e-12);
        scaled.push(eps * div / curl);
    }
    let mean = scaled.iter().sum::<f64>() / 3.0;
    for s in &scaled {
        assert!((s / mean - 1.0).abs() < 0.03, "{scaled:?}");
    }
}

#[test]
fn ornstein_mirror_swaps_roles() {
    let grid = Grid::torus_with_side(2, 128, TAU).unwrap();
    let fam = build_family(&CounterexampleFamily::Ornstein { eps: 0.25, mirrored: true }, grid).unwrap();
    let div = div_l1(&fam.field, PointNorm::Componentwise, None);
    let curl = curl_l1(&fam.field, PointNorm::Componentwise);
    assert!(curl / div > 3.5, "{div} {curl}");
}

#[test]
fn ornstein_rejects_non_reciprocal_eps() {
    let grid = Grid::torus_with_side(2, 64, TAU).unwrap();
    assert!(build_family(&CounterexampleFamily::Ornstein { eps: 0.3, mirrored: false }, grid).is_err());
    assert!(build_family(&CounterexampleFamily::Ornstein { eps: 0.25, mirrored: false }, Grid::torus(2, 64).unwrap()).is_err());
}

#[test]
fn quasiconformal_ratio_is_one_plus_n_over_eps() {
    for (n, points, eps) in [(2, 128, 1.0), (2, 96, 0.5), (3, 32, 2.0)] {
        let grid = Grid::unit_box(n, points).unwrap();
        let fam = build_family(&CounterexampleFamily::QuasiconformalRadial { eps }, grid).unwrap();
        let mut seen = 0;
        for cell in 0..grid.len() {
            if !fam.checked[cell] {
                continue;
            }
            let sp = eigen_sym(&fam.field.sym_at(cell)).unwrap();
            let det: f64 = sp.values().iter().product();
            if det <= 1e-300 {
                continue;
            }
            let top = sp.values()[0];
            let ratio = top.powi(n as i32) / det;
            assert!((ratio - (1.0 + n as f64 / eps)).abs() < 1e-10 * ratio, "n={n} r={}: {ratio}", radius(&grid, cell));
            seen += 1;
        }
        assert!(seen > 100);
    }
}

#[test]
fn equality_case_is_divfree_and_dual_valued() {
    let grid = Grid::torus(2, 32).unwrap();
    let fam = build_family(
        &CounterexampleFamily::EqualityCase { k: 2, base: SymMatrix::identity(2), phi: PhiSpec::product(0.01) },
        grid,
    )
    .unwrap();
    assert_eq!(fam.first_violation(1e-12).unwrap(), None);
    for cell in 0..grid.len() {
        let sp = eigen_sym(&fam.field.sym_at(cell)).unwrap();
        assert!(sp.values()[1] > 0.0);
    }
    // For k = 2 the field is affine in D²φ and the centred stencils commute
    // on separable φ, so the residual is rounding.
    let div = apply_operator(&fam.field, Operator::Div).unwrap();
    assert!(div.max_abs() < 1e-10, "{}", div.max_abs());
}

#[test]
fn equality_case_in_three_dimensions_is_discretely_divfree() {
    let mut sup = Vec::new();
    for points in [12, 24] {
        let grid = Grid::torus(3, points).unwrap();
        let fam = build_family(
            &CounterexampleFamily::EqualityCase { k: 3, base: SymMatrix::identity(3), phi: PhiSpec::product(0.005) },
            grid,
        )
        .unwrap();
        assert_eq!(fam.first_violation(1e-12).unwrap(), None);
        sup.push(apply_operator(&fam.field, Operator::Div).unwrap().max_abs());
    }
    // Tensor-product φ: the centred stencils cancel exactly, as for k = 2.
    assert!(sup.iter().all(|s| *s < 1e-10), "{sup:?}");
}

#[test]
fn equality_case_leaving_the_cone_is_a_domain_error() {
    let grid = Grid::torus(2, 32).unwrap();
    let fam = CounterexampleFamily::EqualityCase { k: 2, base: SymMatrix::identity(2), phi: PhiSpec::product(1.0) };
    assert!(matches!(build_family(&fam, grid), Err(cone_calculus::Error::Domain(_))));
}

#[test]
fn radial_grad_matches_matrix_gradient() {
    let nu = [0.6, 0.0, 0.8];
    for n in 2..=3 {
        let norm: f64 = nu[..n].iter().map(|v| v * v).sum::<f64>().sqrt();
        let v: Vec<f64> = nu[..n].iter().map(|x| x / norm).collect();
        for k in 1..=n {
            for (radial, t) in [(2.0, 1.0), (-0.3, 1.5), (0.7, 0.2)] {
                let m = SymMatrix::from_fn(n, |i, j| if i == j { t } else { 0.0 } + (radial - t) * v[i] * v[j]);
                let g = grad_fk(&m, k).unwrap();
                let (a_r, a_t) = radial_grad_fk(radial, t, k, n);
                // Oracle: the gradient is radial too; read it off along ν and ⊥ν.
                let along: f64 = (0..n).map(|i| (0..n).map(|j| v[i] * g.get(i, j) * v[j]).sum::<f64>()).sum();
                let trace = g.trace();
                assert!((along - a_r).abs() < 1e-12, "n={n} k={k}");
                if n > 1 {
                    assert!(((trace - along) / (n - 1) as f64 - a_t).abs() < 1e-12, "n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn radial_grad_k_one_is_constant() {
    for n in 1..=3 {
        let (a, b) = radial_grad_fk(5.0, -2.0, 1, n);
        assert!((a - 1.0 / n as f64).abs() < 1e-15 && (b - 1.0 / n as f64).abs() < 1e-15);
    }
}

#[test]
fn every_family_stays_in_its_cone() {
    let b2 = Grid::unit_box(2, 96).unwrap();
    let b3 = Grid::unit_box(3, 32).unwrap();
    let t2 = Grid::torus(2, 48).unwrap();
    let cases: Vec<(CounterexampleFamily, Grid)> = vec![
        (CounterexampleFamily::Ornstein { eps: 0.25, mirrored: false }, Grid::torus_with_side(2, 128, TAU).unwrap()),
        (CounterexampleFamily::GreenConformal { eps: 0.1 }, b2),
        (CounterexampleFamily::RadialPowerMap { p: 4.0 }, b2),
        (CounterexampleFamily::RadialPowerMap { p: 2.5 }, b2),
        (CounterexampleFamily::default_step(), b2),
        (CounterexampleFamily::OptimalDiv { k: 2, eps: 0.5 }, b2),
        (CounterexampleFamily::OptimalDiv { k: 2, eps: 0.5 }, b3),
        (CounterexampleFamily::OptimalDiv { k: 3, eps: 1.0 }, b3),
        (CounterexampleFamily::LoglogDiv { k: 2, delta: 0.1, eps: None }, b3),
        (CounterexampleFamily::QuasiconformalRadial { eps: 1.0 }, b2),
        (CounterexampleFamily::QuasiconformalRadial { eps: 0.5 }, b3),
        (CounterexampleFamily::CurlOptimal { k: 2, eps: 0.5 }, b2),
        (CounterexampleFamily::CurlOptimal { k: 2, eps: 1.0 }, b3),
        (CounterexampleFamily::EqualityCase { k: 2, base: SymMatrix::identity(2), phi: PhiSpec::product(0.01) }, t2),
        (
            CounterexampleFamily::DivfreeCombo {
                k: 2,
                weights: vec![0.5, 2.0],
                components: vec![
                    ComboPart::Equality { base: SymMatrix::diag(&[2.0, 1.0]), phi: PhiSpec::product(0.005) },
                    ComboPart::Constant(SymMatrix::diag(&[1.0, 0.5])),
                ],
            },
            t2,
        ),
    ];
    for (fam, grid) in cases {
        let built = build_family(&fam, grid).unwrap_or_else(|e| panic!("{}: {e}", fam.id()));
        assert!(built.field.is_finite(), "{}", fam.id());
        assert!(built.checked.iter().filter(|c| **c).count() > grid.len() / 4, "{}", fam.id());
        assert_eq!(built.first_violation(1e-9).unwrap(), None, "{} on {:?}", fam.id(), grid);
    }
}

#[test]
fn singular_families_cap_inside_the_excision() {
    let grid = Grid::unit_box(2, 64).unwrap();
    let fam = build_family(&CounterexampleFamily::QuasiconformalRadial { eps: 1.0 }, grid).unwrap();
    assert!((fam.excision - 4.0 * grid.spacing()).abs() < 1e-15);
    let inner: Vec<usize> = (0..grid.len()).filter(|&c| radius(&grid, c) < fam.excision).collect();
    assert!(!inner.is_empty());
    let cap = fam.field.max_abs();
    for c in inner {
        assert!(fam.field.at(c).iter().all(|v| v.abs() <= cap));
    }
}

/// Independent sign rule: Hessian of `s·r^β` has eigenvalues
/// `s·β(β−1)r^{β−2}` once and `s·β·r^{β−2}` with multiplicity `n − 1`.
fn admissible_sign(n: usize, k: usize, eps: f64) -> Vec<f64> {
    let alpha = n as f64 / (k as f64 + eps * (k - 1) as f64);
    let beta = 2.0 - alpha;
    [1.0, -1.0]
        .into_iter()
        .filter(|s| {
            let mut l = vec![s * beta * (beta - 1.0)];
            l.extend(std::iter::repeat_n(s * beta, n - 1));
            let e = elementary(&l);
            (1..=k).all(|j| e[j] > 0.0)
        })
        .collect()
}

#[test]
fn optimal_div_sign_is_the_admissible_one() {
    for n in 2..=3 {
        let grid = Grid::unit_box(n, if n == 2 { 48 } else { 16 }).unwrap();
        for k in 2..=n {
            for eps in [0.1, 0.5, 1.0, 3.0] {
                let signs = admissible_sign(n, k, eps);
                let fam = CounterexampleFamily::OptimalDiv { k, eps };
                match build_family(&fam, grid) {
                    Ok(built) => {
                        let s = built.expected("sign").unwrap();
                        assert!(signs.contains(&s), "n={n} k={k} eps={eps}");
                        let alpha = built.expected("alpha").unwrap();
                        assert!((alpha - n as f64 / (k as f64 + eps * (k - 1) as f64)).abs() < 1e-15);
                        assert!(built.notes.contains("r^"));
                    }
                    Err(e) => assert!(signs.is_empty(), "n={n} k={k} eps={eps}: {e}"),
                }
            }
        }
    }
}

#[test]
fn optimal_div_is_divfree_away_from_the_excision() {
    let mut res = Vec::new();
    for points in [64, 128] {
        let grid = Grid::unit_box(2, points).unwrap();
        let fam = build_family(&CounterexampleFamily::OptimalDiv { k: 2, eps: 0.5 }, grid).unwrap();
        let div = apply_operator(&fam.field, Operator::Div).unwrap();
        // Annulus 0.2 < r < 0.4, inside the region where the outer cutoff is 1.
        let mut worst: f64 = 0.0;
        for cell in 0..grid.len() {
            let r = radius(&grid, cell);
            if r > 0.2 && r < 0.4 {
                worst = worst.max(div.at(cell).iter().map(|v| v.abs()).fold(0.0, f64::max));
            }
        }
        res.push(worst);
    }
    assert!(res[0] / res[1] > 3.0, "{res:?}");
}

#[test]
fn green_conformal_entries_and_determinant() {
    let grid = Grid::unit_box(2, 128).unwrap();
    let eps = 0.05;
    let fam = build_family(&CounterexampleFamily::GreenConformal { eps }, grid).unwrap();
    assert!((fam.expected("det_log_slope").unwrap() - 1.0 / TAU).abs() < 1e-15);
    for cell in 0..grid.len() {
        let x = grid.position(cell);
        let r = radius(&grid, cell);
        if r > eps && r < 0.45 {
            // Outside the mollifier the field is the rotated gradient of G.
            let m = fam.field.matrix_at(cell);
            let c = 1.0 / (TAU * r * r);
            assert!((m.get(0, 0) - c * x[1]).abs() < 1e-9 * c && (m.get(0, 1) + c * x[0]).abs() < 1e-9 * c);
            assert!((m.get(1, 0) - c * x[0]).abs() < 1e-9 * c && (m.get(1, 1) - c * x[1]).abs() < 1e-9 * c);
            assert!((m.det() - 1.0 / (TAU * TAU * r * r)).abs() < 1e-9 / (r * r));
        }
    }
}

#[test]
fn radial_power_map_distortion() {
    for p in [3.0, 4.0, 6.0] {
        let grid = Grid::unit_box(2, 64).unwrap();
        let fam = build_family(&CounterexampleFamily::RadialPowerMap { p }, grid).unwrap();
        let k = fam.expected("distortion").unwrap();
        assert!((k - p / (p - 2.0)).abs() < 1e-14);
        for cell in 0..grid.len() {
            if !fam.checked[cell] || radius(&grid, cell) > 0.45 {
                continue;
            }
            let sp = eigen_sym(&fam.field.sym_at(cell)).unwrap();
            let [a, b] = [sp.values()[0], sp.values()[1]];
            assert!((a / b - k).abs() < 1e-9 * k, "p={p}");
        }
    }
}

#[test]
fn step_div_mass_is_the_jump() {
    let a1 = SymMatrix::from_fn(2, |i, j| [[2.0, 1.0], [1.0, 1.0]][i][j]);
    let a2 = SymMatrix::from_fn(2, |i, j| [[-1.0, 1.0], [1.0, -2.0]][i][j]);
    let jump = ((a2.get(0, 0) - a1.get(0, 0)).powi(2) + (a2.get(1, 0) - a1.get(1, 0)).powi(2)).sqrt();
    let separated = (a1.get(0, 0).hypot(a1.get(1, 0))) + (a2.get(0, 0).hypot(a2.get(1, 0)));
    let mut err = Vec::new();
    for points in [128, 256] {
        let grid = Grid::unit_box(2, points).unwrap();
        let h = grid.spacing();
        let fam = build_family(&CounterexampleFamily::Step { a1, a2 }, grid).unwrap();
        assert!((fam.expected("div_mass").unwrap() - 2.0 * jump).abs() < 1e-12);
        assert!((fam.expected("separated_mass").unwrap() - 2.0 * separated).abs() < 1e-12);
        let mask: Vec<bool> = (0..grid.len())
            .map(|c| grid.position(c)[..2].iter().all(|v| v.abs() <= 1.0 - 8.0 * h))
            .collect();
        let mass = div_l1(&fam.field, PointNorm::Euclidean, Some(mask));
        let e = (mass - 2.0 * jump).abs();
        assert!(e < 20.0 * h * jump, "{points}: {mass} vs {}", 2.0 * jump);
        assert!(mass < 2.0 * separated);
        err.push(e);
    }
    assert!(err[1] < err[0]);
}

#[test]
fn step_rejects_bad_pairs() {
    let grid = Grid::unit_box(2, 32).unwrap();
    let pd = SymMatrix::diag(&[1.0, 2.0]);
    let bad = [
        (pd, SymMatrix::diag(&[1.0, -1.0])),
        (pd, pd.scale(-1.0)),
        (SymMatrix::diag(&[-1.0, 1.0]), pd.scale(-1.0)),
    ];
    for (a1, a2) in bad {
        assert!(build_family(&CounterexampleFamily::Step { a1, a2 }, grid).is_err());
    }
}

#[test]
fn loglog_density_matches_the_dual_gauge() {
    let p = LoglogRadial::new(3, 2, 0.1, 0.01).unwrap();
    let (n, k) = (3usize, 2usize);
    for r in [0.02, 0.05, 0.12, 0.2, 0.3, 0.4] {
        let g = p.weight(r);
        let (a_r, a_t) = p.grad_eigen(r);
        let a = SymMatrix::diag(&[g * a_r, g * a_t, g * a_t]);
        let rho = rho_k_star(&a, k).unwrap().value;
        let want = rho.powf(k as f64 / (k as f64 - 1.0));
        assert!((p.lhs_density(r) - want).abs() < 1e-7 * want.max(1e-12), "r={r}: {} vs {want}", p.lhs_density(r));
        // The underlying Hessian solves F_k = f.
        let (rad, tan) = p.hessian_eigen(r);
        let fk = (binomial(n - 1, k) * tan.powi(k as i32) + binomial(n - 1, k - 1) * rad * tan.powi(k as i32 - 1)) / binomial(n, k);
        assert!((fk - p.data(r)).abs() < 1e-6 * p.data(r), "r={r}");
        assert!(in_gamma(&[rad, tan, tan], k));
    }
}

#[test]
fn loglog_rejects_bad_parameters() {
    assert!(LoglogRadial::new(3, 3, 0.1, 0.01).is_err());
    assert!(LoglogRadial::new(3, 2, 0.6, 0.01).is_err());
    assert!(LoglogRadial::new(3, 2, 0.1, 0.2).is_err());
    assert!((LoglogRadial::new(3, 2, 0.1, 0.01).unwrap().div_exponent() - 6.0 / 5.0).abs() < 1e-15);
}

#[test]
fn registry_lists_every_family() {
    let ids: Vec<&str> = registry().iter().map(|f| f.id).collect();
    for id in [
        "ornstein",
        "green_conformal",
        "radial_power_map",
        "step",
        "optimal_div",
        "loglog_div",
        "quasiconformal_radial",
        "curl_optimal",
        "equality_case",
        "divfree_combo",
    ] {
        assert!(ids.contains(&id), "{id}");
        let info = family_info(id).unwrap();
        assert!(!info.params.is_empty());
        for p in info.params {
            assert!(!p.range.is_empty() && !p.default.is_empty() && !p.kind.name().is_empty());
        }
    }
    assert!(family_info("nope").is_none());
}

#[test]
fn from_params_builds_and_validates() {
    let fam = CounterexampleFamily::from_params("optimal_div", &[("k", 2.0), ("eps", 0.25)], 2).unwrap();
    assert_eq!(fam, CounterexampleFamily::OptimalDiv { k: 2, eps: 0.25 });
    let fam = CounterexampleFamily::from_params("loglog_div", &[("delta", 0.01)], 3).unwrap();
    assert_eq!(fam, CounterexampleFamily::LoglogDiv { k: 2, delta: 0.01, eps: None });
    assert_eq!(fam.id(), "loglog_div");
    assert!(CounterexampleFamily::from_params("optimal_div", &[("k", 2.5)], 2).is_err());
    assert!(CounterexampleFamily::from_params("optimal_div", &[("q", 2.0)], 2).is_err());
    let err = CounterexampleFamily::from_params("nope", &[], 2).unwrap_err().to_string();
    assert!(err.contains("ornstein"));
    assert!(CounterexampleFamily::from_params("divfree_combo", &[], 2).is_err());
    // Out-of-range values pass parsing and fail at build time.
    let fam = CounterexampleFamily::from_params("quasiconformal_radial", &[("eps", -1.0)], 2).unwrap();
    assert!(build_family(&fam, Grid::unit_box(2, 16).unwrap()).is_err());
}

#[test]
fn growth_factor_examples() {
    let g = loglog_div_expected_growth;
    assert!((g(0.1) - 0.5 * (11f64).ln().ln()).abs() < 1e-15);
    assert!(g(0.001) > g(0.01) && g(0.01) > g(0.1));
}
