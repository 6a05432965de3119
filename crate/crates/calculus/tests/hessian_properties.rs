use cone_calculus::hessian::*;
use proptest::prelude::*;

fn radii() -> Vec<f64> {
    geometric_radii(1e-3, 1.0, 400).unwrap()
}

fn data(r: &[f64], coef: &[f64]) -> Vec<f64> {
    r.iter().map(|&s| coef[0] + coef[1] * s * s + coef[2] * (5.0 * s).sin().abs()).collect()
}

fn order() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=6).prop_flat_map(|n| (Just(n), 1..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn comparison(coef in prop::collection::vec(0.0f64..2.0, 3), bump in prop::collection::vec(0.0f64..1.0, 3),
                  (n, k) in order()) {
        let r = radii();
        let f1 = data(&r, &coef);
        let f2: Vec<f64> = f1.iter().zip(data(&r, &bump)).map(|(a, b)| a + b).collect();
        let u1 = solve_radial_khessian(&r, &f1, k, n).unwrap();
        let u2 = solve_radial_khessian(&r, &f2, k, n).unwrap();
        for (a, b) in u1.u.iter().zip(&u2.u) {
            prop_assert!(a >= &(b - 1e-12));
        }
    }

    #[test]
    fn scaling(coef in prop::collection::vec(0.01f64..2.0, 3), t in 0.1f64..4.0, (n, k) in order()) {
        let r = radii();
        let f = data(&r, &coef);
        let scaled: Vec<f64> = f.iter().map(|v| t.powi(k as i32) * v).collect();
        let a = solve_radial_khessian(&r, &f, k, n).unwrap();
        let b = solve_radial_khessian(&r, &scaled, k, n).unwrap();
        for (x, y) in a.du.iter().zip(&b.du) {
            prop_assert!((t * x - y).abs() <= 1e-10 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn solutions_are_admissible(coef in prop::collection::vec(0.0f64..2.0, 3), (n, k) in order()) {
        let r = radii();
        let p = solve_radial_khessian(&r, &data(&r, &coef), k, n).unwrap();
        let rep = admissibility_check(HessianInput::Profile { profile: &p, dim: n }, k, 1e-10).unwrap();
        prop_assert_eq!(rep.fraction_admissible, 1.0);
        prop_assert!(rep.worst_violation <= 1e-10);
    }

    #[test]
    fn report_fraction_matches_violation(coef in prop::collection::vec(-1.0f64..1.0, 3)) {
        // Radial eigenvalue of either sign: fraction is 1 exactly when the
        // worst violation is within tolerance.
        let r = radii();
        let p = RadialProfile::from_fn(r, |s| {
            let d = coef[0] * s + coef[1] * s * s;
            (0.0, d, coef[0] + 2.0 * coef[1] * s + coef[2])
        }).unwrap();
        let tol = 1e-9;
        let rep = admissibility_check(HessianInput::Profile { profile: &p, dim: 3 }, 2, tol).unwrap();
        prop_assert_eq!(rep.fraction_admissible == 1.0, rep.worst_violation <= tol);
    }
}
