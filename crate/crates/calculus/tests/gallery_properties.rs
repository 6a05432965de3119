use cone_calculus::fieldgrid::{apply_operator, field_mean, Grid, Operator};
use cone_calculus::gallery::*;
use cone_calculus::symcone::{cone_contains, ConeId, Matrix, Sign};
use proptest::prelude::*;

fn member(m: &Matrix, cone: &ConeId) -> bool {
    cone_contains(m, cone, 1e-9).unwrap().is_member()
}

fn any_cone() -> impl Strategy<Value = (usize, ConeId)> {
    prop_oneof![
        (2usize..=3).prop_flat_map(|n| (Just(n), (1..=n).prop_map(ConeId::Gamma))),
        (2usize..=3).prop_flat_map(|n| (Just(n), (1..=n).prop_map(ConeId::GammaStar))),
        (2usize..=3).prop_map(|n| (n, ConeId::SymPos)),
        (2usize..=3).prop_map(|n| (n, ConeId::SymNeg)),
        (2usize..=3).prop_map(|n| (n, ConeId::TraceHalfSpace)),
        (1u8..=4, any::<bool>()).prop_map(|(index, plus)| {
            (2, ConeId::Entrywise { index, sign: if plus { Sign::Plus } else { Sign::Minus } })
        }),
        (1.0f64..5.0).prop_map(|distortion| (2, ConeId::QuasiConformal { dim: 2, distortion, sign: Sign::Plus })),
        (1.5f64..5.0).prop_map(|distortion| (2, ConeId::QuasiConformal { dim: 2, distortion, sign: Sign::Minus })),
        (1.5f64..5.0).prop_map(|distortion| (3, ConeId::QuasiConformal { dim: 3, distortion, sign: Sign::Plus })),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_cone_fields_stay_in_their_cone((n, cone) in any_cone(), seed in any::<u64>()) {
        let grid = Grid::unit_box(n, if n == 2 { 24 } else { 10 }).unwrap();
        let field = random_cone_field(grid, &cone, seed).unwrap();
        prop_assert!(field.is_finite());
        for cell in 0..grid.len() {
            prop_assert!(member(&field.matrix_at(cell), &cone), "{cone} cell {cell}: {:?}", field.matrix_at(cell));
        }
        // Compact support inside the box.
        let far = (0..grid.len()).find(|&c| grid.position(c)[..n].iter().map(|v| v * v).sum::<f64>() > 0.95).unwrap();
        prop_assert!(field.at(far).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn random_cone_fields_are_reproducible(seed in any::<u64>()) {
        let grid = Grid::unit_box(2, 16).unwrap();
        let a = random_cone_field(grid, &ConeId::Gamma(2), seed).unwrap();
        let b = random_cone_field(grid, &ConeId::Gamma(2), seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn divfree_samples_are_dual_valued(seed in any::<u64>(), (n, k) in (2usize..=3).prop_flat_map(|n| (Just(n), 1..=n))) {
        let grid = Grid::torus(n, if n == 2 { 24 } else { 8 }).unwrap();
        let cone = ConeId::GammaStar(k);
        for field in divfree_gamma_star_sample(grid, k, 2, seed).unwrap() {
            for cell in 0..grid.len() {
                prop_assert!(member(&field.matrix_at(cell), &cone));
            }
            // Convexity: the mean is in the cone as well.
            let mean = Matrix::from_row_major(n, &field_mean(&field).unwrap()).unwrap();
            prop_assert!(member(&mean, &cone));
        }
    }

    #[test]
    fn curlfree_samples_are_gamma_valued(seed in any::<u64>(), k in 1usize..=2) {
        let grid = Grid::torus(2, 24).unwrap();
        for field in curlfree_gamma_sample(grid, k, 2, seed).unwrap() {
            for cell in 0..grid.len() {
                prop_assert!(member(&field.matrix_at(cell), &ConeId::Gamma(k)));
            }
        }
    }

    #[test]
    fn growth_is_monotone(a in 1e-6f64..0.49, b in 1e-6f64..0.49) {
        prop_assume!(a < b);
        prop_assert!(loglog_div_expected_growth(a) > loglog_div_expected_growth(b));
    }
}

/// Sup of `op` over the samples at two resolutions; unequal modes per axis
/// leave a genuine O(h²) stencil residual.
fn residuals(op: Operator, sample: impl Fn(Grid) -> Vec<cone_calculus::fieldgrid::GridField>) -> [f64; 2] {
    [32, 64].map(|points| {
        sample(Grid::torus(2, points).unwrap())
            .iter()
            .map(|f| apply_operator(f, op).unwrap().max_abs())
            .fold(0.0, f64::max)
    })
}

#[test]
fn sampled_fields_converge_at_second_order() {
    for seed in [1, 7, 42] {
        let div = residuals(Operator::Div, |g| divfree_gamma_star_sample(g, 2, 3, seed).unwrap());
        let curl = residuals(Operator::Curl, |g| curlfree_gamma_sample(g, 2, 3, seed).unwrap());
        for r in [div, curl] {
            assert!(r[1] < 1e-10 || r[0] / r[1] > 3.5, "seed {seed}: {r:?}");
        }
    }
}

#[test]
fn wave_cones_are_not_sampled() {
    let grid = Grid::unit_box(2, 8).unwrap();
    assert!(random_cone_field(grid, &ConeId::WaveConeDiv, 1).is_err());
    assert!(random_cone_field(Grid::torus(2, 8).unwrap(), &ConeId::SymPos, 1).is_err());
    assert!(divfree_gamma_star_sample(Grid::unit_box(2, 8).unwrap(), 2, 1, 0).is_err());
}

#[test]
fn zero_count_is_empty() {
    assert!(divfree_gamma_star_sample(Grid::torus(2, 8).unwrap(), 2, 0, 0).unwrap().is_empty());
}
