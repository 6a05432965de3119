use std::f64::consts::TAU;

use cone_calculus::fieldgrid::*;
use proptest::prelude::*;

/// Random low-degree trigonometric matrix field on the 2-torus.
fn trig_field(g: Grid, coef: &[f64]) -> GridField {
    GridField::from_fn(g, Rank::Matrix, |x, o| {
        for (c, v) in o.iter_mut().enumerate() {
            let a = &coef[c * 4..c * 4 + 4];
            *v = a[0] * (TAU * x[0]).sin() + a[1] * (TAU * x[1]).cos() + a[2] * (TAU * (x[0] - 2.0 * x[1])).sin() + a[3];
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn summation_by_parts(coef in prop::collection::vec(-2.0f64..2.0, 16), phase in 0.0f64..1.0) {
        let g = Grid::torus(2, 24).unwrap();
        let a = trig_field(g, &coef);
        let phi = GridField::from_fn(g, Rank::Scalar, |x, o| o[0] = (TAU * (x[0] + phase)).cos() * (TAU * x[1]).sin());
        let div = apply_operator(&a, Operator::Div).unwrap();
        let grad = apply_operator(&phi, Operator::Grad).unwrap();
        for i in 0..2 {
            let mut s = 0.0;
            for cell in 0..g.len() {
                s += div.at(cell)[i] * phi.at(cell)[0];
                s += a.at(cell)[i * 2] * grad.at(cell)[0] + a.at(cell)[i * 2 + 1] * grad.at(cell)[1];
            }
            prop_assert!(s.abs() * g.cell_volume() < 1e-11);
        }
    }

    #[test]
    fn div_is_linear_and_kills_constants(coef in prop::collection::vec(-2.0f64..2.0, 16), t in -3.0f64..3.0,
                                         c in prop::collection::vec(-5.0f64..5.0, 4)) {
        let g = Grid::torus(2, 16).unwrap();
        let a = trig_field(g, &coef);
        let b = a.scale(t).add_constant(&c).unwrap();
        let da = apply_operator(&a, Operator::Div).unwrap();
        let db = apply_operator(&b, Operator::Div).unwrap();
        for (x, y) in da.values().iter().zip(db.values()) {
            prop_assert!((t * x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_identity(coef in prop::collection::vec(-2.0f64..2.0, 16)) {
        let g = Grid::unit_box(2, 20).unwrap();
        let a = GridField::from_fn(g, Rank::Matrix, |x, o| {
            let bump = (1.0 - x[0] * x[0]) * (1.0 - x[1] * x[1]);
            for (c, v) in o.iter_mut().enumerate() {
                *v = bump * (coef[c] * x[0] + coef[c + 4] * x[1] + coef[c + 8] * x[0] * x[1] + coef[c + 12]);
            }
        });
        let q = apply_operator(&a, Operator::Q).unwrap();
        let rhs = curl_row_sums(&apply_operator(&a.transpose().unwrap(), Operator::Curl).unwrap()).unwrap();
        for (x, y) in q.values().iter().zip(rhs.values()) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn lp_norms_are_monotone_in_p_on_unit_torus(coef in prop::collection::vec(-2.0f64..2.0, 16)) {
        // Unit volume: ‖·‖_p is nondecreasing in p.
        let g = Grid::torus(2, 16).unwrap();
        let a = trig_field(g, &coef);
        let mut prev = 0.0;
        for p in [1.0, 1.5, 2.0, 4.0, f64::INFINITY] {
            let v = norm_eval(&a, &NormSpec::lp(p)).unwrap();
            prop_assert!(v >= prev * (1.0 - 1e-12));
            prev = v;
        }
    }
}
