use std::f64::consts::{PI, TAU};

use cone_calculus::fieldgrid::*;
use cone_calculus::symcone::{grad_fk, rho_k_star, Matrix, SymMatrix};

fn smooth_matrix_field(g: Grid) -> GridField {
    GridField::from_fn(g, Rank::Matrix, |x, o| {
        let (s, c) = ((TAU * x[0]).sin(), (TAU * x[1]).cos());
        o.copy_from_slice(&[s * c, s + 0.3 * c, (TAU * (x[0] + x[1])).cos(), c * c - 0.2]);
    })
}

fn max_diff(a: &GridField, b: &GridField) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn integration_by_parts_on_torus() {
    let g = Grid::torus(2, 64).unwrap();
    let a = smooth_matrix_field(g);
    let phi = GridField::from_fn(g, Rank::Scalar, |x, o| o[0] = (TAU * x[0]).cos() * (2.0 * TAU * x[1]).sin() + x[0].sin());
    let div = apply_operator(&a, Operator::Div).unwrap();
    let grad = apply_operator(&phi, Operator::Grad).unwrap();
    let w = g.cell_volume();
    let n = g.dim();
    // Vector-valued pairing: ⟨Div A, φ e_i⟩ summed against ⟨A, e_i ⊗ Grad φ⟩.
    for i in 0..n {
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for cell in 0..g.len() {
            lhs += div.at(cell)[i] * phi.at(cell)[0] * w;
            for j in 0..n {
                rhs += a.at(cell)[i * n + j] * grad.at(cell)[j] * w;
            }
        }
        assert!((lhs + rhs).abs() < 1e-12, "row {i}: {lhs} vs {rhs}");
    }
}

#[test]
fn compositions_are_exact() {
    for g in [Grid::torus(2, 32).unwrap(), Grid::unit_box(2, 32).unwrap(), Grid::torus(3, 12).unwrap()] {
        let n = g.dim();
        let a = GridField::from_fn(g, Rank::Matrix, |x, o| {
            for (c, v) in o.iter_mut().enumerate() {
                *v = (TAU * x[0] + c as f64).sin() * (1.0 + x[n - 1] * x[n - 1]).ln();
            }
        });
        let div = apply_operator(&a, Operator::Div).unwrap();
        let dd = apply_operator(&div, Operator::Div).unwrap();
        assert_eq!(apply_operator(&a, Operator::Div2).unwrap().values(), dd.values());

        let lq = apply_operator(&a, Operator::LQ).unwrap();
        let q = apply_operator(&a, Operator::Q).unwrap();
        assert_eq!(q.values(), apply_operator(&lq, Operator::Div).unwrap().values());

        // Div A − D Tr A = Σ_j (curl of column j)_{ij}
        let tr = pointwise_map(&a, Rank::Scalar, |v, o| {
            o[0] = (0..n).map(|i| v[i * n + i]).sum();
            true
        })
        .field;
        let lhs = div.add_scaled(&apply_operator(&tr, Operator::Grad).unwrap(), -1.0).unwrap();
        let curl_t = apply_operator(&a.transpose().unwrap(), Operator::Curl).unwrap();
        let rhs = curl_row_sums(&curl_t).unwrap();
        assert!(max_diff(&lhs, &rhs) < 1e-9 * (1.0 + lhs.max_abs()));
        assert!(max_diff(&lhs, &q) < 1e-9 * (1.0 + q.max_abs()));

        let pair = apply_operator(&a, Operator::DivCurlPair).unwrap();
        let m = pair.components();
        assert_eq!(m, n + curl_t.components());
        for cell in 0..g.len() {
            assert_eq!(&pair.at(cell)[..n], div.at(cell));
            assert_eq!(&pair.at(cell)[n..], curl_t.at(cell));
        }
    }
}

#[test]
fn div_of_hessian_converges_at_second_order() {
    let err = |points: usize| {
        let g = Grid::torus(2, points).unwrap();
        let phi = GridField::from_fn(g, Rank::Scalar, |x, o| o[0] = (TAU * x[0]).sin());
        let h = apply_operator(&phi, Operator::Hessian).unwrap();
        let d = apply_operator(&h, Operator::Div).unwrap();
        let mut e: f64 = 0.0;
        for cell in 0..g.len() {
            let x = g.position(cell);
            e = e.max((d.at(cell)[0] + TAU.powi(3) * (TAU * x[0]).cos()).abs());
            e = e.max(d.at(cell)[1].abs());
        }
        e
    };
    let (e1, e2, e3) = (err(32), err(64), err(128));
    let o1 = (e1 / e2).log2();
    let o2 = (e2 / e3).log2();
    assert!(o1 > 1.9 && o2 > 1.9, "orders {o1} {o2}");
}

#[test]
fn curl_of_hessian_vanishes() {
    let g = Grid::unit_box(3, 16).unwrap();
    let phi = GridField::from_fn(g, Rank::Scalar, |x, o| o[0] = (x[0] * x[1] - x[2]).exp() * (1.0 - x[0] * x[0]));
    let h = apply_operator(&phi, Operator::Hessian).unwrap();
    let c = apply_operator(&h, Operator::Curl).unwrap();
    assert_eq!(c.rank(), Rank::Form2 { rows: 3 });
    assert!(c.max_abs() < 1e-9 * h.max_abs());
}

#[test]
fn pn_blocks_match_planar_curls() {
    let g = Grid::torus(3, 10).unwrap();
    let a = GridField::from_fn(g, Rank::Matrix, |x, o| {
        for (c, v) in o.iter_mut().enumerate() {
            *v = (TAU * x[c % 3] * (1 + c / 3) as f64).sin();
        }
    });
    let p = apply_operator(&a, Operator::Pn).unwrap();
    assert_eq!(p.components(), 6);
    let d = |comp: usize, axis: usize| diff(&g, &a.component(comp), axis);
    // block (2, 0): top = D_0 a_22 − D_2 a_20
    let top = d(8, 0);
    let sub = d(6, 2);
    for cell in 0..g.len() {
        assert!((p.at(cell)[4] - (top[cell] - sub[cell])).abs() < 1e-12);
    }
}

/// Green field magnitude √2/(πr) on the annulus `r0 ≤ r ≤ r1`.
fn green_annulus(points: usize, r0: f64, r1: f64) -> (GridField, Vec<bool>) {
    let g = Grid::unit_box(2, points).unwrap();
    let inside = |x: &[f64]| {
        let r = x[0].hypot(x[1]);
        (r0..=r1).contains(&r)
    };
    let f = GridField::from_fn(g, Rank::Scalar, |x, o| {
        if inside(x) {
            o[0] = 2f64.sqrt() / (PI * x[0].hypot(x[1]));
        }
    });
    let mask = (0..g.len()).map(|c| inside(&g.position(c)[..2])).collect();
    (f, mask)
}

#[test]
fn green_magnitude_norms() {
    let (r0, r1) = (0.1, 0.9);
    let (f, mask) = green_annulus(1024, r0, r1);
    let l2 = norm_eval(&f, &NormSpec::lp(2.0).with_mask(mask.clone())).unwrap();
    let expect = 4.0 / PI * (r1 / r0).ln();
    assert!((l2 * l2 / expect - 1.0).abs() < 0.01, "{} vs {expect}", l2 * l2);

    // sup_t t·|{|A| > t}|^{1/2} is reached at the smallest level t = √2/(π r1).
    let weak = norm_eval(&f, &NormSpec::weak_lp(2.0)).unwrap();
    let expect = (2.0 / PI * (1.0 - (r0 / r1).powi(2))).sqrt();
    assert!((weak / expect - 1.0).abs() < 0.01, "{weak} vs {expect}");

    // With a shrinking hole the weak quasinorm stays near √(2/π) while L² grows.
    let (f, _) = green_annulus(1024, 0.02, 0.9);
    let weak = norm_eval(&f, &NormSpec::weak_lp(2.0)).unwrap();
    assert!((weak - (2.0 / PI).sqrt()).abs() < 0.01);
}

#[test]
fn mixed_ones_is_l1() {
    let g = Grid::unit_box(2, 48).unwrap();
    let f = GridField::from_fn(g, Rank::Vector, |x, o| {
        o[0] = x[0] * (3.0 * x[1]).cos();
        o[1] = (x[0] - x[1]).exp() - 1.0;
    });
    let l1 = norm_eval(&f, &NormSpec::lp(1.0)).unwrap();
    let mixed = norm_eval(&f, &NormSpec::mixed(vec![1.0, 1.0])).unwrap();
    assert!((l1 - mixed).abs() < 1e-12 * l1);
    assert!(norm_eval(&f, &NormSpec::mixed(vec![1.0])).is_err());

    let g3 = Grid::torus(3, 8).unwrap();
    let f3 = GridField::from_fn(g3, Rank::Scalar, |x, o| o[0] = (TAU * x[2]).sin() + x[0]);
    let l1 = norm_eval(&f3, &NormSpec::lp(1.0)).unwrap();
    let mixed = norm_eval(&f3, &NormSpec::mixed(vec![1.0; 3])).unwrap();
    assert!((l1 - mixed).abs() < 1e-12 * l1);
}

#[test]
fn weak_norm_never_exceeds_strong() {
    let g = Grid::unit_box(2, 64).unwrap();
    let f = GridField::from_fn(g, Rank::Scalar, |x, o| o[0] = 1.0 / (0.05 + x[0].hypot(x[1])));
    for p in [1.0, 2.0, 3.0] {
        let weak = norm_eval(&f, &NormSpec::weak_lp(p)).unwrap();
        let strong = norm_eval(&f, &NormSpec::lp(p)).unwrap();
        assert!(weak <= strong * (1.0 + 1e-12));
    }
}

#[test]
fn torus_means() {
    let g = Grid::torus(2, 32).unwrap();
    let c = GridField::from_fn(g, Rank::Matrix, |_, o| o.copy_from_slice(&[1.0, -2.0, 0.5, 4.0]));
    let m = field_mean(&c).unwrap();
    for (x, y) in m.iter().zip([1.0, -2.0, 0.5, 4.0]) {
        assert!((x - y).abs() < 1e-12);
    }

    let phi = GridField::from_fn(g, Rank::Scalar, |x, o| o[0] = (TAU * x[0]).sin() * (TAU * x[1]).cos() + 0.3 * (2.0 * TAU * x[1]).cos());
    let a = apply_operator(&phi, Operator::Hessian).unwrap().add_constant(&[1.0, 0.0, 0.0, 1.0]).unwrap();
    let m = field_mean(&a).unwrap();
    for (x, y) in m.iter().zip([1.0, 0.0, 0.0, 1.0]) {
        assert!((x - y).abs() < 1e-12);
    }

    let s = GridField::from_fn(g, Rank::Matrix, |x, o| {
        let v = (TAU * x[0]).sin();
        o.copy_from_slice(&[v, 2.0 * v, -v, 0.5 * v]);
    });
    assert!(field_mean(&s).unwrap().iter().all(|v| v.abs() < 1e-12));
    assert!(field_mean(&GridField::zeros(Grid::unit_box(2, 8).unwrap(), Rank::Scalar)).is_err());
}

#[test]
fn pointwise_maps() {
    let g = Grid::torus(2, 16).unwrap();
    let a = smooth_matrix_field(g);
    let id = pointwise_map(&a, Rank::Matrix, |v, o| {
        o.copy_from_slice(v);
        true
    });
    assert_eq!(id.field, a);
    assert_eq!(id.outside_count(), 0);

    // ∇F_2 in two dimensions is the cofactor map M ↦ Tr(M)I − M.
    let sym = GridField::from_fn(g, Rank::Matrix, |x, o| {
        let off = (TAU * x[1]).sin();
        o.copy_from_slice(&[2.0 + x[0], off, off, -1.0 + x[1]]);
    });
    let cof = pointwise_map(&sym, Rank::Matrix, |v, o| {
        let m = grad_fk(&SymMatrix::from_row_major(2, v).unwrap(), 2).unwrap();
        o.copy_from_slice(&m.as_matrix().row_major());
        true
    });
    for cell in 0..g.len() {
        let v = sym.at(cell);
        let t = v[0] + v[3];
        let expect = [t - v[0], -v[1], -v[2], t - v[3]];
        for (x, y) in cof.field.at(cell).iter().zip(expect) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    // ρ_2* on a field of positive-definite matrices is nonnegative, with
    // outside markers where definiteness fails.
    let mixed = pointwise_map(&sym, Rank::Scalar, |v, o| {
        let e = rho_k_star(&SymMatrix::from_row_major(2, v).unwrap(), 2).unwrap();
        o[0] = if e.is_outside() { 0.0 } else { e.value };
        !e.is_outside()
    });
    assert!(mixed.field.values().iter().all(|&v| v >= 0.0));
    let expect_outside = (0..g.len())
        .filter(|&c| {
            let v = sym.at(c);
            v[0] * v[3] - v[1] * v[2] < 0.0 || v[0] + v[3] < 0.0
        })
        .count();
    assert_eq!(mixed.outside_count(), expect_outside);
}

#[test]
fn conformal_round_trip() {
    let g = Grid::torus(2, 8).unwrap();
    let a = smooth_matrix_field(g);
    let b = conformal_field(&a).unwrap();
    let back = from_conformal_field(&b).unwrap();
    assert!(max_diff(&a, &back) < 1e-15);
    for cell in 0..g.len() {
        let v = b.at(cell);
        let det = a.matrix_at(cell).det();
        assert!((v[0] * v[0] - v[1] * v[1] - v[2] * v[2] + v[3] * v[3] - det).abs() < 1e-12);
    }
    let one = GridField::from_matrix_fn(g, |_| Matrix::identity(2));
    assert_eq!(conformal_field(&one).unwrap().at(3), &[1.0, 0.0, 0.0, 0.0]);
    assert!(conformal_field(&GridField::zeros(Grid::torus(3, 6).unwrap(), Rank::Matrix)).is_err());
}

#[test]
fn cutoffs() {
    let g = Grid::unit_box(2, 64).unwrap();
    let f = GridField::from_fn(g, Rank::Matrix, |x, o| o.copy_from_slice(&[1.0, x[0], x[1], 2.0]));
    let lip = cutoff_apply(&f, &Cutoff::LipschitzRadial { eps: 0.2, radius: 0.7 }).unwrap();
    for cell in 0..g.len() {
        let x = g.position(cell);
        let r = x[0].hypot(x[1]);
        let expect = if r < 0.5 { 1.0 } else if r <= 0.7 { (0.7 - r) / 0.2 } else { 0.0 };
        for (y, z) in lip.at(cell).iter().zip(f.at(cell)) {
            assert!((y - expect * z).abs() < 1e-14);
        }
    }
    assert!(cutoff_apply(&GridField::zeros(Grid::torus(2, 8).unwrap(), Rank::Scalar), &Cutoff::LogLog { delta: 0.1 }).is_err());
    assert!(cutoff_apply(&f, &Cutoff::LogLog { delta: 0.0 }).is_err());
}

#[test]
fn grid_guards() {
    assert!(Grid::torus(4, 8).is_err());
    assert!(Grid::torus(3, 1 << 9).is_err());
    assert!(Grid::torus(2, 4).is_err());
    let g = Grid::unit_box(2, 16).unwrap();
    assert!((g.spacing() - 0.125).abs() < 1e-15);
    assert!((Grid::torus(2, 16).unwrap().spacing() - 0.0625).abs() < 1e-15);
}
