//! Worked examples for the cone calculus, each checked against an
//! independent oracle computed here (subset enumeration, finite differences,
//! brute-force sampling).

use cone_calculus::symcone::sample::{random_in_gamma, random_in_gamma_star, random_orthogonal};
use cone_calculus::symcone::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn subset_sigma(l: &[f64], k: usize) -> f64 {
    let n = l.len();
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m & (1 << i) != 0).map(|i| l[i]).product::<f64>())
        .sum()
}

/// Brute-force `ρ_k` from subset sums of the eigenvalues, independent of the
/// library's DP.
fn oracle_rho(a: &SymMatrix, k: usize) -> f64 {
    let l = eigen_sym(a).unwrap().values().to_vec();
    let n = l.len();
    if (1..=k).any(|j| subset_sigma(&l, j) < 0.0) {
        return f64::NEG_INFINITY;
    }
    (subset_sigma(&l, k) / binomial(n, k)).powf(1.0 / k as f64)
}

fn frob(a: &Matrix) -> f64 {
    a.frobenius()
}

#[test]
fn eigen_identity_diagonal_and_projector() {
    let sp = eigen_sym(&SymMatrix::identity(3)).unwrap();
    assert_eq!(sp.values(), &[1.0, 1.0, 1.0]);
    let sp = eigen_sym(&SymMatrix::diag(&[3.0, 2.0, 1.0])).unwrap();
    assert_eq!(sp.values(), &[3.0, 2.0, 1.0]);
    for i in 0..3 {
        assert_eq!(sp.frame().get(i, i).abs(), 1.0);
    }
    // v vᵀ, v = (1,1)/√2; characteristic polynomial t² − t has roots 1, 0.
    let p = SymMatrix::from_fn(2, |_, _| 0.5);
    let sp = eigen_sym(&p).unwrap();
    let (tr, det) = (p.trace(), p.det());
    for &t in sp.values() {
        assert!((t * t - tr * t + det).abs() < 1e-15);
    }
    assert!((sp.values()[0] - 1.0).abs() < 1e-15 && sp.values()[1].abs() < 1e-15);
}

#[test]
fn eigen_reconstruction_and_orthonormality_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=8 {
        for _ in 0..50 {
            let a = cone_calculus::symcone::sample::random_symmetric(n, &mut rng).scale(10.0);
            let sp = eigen_sym(&a).unwrap();
            let rec = sp.reconstruct() - a;
            assert!(rec.frobenius() <= 1e-12 * a.frobenius());
            let q = sp.frame();
            assert!(frob(&(q.transpose().matmul(q) - Matrix::identity(n))) < 1e-12);
            assert!(sp.values().windows(2).all(|w| w[0] >= w[1]));
        }
    }
}

#[test]
fn sym_poly_worked_examples() {
    for n in 1..=8 {
        for k in 1..=n {
            let p = sym_poly(&vec![1.0; n], k).unwrap();
            assert!((p.rho - 1.0).abs() < 1e-14);
        }
    }
    let l = [3.0, 2.0, 1.0];
    let p = sym_poly(&l, 2).unwrap();
    assert_eq!(p.sigma, subset_sigma(&l, 2));
    assert_eq!(p.sigma, 11.0);
    assert!((p.f - 11.0 / 3.0).abs() < 1e-15);
    assert!((p.rho - (11.0f64 / 3.0).sqrt()).abs() < 1e-15);

    let l = [1.0, 1.0, -1.0];
    let p = sym_poly(&l, 2).unwrap();
    assert_eq!(p.sigma, subset_sigma(&l, 2));
    assert_eq!(p.sigma, -1.0);
    assert!(is_outside(p.rho));
    assert!(sym_poly(&l, 4).is_err());
}

#[test]
fn rho_matches_subset_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=7 {
        for k in 1..=n {
            for _ in 0..20 {
                let a = cone_calculus::symcone::sample::random_symmetric(n, &mut rng);
                let (lib, ora) = (rho_k(&a, k).unwrap(), oracle_rho(&a, k));
                if ora.is_finite() && lib.is_finite() {
                    assert!((lib - ora).abs() < 1e-10 * (1.0 + ora.abs()));
                } else if lib.is_finite() != ora.is_finite() {
                    // Only a rounding-level σ_j may disagree on the sign.
                    let l = eigen_sym(&a).unwrap().values().to_vec();
                    let worst = (1..=k).map(|j| subset_sigma(&l, j)).fold(f64::INFINITY, f64::min);
                    assert!(worst.abs() < 1e-12, "n={n} k={k}");
                }
            }
        }
    }
}

#[test]
fn cone_membership_examples() {
    let a = SymMatrix::diag(&[2.0, 2.0, -1.0]);
    assert_eq!(subset_sigma(&[2.0, 2.0, -1.0], 2), 0.0);
    assert_eq!(cone_contains_sym(&a, &ConeId::Gamma(2), 1e-8).unwrap(), Membership::Boundary);
    for n in 2..=6 {
        for k in 1..=n {
            let m = cone_contains_sym(&SymMatrix::identity(n), &ConeId::GammaStar(k), 1e-8).unwrap();
            assert_eq!(m, Membership::Inside, "n={n} k={k}");
        }
    }
    let x = Matrix::diag(&[1.0, -1.0, 0.0]);
    assert_eq!(x.det(), 0.0);
    assert_eq!(cone_contains(&x, &ConeId::WaveConeDiv, 1e-8).unwrap(), Membership::Inside);
    assert!(cone_contains_sym(&a, &ConeId::Gamma(4), 1e-8).is_err());
}

#[test]
fn gamma_star_membership_against_sampled_pairings() {
    // Oracle: B ∉ Γ_k* iff some A ∈ Γ_k pairs negatively; sample A from Γ_k
    // (interior and the coordinate projectors on its boundary).
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 5;
    let k = 3;
    for trial in 0..30 {
        let b = if trial % 2 == 0 {
            random_in_gamma_star(n, k, &mut rng).unwrap()
        } else {
            let q = random_orthogonal(n, &mut rng);
            SymMatrix::from_spectral(&q, &[1.0, 0.9, 0.2, 0.05, 0.01])
        };
        let m = cone_contains_sym(&b, &ConeId::GammaStar(k), 1e-8).unwrap();
        let mut min_pair = f64::INFINITY;
        for _ in 0..3000 {
            let a = random_in_gamma(n, k, &mut rng).unwrap();
            min_pair = min_pair.min(a.inner(&b) / a.frobenius());
        }
        if min_pair < -1e-6 {
            assert_eq!(m, Membership::Outside, "trial {trial}");
        }
        if m == Membership::Outside {
            let ev = rho_k_star(&b, k).unwrap();
            assert!(ev.is_outside());
        }
    }
}

#[test]
fn grad_fk_examples_against_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 2..=6 {
        for k in 1..=n {
            let g = grad_fk(&SymMatrix::identity(n), k).unwrap();
            let expect = SymMatrix::identity(n).scale(k as f64 / n as f64);
            assert!((g - expect).frobenius() < 1e-14);

            let a = cone_calculus::symcone::sample::random_symmetric(n, &mut rng);
            let g = grad_fk(&a, k).unwrap();
            let h = 1e-5;
            for i in 0..n {
                for j in i..n {
                    // Symmetric perturbation E_ij + E_ji has pairing 2g_ij off the
                    // diagonal and g_ii on it.
                    let e = SymMatrix::from_fn(n, |p, q| if (p, q) == (i, j) { 1.0 } else { 0.0 });
                    let fd = (f_k(&(a + e.scale(h)), k).unwrap() - f_k(&(a - e.scale(h)), k).unwrap())
                        / (2.0 * h);
                    let lib = if i == j { g.get(i, i) } else { 2.0 * g.get(i, j) };
                    assert!((fd - lib).abs() < 1e-6 * (1.0 + lib.abs()), "n={n} k={k}");
                }
            }
        }
    }
    let a = SymMatrix::from_fn(2, |i, j| [[1.3, -0.4], [-0.4, 0.2]][i][j]);
    let cof = SymMatrix::identity(2).scale(a.trace()) - a;
    assert!((grad_fk(&a, 2).unwrap() - cof).frobenius() < 1e-14);

    let a = SymMatrix::diag(&[2.0, 1.0, 0.0]);
    let g = grad_fk(&a, 3).unwrap();
    assert!(g.det().abs() < 1e-15);
}

#[test]
fn dual_value_examples() {
    for n in 2..=8 {
        for k in 1..=n {
            let ev = rho_k_star(&SymMatrix::identity(n), k).unwrap();
            assert!((ev.value - 1.0).abs() < 1e-10);
        }
    }
    let closed = (1.0 / 3f64.sqrt()) * (9.0f64 - 2.0 * 3.0).sqrt();
    let opts = DualOptions { prefer_closed_form: false, ..Default::default() };
    let numeric = rho_k_star_with(&SymMatrix::identity(3), 2, &opts).unwrap();
    assert_eq!(numeric.method, DualMethod::Newton);
    assert!((numeric.value - closed).abs() < 1e-10);
    assert!(rho_k_star(&SymMatrix::diag(&[1.0, 1.0, -0.1]), 3).unwrap().is_outside());
}

#[test]
fn dual_value_near_the_boundary_uses_newton() {
    // For n = 4, k = 3 and μ = diag(9 − δ, 1, 1, 1) the minimizer is
    // proportional to (x, 1, 1, 1) with 2x + 1 = 3/(9 − δ), which gives
    // ρ₃*(μ) = (δ/8)^{2/3}(9 − δ)^{1/3}; δ = 0 lies on the boundary.
    let opts = DualOptions { prefer_closed_form: false, ..DualOptions::default() };
    for delta in [1e-1, 1e-3, 1e-4, 1e-5, 1e-6] {
        let mu = SymMatrix::diag(&[9.0 - delta, 1.0, 1.0, 1.0]);
        let ev = rho_k_star_with(&mu, 3, &opts).unwrap();
        let want = (delta / 8.0f64).powf(2.0 / 3.0) * (9.0 - delta).cbrt();
        assert_eq!(ev.method, DualMethod::Newton, "delta = {delta}");
        assert!((ev.value / want - 1.0).abs() < 1e-6, "delta = {delta}: {} vs {want}", ev.value);
    }
    let ev = rho_k_star_with(&SymMatrix::diag(&[9.0, 1.0, 1.0, 1.0]), 3, &opts).unwrap();
    assert!(ev.value.abs() < 1e-6, "{}", ev.value);
}

#[test]
fn dual_value_is_a_lower_bound_on_sampled_pairings() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, k) in [(3, 2), (4, 3), (5, 3), (6, 4)] {
        let b = random_in_gamma_star(n, k, &mut rng).unwrap();
        let ev = rho_k_star(&b, k).unwrap();
        let a_min = ev.minimizer.unwrap();
        assert!((rho_k(&a_min, k).unwrap() - 1.0).abs() < 1e-8);
        assert!((a_min.inner(&b) / n as f64 - ev.value).abs() < 1e-8);
        for _ in 0..1000 {
            let a = random_in_gamma(n, k, &mut rng).unwrap();
            let a = a.scale(1.0 / rho_k(&a, k).unwrap());
            assert!(ev.value <= a.inner(&b) / n as f64 + 1e-10);
        }
    }
}

#[test]
fn duality_minimizer_and_inverse_examples() {
    for n in 2..=6 {
        for k in 2..=n {
            let a = duality_minimizer(&SymMatrix::identity(n), k).unwrap();
            assert!((a - SymMatrix::identity(n)).frobenius() < 1e-8);
            let b = SymMatrix::identity(n).scale(k as f64 / n as f64);
            let inv = grad_fk_inverse(&b, k).unwrap();
            assert!((inv - SymMatrix::identity(n)).frobenius() < 1e-8);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (n, k) in [(3, 2), (4, 3), (5, 2), (5, 4)] {
        let a0 = random_in_gamma(n, k, &mut rng).unwrap();
        let a0 = a0.scale(1.0 / rho_k(&a0, k).unwrap());
        let b = grad_fk(&a0, k).unwrap();
        let a = duality_minimizer(&b, k).unwrap();
        assert!((a - a0).frobenius() < 1e-8 * a0.frobenius());
        let comm = a.as_matrix().matmul(b.as_matrix()) - b.as_matrix().matmul(a.as_matrix());
        assert!(comm.frobenius() < 1e-8);
    }
    let b = SymMatrix::from_fn(2, |i, j| [[0.7, 0.2], [0.2, 1.1]][i][j]);
    let a = grad_fk_inverse(&b, 2).unwrap();
    assert!((a - (SymMatrix::identity(2).scale(b.trace()) - b)).frobenius() < 1e-10);
    assert!(duality_minimizer(&SymMatrix::diag(&[1.0, -1.0, 1.0]), 2).is_err());
    assert!(grad_fk_inverse(&SymMatrix::diag(&[1.0, -1.0, 1.0]), 3).is_err());
}

#[test]
fn concavity_profile_examples() {
    let t: Vec<f64> = (0..41).map(|i| -0.4 + 0.02 * i as f64).collect();
    for n in 2..=5 {
        for k in 2..=n {
            let line = LineSpec::PushedForwardDiagonal { dim: n };
            let crit = k as f64 / (k as f64 - 1.0);
            let p = power_concavity_profile(k, crit, &line, &t).unwrap();
            assert!(p.iter().all(|&x| x <= 1e-10), "n={n} k={k}");
            let p = power_concavity_profile(k, crit + 0.1, &line, &t).unwrap();
            assert!(p.iter().any(|&x| x > 0.0));
        }
    }
}

#[test]
fn burkholder_examples() {
    assert!((burkholder_eval(&Matrix::identity(2), 2.0) - 1.0).abs() < 1e-15);
    let a = Matrix::from_rows([[1.0, 2.0], [3.0, 1.0]]);
    assert!(a.det() < 0.0);
    assert!(is_outside(burkholder_eval(&a, 4.0)));
    let a = Matrix::from_rows([[1.2, -0.3], [0.5, 0.9]]);
    for kk in [1.5, 2.0, 5.0] {
        let v = burkholder_eval(&a, kk);
        for t in [0.1, 3.0, 17.0] {
            assert!((burkholder_eval(&a.scale(t), kk) - t * v).abs() < 1e-12 * t.max(1.0));
        }
    }
}
