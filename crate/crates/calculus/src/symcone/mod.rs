//! Symmetric-cone calculus on `Sym_n`, `n ≤ 8`.
//!
//! `σ_k` is the k-th elementary symmetric function of the eigenvalues,
//! `F_k = σ_k/C(n,k)` and `ρ_k = F_k^{1/k}` on the Gårding cone
//! `Γ_k = {σ_j ≥ 0, j ≤ k}`. The dual functional is
//! `ρ_k*(B) = inf { ⟨A,B⟩/n : A ∈ Γ_k, ρ_k(A) ≥ 1 }`. Outside their cones both
//! functionals take the value [`OUTSIDE`] (`−∞`).

mod concavity;
mod cone;
mod dual;
mod eigen;
mod matrix;
mod planar;
mod poly;
pub mod sample;

pub use concavity::{power_concavity_profile, LineSpec};
pub use cone::{cone_contains, cone_contains_sym, ConeId, Membership, Sign};
pub(crate) use cone::entrywise_constraints;
pub use dual::{
    attainment_map, duality_minimizer, f2_form, grad_fk_inverse, rho_k_star, rho_k_star_with,
    DualEvaluation, DualMethod, DualOptions,
};
pub use eigen::{eigen_sym, Spectrum};
pub use matrix::{Matrix, SymMatrix, MAX_DIM};
pub use planar::{burkholder_eval, conformal_coords, conformal_det, from_conformal};
pub use poly::{
    binomial, elementary, f_k, grad_fk, grad_rho_k, in_gamma, is_outside, rho_k, sigma, sigma_k,
    sym_poly, SymPoly, OUTSIDE,
};
