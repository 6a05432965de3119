//! Radial k-Hessian profiles: closed-form quadrature solutions, Hessian
//! assembly on box grids, k-admissibility checks and residuals.

mod admissible;
mod radial;

pub use admissible::{
    admissibility_check, khessian_residual, radial_hessian_assemble, radial_hessian_from_fn, rho_k_field, weak_pairing_min,
    AdmissibilityReport, HessianInput, MaskedField, WEAK_PAIRS,
};
pub use radial::{geometric_radii, radial_fk, solve_radial_khessian, sphere_area, MassTable, Mollifier, RadialProfile};
