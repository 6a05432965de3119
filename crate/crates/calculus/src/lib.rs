//! Symmetric-cone calculus and discrete fields for constrained
//! differential-operator inequalities.
//!
//! The crate is `no_std` with `alloc`. Four layers:
//!
//! * [`symcone`]: Gårding cones `Γ_k`, their duals, `ρ_k`, `ρ_k*`, the
//!   gradient map of `F_k` and its inverse, planar quasiconformal cones.
//! * [`fieldgrid`]: uniform-grid fields on the torus or a compactly supported
//!   box, central-difference operators and norms.
//! * [`hessian`]: radial k-Hessian profiles and admissibility checks.
//! * [`gallery`]: builders for the constructed fields that witness or break
//!   the estimates, plus random cone-valued generators.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod fieldgrid;
pub mod gallery;
pub mod hessian;
pub mod symcone;

pub use error::{Error, Result};
