//! Constructed fields that witness or break the estimates.
//!
//! Every family is a pure function of its parameters and a grid. Singular
//! families carry an excision radius: inside it the profile is frozen at its
//! value on the excision sphere, which keeps the field in its cone.

mod families;
mod loglog;
mod random;
mod registry;

use alloc::string::String;
use alloc::vec::Vec;

pub use families::{build_family, radial_grad_fk, ComboPart, CounterexampleFamily, PhiSpec};
pub use loglog::{loglog_div_expected_growth, LoglogRadial};
pub use random::{curlfree_gamma_sample, divfree_gamma_star_sample, random_cone_field};
pub use registry::{family_info, registry, FamilyInfo, ParamKind, ParamSchema};

use crate::error::Result;
use crate::fieldgrid::GridField;
use crate::symcone::{cone_contains, ConeId};

/// A built family with the metadata its experiments need.
#[derive(Clone, Debug)]
pub struct FamilyField {
    pub field: GridField,
    /// Radius below which values are frozen; 0 for smooth families.
    pub excision: f64,
    /// Each checked cell must lie in one of these cones.
    pub targets: Vec<ConeId>,
    pub claim: &'static str,
    /// `true` where the cone invariant is asserted.
    pub checked: Vec<bool>,
    /// Analytic reference values, by name.
    pub expected: Vec<(&'static str, f64)>,
    /// Choices made while building (for example the sign of a profile).
    pub notes: String,
}

impl FamilyField {
    pub fn expected(&self, name: &str) -> Option<f64> {
        self.expected.iter().find(|(k, _)| *k == name).map(|(_, v)| *v)
    }

    /// First checked cell outside every target cone, if any.
    pub fn first_violation(&self, tol: f64) -> Result<Option<usize>> {
        for cell in 0..self.field.grid().len() {
            if !self.checked[cell] {
                continue;
            }
            let m = self.field.matrix_at(cell);
            let mut inside = false;
            for cone in &self.targets {
                if cone_contains(&m, cone, tol)?.is_member() {
                    inside = true;
                    break;
                }
            }
            if !inside {
                return Ok(Some(cell));
            }
        }
        Ok(None)
    }
}
