//! Fields on uniform grids in two and three dimensions: the periodic torus
//! and the box `[−1,1]^n` with compactly supported fields.

mod cutoff;
mod field;
mod grid;
mod norms;
mod ops;

pub use cutoff::{cutoff_apply, smoothstep7, Cutoff};
pub use field::{field_mean, pointwise_map, GridField, Mapped, Rank};
pub use grid::{Boundary, Grid, COLLAR, MAX_POINTS};
pub use norms::{magnitudes, norm_eval, NormKind, NormSpec, PointNorm};
pub use ops::{apply_operator, curl_row_sums, diff, pn_pairs, Operator};

use crate::error::{input, Result};
use crate::symcone::{conformal_coords, from_conformal};

/// Conformal coordinates `(b1, b2, b3, b4)` of a 2×2 matrix field.
pub fn conformal_field(field: &GridField) -> Result<GridField> {
    if field.rank() != Rank::Matrix || field.grid().dim() != 2 {
        return input("conformal coordinates need a 2x2 matrix field");
    }
    Ok(pointwise_map(field, Rank::Tuple(4), |v, out| {
        out.copy_from_slice(&conformal_coords(&crate::symcone::Matrix::from_rows([[v[0], v[1]], [v[2], v[3]]])));
        true
    })
    .field)
}

/// Inverse of [`conformal_field`].
pub fn from_conformal_field(field: &GridField) -> Result<GridField> {
    if field.rank() != Rank::Tuple(4) || field.grid().dim() != 2 {
        return input("expected a four-component planar field");
    }
    Ok(pointwise_map(field, Rank::Matrix, |v, out| {
        let m = from_conformal([v[0], v[1], v[2], v[3]]);
        out.copy_from_slice(&[m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1)]);
        true
    })
    .field)
}
