//! Radial profiles as CSV with columns `r,u,du,ddu`.

use std::path::Path;

use cone_calculus::hessian::RadialProfile;

use super::{atomic_write, format_number};
use crate::{LabError, LabResult};

pub fn write_profile(path: &Path, profile: &RadialProfile) -> LabResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["r", "u", "du", "ddu"])?;
    for i in 0..profile.len() {
        w.write_record([profile.r[i], profile.u[i], profile.du[i], profile.ddu[i]].map(format_number))?;
    }
    let bytes = w.into_inner().map_err(|e| LabError::Io(e.into_error()))?;
    atomic_write(path, &bytes)
}

pub fn read_profile(path: &Path) -> LabResult<RadialProfile> {
    let mut r = csv::Reader::from_path(path)?;
    let mut cols: [Vec<f64>; 4] = Default::default();
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(LabError::Config(format!("{}: expected four columns", path.display())));
        }
        for (c, field) in cols.iter_mut().zip(rec.iter()) {
            c.push(field.parse().map_err(|_| LabError::Config(format!("{}: bad number '{field}'", path.display())))?);
        }
    }
    let [a, b, c, d] = cols;
    Ok(RadialProfile::new(a, b, c, d)?)
}
