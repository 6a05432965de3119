//! Files: report CSVs, run configs, the binary field container and radial
//! profiles. Every write goes through a temporary file in the target
//! directory and is renamed into place.

mod config;
mod field;
mod profile;
mod report;

use std::io::Write;
use std::path::Path;

pub use config::{OutputFormat, RunConfig};
pub use field::{read_field, write_field};
pub use profile::{read_profile, write_profile};
pub use report::{format_number, read_report, report_bytes, summary_bytes, write_report, write_summary, HEADER};

use crate::LabResult;

/// Writes `bytes` to `path` atomically.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> LabResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
