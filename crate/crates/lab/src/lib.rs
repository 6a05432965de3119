//! Experiments over the cone calculus: both sides of each inequality, blow-up
//! sweeps for the constructed families, CSV reports and the command line.

pub mod cli;
mod error;
pub mod io;
pub mod lab;

pub use error::{usage, LabError, LabResult};
