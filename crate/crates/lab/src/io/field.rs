//! Binary field container: an 8-byte magic, little-endian `u64` header words
//! `dim, points, boundary, rank code, rank parameter, count`, the extent as
//! `f64`, then `count` little-endian `f64` values.

use std::path::Path;

use cone_calculus::fieldgrid::{Boundary, Grid, GridField, Rank};

use super::atomic_write;
use crate::{LabError, LabResult};

const MAGIC: &[u8; 8] = b"CONEFLD1";

fn rank_param(rank: Rank) -> u64 {
    match rank {
        Rank::Form2 { rows } => rows as u64,
        Rank::Tuple(m) => m as u64,
        _ => 0,
    }
}

fn rank_from(code: u64, param: u64) -> Option<Rank> {
    Some(match code {
        0 => Rank::Scalar,
        1 => Rank::Vector,
        2 => Rank::Matrix,
        3 => Rank::Form2 { rows: param as usize },
        4 => Rank::Tuple(param as usize),
        _ => return None,
    })
}

pub fn field_bytes(field: &GridField) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(64 + 8 * field.values().len());
    out.extend_from_slice(MAGIC);
    let boundary = match g.boundary() {
        Boundary::Torus => 0u64,
        Boundary::Box => 1,
    };
    for w in [g.dim() as u64, g.points() as u64, boundary, field.rank().code(), rank_param(field.rank()), field.values().len() as u64] {
        out.extend_from_slice(&w.to_le_bytes());
    }
    out.extend_from_slice(&g.extent().to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_field(path: &Path, field: &GridField) -> LabResult<()> {
    atomic_write(path, &field_bytes(field))
}

fn bad(msg: &str) -> LabError {
    LabError::Config(format!("field container: {msg}"))
}

pub fn parse_field(bytes: &[u8]) -> LabResult<GridField> {
    if bytes.len() < 64 || &bytes[..8] != MAGIC {
        return Err(bad("missing magic"));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[8 + 8 * i..16 + 8 * i].try_into().expect("eight bytes"));
    let (dim, points, boundary, code, param, count) = (word(0), word(1), word(2), word(3), word(4), word(5));
    let extent = f64::from_le_bytes(bytes[56..64].try_into().expect("eight bytes"));
    let body = &bytes[64..];
    if body.len() as u64 != 8 * count {
        return Err(bad("length does not match the header"));
    }
    let rank = rank_from(code, param).ok_or_else(|| bad("unknown rank"))?;
    let grid = match boundary {
        0 => Grid::torus_with_side(dim as usize, points as usize, extent)?,
        1 if extent == 2.0 => Grid::unit_box(dim as usize, points as usize)?,
        _ => return Err(bad("unknown boundary")),
    };
    let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes"))).collect();
    Ok(GridField::new(grid, rank, values)?)
}

pub fn read_field(path: &Path) -> LabResult<GridField> {
    parse_field(&std::fs::read(path)?)
}
