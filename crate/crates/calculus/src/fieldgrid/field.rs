use alloc::vec;
use alloc::vec::Vec;

use super::grid::{Boundary, Grid};
use crate::error::{input, Result};
use crate::symcone::{binomial, Matrix, SymMatrix};

/// Value type of a field at each node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rank {
    Scalar,
    Vector,
    /// `n×n`, row-major.
    Matrix,
    /// One antisymmetric 2-form per row: `rows·C(n,2)` components, the form
    /// of row `v` stored as `c_ab = ∂_b v_a − ∂_a v_b` for `a < b`.
    Form2 { rows: usize },
    /// Free-form stack of `m` components.
    Tuple(usize),
}

impl Rank {
    pub fn components(self, dim: usize) -> usize {
        match self {
            Rank::Scalar => 1,
            Rank::Vector => dim,
            Rank::Matrix => dim * dim,
            Rank::Form2 { rows } => rows * binomial(dim, 2) as usize,
            Rank::Tuple(m) => m,
        }
    }

    /// Stable numeric code used by the binary container.
    pub fn code(self) -> u64 {
        match self {
            Rank::Scalar => 0,
            Rank::Vector => 1,
            Rank::Matrix => 2,
            Rank::Form2 { .. } => 3,
            Rank::Tuple(_) => 4,
        }
    }
}

/// A field sampled at the nodes of a [`Grid`]; components are innermost.
///
/// Source fields on a box vanish on the two-cell collar ([`GridField::new`]
/// checks it, [`GridField::from_fn`] enforces it).
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    grid: Grid,
    rank: Rank,
    values: Vec<f64>,
}

impl GridField {
    /// Validates the shape and, on a box, that the collar is zero.
    pub fn new(grid: Grid, rank: Rank, values: Vec<f64>) -> Result<Self> {
        let m = rank.components(grid.dim());
        if values.len() != grid.len() * m {
            return input(alloc::format!(
                "expected {} values for this grid and rank, got {}",
                grid.len() * m,
                values.len()
            ));
        }
        if grid.boundary() == Boundary::Box {
            for cell in 0..grid.len() {
                if grid.in_collar(cell) && values[cell * m..(cell + 1) * m].iter().any(|&v| v != 0.0) {
                    return input("box field is nonzero on the boundary collar");
                }
            }
        }
        Ok(GridField { grid, rank, values })
    }

    /// Derived fields (operator images, cell-wise maps) skip the collar
    /// check: a stencil of width two applied to a collared field reaches
    /// into the collar but never past the edge of the grid.
    pub(crate) fn raw(grid: Grid, rank: Rank, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len() * rank.components(grid.dim()));
        GridField { grid, rank, values }
    }

    pub fn zeros(grid: Grid, rank: Rank) -> Self {
        let m = rank.components(grid.dim());
        GridField { grid, rank, values: vec![0.0; grid.len() * m] }
    }

    /// Samples `f(x, out)` at every node; box collars are left at zero.
    pub fn from_fn(grid: Grid, rank: Rank, mut f: impl FnMut(&[f64], &mut [f64])) -> Self {
        let m = rank.components(grid.dim());
        let mut values = vec![0.0; grid.len() * m];
        for cell in 0..grid.len() {
            if grid.in_collar(cell) {
                continue;
            }
            let x = grid.position(cell);
            f(&x[..grid.dim()], &mut values[cell * m..(cell + 1) * m]);
        }
        GridField { grid, rank, values }
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn rank(&self) -> Rank {
        self.rank
    }

    #[inline]
    pub fn components(&self) -> usize {
        self.rank.components(self.grid.dim())
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, cell: usize) -> &[f64] {
        let m = self.components();
        &self.values[cell * m..(cell + 1) * m]
    }

    /// One component as a scalar array over the grid.
    pub fn component(&self, c: usize) -> Vec<f64> {
        let m = self.components();
        self.values.iter().skip(c).step_by(m).copied().collect()
    }

    pub fn matrix_at(&self, cell: usize) -> Matrix {
        debug_assert_eq!(self.rank, Rank::Matrix);
        let n = self.grid.dim();
        let v = self.at(cell);
        Matrix::from_fn(n, |i, j| v[i * n + j])
    }

    /// Symmetric part of the matrix value at `cell`.
    pub fn sym_at(&self, cell: usize) -> SymMatrix {
        self.matrix_at(cell).symmetric_part()
    }

    pub fn from_matrix_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> Matrix) -> Self {
        let n = grid.dim();
        Self::from_fn(grid, Rank::Matrix, |x, out| {
            let m = f(x);
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] = m.get(i, j);
                }
            }
        })
    }

    pub fn scale(&self, t: f64) -> Self {
        GridField {
            grid: self.grid,
            rank: self.rank,
            values: self.values.iter().map(|v| t * v).collect(),
        }
    }

    /// `self + t·other`.
    pub fn add_scaled(&self, other: &GridField, t: f64) -> Result<Self> {
        if self.grid != other.grid || self.rank != other.rank {
            return input("fields live on different grids or ranks");
        }
        Ok(GridField {
            grid: self.grid,
            rank: self.rank,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + t * b).collect(),
        })
    }

    /// Adds the same value at every node; torus only, since a constant
    /// breaks compact support.
    pub fn add_constant(&self, c: &[f64]) -> Result<Self> {
        let m = self.components();
        if c.len() != m {
            return input("constant has the wrong number of components");
        }
        if self.grid.boundary() != Boundary::Torus {
            return input("adding a constant needs a torus field");
        }
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v += c[i % m];
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Result<Self> {
        if self.rank != Rank::Matrix {
            return input("transpose needs a matrix field");
        }
        let n = self.grid.dim();
        let mut values = self.values.clone();
        for cell in values.chunks_mut(n * n) {
            for i in 0..n {
                for j in (i + 1)..n {
                    cell.swap(i * n + j, j * n + i);
                }
            }
        }
        Ok(GridField { grid: self.grid, rank: Rank::Matrix, values })
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Result of applying a cell-wise map: the new field and a per-node flag
/// marking nodes where the map reported an outside value.
#[derive(Clone, Debug, PartialEq)]
pub struct Mapped {
    pub field: GridField,
    pub outside: Vec<bool>,
}

impl Mapped {
    pub fn outside_count(&self) -> usize {
        self.outside.iter().filter(|&&o| o).count()
    }
}

/// Applies `f(value, out) -> inside` at every node. Nodes where `f` returns
/// `false` are flagged.
pub fn pointwise_map(
    field: &GridField,
    out_rank: Rank,
    mut f: impl FnMut(&[f64], &mut [f64]) -> bool,
) -> Mapped {
    let grid = *field.grid();
    let m = out_rank.components(grid.dim());
    let mut values = vec![0.0; grid.len() * m];
    let mut outside = vec![false; grid.len()];
    for cell in 0..grid.len() {
        outside[cell] = !f(field.at(cell), &mut values[cell * m..(cell + 1) * m]);
    }
    Mapped { field: GridField::raw(grid, out_rank, values), outside }
}

/// Arithmetic mean of every component; torus only.
pub fn field_mean(field: &GridField) -> Result<Vec<f64>> {
    if field.grid().boundary() != Boundary::Torus {
        return input("the mean is only defined for torus fields");
    }
    let m = field.components();
    let mut acc = vec![0.0; m];
    for (i, v) in field.values().iter().enumerate() {
        acc[i % m] += v;
    }
    let count = field.grid().len() as f64;
    Ok(acc.into_iter().map(|s| s / count).collect())
}
