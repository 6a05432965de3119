use crate::error::{input, Result};

/// Largest total number of grid points.
pub const MAX_POINTS: usize = 1 << 26;

/// Width of the zero collar kept on compact-support boxes.
pub const COLLAR: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Periodic cube `[0, L)^n`, nodes at `i·h`.
    Torus,
    /// `[−1, 1]^n` with cell-centred nodes and compactly supported fields.
    Box,
}

/// Uniform grid in two or three dimensions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    points: usize,
    boundary: Boundary,
    extent: f64,
}

impl Grid {
    fn checked(dim: usize, points: usize, boundary: Boundary, extent: f64) -> Result<Self> {
        if !(2..=3).contains(&dim) {
            return input(alloc::format!("grid dimension {dim} not in 2..=3"));
        }
        if points < 2 * COLLAR + 2 {
            return input(alloc::format!("{points} points per axis is too coarse"));
        }
        match points.checked_pow(dim as u32) {
            Some(total) if total <= MAX_POINTS => {}
            _ => return input(alloc::format!("{points}^{dim} points exceeds the 2^26 memory guard")),
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return input("grid extent must be positive");
        }
        Ok(Grid { dim, points, boundary, extent })
    }

    /// Unit torus `[0,1)^dim`.
    pub fn torus(dim: usize, points: usize) -> Result<Self> {
        Self::checked(dim, points, Boundary::Torus, 1.0)
    }

    /// Torus `[0, side)^dim`.
    pub fn torus_with_side(dim: usize, points: usize, side: f64) -> Result<Self> {
        Self::checked(dim, points, Boundary::Torus, side)
    }

    /// The box `[−1, 1]^dim`.
    pub fn unit_box(dim: usize, points: usize) -> Result<Self> {
        Self::checked(dim, points, Boundary::Box, 2.0)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn points(&self) -> usize {
        self.points
    }

    #[inline]
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    /// Side length of the domain.
    #[inline]
    pub fn extent(&self) -> f64 {
        self.extent
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.extent / self.points as f64
    }

    pub fn cell_volume(&self) -> f64 {
        libm::pow(self.spacing(), self.dim as f64)
    }

    pub fn volume(&self) -> f64 {
        libm::pow(self.extent, self.dim as f64)
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat-index stride of `axis`; axis 0 varies slowest.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.dim - 1 - axis) as u32)
    }

    /// Node coordinate along one axis.
    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        let h = self.spacing();
        match self.boundary {
            Boundary::Torus => i as f64 * h,
            Boundary::Box => -1.0 + (i as f64 + 0.5) * h,
        }
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        let mut rest = flat;
        for a in (0..self.dim).rev() {
            idx[a] = rest % self.points;
            rest /= self.points;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.points + i)
    }

    pub fn position(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(idx[a]);
        }
        x
    }

    /// Nodes within `COLLAR` cells of a box face.
    pub fn in_collar(&self, flat: usize) -> bool {
        if self.boundary != Boundary::Box {
            return false;
        }
        let idx = self.multi_index(flat);
        idx[..self.dim]
            .iter()
            .any(|&i| i < COLLAR || i >= self.points - COLLAR)
    }
}
