use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::Grid;

/// `(ε, j, k)`: wavelet type bits, dyadic scale and lattice position.
/// Only the first `dim` entries of `k` are meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WaveletIndex {
    pub eps: u8,
    pub j: i32,
    pub k: [i64; 3],
}

impl WaveletIndex {
    pub fn new(eps: u8, j: i32, k: &[i64]) -> Self {
        let mut kk = [0i64; 3];
        kk[..k.len()].copy_from_slice(k);
        WaveletIndex { eps, j, k: kk }
    }
}

impl fmt::Display for WaveletIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(eps={}, j={}, k={:?})", self.eps, self.j, self.k)
    }
}

/// Scale window and discretization of the periodized wavelet system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSpec {
    pub dim: usize,
    pub j_min: i32,
    pub j_max: i32,
    pub grid_size: usize,
    pub box_exp: i32,
}

impl BasisSpec {
    pub fn new(dim: usize, j_min: i32, j_max: i32, grid_size: usize, box_exp: i32) -> Result<Self> {
        let grid = Grid::new(dim, grid_size, box_exp)?;
        if j_min > j_max {
            return Err(invalid(format!("j_min {j_min} > j_max {j_max}")));
        }
        if j_min < -box_exp {
            return Err(invalid(format!(
                "j_min {j_min} is coarser than the box (needs j_min >= {})",
                -box_exp
            )));
        }
        let finest = finest_detail_scale(&grid);
        if j_max > finest {
            return Err(invalid(format!(
                "grid of {grid_size} points cannot resolve scale {j_max} (finest exact scale {finest})"
            )));
        }
        Ok(BasisSpec {
            dim,
            j_min,
            j_max,
            grid_size,
            box_exp,
        })
    }

    /// Default window: the whole box down to three octaves below the grid cutoff.
    pub fn for_grid(grid: &Grid) -> Result<Self> {
        let log2n = grid.size.trailing_zeros() as i32;
        let j_min = -grid.box_exp;
        let j_max = (log2n - grid.box_exp - 3).max(j_min);
        Self::new(grid.dim, j_min, j_max, grid.size, grid.box_exp)
    }

    pub fn grid(&self) -> Grid {
        Grid {
            dim: self.dim,
            size: self.grid_size,
            box_exp: self.box_exp,
        }
    }

    /// Number of positions per axis at scale `j`: `2^{j+J}`.
    pub fn positions(&self, j: i32) -> usize {
        1usize << (j + self.box_exp).max(0)
    }

    /// Box side in lattice units, `2^J`.
    pub fn lattice_period(&self) -> f64 {
        2f64.powi(self.box_exp)
    }

    pub fn detail_types(&self) -> std::ops::Range<u8> {
        1..(1u8 << self.dim)
    }

    /// Highest `|m_i|` kept intact by the scaling projection above the window.
    pub fn passband(&self) -> f64 {
        2f64.powi(self.j_max + 1 + self.box_exp) / 3.0
    }

    pub fn check(&self, idx: &WaveletIndex) -> Result<()> {
        let outside = || Error::OutsideWindow(idx.to_string());
        if idx.eps >= (1u8 << self.dim) {
            return Err(outside());
        }
        if idx.j < self.j_min || idx.j > self.j_max {
            return Err(outside());
        }
        let side = self.positions(idx.j) as i64;
        if idx.k[..self.dim].iter().any(|&k| k < 0 || k >= side) {
            return Err(outside());
        }
        if idx.k[self.dim..].iter().any(|&k| k != 0) {
            return Err(outside());
        }
        Ok(())
    }
}

/// Finest scale whose detail symbols fit inside the grid's Nyquist band.
pub fn finest_detail_scale(grid: &Grid) -> i32 {
    grid.size.trailing_zeros() as i32 - grid.box_exp - 2
}

/// Finest scale whose scaling symbols fit inside the grid's Nyquist band.
pub fn finest_scaling_scale(grid: &Grid) -> i32 {
    grid.size.trailing_zeros() as i32 - grid.box_exp - 1
}
