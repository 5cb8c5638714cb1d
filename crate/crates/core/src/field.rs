//! Periodic grids and Fourier-coefficient vector fields.
//!
//! The box has side `2π·2^J` in physical units `x`. Wavelets live in lattice units
//! `y = x/2π`, where the box side is `2^J` and dyadic positions tile it exactly.
//! Mode `m` has physical wavenumber `ξ = m·2^{-J}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::fft::fft_nd;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub size: usize,
    pub box_exp: i32,
}

impl Grid {
    pub fn new(dim: usize, size: usize, box_exp: i32) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(invalid(format!("dimension {dim} not in 1..=3")));
        }
        if size < 2 || !size.is_power_of_two() {
            return Err(invalid(format!("grid size {size} must be a power of two >= 2")));
        }
        if !(0..=20).contains(&box_exp) {
            return Err(invalid(format!("box exponent {box_exp} not in 0..=20")));
        }
        Ok(Grid { dim, size, box_exp })
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Physical side length `2π·2^J`.
    pub fn box_period(&self) -> f64 {
        2.0 * PI * 2f64.powi(self.box_exp)
    }

    /// Side length in lattice units, `2^J`.
    pub fn lattice_period(&self) -> f64 {
        2f64.powi(self.box_exp)
    }

    pub fn signed_mode(&self, i: usize) -> i64 {
        let n = self.size as i64;
        let i = i as i64;
        if i < n / 2 {
            i
        } else {
            i - n
        }
    }

    pub fn index_of_mode(&self, m: i64) -> Option<usize> {
        let n = self.size as i64;
        if m < -n / 2 || m >= n / 2 {
            return None;
        }
        Some(m.rem_euclid(n) as usize)
    }

    pub fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            out[axis] = rest % self.size;
            rest /= self.size;
        }
        out
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.size + i)
    }

    pub fn modes(&self, flat: usize) -> [i64; 3] {
        let idx = self.axis_indices(flat);
        let mut m = [0i64; 3];
        for axis in 0..self.dim {
            m[axis] = self.signed_mode(idx[axis]);
        }
        m
    }

    pub fn wavenumber(&self, m: i64) -> f64 {
        m as f64 * 2f64.powi(-self.box_exp)
    }

    /// Physical wavevector of a flat mode index.
    pub fn wavevector(&self, flat: usize) -> [f64; 3] {
        let m = self.modes(flat);
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            xi[axis] = self.wavenumber(m[axis]);
        }
        xi
    }

    /// Wavevector used by odd multipliers (derivatives, Riesz, Leray): the
    /// Nyquist component is set to zero so real fields stay real.
    pub fn odd_wavevector(&self, flat: usize) -> [f64; 3] {
        let m = self.modes(flat);
        let nyquist = -(self.size as i64) / 2;
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            if m[axis] != nyquist {
                xi[axis] = self.wavenumber(m[axis]);
            }
        }
        xi
    }

    pub fn wavevector_norm(&self, flat: usize) -> f64 {
        let xi = self.wavevector(flat);
        xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.axis_indices(flat);
        let h = self.box_period() / self.size as f64;
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = idx[axis] as f64 * h;
        }
        x
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::GridMismatch(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// An n-component field stored as Fourier coefficients `c_m` with
/// `u(x) = Σ_m c_m e^{iξ_m·x}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: Grid,
    components: Vec<Vec<C64>>,
}

impl SpectralField {
    pub fn zeros(grid: Grid, ncomp: usize) -> Self {
        SpectralField {
            grid,
            components: vec![vec![ZERO; grid.len()]; ncomp],
        }
    }

    pub fn from_components(grid: Grid, components: Vec<Vec<C64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("field needs at least one component"));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::GridMismatch(format!(
                    "component length {} != {}",
                    c.len(),
                    grid.len()
                )));
            }
        }
        Ok(SpectralField { grid, components })
    }

    pub fn from_physical(grid: Grid, values: &[Vec<f64>]) -> Result<Self> {
        let volume = grid.len() as f64;
        let mut components = Vec::with_capacity(values.len());
        for v in values {
            if v.len() != grid.len() {
                return Err(Error::GridMismatch(format!("sample count {} != {}", v.len(), grid.len())));
            }
            let mut data: Vec<C64> = v.iter().map(|&x| C64::new(x / volume, 0.0)).collect();
            fft_nd(&mut data, grid.dim, grid.size, false);
            components.push(data);
        }
        Self::from_components(grid, components)
    }

    /// Samples `f(x, component)` on the grid.
    pub fn from_fn(grid: Grid, ncomp: usize, f: impl Fn(&[f64], usize) -> f64) -> Self {
        let values: Vec<Vec<f64>> = (0..ncomp)
            .map(|c| (0..grid.len()).map(|p| f(&grid.point(p)[..grid.dim], c)).collect())
            .collect();
        Self::from_physical(grid, &values).expect("sample count matches grid")
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, c: usize) -> &[C64] {
        &self.components[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [C64] {
        &mut self.components[c]
    }

    pub fn components(&self) -> &[Vec<C64>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<C64>> {
        self.components
    }

    pub fn to_physical(&self) -> Vec<Vec<C64>> {
        self.components
            .iter()
            .map(|c| {
                let mut data = c.clone();
                fft_nd(&mut data, self.grid.dim, self.grid.size, true);
                data
            })
            .collect()
    }

    pub fn to_physical_real(&self) -> Vec<Vec<f64>> {
        self.to_physical()
            .into_iter()
            .map(|c| c.into_iter().map(|z| z.re).collect())
            .collect()
    }

    /// L² norm in lattice measure `dy`, the measure in which the wavelets are orthonormal.
    pub fn l2_norm(&self) -> f64 {
        let volume = self.grid.lattice_period().powi(self.grid.dim as i32);
        let sum: f64 = self.components.iter().flatten().map(|z| z.norm_sqr()).sum();
        (volume * sum).sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.to_physical()
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.components.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.components
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, a: f64) {
        for z in self.components.iter_mut().flatten() {
            *z *= a;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a·other`.
    pub fn axpy(&mut self, a: f64, other: &SpectralField) -> Result<()> {
        self.grid.check_same(&other.grid)?;
        if self.ncomp() != other.ncomp() {
            return Err(Error::GridMismatch("component counts differ".into()));
        }
        for (dst, src) in self.components.iter_mut().zip(&other.components) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s * a;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// `‖self − other‖ / ‖other‖` in L², or the absolute distance when `other` vanishes.
    pub fn relative_l2_distance(&self, other: &SpectralField) -> Result<f64> {
        let diff = self.sub(other)?.l2_norm();
        let base = other.l2_norm();
        Ok(if base > 0.0 { diff / base } else { diff })
    }

    /// Zeroes every mode with some `|m_i| ≥ limit`.
    pub fn truncate_modes(&mut self, limit: i64) {
        let grid = self.grid;
        for c in self.components.iter_mut() {
            for (flat, z) in c.iter_mut().enumerate() {
                let m = grid.modes(flat);
                if m[..grid.dim].iter().any(|v| v.abs() >= limit) {
                    *z = ZERO;
                }
            }
        }
    }

    /// Largest `max_i |m_i|` over modes with magnitude above `tol`.
    pub fn spectral_extent(&self, tol: f64) -> i64 {
        let mut extent = 0;
        for c in &self.components {
            for (flat, z) in c.iter().enumerate() {
                if z.norm() > tol {
                    let m = self.grid.modes(flat);
                    let e = m[..self.grid.dim].iter().map(|v| v.abs()).max().unwrap_or(0);
                    extent = extent.max(e);
                }
            }
        }
        extent
    }

    pub fn component_field(&self, c: usize) -> SpectralField {
        SpectralField {
            grid: self.grid,
            components: vec![self.components[c].clone()],
        }
    }

    pub fn stack(parts: &[SpectralField]) -> Result<SpectralField> {
        let first = parts.first().ok_or_else(|| invalid("nothing to stack"))?;
        let mut components = Vec::new();
        for p in parts {
            first.grid.check_same(&p.grid)?;
            components.extend(p.components.iter().cloned());
        }
        Self::from_components(first.grid, components)
    }
}
