//! Fourier multipliers (derivatives, Riesz transforms, Leray projection) and
//! wavelet matrices of Calderón-Zygmund operators.

mod czo;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::field::{SpectralField, C64, ZERO};

pub use czo::{
    czo_decay_check, czo_matrix, czo_window_indices, fitted_decay_power, write_czo_csv, CzoDecayReport,
    CzoMatrixEntry, CzoOperator, MAX_CZO_PAIRS,
};

fn check_axis(field: &SpectralField, l: usize) -> Result<()> {
    if l >= field.grid().dim {
        return Err(invalid(format!("axis {l} out of range for dimension {}", field.grid().dim)));
    }
    Ok(())
}

fn map_modes(field: &SpectralField, symbol: impl Fn(usize) -> C64 + Sync) -> SpectralField {
    let mut out = field.clone();
    for c in 0..out.ncomp() {
        out.component_mut(c)
            .par_iter_mut()
            .enumerate()
            .for_each(|(flat, z)| *z *= symbol(flat));
    }
    out
}

/// `∂_l` (0-based axis), the multiplier `iξ_l`.
pub fn partial_derivative(field: &SpectralField, l: usize) -> Result<SpectralField> {
    check_axis(field, l)?;
    let grid = *field.grid();
    Ok(map_modes(field, |flat| C64::new(0.0, grid.odd_wavevector(flat)[l])))
}

/// Riesz transform `R_l`, the multiplier `−iξ_l/|ξ|`; the zero mode maps to 0.
pub fn riesz(field: &SpectralField, l: usize) -> Result<SpectralField> {
    check_axis(field, l)?;
    let grid = *field.grid();
    Ok(map_modes(field, |flat| {
        let xi = grid.odd_wavevector(flat);
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            ZERO
        } else {
            C64::new(0.0, -xi[l] / norm)
        }
    }))
}

/// `Σ_l ∂_l u_l` of an `n`-component field.
pub fn divergence(field: &SpectralField) -> Result<SpectralField> {
    let grid = *field.grid();
    if field.ncomp() != grid.dim {
        return Err(invalid(format!(
            "divergence needs {} components, got {}",
            grid.dim,
            field.ncomp()
        )));
    }
    let mut out = vec![ZERO; grid.len()];
    for l in 0..grid.dim {
        for (flat, (o, z)) in out.iter_mut().zip(field.component(l)).enumerate() {
            *o += C64::new(0.0, grid.odd_wavevector(flat)[l]) * z;
        }
    }
    SpectralField::from_components(grid, vec![out])
}

/// `∇φ` of a scalar field.
pub fn gradient(field: &SpectralField) -> Result<SpectralField> {
    if field.ncomp() != 1 {
        return Err(invalid("gradient needs a scalar field"));
    }
    let parts = (0..field.grid().dim)
        .map(|l| partial_derivative(field, l))
        .collect::<Result<Vec<_>>>()?;
    SpectralField::stack(&parts)
}

/// Leray projection `ℙ = δ_{ll'} + R_l R_{l'}`, mode-wise `v̂ − ξ(ξ·v̂)/|ξ|²`.
pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    let grid = *field.grid();
    let n = grid.dim;
    if field.ncomp() != n {
        return Err(invalid(format!("Leray projection needs {n} components, got {}", field.ncomp())));
    }
    let mut comps: Vec<Vec<C64>> = field.components().to_vec();
    let len = grid.len();
    let updates: Vec<[C64; 3]> = (0..len)
        .into_par_iter()
        .map(|flat| {
            let xi = grid.odd_wavevector(flat);
            let norm2: f64 = xi.iter().map(|v| v * v).sum();
            let mut out = [ZERO; 3];
            if norm2 == 0.0 {
                return out;
            }
            let dot: C64 = (0..n).map(|l| field.component(l)[flat] * xi[l]).sum();
            for l in 0..n {
                out[l] = dot * (xi[l] / norm2);
            }
            out
        })
        .collect();
    for (l, comp) in comps.iter_mut().enumerate() {
        for (z, u) in comp.iter_mut().zip(&updates) {
            *z -= u[l];
        }
    }
    SpectralField::from_components(grid, comps)
}

/// Sup norm of `∇·u` on the grid.
pub fn max_divergence(field: &SpectralField) -> Result<f64> {
    Ok(divergence(field)?.sup_norm())
}
