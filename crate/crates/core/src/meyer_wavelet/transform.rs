//! Exact analysis and synthesis through the Fourier lattice.
//!
//! For a shell `(ε, j)` with `M = 2^{j+J}` positions per axis,
//! `a_k = 2^{-nj/2} Σ_m c_m conj(Φ̂^ε(2πm/M)) e^{2πi k·m/M}`: fold the weighted
//! spectrum onto `Z_M^n` and run one inverse FFT. Synthesis is the adjoint.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::fft::fft_nd;
use crate::field::{Grid, SpectralField, C64, ZERO};

use super::basis::{finest_detail_scale, finest_scaling_scale, BasisSpec};
use super::coeffs::{CoefficientSet, Shell, ShellKey};
use super::profile;

struct AxisTerm {
    grid_index: usize,
    fold: usize,
    factor: C64,
}

fn axis_terms(grid: &Grid, side: usize, bit: u8) -> Vec<AxisTerm> {
    let scale = 2.0 * PI / side as f64;
    (0..grid.size)
        .filter_map(|i| {
            let m = grid.signed_mode(i);
            let factor = profile::factor(bit, scale * m as f64);
            (factor != ZERO).then(|| AxisTerm {
                grid_index: i,
                fold: m.rem_euclid(side as i64) as usize,
                factor,
            })
        })
        .collect()
}

fn walk(
    terms: &[Vec<AxisTerm>],
    size: usize,
    side: usize,
    state: (usize, usize, C64),
    f: &mut impl FnMut(usize, usize, C64),
) {
    let Some((head, rest)) = terms.split_first() else {
        f(state.0, state.1, state.2);
        return;
    };
    for t in head {
        walk(
            rest,
            size,
            side,
            (state.0 * size + t.grid_index, state.1 * side + t.fold, state.2 * t.factor),
            f,
        );
    }
}

fn shell_side(grid: &Grid, j: i32) -> Result<usize> {
    let exp = j + grid.box_exp;
    if exp < 0 {
        return Err(invalid(format!("scale {j} is coarser than the box")));
    }
    Ok(1usize << exp)
}

fn shell_terms(grid: &Grid, side: usize, eps: u8) -> Vec<Vec<AxisTerm>> {
    (0..grid.dim)
        .map(|axis| axis_terms(grid, side, (eps >> axis) & 1))
        .collect()
}

/// Dense coefficients `⟨f, Φ^ε_{j,k}⟩` for all `k ∈ [0, 2^{j+J})^n` of one scalar component.
pub fn analyze_shell(spectrum: &[C64], grid: &Grid, j: i32, eps: u8) -> Result<Vec<C64>> {
    let side = shell_side(grid, j)?;
    let terms = shell_terms(grid, side, eps);
    let mut folded = vec![ZERO; side.pow(grid.dim as u32)];
    walk(&terms, grid.size, side, (0, 0, C64::new(1.0, 0.0)), &mut |g, r, f| {
        folded[r] += spectrum[g] * f.conj();
    });
    fft_nd(&mut folded, grid.dim, side, true);
    let norm = 2f64.powf(-0.5 * grid.dim as f64 * j as f64);
    folded.iter_mut().for_each(|z| *z *= norm);
    Ok(folded)
}

/// Adds `Σ_k a_k Φ^ε_{j,k}` to `out` (Fourier coefficients of one component).
pub fn synthesize_shell(values: &[C64], grid: &Grid, j: i32, eps: u8, out: &mut [C64]) -> Result<()> {
    let side = shell_side(grid, j)?;
    let terms = shell_terms(grid, side, eps);
    let mut spectrum = values.to_vec();
    fft_nd(&mut spectrum, grid.dim, side, false);
    let norm = 2f64.powf(-(grid.dim as f64) * (grid.box_exp as f64 + 0.5 * j as f64));
    walk(&terms, grid.size, side, (0, 0, C64::new(1.0, 0.0)), &mut |g, r, f| {
        out[g] += f * spectrum[r] * norm;
    });
    Ok(())
}

/// Result of [`analyze`]; `truncated_shells` lists scales above the window that carry
/// energy the window could not represent.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub coefficients: CoefficientSet,
    pub truncated_shells: Vec<i32>,
}

fn window_keys(spec: &BasisSpec) -> Vec<ShellKey> {
    let mut keys = vec![ShellKey { j: spec.j_min, eps: 0 }];
    for j in spec.j_min..=spec.j_max {
        keys.extend(spec.detail_types().map(|eps| ShellKey { j, eps }));
    }
    keys
}

/// Scaling coefficients at `j_min` plus detail coefficients for every scale of the window.
pub fn analyze(field: &SpectralField, spec: &BasisSpec) -> Result<Analysis> {
    let grid = spec.grid();
    field.grid().check_same(&grid)?;
    let keys = window_keys(spec);
    let mut set = CoefficientSet::new(*spec, field.ncomp());
    for c in 0..field.ncomp() {
        let shells: Vec<(ShellKey, Vec<C64>)> = keys
            .par_iter()
            .map(|key| analyze_shell(field.component(c), &grid, key.j, key.eps).map(|v| (*key, v)))
            .collect::<Result<_>>()?;
        for (key, values) in shells {
            let side = spec.positions(key.j);
            set.put_shell(c, key, Shell::from_dense(side, spec.dim, values));
        }
    }
    let truncated_shells = truncated_shells(field, &set, spec)?;
    Ok(Analysis {
        coefficients: set,
        truncated_shells,
    })
}

fn truncated_shells(field: &SpectralField, set: &CoefficientSet, spec: &BasisSpec) -> Result<Vec<i32>> {
    let scale = field.max_abs_coefficient();
    if scale == 0.0 {
        return Ok(Vec::new());
    }
    let residual = field.sub(&synthesize(set, spec)?)?;
    let tol = 1e-11 * scale;
    let grid = spec.grid();
    let lattice = 2f64.powi(grid.box_exp);
    let mut shells = BTreeSet::new();
    for comp in residual.components() {
        for (flat, z) in comp.iter().enumerate() {
            if z.norm() <= tol {
                continue;
            }
            let m = grid.modes(flat);
            let mu = m[..grid.dim].iter().map(|v| v.abs()).max().unwrap_or(0) as f64 / lattice;
            if mu == 0.0 {
                continue;
            }
            // shell j covers max_i |m_i| 2^{-J} in (2^j/3, 2^{j+2}/3)
            let lo = (0.75 * mu).log2().floor() as i32;
            let hi = (3.0 * mu).log2().ceil() as i32;
            for j in lo..=hi {
                let (a, b) = (2f64.powi(j) / 3.0, 2f64.powi(j + 2) / 3.0);
                if mu > a && mu < b && j > spec.j_max {
                    shells.insert(j);
                }
            }
        }
    }
    Ok(shells.into_iter().collect())
}

/// `Σ a^ε_{j,k} Φ^ε_{j,k}`; every index must lie inside `spec`.
pub fn synthesize(coeffs: &CoefficientSet, spec: &BasisSpec) -> Result<SpectralField> {
    let grid = spec.grid();
    if coeffs.spec() != spec {
        for (_, idx, _) in coeffs.iter_all() {
            spec.check(&idx)?;
        }
    }
    let mut components = Vec::with_capacity(coeffs.ncomp());
    for c in 0..coeffs.ncomp() {
        let shells: Vec<(&ShellKey, &Shell)> = coeffs.shells(c).collect();
        let parts: Vec<Vec<C64>> = shells
            .par_iter()
            .map(|(key, shell)| {
                let mut out = vec![ZERO; grid.len()];
                synthesize_shell(&shell.to_dense(), &grid, key.j, key.eps, &mut out).map(|_| out)
            })
            .collect::<Result<_>>()?;
        let mut total = vec![ZERO; grid.len()];
        for part in parts {
            for (t, p) in total.iter_mut().zip(part) {
                *t += p;
            }
        }
        components.push(total);
    }
    SpectralField::from_components(grid, components)
}

/// Scaling projection `P_j`. Scales at or below the box collapse to the mean.
pub fn project_pj(field: &SpectralField, j: i32) -> Result<SpectralField> {
    let grid = *field.grid();
    if j <= -grid.box_exp {
        let mut out = SpectralField::zeros(grid, field.ncomp());
        for c in 0..field.ncomp() {
            out.component_mut(c)[0] = field.component(c)[0];
        }
        return Ok(out);
    }
    if j > finest_scaling_scale(&grid) {
        return Err(invalid(format!("P_{j} is not resolved on a {}-point grid", grid.size)));
    }
    let mut out = SpectralField::zeros(grid, field.ncomp());
    for c in 0..field.ncomp() {
        let values = analyze_shell(field.component(c), &grid, j, 0)?;
        synthesize_shell(&values, &grid, j, 0, out.component_mut(c))?;
    }
    Ok(out)
}

/// Detail projection `Q_j = P_{j+1} − P_j`, assembled from the `2^n − 1` wavelet types.
pub fn project_qj(field: &SpectralField, j: i32) -> Result<SpectralField> {
    let grid = *field.grid();
    let mut out = SpectralField::zeros(grid, field.ncomp());
    if j < -grid.box_exp {
        return Ok(out);
    }
    if j > finest_detail_scale(&grid) {
        return Err(invalid(format!("Q_{j} is not resolved on a {}-point grid", grid.size)));
    }
    for c in 0..field.ncomp() {
        for eps in 1..(1u8 << grid.dim) {
            let values = analyze_shell(field.component(c), &grid, j, eps)?;
            synthesize_shell(&values, &grid, j, eps, out.component_mut(c))?;
        }
    }
    Ok(out)
}
