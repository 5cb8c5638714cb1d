use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::field::SpectralField;

/// Largest grid (points per axis) accepted by the direct double sum.
const MAX_SIDE: usize = 64;

/// Direct quadrature of the Q-type seminorm
/// `sup_Q r^{2(α+β−1)−n} ∫_Q∫_Q |f(x)−f(y)|² / |x−y|^{n+2(α−β+1)} dx dy`
/// over box-aligned dyadic cubes of side `r` (lattice units), summing over grid
/// points with the diagonal `x = y` omitted. Components are summed in `|·|²`.
pub fn qspace_norm_direct(field: &SpectralField, alpha: f64, beta: f64) -> Result<f64> {
    let grid = *field.grid();
    if grid.dim > 2 {
        return Err(invalid(format!("direct Q-space quadrature supports n <= 2, got n = {}", grid.dim)));
    }
    if grid.size > MAX_SIDE {
        return Err(invalid(format!(
            "direct Q-space quadrature is quadratic in grid points; {}^{} exceeds {MAX_SIDE}^{}",
            grid.size, grid.dim, grid.dim
        )));
    }
    let n = grid.dim as f64;
    let singular = n + 2.0 * (alpha - beta + 1.0);
    let scale_exp = 2.0 * (alpha + beta - 1.0) - n;
    let values = field.to_physical_real();
    let h = grid.lattice_period() / grid.size as f64;
    let log2n = grid.size.trailing_zeros() as i32;
    let dim = grid.dim;

    // Kernel on integer offsets, |d| < size per axis.
    let side = grid.size;
    let kernel: Vec<f64> = (0..side.pow(dim as u32))
        .map(|lin| {
            let (a, b) = if dim == 1 { (lin, 0) } else { (lin / side, lin % side) };
            let d2 = (a * a + b * b) as f64;
            if d2 == 0.0 {
                0.0
            } else {
                (h * d2.sqrt()).powf(-singular)
            }
        })
        .collect();
    let kernel_at = |a: usize, b: usize| if dim == 1 { kernel[a] } else { kernel[a * side + b] };

    let mut cubes = Vec::new();
    for level in 0..log2n {
        let per_axis = 1usize << level;
        for c in 0..per_axis.pow(dim as u32) {
            cubes.push((level, c));
        }
    }
    let best = cubes
        .par_iter()
        .map(|&(level, c)| {
            let per_axis = 1usize << level;
            let pts = side / per_axis;
            let (c0, c1) = if dim == 1 { (c, 0) } else { (c / per_axis, c % per_axis) };
            let points: Vec<(usize, usize)> = if dim == 1 {
                (0..pts).map(|a| (c0 * pts + a, 0)).collect()
            } else {
                (0..pts * pts)
                    .map(|i| (c0 * pts + i / pts, c1 * pts + i % pts))
                    .collect()
            };
            let flat = |p: (usize, usize)| if dim == 1 { p.0 } else { p.0 * side + p.1 };
            let mut sum = 0.0;
            for (i, &x) in points.iter().enumerate() {
                for &y in &points[i + 1..] {
                    let diff: f64 = values
                        .iter()
                        .map(|v| (v[flat(x)] - v[flat(y)]).powi(2))
                        .sum();
                    sum += 2.0 * diff * kernel_at(x.0.abs_diff(y.0), x.1.abs_diff(y.1));
                }
            }
            let r = pts as f64 * h;
            r.powf(scale_exp) * sum * h.powf(2.0 * n)
        })
        .reduce(|| 0.0, f64::max);
    Ok(best)
}
