//! The fractional heat semigroup `e^{−t(−Δ)^β}` as an exact Fourier multiplier.

mod decay;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::function_spaces::CoefficientTrajectory;
use crate::meyer_wavelet::{analyze, synthesize, BasisSpec, CoefficientSet};

pub use decay::{decay_bound_check, decay_time_grid, DecayReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionalHeatParams {
    pub beta: f64,
    pub t: f64,
}

impl FractionalHeatParams {
    pub fn new(beta: f64, t: f64) -> Result<Self> {
        let params = FractionalHeatParams { beta, t };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(invalid(format!("beta = {} must be positive", self.beta)));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(invalid(format!("time t = {} must be finite and nonnegative", self.t)));
        }
        Ok(())
    }
}

/// Symbol `e^{−t|ξ|^{2β}}`.
pub fn heat_symbol(xi_norm: f64, beta: f64, t: f64) -> f64 {
    if xi_norm == 0.0 {
        1.0
    } else {
        (-t * xi_norm.powf(2.0 * beta)).exp()
    }
}

/// Multiplies every Fourier mode by `e^{−t|ξ|^{2β}}`.
pub fn apply_semigroup(field: &SpectralField, params: &FractionalHeatParams) -> Result<SpectralField> {
    params.validate()?;
    let mut out = field.clone();
    if params.t == 0.0 {
        return Ok(out);
    }
    let grid = *field.grid();
    let symbol: Vec<f64> = (0..grid.len())
        .into_par_iter()
        .map(|flat| heat_symbol(grid.wavevector_norm(flat), params.beta, params.t))
        .collect();
    for c in 0..out.ncomp() {
        out.component_mut(c)
            .par_iter_mut()
            .zip(&symbol)
            .for_each(|(z, &s)| *z *= s);
    }
    Ok(out)
}

/// Coefficients of `e^{−t(−Δ)^β}f` given those of `f`, through synthesis,
/// the exact multiplier and analysis.
pub fn evolve_coefficients(coeffs: &CoefficientSet, params: &FractionalHeatParams) -> Result<CoefficientSet> {
    let spec = *coeffs.spec();
    let field = synthesize(coeffs, &spec)?;
    let evolved = apply_semigroup(&field, params)?;
    let mut out = analyze(&evolved, &spec)?.coefficients;
    out.set_time(Some(params.t));
    Ok(out)
}

/// Coefficients of `e^{−t(−Δ)^β}f` at each of `times`.
pub fn semigroup_trajectory(
    field: &SpectralField,
    beta: f64,
    times: &[f64],
    spec: &BasisSpec,
) -> Result<CoefficientTrajectory> {
    let sets = times
        .par_iter()
        .map(|&t| {
            let evolved = apply_semigroup(field, &FractionalHeatParams::new(beta, t)?)?;
            Ok(analyze(&evolved, spec)?.coefficients)
        })
        .collect::<Result<Vec<_>>>()?;
    CoefficientTrajectory::new(times.to_vec(), sets)
}

#[derive(Serialize)]
struct DumpRow {
    t: f64,
    component: usize,
    eps: u8,
    j: i32,
    k: String,
    abs: f64,
}

/// CSV rows `(t, component, ε, j, k, |a|)` for every stored coefficient.
pub fn write_trajectory_csv(path: impl AsRef<Path>, tc: &CoefficientTrajectory) -> Result<()> {
    let path = path.as_ref();
    let dim = tc.spec().dim;
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for (&t, set) in tc.times().iter().zip(tc.sets()) {
        for (component, idx, z) in set.iter_all() {
            w.serialize(DumpRow {
                t,
                component,
                eps: idx.eps,
                j: idx.j,
                k: idx.k[..dim]
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
                abs: z.norm(),
            })?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))
}
