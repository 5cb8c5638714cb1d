//! Monte-Carlo constants and amplitude scans built on the solver.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Grid, SpectralField};
use crate::operators::leray_project;

use super::config::SolverConfig;
use super::duhamel::{duhamel_path_with, Stepper};
use super::picard::{picard_solve, PicardStatus};
use super::trajectory::Trajectory;

/// Real Gaussian field with modes `|m_i| < band`, Leray-projected and normalized
/// to unit `L²` norm (zero if the band is empty).
pub fn random_divergence_free(grid: Grid, band: i64, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phys: Vec<Vec<f64>> = (0..grid.dim)
        .map(|_| (0..grid.len()).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    let mut f = SpectralField::from_physical(grid, &phys)?;
    f.truncate_modes(band);
    let mut f = leray_project(&f)?;
    let norm = f.l2_norm();
    if norm > 0.0 {
        f.scale(1.0 / norm);
    }
    Ok(f)
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearStats {
    pub trials: usize,
    /// Tent norm of `B(u, v)` for each pair, `u` and `v` of unit tent norm.
    pub values: Vec<f64>,
    /// Tent norm of `B(v, u)` for the same pairs.
    pub swapped: Vec<f64>,
    pub sup: f64,
    pub median: f64,
    pub q90: f64,
    pub sup_swapped: f64,
}

/// Unit-tent-norm linear trajectory from a random divergence-free field.
fn unit_trajectory(cfg: &SolverConfig, seed: u64, times: &[f64]) -> Result<Trajectory> {
    let grid = cfg.spec.grid();
    let band = (grid.size as i64 / 6).max(2);
    let f = random_divergence_free(grid, band, seed)?;
    let tr = Trajectory::linear(&f, cfg.beta, times, cfg.time_offset())?;
    let norm = tr.tent_norm(&cfg.spec, &cfg.space)?;
    if norm == 0.0 {
        return Err(invalid("random trajectory has zero tent norm"));
    }
    Ok(tr.scaled(1.0 / norm))
}

/// Tent norm of `B(u, v)` over random pairs of unit-tent-norm semigroup trajectories.
pub fn bilinear_constant_estimate(cfg: &SolverConfig, trials: usize, seed: u64) -> Result<BilinearStats> {
    cfg.validate()?;
    if trials < 10 {
        return Err(invalid(format!("need at least 10 trials, got {trials}")));
    }
    let times = cfg.time_grid();
    let stepper = Stepper::new(cfg)?;
    let results = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(2 * i as u64);
            let u = unit_trajectory(cfg, s, &times)?;
            let v = unit_trajectory(cfg, s + 1, &times)?;
            let norm_of = |fields: Vec<SpectralField>| -> Result<f64> {
                Trajectory::new(times.clone(), fields, cfg.time_offset())?.tent_norm(&cfg.spec, &cfg.space)
            };
            let uv = norm_of(duhamel_path_with(&stepper, &u, &v, &times)?)?;
            let vu = norm_of(duhamel_path_with(&stepper, &v, &u, &times)?)?;
            Ok((uv, vu))
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let swapped: Vec<f64> = results.iter().map(|r| r.1).collect();
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(BilinearStats {
        trials,
        sup: sorted.last().copied().unwrap_or(0.0),
        median: quantile(&sorted, 0.5),
        q90: quantile(&sorted, 0.9),
        sup_swapped: swapped.iter().cloned().fold(0.0, f64::max),
        values,
        swapped,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub amplitude: f64,
    pub status: PicardStatus,
    pub contraction_factor: f64,
    pub iterations: usize,
    /// Whether the row was added while bisecting for the boundary.
    pub bisection: bool,
}

impl ScanRow {
    pub fn converged(&self) -> bool {
        self.status == PicardStatus::Converged && self.contraction_factor < 1.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub rows: Vec<ScanRow>,
    /// Empirical amplitude where convergence is lost, to two significant digits.
    pub boundary: Option<f64>,
}

fn scan_one(direction: &SpectralField, amplitude: f64, cfg: &SolverConfig, bisection: bool) -> Result<ScanRow> {
    let a = direction.scaled(amplitude);
    let (status, factor, iterations) = match picard_solve(&a, cfg) {
        Ok((_, d)) => (d.status, d.contraction_factor, d.iterations),
        Err(Error::NonFinite { .. }) | Err(Error::Diverged { .. }) => (PicardStatus::Diverged, f64::INFINITY, 0),
        Err(e) => return Err(e),
    };
    Ok(ScanRow {
        amplitude,
        status,
        contraction_factor: factor,
        iterations,
        bisection,
    })
}

/// Runs a Picard solve for each amplitude times `direction` and bisects between the
/// largest converging and the smallest failing amplitude.
pub fn iteration_smallness_scan(direction: &SpectralField, cfg: &SolverConfig, amplitudes: &[f64]) -> Result<ScanTable> {
    if amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
        return Err(invalid("amplitudes must be finite and nonnegative"));
    }
    let mut amps = amplitudes.to_vec();
    amps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rows = amps
        .par_iter()
        .map(|&amp| scan_one(direction, amp, cfg, false))
        .collect::<Result<Vec<_>>>()?;
    let first_fail = rows.iter().position(|r| !r.converged());
    let boundary = match first_fail {
        Some(i) if i > 0 => {
            let (mut lo, mut hi) = (rows[i - 1].amplitude, rows[i].amplitude);
            for _ in 0..40 {
                if hi - lo <= 0.005 * hi {
                    break;
                }
                let mid = if lo > 0.0 { (lo * hi).sqrt() } else { 0.5 * hi };
                let row = scan_one(direction, mid, cfg, true)?;
                if row.converged() {
                    lo = mid;
                } else {
                    hi = mid;
                }
                rows.push(row);
            }
            Some(0.5 * (lo + hi))
        }
        _ => None,
    };
    rows.sort_by(|a, b| a.amplitude.partial_cmp(&b.amplitude).unwrap());
    Ok(ScanTable { rows, boundary })
}

pub fn write_scan_csv(path: impl AsRef<Path>, table: &ScanTable) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for r in &table.rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
