use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::function_spaces::besovq_norm;
use crate::meyer_wavelet::analyze;
use crate::operators::max_divergence;

use super::config::SolverConfig;
use super::duhamel::{duhamel_path_with, Stepper};
use super::trajectory::Trajectory;

/// Tolerance on `sup|∇·a|`, relative to `max(1, sup|a|)`.
const DIVERGENCE_TOL: f64 = 1e-10;

/// Differences below this fraction of the linear trajectory's size count as zero.
const DIFF_FLOOR: f64 = 1e-13;

/// Growth of the iterate's tent norm over the linear one that aborts a solve.
const GROWTH_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PicardStatus {
    Converged,
    MaxIterations,
    NonContractive,
    Diverged,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationDiagnostics {
    pub status: PicardStatus,
    pub iterations: usize,
    /// Tent norm (with outer root) of `u^{(0)}, u^{(1)}, …`.
    pub tent_norms: Vec<f64>,
    /// Tent norm of `u^{(k)} − u^{(k−1)}`, `k = 1, 2, …`.
    pub diff_tent: Vec<f64>,
    /// `max_t ‖u^{(k)}(t) − u^{(k−1)}(t)‖_{L²}`.
    pub diff_l2: Vec<f64>,
    /// Largest ratio of successive tent differences; 0 with fewer than two nonzero differences.
    pub contraction_factor: f64,
    /// `‖B(u^{(0)}, u^{(0)})‖ / ‖u^{(0)}‖²` in the tent norm.
    pub bilinear_constant: f64,
    /// Last `L²` difference relative to `‖a‖_{L²}`.
    pub residual: f64,
    pub data_norm: f64,
    pub above_smallness_threshold: bool,
    pub max_divergence: f64,
}

impl IterationDiagnostics {
    pub fn converged(&self) -> bool {
        self.status == PicardStatus::Converged
    }
}

/// Largest ratio `d_k / d_{k−1}` among differences above `floor`.
pub(crate) fn contraction_factor(diffs: &[f64], floor: f64) -> f64 {
    diffs
        .windows(2)
        .filter(|w| w[0] > floor)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

pub(crate) fn check_initial_data(a: &SpectralField, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    a.grid().check_same(&cfg.spec.grid())?;
    if a.ncomp() != cfg.spec.dim {
        return Err(invalid(format!(
            "initial data needs {} components, got {}",
            cfg.spec.dim,
            a.ncomp()
        )));
    }
    let div = max_divergence(a)?;
    if div > DIVERGENCE_TOL * a.sup_norm().max(1.0) {
        return Err(Error::NotDivergenceFree(div));
    }
    Ok(())
}

/// Picard iteration `u^{(k+1)} = u^{(0)} − B(u^{(k)}, u^{(k)})` on the sample grid
/// of `cfg`, starting from the linear evolution `u^{(0)} = e^{−t(−Δ)^β} a`.
pub fn picard_solve(a: &SpectralField, cfg: &SolverConfig) -> Result<(Trajectory, IterationDiagnostics)> {
    check_initial_data(a, cfg)?;
    let times = cfg.time_grid();
    let linear = Trajectory::linear(a, cfg.beta, &times, cfg.time_offset())?;
    let data_norm = besovq_norm(&analyze(a, &cfg.spec)?.coefficients, &cfg.space)?.value;
    let tent0 = linear.tent_norm(&cfg.spec, &cfg.space)?;
    let mut diag = IterationDiagnostics {
        status: PicardStatus::Converged,
        iterations: 0,
        tent_norms: vec![tent0],
        diff_tent: Vec::new(),
        diff_l2: Vec::new(),
        contraction_factor: 0.0,
        bilinear_constant: 0.0,
        residual: 0.0,
        data_norm,
        above_smallness_threshold: data_norm > cfg.smallness_threshold,
        max_divergence: 0.0,
    };
    if !cfg.nonlinear {
        diag.iterations = 1;
        diag.tent_norms.push(tent0);
        diag.diff_tent.push(0.0);
        diag.diff_l2.push(0.0);
        diag.max_divergence = linear.max_divergence()?;
        return Ok((linear, diag));
    }

    let stepper = Stepper::new(cfg)?;
    let floor = DIFF_FLOOR * tent0;
    let a_norm = a.l2_norm();
    let mut u = linear.clone();
    diag.status = PicardStatus::MaxIterations;
    for k in 1..=cfg.max_iter {
        let b = duhamel_path_with(&stepper, &u, &u, &times)?;
        let fields = linear
            .fields()
            .iter()
            .zip(&b)
            .map(|(l, b)| l.sub(b))
            .collect::<Result<Vec<_>>>()?;
        let next = Trajectory::new(times.clone(), fields, linear.offset())?;
        let diff = next.sub(&u)?;
        let diff_tent = diff.tent_norm(&cfg.spec, &cfg.space)?;
        let tent = next.tent_norm(&cfg.spec, &cfg.space)?;
        diag.iterations = k;
        diag.diff_tent.push(diff_tent);
        diag.diff_l2.push(diff.sup_l2());
        diag.tent_norms.push(tent);
        if k == 1 && tent0 > 0.0 {
            diag.bilinear_constant = diff_tent / (tent0 * tent0);
        }
        u = next;
        if !tent.is_finite() || (tent0 > 0.0 && tent > GROWTH_LIMIT * tent0) {
            diag.status = PicardStatus::Diverged;
            break;
        }
        if diff_tent <= floor || diff_tent <= cfg.contraction_tol * diag.diff_tent[0] {
            diag.status = PicardStatus::Converged;
            break;
        }
    }
    diag.contraction_factor = contraction_factor(&diag.diff_tent, floor);
    if diag.status == PicardStatus::MaxIterations && diag.contraction_factor >= 1.0 {
        diag.status = PicardStatus::NonContractive;
    }
    diag.residual = if a_norm > 0.0 {
        diag.diff_l2.last().copied().unwrap_or(0.0) / a_norm
    } else {
        0.0
    };
    diag.max_divergence = u.max_divergence()?;
    Ok((u, diag))
}
