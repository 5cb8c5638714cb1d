use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::function_spaces::SpaceParams;
use crate::meyer_wavelet::BasisSpec;

fn default_samples_per_octave() -> usize {
    8
}

fn default_true() -> bool {
    true
}

fn default_etd_dt() -> f64 {
    1e-3
}

/// Everything a Picard solve needs besides the initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub beta: f64,
    pub space: SpaceParams,
    pub spec: BasisSpec,
    pub t_final: f64,
    /// Gauss nodes per quadrature sub-block.
    pub quad_points: usize,
    pub max_iter: usize,
    /// Stop once the successive-difference tent norm falls below this fraction of the first.
    pub contraction_tol: f64,
    /// Besov-Q size of the data above which it is flagged as not small.
    pub smallness_threshold: f64,
    #[serde(default = "default_samples_per_octave")]
    pub samples_per_octave: usize,
    /// With `false` the bilinear term is dropped and solves are purely linear.
    #[serde(default = "default_true")]
    pub nonlinear: bool,
    /// Largest step of the exponential time-differencing reference integrator.
    #[serde(default = "default_etd_dt")]
    pub etd_dt: f64,
}

impl SolverConfig {
    pub fn new(spec: BasisSpec, space: SpaceParams, t_final: f64) -> Result<Self> {
        let cfg = SolverConfig {
            beta: space.beta,
            space,
            spec,
            t_final,
            quad_points: 8,
            max_iter: 20,
            contraction_tol: 1e-10,
            smallness_threshold: 1.0,
            samples_per_octave: default_samples_per_octave(),
            nonlinear: true,
            etd_dt: default_etd_dt(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        if !(self.beta > 0.5 && self.beta.is_finite()) {
            return Err(invalid(format!("beta = {} must exceed 1/2", self.beta)));
        }
        if (self.beta - self.space.beta).abs() > 1e-15 {
            return Err(invalid(format!(
                "solver beta {} differs from the norm parameter beta {}",
                self.beta, self.space.beta
            )));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid(format!("t_final = {} must be positive", self.t_final)));
        }
        if self.quad_points < 4 {
            return Err(invalid(format!("quad_points = {} must be at least 4", self.quad_points)));
        }
        if self.max_iter < 1 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if !(self.contraction_tol > 0.0 && self.contraction_tol < 1.0) {
            return Err(invalid(format!("contraction_tol = {} must lie in (0, 1)", self.contraction_tol)));
        }
        if self.samples_per_octave == 0 {
            return Err(invalid("samples_per_octave must be positive"));
        }
        if !(self.etd_dt > 0.0) {
            return Err(invalid(format!("etd_dt = {} must be positive", self.etd_dt)));
        }
        Ok(())
    }

    /// Largest retained `|m_i|` after the two-thirds dealiasing rule.
    pub fn dealias_limit(&self) -> i64 {
        self.spec.grid_size as i64 / 3
    }

    /// Diffusive time of the largest retained wavenumber, `ξ_max^{−2β}`.
    pub fn finest_time(&self) -> f64 {
        let xi_max = self.dealias_limit() as f64 * 2f64.powi(-self.spec.box_exp);
        xi_max.powf(-2.0 * self.beta)
    }

    /// Sample times `s_i = s0 (r^i − 1)` with `r = 2^{1/P}`, chosen so that `s_1` is
    /// the finest diffusive time; starts at 0 and ends exactly at `t_final`.
    pub fn time_grid(&self) -> Vec<f64> {
        let ratio = 2f64.powf(1.0 / self.samples_per_octave as f64);
        let offset = self.time_offset();
        let mut out = vec![0.0];
        let mut i = 1;
        loop {
            let s = offset * (ratio.powi(i) - 1.0);
            if s >= self.t_final * (1.0 - 1e-9) {
                break;
            }
            out.push(s);
            i += 1;
        }
        out.push(self.t_final);
        out
    }

    /// The offset `s0` of [`SolverConfig::time_grid`].
    pub fn time_offset(&self) -> f64 {
        let ratio = 2f64.powf(1.0 / self.samples_per_octave as f64);
        self.finest_time() / (ratio - 1.0)
    }
}
