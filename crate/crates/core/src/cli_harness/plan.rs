use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::function_spaces::SpaceParams;
use crate::meyer_wavelet::BasisSpec;
use crate::mild_solver::SolverConfig;
use crate::Grid;

use super::initial::{InitialData, InitialKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Solve,
    Norms,
    LemmaCheck,
    Scan,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Solve => "solve",
            Scenario::Norms => "norms",
            Scenario::LemmaCheck => "lemma-check",
            Scenario::Scan => "scan",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Scenario::Solve, Scenario::Norms, Scenario::LemmaCheck, Scenario::Scan]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown scenario '{s}'")))
    }
}

/// Thresholds checked after a run; absent ones are not checked.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Assertions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_contraction: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    /// Relative `L²` distance between the Picard and ETDRK2 endpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_oracle_distance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
}

impl Assertions {
    pub fn is_empty(&self) -> bool {
        *self == Assertions::default()
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_dim() -> usize {
    2
}
fn default_grid() -> usize {
    64
}
fn default_t_final() -> f64 {
    0.1
}
fn default_max_iter() -> usize {
    20
}
fn default_quad_points() -> usize {
    8
}
fn default_contraction_tol() -> f64 {
    1e-10
}
fn default_threshold() -> f64 {
    1.0
}
fn default_initial() -> InitialData {
    InitialData::new(InitialKind::PerturbedTaylorGreen, 1e-2)
}
fn default_amplitudes() -> Vec<f64> {
    vec![0.0, 0.1, 1.0, 10.0, 100.0, 1000.0]
}
fn default_betas() -> Vec<f64> {
    vec![0.6, 0.8, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub scenario: Scenario,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
    /// The box has side `2π·2^box_exp`.
    #[serde(default)]
    pub box_exp: i32,
    #[serde(default)]
    pub space: SpaceParams,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
    #[serde(default = "default_contraction_tol")]
    pub contraction_tol: f64,
    #[serde(default = "default_threshold")]
    pub smallness_threshold: f64,
    #[serde(default = "default_initial")]
    pub initial: InitialData,
    /// Suites for `lemma-check` (names or ids); empty runs all of them.
    #[serde(default)]
    pub suites: Vec<String>,
    /// Amplitudes for `scan`.
    #[serde(default = "default_amplitudes")]
    pub amplitudes: Vec<f64>,
    /// Dissipation exponents for `scan`, one boundary each.
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default)]
    pub assertions: Assertions,
}

impl ExperimentPlan {
    pub fn new(scenario: Scenario) -> Self {
        let mut plan: ExperimentPlan =
            serde_json::from_value(serde_json::json!({ "scenario": scenario })).expect("defaults deserialize");
        if scenario == Scenario::Scan {
            plan.grid = 32;
            plan.t_final = 0.5;
            plan.max_iter = 30;
        }
        plan
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn spec(&self) -> Result<BasisSpec> {
        BasisSpec::for_grid(&Grid::new(self.dim, self.grid, self.box_exp)?)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let mut cfg = SolverConfig::new(self.spec()?, self.space, self.t_final)?;
        cfg.max_iter = self.max_iter;
        cfg.quad_points = self.quad_points;
        cfg.contraction_tol = self.contraction_tol;
        cfg.smallness_threshold = self.smallness_threshold;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate()?;
        self.spec()?;
        if self.scenario == Scenario::Solve || self.scenario == Scenario::Scan {
            self.solver_config()?;
        }
        if self.scenario == Scenario::Scan && (self.amplitudes.is_empty() || self.betas.is_empty()) {
            return Err(invalid("scan needs at least one amplitude and one beta"));
        }
        Ok(())
    }
}

/// Command-line overrides applied on top of a plan file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub grid: Option<usize>,
    pub beta: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub m: Option<f64>,
    pub m_prime: Option<f64>,
    pub t_final: Option<f64>,
    pub iters: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, plan: &mut ExperimentPlan) {
        let s = &mut plan.space;
        let pairs: [(&Option<f64>, &mut f64); 7] = [
            (&self.beta, &mut s.beta),
            (&self.p, &mut s.p),
            (&self.q, &mut s.q),
            (&self.gamma1, &mut s.gamma1),
            (&self.gamma2, &mut s.gamma2),
            (&self.m, &mut s.m),
            (&self.m_prime, &mut s.m_prime),
        ];
        for (value, slot) in pairs {
            if let Some(v) = value {
                *slot = *v;
            }
        }
        if let Some(v) = self.seed {
            plan.seed = v;
        }
        if let Some(v) = &self.out {
            plan.out = v.clone();
        }
        if let Some(v) = self.grid {
            plan.grid = v;
        }
        if let Some(v) = self.t_final {
            plan.t_final = v;
        }
        if let Some(v) = self.iters {
            plan.max_iter = v;
        }
    }
}
