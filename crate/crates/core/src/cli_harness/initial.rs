use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{SpectralField, C64};
use crate::function_spaces::{besovq_norm, SpaceParams};
use crate::meyer_wavelet::{analyze, synthesize, BasisSpec, CoefficientSet, WaveletIndex};
use crate::mild_solver::random_divergence_free;
use crate::operators::leray_project;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    TaylorGreen,
    /// Taylor-Green plus half its size of random divergence-free noise at `|m| < N/8`;
    /// pure Taylor-Green has a vanishing projected nonlinearity.
    PerturbedTaylorGreen,
    RandomBesov,
    SingleWavelet,
}

impl InitialKind {
    pub const ALL: [InitialKind; 4] = [
        InitialKind::TaylorGreen,
        InitialKind::PerturbedTaylorGreen,
        InitialKind::RandomBesov,
        InitialKind::SingleWavelet,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InitialKind::TaylorGreen => "taylor-green",
            InitialKind::PerturbedTaylorGreen => "perturbed-taylor-green",
            InitialKind::RandomBesov => "random-besov",
            InitialKind::SingleWavelet => "single-wavelet",
        }
    }
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        InitialKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| invalid(format!("unknown initial data kind '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialData {
    pub kind: InitialKind,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    /// Wavelet of the `single-wavelet` kind; placed in the first component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelet: Option<WaveletIndex>,
}

fn default_amplitude() -> f64 {
    1.0
}

impl InitialData {
    pub fn new(kind: InitialKind, amplitude: f64) -> Self {
        InitialData {
            kind,
            amplitude,
            wavelet: None,
        }
    }
}

fn taylor_green(spec: &BasisSpec) -> Result<SpectralField> {
    let grid = spec.grid();
    match spec.dim {
        2 => Ok(SpectralField::from_fn(grid, 2, |x, c| match c {
            0 => x[0].sin() * x[1].cos(),
            _ => -x[0].cos() * x[1].sin(),
        })),
        3 => Ok(SpectralField::from_fn(grid, 3, |x, c| match c {
            0 => x[0].sin() * x[1].cos() * x[2].cos(),
            1 => -x[0].cos() * x[1].sin() * x[2].cos(),
            _ => 0.0,
        })),
        n => Err(invalid(format!("taylor-green needs n = 2 or 3, got {n}"))),
    }
}

/// Gaussian wavelet coefficients with envelope `2^{−j(γ1+n/2−n/p)}` on every detail
/// shell, projected to divergence-free and rescaled to unit Besov-Q norm.
fn random_besov(spec: &BasisSpec, space: &SpaceParams, seed: u64) -> Result<SpectralField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.dim as f64;
    let mut set = CoefficientSet::new(*spec, spec.dim);
    for c in 0..spec.dim {
        for j in spec.j_min..=spec.j_max {
            let envelope = 2f64.powf(-(j as f64) * (space.gamma1 + n / 2.0 - n / space.p));
            let side = spec.positions(j) as i64;
            for eps in spec.detail_types() {
                for lin in 0..side.pow(spec.dim as u32) {
                    let k: Vec<i64> = (0..spec.dim).map(|a| (lin / side.pow(a as u32)) % side).collect();
                    let g: f64 = StandardNormal.sample(&mut rng);
                    set.insert(c, WaveletIndex::new(eps, j, &k), C64::new(envelope * g, 0.0))?;
                }
            }
        }
    }
    let field = leray_project(&synthesize(&set, spec)?)?;
    let norm = besovq_norm(&analyze(&field, spec)?.coefficients, space)?.value;
    if !(norm > 0.0) {
        return Err(invalid("random-besov draw has zero norm"));
    }
    Ok(field.scaled(1.0 / norm))
}

fn single_wavelet(spec: &BasisSpec, idx: WaveletIndex) -> Result<SpectralField> {
    let mut set = CoefficientSet::new(*spec, spec.dim);
    set.insert(0, idx, C64::new(1.0, 0.0))?;
    let field = leray_project(&synthesize(&set, spec)?)?;
    let norm = field.l2_norm();
    if norm == 0.0 {
        return Err(invalid(format!("wavelet {idx:?} has no divergence-free part")));
    }
    Ok(field.scaled(1.0 / norm))
}

/// Divergence-free initial data on the grid of `spec`, scaled by `data.amplitude`.
///
/// `random-besov` is normalized to unit Besov-Q norm before scaling and
/// `single-wavelet` to unit `L²` norm; Taylor-Green is used as is.
pub fn generate_initial_data(data: &InitialData, spec: &BasisSpec, space: &SpaceParams, seed: u64) -> Result<SpectralField> {
    if !data.amplitude.is_finite() {
        return Err(invalid(format!("amplitude {} must be finite", data.amplitude)));
    }
    if spec.dim < 2 {
        return Err(invalid("divergence-free initial data needs n >= 2"));
    }
    let unit = match data.kind {
        InitialKind::TaylorGreen => taylor_green(spec)?,
        InitialKind::PerturbedTaylorGreen => {
            let grid = spec.grid();
            let noise = random_divergence_free(grid, (grid.size as i64 / 8).max(2), seed)?;
            let tg = taylor_green(spec)?;
            let size = tg.l2_norm();
            tg.add(&noise.scaled(0.5 * size))?
        }
        InitialKind::RandomBesov => {
            space.validate()?;
            random_besov(spec, space, seed)?
        }
        InitialKind::SingleWavelet => {
            let idx = data
                .wavelet
                .ok_or_else(|| invalid("single-wavelet needs a wavelet index"))?;
            spec.check(&idx)?;
            single_wavelet(spec, idx)?
        }
    };
    Ok(unit.scaled(data.amplitude))
}
