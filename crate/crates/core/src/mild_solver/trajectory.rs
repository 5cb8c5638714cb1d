use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::SpectralField;
use crate::function_spaces::{cube_levels, tent_norm, CoefficientTrajectory, SpaceParams};
use crate::meyer_wavelet::BasisSpec;
use crate::operators::max_divergence;
use crate::semigroup::{apply_semigroup, FractionalHeatParams};

/// A velocity field sampled at strictly increasing times starting from 0.
///
/// Between samples the field is interpolated mode-wise by 4-point Lagrange
/// polynomials in `σ = ln(t + offset)`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    offset: f64,
    coefficients: OnceLock<(BasisSpec, CoefficientTrajectory)>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, fields: Vec<SpectralField>, offset: f64) -> Result<Self> {
        if times.is_empty() || times.len() != fields.len() {
            return Err(invalid(format!("{} times for {} fields", times.len(), fields.len())));
        }
        if times[0] != 0.0 {
            return Err(invalid("trajectories start at t = 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sample times must be strictly increasing"));
        }
        if !(offset > 0.0) {
            return Err(invalid("interpolation offset must be positive"));
        }
        let grid = *fields[0].grid();
        for f in &fields {
            f.grid().check_same(&grid)?;
            if f.ncomp() != fields[0].ncomp() {
                return Err(invalid("fields have different component counts"));
            }
        }
        Ok(Trajectory {
            times,
            fields,
            offset,
            coefficients: OnceLock::new(),
        })
    }

    /// `e^{−t(−Δ)^β} a` at each time.
    pub fn linear(a: &SpectralField, beta: f64, times: &[f64], offset: f64) -> Result<Self> {
        let fields = times
            .par_iter()
            .map(|&t| apply_semigroup(a, &FractionalHeatParams::new(beta, t)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times.to_vec(), fields, offset)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn endpoint(&self) -> &SpectralField {
        self.fields.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn map(&self, f: impl Fn(&SpectralField) -> Result<SpectralField> + Sync + Send) -> Result<Self> {
        let fields = self.fields.par_iter().map(f).collect::<Result<Vec<_>>>()?;
        Self::new(self.times.clone(), fields, self.offset)
    }

    pub fn scaled(&self, a: f64) -> Self {
        Trajectory {
            times: self.times.clone(),
            fields: self.fields.iter().map(|f| f.scaled(a)).collect(),
            offset: self.offset,
            coefficients: OnceLock::new(),
        }
    }

    /// Field at time `t` inside the sampled range.
    pub fn at(&self, t: f64) -> Result<SpectralField> {
        let t_max = self.t_max();
        if !(0.0..=t_max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::OutsideTimeRange { t, t_max });
        }
        if let Ok(i) = self.times.binary_search_by(|s| s.partial_cmp(&t).unwrap()) {
            return Ok(self.fields[i].clone());
        }
        let n = self.times.len();
        if n == 1 {
            return Ok(self.fields[0].clone());
        }
        let upper = self.times.partition_point(|&s| s < t).min(n - 1);
        let width = n.min(4);
        let start = (upper as isize - 2).clamp(0, (n - width) as isize) as usize;
        let sigma = |s: f64| (s + self.offset).ln();
        let x = sigma(t);
        let nodes: Vec<f64> = (start..start + width).map(|i| sigma(self.times[i])).collect();
        let mut out = SpectralField::zeros(*self.fields[0].grid(), self.fields[0].ncomp());
        for (a, &xa) in nodes.iter().enumerate() {
            let w: f64 = nodes
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != a)
                .map(|(_, &xb)| (x - xb) / (xa - xb))
                .product();
            out.axpy(w, &self.fields[start + a])?;
        }
        Ok(out)
    }

    /// Wavelet coefficients of every sample in `spec`; the first window asked for is cached.
    pub fn coefficients(&self, spec: &BasisSpec) -> Result<CoefficientTrajectory> {
        if let Some((cached, tc)) = self.coefficients.get() {
            if cached == spec {
                return Ok(tc.clone());
            }
        }
        let tc = CoefficientTrajectory::from_fields(self.times.clone(), &self.fields, spec)?;
        let _ = self.coefficients.set((*spec, tc.clone()));
        Ok(tc)
    }

    /// Tent norm with the outer `1/q` root, over every cube level of the window.
    pub fn tent_norm(&self, spec: &BasisSpec, params: &SpaceParams) -> Result<f64> {
        let tc = self.coefficients(spec)?;
        let levels = cube_levels(&tc.sets()[0]);
        Ok(tent_norm(&tc, params, &levels)?.value.powf(1.0 / params.q))
    }

    /// Largest `sup|∇·u|` over the samples.
    pub fn max_divergence(&self) -> Result<f64> {
        let values = self
            .fields
            .par_iter()
            .map(max_divergence)
            .collect::<Result<Vec<_>>>()?;
        Ok(values.into_iter().fold(0.0, f64::max))
    }

    /// `max_i ‖u(t_i)‖_{L²}`.
    pub fn sup_l2(&self) -> f64 {
        self.fields.iter().map(|f| f.l2_norm()).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Trajectory> {
        if self.times != other.times {
            return Err(invalid("trajectories are sampled at different times"));
        }
        let fields = self
            .fields
            .iter()
            .zip(&other.fields)
            .map(|(a, b)| a.sub(b))
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(self.times.clone(), fields, self.offset)
    }
}
