use crate::error::{Error, Result};
use crate::field::SpectralField;

use super::config::SolverConfig;
use super::duhamel::{nonlinear_term, Stepper};
use super::picard::check_initial_data;
use super::trajectory::Trajectory;

/// `φ1(z) = (e^z − 1)/z` and `φ2(z) = (e^z − 1 − z)/z²`.
fn phi12(z: f64) -> (f64, f64) {
    if z.abs() < 1e-2 {
        let phi1 = 1.0 + z / 2.0 + z * z / 6.0 + z.powi(3) / 24.0 + z.powi(4) / 120.0;
        let phi2 = 0.5 + z / 6.0 + z * z / 24.0 + z.powi(3) / 120.0 + z.powi(4) / 720.0;
        (phi1, phi2)
    } else {
        let em1 = z.exp_m1();
        (em1 / z, (em1 - z) / (z * z))
    }
}

struct StepFactors {
    decay: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
}

impl StepFactors {
    fn new(rates: &[f64], h: f64) -> Self {
        let mut decay = Vec::with_capacity(rates.len());
        let mut phi1 = Vec::with_capacity(rates.len());
        let mut phi2 = Vec::with_capacity(rates.len());
        for &r in rates {
            let z = -h * r;
            let (p1, p2) = phi12(z);
            decay.push(z.exp());
            phi1.push(h * p1);
            phi2.push(h * p2);
        }
        StepFactors { decay, phi1, phi2 }
    }
}

fn combine(base: &SpectralField, forcing: &SpectralField, decay: &[f64], weight: &[f64]) -> SpectralField {
    let mut out = base.clone();
    for c in 0..out.ncomp() {
        for (((z, f), d), w) in out
            .component_mut(c)
            .iter_mut()
            .zip(forcing.component(c))
            .zip(decay)
            .zip(weight)
        {
            *z = *z * d + f * w;
        }
    }
    out
}

/// Second-order exponential time differencing (Cox-Matthews) for
/// `∂_t u = −(−Δ)^β u − ℙ∇·(u⊗u)`, landing on the sample times of `cfg` with
/// steps no longer than `cfg.etd_dt`.
pub fn etd_march(a: &SpectralField, cfg: &SolverConfig) -> Result<Trajectory> {
    check_initial_data(a, cfg)?;
    let times = cfg.time_grid();
    if !cfg.nonlinear {
        return Trajectory::linear(a, cfg.beta, &times, cfg.time_offset());
    }
    let stepper = Stepper::new(cfg)?;
    let limit = stepper.dealias_limit();
    let forcing = |u: &SpectralField| -> Result<SpectralField> { Ok(nonlinear_term(u, u, limit)?.scaled(-1.0)) };
    let scale = a.l2_norm().max(f64::MIN_POSITIVE);
    let mut u = a.clone();
    let mut fields = vec![u.clone()];
    for w in times.windows(2) {
        let span = w[1] - w[0];
        let steps = (span / cfg.etd_dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let f = StepFactors::new(stepper.decay_rate(), h);
        let ones = vec![1.0; f.decay.len()];
        for step in 0..steps {
            let fu = forcing(&u)?;
            let predictor = combine(&u, &fu, &f.decay, &f.phi1);
            let correction = forcing(&predictor)?.sub(&fu)?;
            u = combine(&predictor, &correction, &ones, &f.phi2);
            let t = w[0] + (step + 1) as f64 * h;
            if !u.is_finite() {
                return Err(Error::NonFinite { node: t });
            }
            let growth = u.l2_norm() / scale;
            if growth > 10.0 {
                return Err(Error::Diverged { t, growth });
            }
        }
        fields.push(u.clone());
    }
    Trajectory::new(times, fields, cfg.time_offset())
}
