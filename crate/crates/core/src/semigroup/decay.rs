//! Empirical constants for the two-regime decay of evolved wavelet coefficients.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::function_spaces::{log_time_grid, CoefficientTrajectory};
use crate::meyer_wavelet::{synthesize, BasisSpec, CoefficientSet};

use super::semigroup_trajectory;

/// Range of `t2^{2jβ}` used to fit the exponential rate and to check the large-time bound.
pub const FIT_RANGE: (f64, f64) = (1.0, 10.0);

/// Coefficient magnitudes below this fraction of the largest input are ignored.
const FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub weight_exp: u32,
    /// Fitted exponential rate in `t2^{2jβ}`.
    pub rate: f64,
    /// Max of `|a(t)| / (e^{−rate·τ} S)` over `τ = t2^{2jβ}` in [`FIT_RANGE`].
    pub large_time_constant: f64,
    /// Same ratio over every sampled `τ ≥ 1`.
    pub large_time_constant_all: f64,
    /// Max of `|a(t)| / S` over `0 < τ < 1`.
    pub small_time_constant: f64,
    pub samples_large: usize,
    pub samples_small: usize,
    /// Set when a regime has no samples or the fitted rate is not positive.
    pub partial: bool,
    pub flags: Vec<String>,
}

/// Log grid reaching from well inside the short-time regime of the finest shell
/// past `t2^{2jβ} = 10` for the coarsest one.
pub fn decay_time_grid(spec: &BasisSpec, beta: f64, per_octave: usize) -> Result<Vec<f64>> {
    let t_min = 0.05 * 2f64.powf(-2.0 * beta * spec.j_max as f64);
    let t_max = 12.0 * 2f64.powf(-2.0 * beta * spec.j_min as f64);
    log_time_grid(t_min, t_max, per_octave)
}

/// Minimal-image Euclidean distance between `2^{j−j'}k'` and `k` on the level-`j` torus.
fn spatial_distance(spec: &BasisSpec, j: i32, k: &[i64], jp: i32, kp: &[i64]) -> f64 {
    let period = spec.positions(j) as f64;
    let ratio = 2f64.powi(j - jp);
    k.iter()
        .zip(kp)
        .map(|(&a, &b)| {
            let d = (ratio * b as f64 - a as f64).rem_euclid(period);
            let d = d.min(period - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Checks `|a^ε_{j,k}(t)| ≤ C e^{−c̃ t2^{2jβ}} S_{j,k}` for `t2^{2jβ} ≥ 1` and
/// `|a^ε_{j,k}(t)| ≤ C S_{j,k}` below, where
/// `S_{j,k} = Σ_{|j−j'|≤1} Σ_{ε',k'} |a^{ε'}_{j',k'}(0)| (1 + |2^{j−j'}k' − k|)^{−N}`.
pub fn decay_bound_check(coeffs: &CoefficientSet, beta: f64, times: &[f64], weight_exp: u32) -> Result<DecayReport> {
    let spec = *coeffs.spec();
    if (weight_exp as usize) < 2 * spec.dim + 1 {
        return Err(invalid(format!(
            "spatial weight exponent {weight_exp} must be at least 2n + 1 = {}",
            2 * spec.dim + 1
        )));
    }
    let mut flags = Vec::new();
    let input_max = coeffs
        .iter_all()
        .filter(|(_, idx, _)| idx.eps != 0)
        .map(|(_, _, z)| z.norm())
        .fold(0.0, f64::max);
    if input_max == 0.0 {
        flags.push("zero input: ratios are vacuous".into());
        return Ok(DecayReport {
            weight_exp,
            rate: 0.0,
            large_time_constant: 0.0,
            large_time_constant_all: 0.0,
            small_time_constant: 0.0,
            samples_large: 0,
            samples_small: 0,
            partial: true,
            flags,
        });
    }
    let floor = FLOOR * input_max;
    let field = synthesize(coeffs, &spec)?;
    let traj: CoefficientTrajectory = semigroup_trajectory(&field, beta, times, &spec)?;

    // Input detail coefficients per component and scale.
    let mut inputs: HashMap<(usize, i32), Vec<([i64; 3], f64)>> = HashMap::new();
    for (c, idx, z) in coeffs.iter_all() {
        if idx.eps != 0 && z.norm() > 0.0 {
            inputs.entry((c, idx.j)).or_default().push((idx.k, z.norm()));
        }
    }
    let dim = spec.dim;
    let mut envelope: HashMap<(usize, i32, [i64; 3]), f64> = HashMap::new();
    let mut envelope_at = |c: usize, j: i32, k: [i64; 3]| -> f64 {
        *envelope.entry((c, j, k)).or_insert_with(|| {
            (j - 1..=j + 1)
                .filter_map(|jp| inputs.get(&(c, jp)).map(|v| (jp, v)))
                .flat_map(|(jp, v)| v.iter().map(move |(kp, a)| (jp, kp, a)))
                .map(|(jp, kp, a)| {
                    let d = spatial_distance(&spec, j, &k[..dim], jp, &kp[..dim]);
                    a * (1.0 + d).powi(-(weight_exp as i32))
                })
                .sum()
        })
    };

    // Samples (group, τ, |a|, S).
    struct Sample {
        group: (usize, u8, i32, [i64; 3]),
        tau: f64,
        abs: f64,
        env: f64,
    }
    let mut samples = Vec::new();
    let mut unbounded = 0usize;
    for (&t, set) in traj.times().iter().zip(traj.sets()) {
        if t <= 0.0 {
            continue;
        }
        for (c, idx, z) in set.iter_all() {
            if idx.eps == 0 || z.norm() <= floor {
                continue;
            }
            let env = envelope_at(c, idx.j, idx.k);
            if env == 0.0 {
                unbounded += 1;
                continue;
            }
            samples.push(Sample {
                group: (c, idx.eps, idx.j, idx.k),
                tau: t * 2f64.powf(2.0 * beta * idx.j as f64),
                abs: z.norm(),
                env,
            });
        }
    }
    if unbounded > 0 {
        flags.push(format!("{unbounded} samples outside the |j - j'| <= 1 envelope"));
    }

    // Pooled within-group slope of ln|a| against τ.
    let mut groups: HashMap<(usize, u8, i32, [i64; 3]), Vec<(f64, f64)>> = HashMap::new();
    for s in samples.iter().filter(|s| s.tau >= FIT_RANGE.0 && s.tau <= FIT_RANGE.1) {
        groups.entry(s.group).or_default().push((s.tau, s.abs.ln()));
    }
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for pts in groups.values().filter(|p| p.len() >= 2) {
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
        for &(x, y) in pts {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
    }
    let rate = if sxx > 0.0 { -sxy / sxx } else { 0.0 };
    if sxx == 0.0 {
        flags.push("no coefficient has two samples in the fit range".into());
    } else if rate <= 0.0 {
        flags.push(format!("fitted rate {rate} is not positive"));
    }

    let (mut large, mut large_all, mut small) = (0.0f64, 0.0f64, 0.0f64);
    let (mut n_large, mut n_small) = (0, 0);
    for s in &samples {
        if s.tau >= 1.0 {
            let ratio = s.abs / ((-rate * s.tau).exp() * s.env);
            large_all = large_all.max(ratio);
            if s.tau <= FIT_RANGE.1 {
                large = large.max(ratio);
                n_large += 1;
            }
        } else {
            small = small.max(s.abs / s.env);
            n_small += 1;
        }
    }
    if n_large == 0 {
        flags.push("no samples with t 2^{2j beta} in the large-time range".into());
    }
    if n_small == 0 {
        flags.push("no samples with t 2^{2j beta} < 1".into());
    }
    Ok(DecayReport {
        weight_exp,
        rate,
        large_time_constant: large,
        large_time_constant_all: large_all,
        small_time_constant: small,
        samples_large: n_large,
        samples_small: n_small,
        partial: n_large == 0 || n_small == 0 || rate <= 0.0,
        flags,
    })
}
