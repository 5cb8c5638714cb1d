//! Tent-space functionals of time-sampled coefficient trajectories.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::field::SpectralField;
use crate::meyer_wavelet::{analyze, analyze_shell, finest_scaling_scale, synthesize, BasisSpec, CoefficientSet};

use super::cells::{cube_at, cube_count, cube_linear, CellSums};
use super::params::{DyadicCube, SpaceParams};
use super::report::{NormReport, Witness};

/// Coefficient sets sampled at strictly increasing times `t ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTrajectory {
    times: Vec<f64>,
    sets: Vec<CoefficientSet>,
}

impl CoefficientTrajectory {
    pub fn new(times: Vec<f64>, sets: Vec<CoefficientSet>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("empty time grid"));
        }
        if times.len() != sets.len() {
            return Err(invalid(format!("{} times for {} coefficient sets", times.len(), sets.len())));
        }
        if times[0] < 0.0 || !times.iter().all(|t| t.is_finite()) {
            return Err(invalid("sample times must be finite and nonnegative"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("sample times must be strictly increasing"));
        }
        let spec = *sets[0].spec();
        if sets.iter().any(|s| *s.spec() != spec) {
            return Err(invalid("coefficient sets use different windows"));
        }
        let sets = sets
            .into_iter()
            .zip(&times)
            .map(|(s, &t)| s.with_time(t))
            .collect();
        Ok(CoefficientTrajectory { times, sets })
    }

    /// Analyzes each field in the given window.
    pub fn from_fields(times: Vec<f64>, fields: &[SpectralField], spec: &BasisSpec) -> Result<Self> {
        let sets = fields
            .par_iter()
            .map(|f| analyze(f, spec).map(|a| a.coefficients))
            .collect::<Result<Vec<_>>>()?;
        Self::new(times, sets)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sets(&self) -> &[CoefficientSet] {
        &self.sets
    }

    pub fn spec(&self) -> &BasisSpec {
        self.sets[0].spec()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn scaled(&self, a: f64) -> Self {
        CoefficientTrajectory {
            times: self.times.clone(),
            sets: self.sets.iter().map(|s| s.scaled(a)).collect(),
        }
    }
}

/// `t_k = t_min·2^{k/per_octave}` for `t_k < t_max`, closed by `t_max` itself.
pub fn log_time_grid(t_min: f64, t_max: f64, per_octave: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0 && t_max >= t_min && per_octave > 0 && t_max.is_finite()) {
        return Err(invalid(format!(
            "log grid needs 0 < t_min <= t_max and per_octave > 0 (got {t_min}, {t_max}, {per_octave})"
        )));
    }
    let mut out = Vec::new();
    let mut k = 0;
    loop {
        let t = t_min * 2f64.powf(k as f64 / per_octave as f64);
        if t >= t_max * (1.0 - 1e-12) {
            break;
        }
        out.push(t);
        k += 1;
    }
    out.push(t_max);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TentKind {
    I,
    II,
    III,
    IV,
}

impl TentKind {
    pub const ALL: [TentKind; 4] = [TentKind::I, TentKind::II, TentKind::III, TentKind::IV];

    pub fn name(self) -> &'static str {
        match self {
            TentKind::I => "tent_I",
            TentKind::II => "tent_II",
            TentKind::III => "tent_III",
            TentKind::IV => "tent_IV",
        }
    }

    fn instantaneous(self) -> bool {
        matches!(self, TentKind::I | TentKind::II)
    }
}

impl fmt::Display for TentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `∫_lo^hi g(t) dt/t` from samples at positive increasing `ts`.
///
/// Between samples `g` is interpolated as a power of `t` (linearly where a sample
/// vanishes); below the first sample `g ∝ t^{tail}`. Returns the integral and
/// whether `hi` lay beyond the last sample.
pub(crate) fn integrate_dt_over_t(ts: &[f64], g: &[f64], lo: f64, hi: f64, tail: f64) -> (f64, bool) {
    if ts.is_empty() || hi <= lo {
        return (0.0, false);
    }
    let last = *ts.last().unwrap();
    let truncated = hi > last * (1.0 + 1e-12);
    let hi = hi.min(last);
    let mut total = 0.0;
    let t0 = ts[0];
    if lo < t0 && g[0] != 0.0 {
        let b = hi.min(t0);
        total += if tail > 0.0 {
            g[0] / tail * ((b / t0).powf(tail) - (lo / t0).powf(tail))
        } else {
            g[0] * (b / lo).ln()
        };
    }
    for i in 0..ts.len() - 1 {
        let (ta, tb) = (ts[i], ts[i + 1]);
        let (a, b) = (lo.max(ta), hi.min(tb));
        if b <= a {
            continue;
        }
        let (sa, sb) = (ta.ln(), tb.ln());
        let (u1, u2) = (a.ln(), b.ln());
        let (ga, gb) = (g[i], g[i + 1]);
        total += if ga > 0.0 && gb > 0.0 {
            let alpha = (gb / ga).ln() / (sb - sa);
            if alpha == 0.0 {
                ga * (u2 - u1)
            } else {
                ga * (alpha * (u1 - sa)).exp() * (alpha * (u2 - u1)).exp_m1() / alpha
            }
        } else {
            let at = |u: f64| ga + (gb - ga) * (u - sa) / (sb - sa);
            0.5 * (u2 - u1) * (at(u1) + at(u2))
        };
    }
    (total, truncated)
}

struct TentEval<'a> {
    tc: &'a CoefficientTrajectory,
    params: &'a SpaceParams,
    sums: Vec<CellSums>,
    /// Positive sample times and their indices.
    positive: Vec<(usize, f64)>,
}

struct CubeValue {
    value: f64,
    time: Option<usize>,
    terms: Vec<(i32, f64)>,
    truncated: bool,
}

impl<'a> TentEval<'a> {
    fn new(tc: &'a CoefficientTrajectory, params: &'a SpaceParams) -> Self {
        let sums = tc.sets.par_iter().map(|s| CellSums::new(s, params.p)).collect();
        let positive = tc
            .times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0.0)
            .map(|(i, &t)| (i, t))
            .collect();
        TentEval {
            tc,
            params,
            sums,
            positive,
        }
    }

    fn spec(&self) -> &BasisSpec {
        self.tc.spec()
    }

    fn prefactor_q(&self, j0: i32) -> f64 {
        let n = self.spec().dim as f64;
        2f64.powf(-n * j0 as f64 * self.params.q * self.params.cube_exponent(self.spec().dim))
    }

    fn shell_weight_q(&self, j: i32) -> f64 {
        2f64.powf(j as f64 * self.params.q * self.params.shell_exponent(self.spec().dim))
    }

    /// `t 2^{2jβ}`.
    fn scaled_time(&self, t: f64, j: i32) -> f64 {
        t * 2f64.powf(2.0 * j as f64 * self.params.beta)
    }

    fn shells(&self, j0: i32) -> std::ops::RangeInclusive<i32> {
        j0.max(self.spec().j_min)..=self.spec().j_max
    }

    fn instant_terms(&self, kind: TentKind, j0: i32, lin: usize, i: usize) -> Vec<(i32, f64)> {
        let t = self.tc.times[i];
        let pq = self.params.q / self.params.p;
        let pref = self.prefactor_q(j0);
        self.shells(j0)
            .filter_map(|j| {
                let tau = self.scaled_time(t, j);
                let s = self.sums[i].get(j, j0, lin);
                let inner = match kind {
                    TentKind::I if tau >= 1.0 => s * tau.powf(self.params.m),
                    TentKind::II if tau < 1.0 => s,
                    _ => return None,
                };
                Some((j, pref * self.shell_weight_q(j) * inner.powf(pq)))
            })
            .collect()
    }

    fn integral_terms(&self, kind: TentKind, j0: i32, lin: usize) -> (Vec<(i32, f64)>, bool) {
        let pq = self.params.q / self.params.p;
        let pref = self.prefactor_q(j0);
        let beta = self.params.beta;
        let ts: Vec<f64> = self.positive.iter().map(|p| p.1).collect();
        let mut truncated = false;
        let terms = self
            .shells(j0)
            .map(|j| {
                let (power, lo, hi) = match kind {
                    TentKind::III => (
                        self.params.m,
                        2f64.powf(-2.0 * j as f64 * beta),
                        2f64.powf(-2.0 * j0 as f64 * beta),
                    ),
                    _ => (self.params.m_prime, 0.0, 2f64.powf(-2.0 * j as f64 * beta)),
                };
                let g: Vec<f64> = self
                    .positive
                    .iter()
                    .map(|&(i, t)| self.scaled_time(t, j).powf(power) * self.sums[i].get(j, j0, lin))
                    .collect();
                let (integral, cut) = integrate_dt_over_t(&ts, &g, lo, hi, power);
                truncated |= cut && g.iter().any(|&v| v > 0.0);
                (j, pref * self.shell_weight_q(j) * integral.powf(pq))
            })
            .collect();
        (terms, truncated)
    }

    fn cube_value(&self, kind: TentKind, j0: i32, lin: usize) -> CubeValue {
        if kind.instantaneous() {
            let mut best = CubeValue {
                value: 0.0,
                time: Some(0),
                terms: Vec::new(),
                truncated: false,
            };
            for i in 0..self.tc.len() {
                let terms = self.instant_terms(kind, j0, lin, i);
                let value: f64 = terms.iter().map(|t| t.1).sum();
                if value > best.value {
                    best = CubeValue {
                        value,
                        time: Some(i),
                        terms,
                        truncated: false,
                    };
                }
            }
            best
        } else {
            let (terms, truncated) = self.integral_terms(kind, j0, lin);
            CubeValue {
                value: terms.iter().map(|t| t.1).sum(),
                time: None,
                terms,
                truncated,
            }
        }
    }
}

fn usable_levels(spec: &BasisSpec, levels: &[i32], warnings: &mut Vec<String>) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::new();
    for &j0 in levels {
        if j0 < -spec.box_exp {
            warnings.push(format!("cube level {j0} is larger than the box; skipped"));
        } else if j0 > spec.j_max {
            warnings.push(format!("cube level {j0} is finer than the finest shell {}; skipped", spec.j_max));
        } else if !out.contains(&j0) {
            out.push(j0);
        }
    }
    out.sort_unstable();
    out
}

/// Supremum of one tent functional over the cubes of the given levels (and the
/// sampled times for `I`, `II`). Values carry no outer root.
pub fn tent_functional(
    tc: &CoefficientTrajectory,
    params: &SpaceParams,
    kind: TentKind,
    levels: &[i32],
) -> Result<NormReport> {
    params.validate()?;
    if levels.is_empty() {
        return Err(invalid("empty cube grid"));
    }
    let spec = *tc.spec();
    let mut warnings = Vec::new();
    let levels = usable_levels(&spec, levels, &mut warnings);
    let eval = TentEval::new(tc, params);
    let cubes: Vec<(i32, usize)> = levels
        .iter()
        .flat_map(|&j0| (0..cube_count(&spec, j0)).map(move |lin| (j0, lin)))
        .collect();
    if cubes.is_empty() || eval.sums.iter().all(|s| s.is_empty()) {
        let cube = DyadicCube::new(levels.first().copied().unwrap_or(-spec.box_exp), &vec![0; spec.dim]);
        let t = kind.instantaneous().then(|| tc.times[0]);
        let mut r = NormReport::zero(kind.name(), cube, t);
        r.warnings = warnings;
        return Ok(r);
    }
    let values: Vec<CubeValue> = cubes
        .par_iter()
        .map(|&(j0, lin)| eval.cube_value(kind, j0, lin))
        .collect();
    if values.iter().any(|v| v.truncated) {
        warnings.push(format!(
            "time integrals truncated at the last sample t = {}",
            tc.times.last().unwrap()
        ));
    }
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.value > values[best].value {
            best = i;
        }
    }
    let (j0, lin) = cubes[best];
    let win = &values[best];
    Ok(NormReport {
        functional: kind.name().into(),
        value: win.value,
        witness: Witness {
            cube: cube_at(&spec, j0, lin),
            t: win.time.map(|i| tc.times[i]),
        },
        shells: win.terms.iter().filter(|t| t.1 > 0.0).cloned().collect::<BTreeMap<_, _>>(),
        warnings,
    })
}

pub fn tent_i(tc: &CoefficientTrajectory, params: &SpaceParams, levels: &[i32]) -> Result<NormReport> {
    tent_functional(tc, params, TentKind::I, levels)
}

pub fn tent_ii(tc: &CoefficientTrajectory, params: &SpaceParams, levels: &[i32]) -> Result<NormReport> {
    tent_functional(tc, params, TentKind::II, levels)
}

pub fn tent_iii(tc: &CoefficientTrajectory, params: &SpaceParams, levels: &[i32]) -> Result<NormReport> {
    tent_functional(tc, params, TentKind::III, levels)
}

pub fn tent_iv(tc: &CoefficientTrajectory, params: &SpaceParams, levels: &[i32]) -> Result<NormReport> {
    tent_functional(tc, params, TentKind::IV, levels)
}

/// One functional evaluated at a given cube and, for `I`/`II`, a given sample time.
pub fn tent_value_at(
    tc: &CoefficientTrajectory,
    params: &SpaceParams,
    kind: TentKind,
    cube: &DyadicCube,
    t: Option<f64>,
) -> Result<f64> {
    let spec = tc.spec();
    let lin = cube_linear(spec, cube)
        .ok_or_else(|| invalid(format!("cube {cube:?} is not a dyadic cube of the box")))?;
    if cube.j0 > spec.j_max {
        return Ok(0.0);
    }
    let eval = TentEval::new(tc, params);
    if kind.instantaneous() {
        let t = t.ok_or_else(|| invalid(format!("{kind} needs a sample time")))?;
        let i = tc
            .times
            .iter()
            .position(|&s| s == t)
            .ok_or_else(|| invalid(format!("t = {t} is not a sample time")))?;
        Ok(eval.instant_terms(kind, cube.j0, lin, i).iter().map(|t| t.1).sum())
    } else {
        Ok(eval.integral_terms(kind, cube.j0, lin).0.iter().map(|t| t.1).sum())
    }
}

/// The largest of the four functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TentNorm {
    pub value: f64,
    pub dominant: TentKind,
    pub parts: Vec<NormReport>,
}

impl TentNorm {
    pub fn part(&self, kind: TentKind) -> &NormReport {
        &self.parts[kind as usize]
    }

    pub fn dominant_report(&self) -> &NormReport {
        self.part(self.dominant)
    }
}

pub fn tent_norm(tc: &CoefficientTrajectory, params: &SpaceParams, levels: &[i32]) -> Result<TentNorm> {
    let parts = TentKind::ALL
        .iter()
        .map(|&k| tent_functional(tc, params, k, levels))
        .collect::<Result<Vec<_>>>()?;
    let mut dominant = TentKind::I;
    for &k in &TentKind::ALL {
        if parts[k as usize].value > parts[dominant as usize].value {
            dominant = k;
        }
    }
    Ok(TentNorm {
        value: parts[dominant as usize].value,
        dominant,
        parts,
    })
}

/// The two regime suprema of the weighted sup norm with exponent `τ > 0`:
/// `(t2^{2jβ})^τ 2^{nj/2} 2^{jγ}|a|` over `t2^{2jβ} ≥ 1`, and
/// `2^{nj/2} 2^{jγ}|a|` over `0 < t2^{2jβ} < 1`.
pub fn besov_infinity_parts(tc: &CoefficientTrajectory, gamma: f64, tau: f64, beta: f64) -> Result<(f64, f64)> {
    if !(tau > 0.0 && beta > 0.0 && gamma.is_finite()) {
        return Err(invalid(format!("need tau > 0 and beta > 0 (got {tau}, {beta})")));
    }
    let n = tc.spec().dim as f64;
    let mut large: f64 = 0.0;
    let mut small: f64 = 0.0;
    for (&t, set) in tc.times.iter().zip(&tc.sets) {
        if t <= 0.0 {
            continue;
        }
        for (_, idx, z) in set.iter_all() {
            if idx.eps == 0 {
                continue;
            }
            let j = idx.j as f64;
            let base = 2f64.powf(j * (n / 2.0 + gamma)) * z.norm();
            let scaled = t * 2f64.powf(2.0 * j * beta);
            if scaled >= 1.0 {
                large = large.max(scaled.powf(tau) * base);
            } else {
                small = small.max(base);
            }
        }
    }
    Ok((large, small))
}

/// Weighted sup norm of a trajectory. For `τ = 0` the scaling-function variant
/// `sup t^{−γ/(2β)} 2^{nj/2} |⟨a(t), Φ⁰_{j,k}⟩|` is used, with `j` running over
/// every scale the grid resolves from `j_min` up.
pub fn besov_infinity_norm(tc: &CoefficientTrajectory, gamma: f64, tau: f64, beta: f64) -> Result<f64> {
    if tau > 0.0 {
        let (a, b) = besov_infinity_parts(tc, gamma, tau, beta)?;
        return Ok(a + b);
    }
    if tau < 0.0 || beta <= 0.0 {
        return Err(invalid(format!("need tau >= 0 and beta > 0 (got {tau}, {beta})")));
    }
    let spec = *tc.spec();
    let grid = spec.grid();
    let n = spec.dim as f64;
    let finest = finest_scaling_scale(&grid);
    let per_time = tc
        .times
        .par_iter()
        .zip(&tc.sets)
        .filter(|(&t, _)| t > 0.0)
        .map(|(&t, set)| {
            let field = synthesize(set, &spec)?;
            let weight = t.powf(-gamma / (2.0 * beta));
            let mut best: f64 = 0.0;
            for j in spec.j_min..=finest {
                let scale = 2f64.powf(n * j as f64 / 2.0);
                for comp in field.components() {
                    let a = analyze_shell(comp, &grid, j, 0)?;
                    let top = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
                    best = best.max(weight * scale * top);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_time.into_iter().fold(0.0, f64::max))
}
