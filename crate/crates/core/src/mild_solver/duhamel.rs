//! The bilinear Duhamel operator `B(u,v)(t) = ∫₀ᵗ e^{−(t−s)(−Δ)^β} ℙ∇·(u⊗v)(s) ds`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::field::{Grid, SpectralField};
use crate::operators::{leray_project, partial_derivative};

use super::config::SolverConfig;
use super::trajectory::Trajectory;

/// `ℙ∇·(u⊗v)`, component `i` being `ℙ Σ_l ∂_l(u_l v_i)`, with two-thirds dealiasing
/// of the inputs and of the result.
pub fn nonlinear_term(u: &SpectralField, v: &SpectralField, dealias_limit: i64) -> Result<SpectralField> {
    let grid = *u.grid();
    grid.check_same(v.grid())?;
    let n = grid.dim;
    if u.ncomp() != n || v.ncomp() != n {
        return Err(invalid(format!("nonlinear term needs {n}-component fields")));
    }
    let keep = dealias_limit + 1;
    let mut u = u.clone();
    let mut v = v.clone();
    u.truncate_modes(keep);
    v.truncate_modes(keep);
    let up = u.to_physical_real();
    let vp = v.to_physical_real();
    let mut out = SpectralField::zeros(grid, n);
    for l in 0..n {
        let products: Vec<Vec<f64>> = (0..n)
            .map(|i| up[l].iter().zip(&vp[i]).map(|(a, b)| a * b).collect())
            .collect();
        let flux = SpectralField::from_physical(grid, &products)?;
        out = out.add(&partial_derivative(&flux, l)?)?;
    }
    out.truncate_modes(keep);
    leray_project(&out)
}

/// Exact propagation and graded Gauss quadrature on one sample interval.
pub(crate) struct Stepper {
    grid: Grid,
    decay_rate: Vec<f64>,
    rate_max: f64,
    rule: Vec<(f64, f64)>,
    dealias_limit: i64,
}

impl Stepper {
    pub(crate) fn new(cfg: &SolverConfig) -> Result<Self> {
        let grid = cfg.spec.grid();
        let decay_rate: Vec<f64> = (0..grid.len())
            .map(|flat| grid.wavevector_norm(flat).powf(2.0 * cfg.beta))
            .collect();
        let limit = cfg.dealias_limit();
        let rate_max = (0..grid.len())
            .filter(|&flat| grid.modes(flat)[..grid.dim].iter().all(|m| m.abs() <= limit))
            .map(|flat| decay_rate[flat])
            .fold(0.0, f64::max);
        let degree = NonZeroUsize::new(cfg.quad_points).ok_or_else(|| invalid("quad_points must be positive"))?;
        let rule = GaussLegendre::new(degree)
            .as_node_weight_pairs()
            .to_vec();
        Ok(Stepper {
            grid,
            decay_rate,
            rate_max,
            rule,
            dealias_limit: limit,
        })
    }

    pub(crate) fn grid(&self) -> &Grid {
        &self.grid
    }

    pub(crate) fn decay_rate(&self) -> &[f64] {
        &self.decay_rate
    }

    pub(crate) fn dealias_limit(&self) -> i64 {
        self.dealias_limit
    }

    /// `e^{−dt(−Δ)^β} f` in place.
    pub(crate) fn propagate(&self, f: &mut SpectralField, dt: f64) {
        if dt == 0.0 {
            return;
        }
        for c in 0..f.ncomp() {
            f.component_mut(c)
                .par_iter_mut()
                .zip(&self.decay_rate)
                .for_each(|(z, &r)| *z *= (-dt * r).exp());
        }
    }

    /// Quadrature nodes on `[a, b]`: one Gauss block per sub-interval of a geometric
    /// grading toward `b`, fine enough that the stiffest retained mode changes by
    /// at most a factor `e` across the last block.
    pub(crate) fn nodes(&self, a: f64, b: f64) -> Vec<(f64, f64)> {
        let width = b - a;
        let levels = (self.rate_max * width).log2().ceil().clamp(0.0, 40.0) as i32;
        let mut cuts = vec![a];
        for k in 1..=levels {
            cuts.push(b - width * 2f64.powi(-k));
        }
        cuts.push(b);
        let mut out = Vec::with_capacity(cuts.len() * self.rule.len());
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for &(x, wt) in &self.rule {
                out.push((mid + half * x, half * wt));
            }
        }
        out
    }

    /// `∫_a^b e^{−(b−s)(−Δ)^β} g(s) ds`.
    pub(crate) fn interval_integral(
        &self,
        a: f64,
        b: f64,
        ncomp: usize,
        g: &(dyn Fn(f64) -> Result<SpectralField> + Sync),
    ) -> Result<SpectralField> {
        let nodes = self.nodes(a, b);
        let parts = nodes
            .par_iter()
            .map(|&(s, w)| {
                let mut value = g(s)?;
                if !value.is_finite() {
                    return Err(Error::NonFinite { node: s });
                }
                value.scale(w);
                self.propagate(&mut value, b - s);
                Ok(value)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut total = SpectralField::zeros(self.grid, ncomp);
        for p in &parts {
            total.axpy(1.0, p)?;
        }
        Ok(total)
    }
}

/// `B(u, v)` at each of `out_times`, built interval by interval: the value at the
/// previous breakpoint is carried forward exactly and the new interval is added
/// by quadrature. Breakpoints are the sample times of `u`, `v` and `out_times`.
pub fn duhamel_path(u: &Trajectory, v: &Trajectory, out_times: &[f64], cfg: &SolverConfig) -> Result<Vec<SpectralField>> {
    let stepper = Stepper::new(cfg)?;
    duhamel_path_with(&stepper, u, v, out_times)
}

pub(crate) fn duhamel_path_with(
    stepper: &Stepper,
    u: &Trajectory,
    v: &Trajectory,
    out_times: &[f64],
) -> Result<Vec<SpectralField>> {
    if out_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("output times must be nondecreasing"));
    }
    let t_max = u.t_max().min(v.t_max());
    if let Some(&t) = out_times.iter().find(|&&t| t < 0.0 || t > t_max * (1.0 + 1e-12)) {
        return Err(Error::OutsideTimeRange { t, t_max });
    }
    let Some(&t_last) = out_times.last() else {
        return Ok(Vec::new());
    };
    let mut cuts: Vec<f64> = u
        .times()
        .iter()
        .chain(v.times())
        .chain(out_times)
        .copied()
        .filter(|&t| t > 0.0 && t <= t_last)
        .collect();
    cuts.push(0.0);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let ncomp = u.fields()[0].ncomp();
    let limit = stepper.dealias_limit();
    let integrand = |s: f64| -> Result<SpectralField> { nonlinear_term(&u.at(s)?, &v.at(s)?, limit) };
    let mut current = SpectralField::zeros(*stepper.grid(), ncomp);
    let mut out = Vec::with_capacity(out_times.len());
    let mut next_out = 0;
    while next_out < out_times.len() && out_times[next_out] == 0.0 {
        out.push(current.clone());
        next_out += 1;
    }
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        stepper.propagate(&mut current, b - a);
        current.axpy(1.0, &stepper.interval_integral(a, b, ncomp, &integrand)?)?;
        while next_out < out_times.len() && out_times[next_out] == b {
            out.push(current.clone());
            next_out += 1;
        }
    }
    Ok(out)
}

/// `B(u, v)(t)` for a single time.
pub fn duhamel_bilinear(u: &Trajectory, v: &Trajectory, t: f64, cfg: &SolverConfig) -> Result<SpectralField> {
    Ok(duhamel_path(u, v, &[t], cfg)?.pop().unwrap())
}
