use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::meyer_wavelet::{CoefficientSet, WaveletIndex};

use super::cells::{cube_at, cube_count, cube_linear, CellSums};
use super::params::{DyadicCube, SpaceParams};
use super::report::{NormReport, Witness};

/// `(Σ x_i^q)^{1/q}` evaluated relative to the largest term, so that a single
/// nonzero entry is returned unchanged.
pub(crate) fn lq_norm(xs: &[f64], q: f64) -> f64 {
    let top = xs.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    let s: f64 = xs.iter().map(|&x| (x / top).powf(q)).sum();
    top * s.powf(1.0 / q)
}

fn whole_box(set: &CoefficientSet) -> DyadicCube {
    let spec = set.spec();
    DyadicCube::new(-spec.box_exp, &vec![0; spec.dim])
}

/// Homogeneous Besov norm `‖f‖_{B^s_{p,q}}` from detail coefficients.
pub fn besov_norm(coeffs: &CoefficientSet, s: f64, p: f64, q: f64) -> Result<NormReport> {
    if !(p > 0.0 && q > 0.0 && s.is_finite()) {
        return Err(invalid(format!("besov indices s = {s}, p = {p}, q = {q}")));
    }
    let spec = *coeffs.spec();
    let sums = CellSums::new(coeffs, p);
    let cube = whole_box(coeffs);
    if sums.is_empty() {
        return Ok(NormReport::zero("besov", cube, None));
    }
    let n = spec.dim as f64;
    let w = s + n / 2.0 - n / p;
    let j0 = -spec.box_exp;
    let xs: Vec<(i32, f64)> = (spec.j_min..=spec.j_max)
        .map(|j| (j, 2f64.powf(j as f64 * w) * sums.get(j, j0, 0).powf(1.0 / p)))
        .collect();
    let values: Vec<f64> = xs.iter().map(|x| x.1).collect();
    Ok(NormReport {
        functional: "besov".into(),
        value: lq_norm(&values, q),
        witness: Witness { cube, t: None },
        shells: xs
            .into_iter()
            .filter(|x| x.1 > 0.0)
            .map(|(j, x)| (j, x.powf(q)))
            .collect(),
        warnings: Vec::new(),
    })
}

fn besovq_terms(sums: &CellSums, params: &SpaceParams, j0: i32, lin: usize) -> (f64, Vec<(i32, f64)>) {
    let spec = sums.spec();
    let w = params.shell_exponent(spec.dim);
    let pref = 2f64.powf(-(spec.dim as f64) * j0 as f64 * params.cube_exponent(spec.dim));
    let xs: Vec<(i32, f64)> = (j0.max(spec.j_min)..=spec.j_max)
        .map(|j| (j, 2f64.powf(j as f64 * w) * sums.get(j, j0, lin).powf(1.0 / params.p)))
        .collect();
    let values: Vec<f64> = xs.iter().map(|x| x.1).collect();
    (pref * lq_norm(&values, params.q), xs.into_iter().map(|(j, x)| (j, (pref * x).powf(params.q))).collect())
}

/// All dyadic cube levels of the box down to the finest shell.
pub fn cube_levels(coeffs: &CoefficientSet) -> Vec<i32> {
    let spec = coeffs.spec();
    (-spec.box_exp..=spec.j_max).collect()
}

/// Besov-Q norm: supremum over the box-aligned dyadic cubes of
/// `|Q|^{γ2/n−1/p} (Σ_{j ≥ j0} 2^{jq(γ1+n/2−n/p)} (Σ_{k ∈ Q} |a|^p)^{q/p})^{1/q}`.
///
/// Ties go to the coarsest cube, then the lexicographically smallest corner.
pub fn besovq_norm(coeffs: &CoefficientSet, params: &SpaceParams) -> Result<NormReport> {
    params.validate()?;
    let spec = *coeffs.spec();
    let sums = CellSums::new(coeffs, params.p);
    if sums.is_empty() {
        return Ok(NormReport::zero("besovq", whole_box(coeffs), None));
    }
    let cubes: Vec<(i32, usize)> = cube_levels(coeffs)
        .into_iter()
        .flat_map(|j0| (0..cube_count(&spec, j0)).map(move |lin| (j0, lin)))
        .collect();
    let values: Vec<f64> = cubes
        .par_iter()
        .map(|&(j0, lin)| besovq_terms(&sums, params, j0, lin).0)
        .collect();
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    let (j0, lin) = cubes[best];
    let (value, shells) = besovq_terms(&sums, params, j0, lin);
    Ok(NormReport {
        functional: "besovq".into(),
        value,
        witness: Witness {
            cube: cube_at(&spec, j0, lin),
            t: None,
        },
        shells: shells.into_iter().filter(|s| s.1 > 0.0).collect::<BTreeMap<_, _>>(),
        warnings: Vec::new(),
    })
}

/// The Besov-Q functional evaluated on a single cube.
pub fn besovq_at(coeffs: &CoefficientSet, params: &SpaceParams, cube: &DyadicCube) -> Result<f64> {
    let spec = coeffs.spec();
    let lin = cube_linear(spec, cube)
        .ok_or_else(|| invalid(format!("cube {cube:?} is not a dyadic cube of the box")))?;
    if cube.j0 > spec.j_max {
        return Ok(0.0);
    }
    let sums = CellSums::new(coeffs, params.p);
    Ok(besovq_terms(&sums, params, cube.j0, lin).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub q_small: f64,
    pub q_large: f64,
    pub norm_small: f64,
    pub norm_large: f64,
    /// `norm(q_large) ≤ norm(q_small)`.
    pub holds: bool,
}

/// Compares the Besov-Q norms for two parameter sets differing only in `q`.
pub fn check_embedding(coeffs: &CoefficientSet, a: &SpaceParams, b: &SpaceParams) -> Result<EmbeddingCheck> {
    if a.with_q(b.q) != *b {
        return Err(invalid("embedding check needs parameters differing only in q"));
    }
    if a.q > b.q {
        return Err(invalid(format!("expected q_a <= q_b, got {} > {}", a.q, b.q)));
    }
    let norm_small = besovq_norm(coeffs, a)?.value;
    let norm_large = besovq_norm(coeffs, b)?.value;
    Ok(EmbeddingCheck {
        q_small: a.q,
        q_large: b.q,
        norm_small,
        norm_large,
        holds: norm_large <= norm_small,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub lambda_exp: i32,
    pub original: f64,
    pub scaled: f64,
    pub ratio: f64,
}

/// Coefficients of `2^{ℓ(γ2−γ1)} f(2^ℓ ·)`: each `(j, k)` moves to `(j + ℓ, k)` and
/// picks up `2^{ℓ(γ2−γ1)}` times the `L²` dilation factor `2^{−nℓ/2}`.
pub fn dilate(coeffs: &CoefficientSet, params: &SpaceParams, lambda_exp: i32) -> Result<CoefficientSet> {
    let spec = *coeffs.spec();
    let factor = 2f64.powf(lambda_exp as f64 * (params.gamma2 - params.gamma1 - spec.dim as f64 / 2.0));
    let mut out = CoefficientSet::new(spec, coeffs.ncomp());
    out.set_time(coeffs.time());
    for (comp, idx, z) in coeffs.iter_all() {
        let moved = WaveletIndex { j: idx.j + lambda_exp, ..idx };
        out.insert(comp, moved, z * factor).map_err(|e| match e {
            Error::OutsideWindow(s) => Error::OutsideWindow(format!("dilation by 2^{lambda_exp} leaves the window at {s}")),
            other => other,
        })?;
    }
    Ok(out)
}

/// Ratio of Besov-Q norms of the dyadically dilated and original coefficients.
pub fn scaling_check(coeffs: &CoefficientSet, params: &SpaceParams, lambda_exp: i32) -> Result<ScalingCheck> {
    let original = besovq_norm(coeffs, params)?.value;
    let scaled = besovq_norm(&dilate(coeffs, params, lambda_exp)?, params)?.value;
    let ratio = if original == 0.0 && scaled == 0.0 {
        1.0
    } else {
        scaled / original
    };
    Ok(ScalingCheck {
        lambda_exp,
        original,
        scaled,
        ratio,
    })
}
