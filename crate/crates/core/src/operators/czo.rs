use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::C64;
use crate::meyer_wavelet::{analyze_shell, synthesize, BasisSpec, CoefficientSet, WaveletIndex};

use super::riesz;

/// Largest number of `(row, col)` pairs [`czo_matrix`] will assemble.
pub const MAX_CZO_PAIRS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CzoOperator {
    Identity,
    /// Riesz transform along a 0-based axis.
    Riesz(usize),
}

/// `⟨T Φ_col, Φ_row⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CzoMatrixEntry {
    pub row: WaveletIndex,
    pub col: WaveletIndex,
    pub value: C64,
}

/// Every detail index of the window, ordered by scale, type, then position.
pub fn czo_window_indices(spec: &BasisSpec) -> Vec<WaveletIndex> {
    let mut out = Vec::new();
    for j in spec.j_min..=spec.j_max {
        let side = spec.positions(j) as i64;
        for eps in spec.detail_types() {
            for lin in 0..side.pow(spec.dim as u32) {
                let mut k = [0i64; 3];
                let mut rest = lin;
                for axis in (0..spec.dim).rev() {
                    k[axis] = rest % side;
                    rest /= side;
                }
                out.push(WaveletIndex { eps, j, k });
            }
        }
    }
    out
}

/// Wavelet matrix of `op` over every pair of detail indices in the window.
pub fn czo_matrix(op: CzoOperator, spec: &BasisSpec) -> Result<Vec<CzoMatrixEntry>> {
    let indices = czo_window_indices(spec);
    let pairs = indices.len() * indices.len();
    if pairs > MAX_CZO_PAIRS {
        return Err(invalid(format!(
            "window has {} indices ({pairs} pairs), limit is {MAX_CZO_PAIRS} pairs",
            indices.len()
        )));
    }
    if let CzoOperator::Riesz(l) = op {
        if l >= spec.dim {
            return Err(invalid(format!("Riesz axis {l} out of range for dimension {}", spec.dim)));
        }
    }
    let grid = spec.grid();
    let mut shells: Vec<(i32, u8)> = indices.iter().map(|i| (i.j, i.eps)).collect();
    shells.dedup();
    let columns = indices
        .par_iter()
        .map(|&col| {
            let phi = synthesize(&CoefficientSet::single(*spec, col, 1.0)?, spec)?;
            let image = match op {
                CzoOperator::Identity => phi,
                CzoOperator::Riesz(l) => riesz(&phi, l)?,
            };
            let mut entries = Vec::with_capacity(indices.len());
            for &(j, eps) in &shells {
                let values = analyze_shell(image.component(0), &grid, j, eps)?;
                for row in indices.iter().filter(|i| i.j == j && i.eps == eps) {
                    let side = spec.positions(j);
                    let lin = row.k[..spec.dim].iter().fold(0usize, |a, &k| a * side + k as usize);
                    entries.push(CzoMatrixEntry {
                        row: *row,
                        col,
                        value: values[lin],
                    });
                }
            }
            Ok(entries)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(columns.into_iter().flatten().collect())
}

/// `|k2^{−j} − k'2^{−j'}|` in lattice units, minimal image on a box of side `2^J`.
fn periodic_distance(spec: &BasisSpec, a: &WaveletIndex, b: &WaveletIndex) -> f64 {
    let period = spec.lattice_period();
    (0..spec.dim)
        .map(|axis| {
            let x = a.k[axis] as f64 * 2f64.powi(-a.j);
            let y = b.k[axis] as f64 * 2f64.powi(-b.j);
            let d = (x - y).rem_euclid(period);
            let d = d.min(period - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CzoDecayReport {
    pub n0: f64,
    /// Max over entries of `|a|` times the reciprocal of the decay envelope.
    pub constant: f64,
    pub argmax: Option<(WaveletIndex, WaveletIndex)>,
    /// Same maximum restricted to `row == col`.
    pub diagonal_constant: f64,
    pub entries: usize,
}

/// Empirical constant in
/// `|a| ≤ C 2^{−|j−j'|(n/2+N₀)} ((2^{−j}+2^{−j'}) / (2^{−j}+2^{−j'}+|k2^{−j}−k'2^{−j'}|))^{n+N₀}`.
pub fn czo_decay_check(entries: &[CzoMatrixEntry], n0: f64, spec: &BasisSpec) -> CzoDecayReport {
    let n = spec.dim as f64;
    let mut constant: f64 = 0.0;
    let mut diagonal: f64 = 0.0;
    let mut argmax = None;
    for e in entries {
        let (j, jp) = (e.row.j, e.col.j);
        let size = 2f64.powi(-j) + 2f64.powi(-jp);
        let dist = periodic_distance(spec, &e.row, &e.col);
        let ratio = e.value.norm()
            * 2f64.powf((j - jp).abs() as f64 * (n / 2.0 + n0))
            * ((size + dist) / size).powf(n + n0);
        if ratio > constant {
            constant = ratio;
            argmax = Some((e.row, e.col));
        }
        if e.row == e.col {
            diagonal = diagonal.max(ratio);
        }
    }
    CzoDecayReport {
        n0,
        constant,
        argmax,
        diagonal_constant: diagonal,
        entries: entries.len(),
    }
}

/// Slope of `−log max|a|` against `log(1 + |k − k'|)` over same-scale, same-type
/// entries at scale `j`, using distances whose largest entry exceeds `floor`.
pub fn fitted_decay_power(entries: &[CzoMatrixEntry], spec: &BasisSpec, j: i32, floor: f64) -> Option<f64> {
    let mut by_distance: Vec<(f64, f64)> = Vec::new();
    for e in entries
        .iter()
        .filter(|e| e.row.j == j && e.col.j == j && e.row.eps == e.col.eps && e.row != e.col)
    {
        let d = periodic_distance(spec, &e.row, &e.col) * 2f64.powi(j);
        match by_distance.iter_mut().find(|(x, _)| (*x - d).abs() < 1e-9) {
            Some(slot) => slot.1 = slot.1.max(e.value.norm()),
            None => by_distance.push((d, e.value.norm())),
        }
    }
    let pts: Vec<(f64, f64)> = by_distance
        .into_iter()
        .filter(|&(_, a)| a > floor)
        .map(|(d, a)| ((1.0 + d).ln(), a.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

#[derive(Serialize)]
struct CsvRow {
    j: i32,
    k: String,
    j_prime: i32,
    k_prime: String,
    eps: u8,
    eps_prime: u8,
    re: f64,
    im: f64,
}

fn join(k: &[i64]) -> String {
    k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_czo_csv(path: impl AsRef<Path>, entries: &[CzoMatrixEntry], dim: usize) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for e in entries {
        w.serialize(CsvRow {
            j: e.row.j,
            k: join(&e.row.k[..dim]),
            j_prime: e.col.j,
            k_prime: join(&e.col.k[..dim]),
            eps: e.row.eps,
            eps_prime: e.col.eps,
            re: e.value.re,
            im: e.value.im,
        })?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
