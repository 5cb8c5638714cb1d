//! Exhaustive checks of the dyadic-index inequalities used to bound the bilinear
//! term, in one dimension.
//!
//! A cube `Q_{j,k} = 2^{-j}[k, k+1)` sits in the enlarged parent of side
//! `2^{b-j}` (level `j − b`); the shifted copy by `w` parents is the block `w`
//! around `Q_{j,k}`. Every check reports the largest ratio of left to right side
//! over its enumeration window, which is the constant the inequality holds with.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationWindow {
    /// Largest `|j − j'|` enumerated.
    pub scale_gap: i32,
    /// Translations run over `|k|, |k'| ≤ k_max`.
    pub k_max: i64,
    /// Block shifts run over `|w| ≤ w_max`.
    pub w_max: i64,
    /// Enlargement exponent `b` of the parent cube.
    pub block_exp: i32,
    /// Decay power `N`.
    pub decay: f64,
    pub p: f64,
    /// Scale weight exponent `δ` of the scale-summed block bound.
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for EnumerationWindow {
    fn default() -> Self {
        EnumerationWindow {
            scale_gap: 3,
            k_max: 16,
            w_max: 8,
            block_exp: 8,
            decay: 2.0,
            p: 2.0,
            delta: 0.25,
            trials: 20,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub block_exp: i32,
    /// Number of index configurations (or coefficient draws) evaluated.
    pub cases: usize,
    /// Largest left/right ratio seen.
    pub constant: f64,
}

impl EnumerationWindow {
    fn translations(&self) -> impl Iterator<Item = i64> + Clone {
        -self.k_max..=self.k_max
    }

    /// Scales `j'` around `j` within the gap; cubes coarser than the parent fit in no block.
    fn scales(&self, j: i32, below: i32) -> std::ops::RangeInclusive<i32> {
        (j - below.min(self.scale_gap).min(self.block_exp))..=j + self.scale_gap
    }

    /// Block shift `w` with `Q_{j',k'}` inside block `w` around `Q_{j,k}`, if any.
    fn block_shift(&self, j: i32, k: i64, jp: i32, kp: i64) -> Option<i64> {
        let level = j - self.block_exp;
        if jp < level {
            return None;
        }
        Some(kp.div_euclid(1 << (jp - level)) - k.div_euclid(1 << self.block_exp))
    }

    fn bounded_shift(&self, j: i32, k: i64, jp: i32, kp: i64) -> Option<i64> {
        self.block_shift(j, k, jp, kp).filter(|w| w.abs() <= self.w_max)
    }

    fn weight(&self, x: f64) -> f64 {
        (1.0 + x.abs()).powf(-self.decay)
    }

    fn report(&self, name: &str, cases: usize, constant: f64) -> InequalityReport {
        InequalityReport {
            name: name.into(),
            block_exp: self.block_exp,
            cases,
            constant,
        }
    }

    fn random_coefficients(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.translations()
            .map(|_| if rng.random_bool(0.5) { rng.random::<f64>() } else { 0.0 })
            .collect()
    }

    fn index(&self, k: i64) -> usize {
        (k + self.k_max) as usize
    }

    /// `Σ_{k' ∈ block w} |a_{k'}|^p` for each `w`, coefficients on level `jp`.
    fn block_sums(&self, j: i32, k: i64, jp: i32, a: &[f64]) -> Vec<(i64, f64)> {
        let mut sums: std::collections::BTreeMap<i64, f64> = Default::default();
        for kp in self.translations() {
            let v = a[self.index(kp)];
            if v == 0.0 {
                continue;
            }
            if let Some(w) = self.block_shift(j, k, jp, kp) {
                *sums.entry(w).or_default() += v.abs().powf(self.p);
            }
        }
        sums.into_iter().collect()
    }
}

/// `(1+|2^{j−j'}k'−k|)^{−N} ≤ C (1+|w|)^{−N}` whenever `Q_{j',k'}` lies in block `w` of `Q_{j,k}`.
pub fn shift_decay_is_dominated_by_block_decay(win: &EnumerationWindow) -> InequalityReport {
    let (j, mut cases, mut worst) = (0, 0usize, 0f64);
    for jp in win.scales(j, win.scale_gap) {
        for k in win.translations() {
            for kp in win.translations() {
                let Some(w) = win.bounded_shift(j, k, jp, kp) else { continue };
                let shift = 2f64.powi(j - jp) * kp as f64 - k as f64;
                worst = worst.max(win.weight(shift) / win.weight(w as f64));
                cases += 1;
            }
        }
    }
    win.report("shift_decay_is_dominated_by_block_decay", cases, worst)
}

/// For `0 < j' − j'' ≤ 3`, `j ≤ j' + 5` and blocks `|w − w'| > 2`:
/// `(1+|2^{j'−j''}k''−k'|)^{−N} ≤ C 2^{N(j−j')} (1+|w−w'|)^{−N}`.
pub fn separated_blocks_force_cross_scale_decay(win: &EnumerationWindow) -> InequalityReport {
    let (j, mut cases, mut worst) = (0, 0usize, 0f64);
    for jp in win.scales(j, win.scale_gap) {
        for jpp in (jp - 3).max(*win.scales(j, win.scale_gap).start())..jp {
            if j > jp + 5 {
                continue;
            }
            for k in win.translations() {
                for kp in win.translations() {
                    let Some(w) = win.bounded_shift(j, k, jp, kp) else { continue };
                    for kpp in win.translations() {
                        let Some(wp) = win.bounded_shift(j, k, jpp, kpp) else { continue };
                        if (w - wp).abs() <= 2 {
                            continue;
                        }
                        let lhs = win.weight(2f64.powi(jp - jpp) * kpp as f64 - kp as f64);
                        let rhs = 2f64.powf(win.decay * (j - jp) as f64) * win.weight((w - wp) as f64);
                        worst = worst.max(lhs / rhs);
                        cases += 1;
                    }
                }
            }
        }
    }
    win.report("separated_blocks_force_cross_scale_decay", cases, worst)
}

/// Draws: every pair of unit coefficients plus `trials` random pairs.
fn coefficient_pairs(win: &EnumerationWindow) -> Vec<(Vec<f64>, Vec<f64>)> {
    let len = win.index(win.k_max) + 1;
    let unit = |i: usize| {
        let mut v = vec![0.0; len];
        v[i] = 1.0;
        v
    };
    let mut out: Vec<_> = (0..len).flat_map(|a| (0..len).map(move |b| (a, b))).map(|(a, b)| (unit(a), unit(b))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(win.seed);
    for _ in 0..win.trials {
        out.push((win.random_coefficients(&mut rng), win.random_coefficients(&mut rng)));
    }
    out
}

/// Hölder split of a same-scale neighbour sum into block `ℓ^p` and `ℓ^{p'}` norms:
/// `Σ |u_{k'}||v_{k''}|^{p−1}(1+|2^{j−j'}k'−k|)^{−8N}(1+|k'−k''|)^{−8N}
///  ≤ C Σ_{w,w'} (1+|w|)^{−N}(1+|w'|)^{−N} ‖u‖_{ℓ^p(w)} ‖v‖^{p−1}_{ℓ^p(w')}`.
pub fn neighbour_sum_splits_into_block_norms(win: &EnumerationWindow) -> InequalityReport {
    let j = 0;
    let pairs = coefficient_pairs(win);
    let (mut cases, mut worst) = (0usize, 0f64);
    let heavy = EnumerationWindow {
        decay: 8.0 * win.decay,
        ..*win
    };
    let p_dual = win.p / (win.p - 1.0);
    for jp in win.scales(j, win.scale_gap) {
        for k in win.translations() {
            for (u, v) in &pairs {
                let mut lhs = 0.0;
                for kp in win.translations().filter(|&kp| u[win.index(kp)] != 0.0) {
                    let near = heavy.weight(2f64.powi(j - jp) * kp as f64 - k as f64);
                    for kpp in win.translations().filter(|&kpp| v[win.index(kpp)] != 0.0) {
                        lhs += u[win.index(kp)].abs()
                            * v[win.index(kpp)].abs().powf(win.p - 1.0)
                            * near
                            * heavy.weight((kp - kpp) as f64);
                    }
                }
                if lhs == 0.0 {
                    continue;
                }
                let su = win.block_sums(j, k, jp, u);
                let sv = win.block_sums(j, k, jp, v);
                let mut rhs = 0.0;
                for (w, a) in &su {
                    for (wp, b) in &sv {
                        rhs += win.weight(*w as f64) * win.weight(*wp as f64) * a.powf(1.0 / win.p) * b.powf(1.0 / p_dual);
                    }
                }
                cases += 1;
                worst = worst.max(lhs / rhs);
            }
        }
    }
    win.report("neighbour_sum_splits_into_block_norms", cases, worst)
}

/// Summing block norms over the cubes of `Q_r = [0, 1)` and the scales `j' ≥ j − 5`
/// in the window costs a factor `2^{δ(j'−j)}`:
/// `Σ_{k ⊂ Q_r} (Σ_{j'} Σ_w (1+|w|)^{−N} ‖a_{j'}‖_{ℓ^p(w; j,k)})^p
///  ≤ C Σ_{j'} 2^{δ(j'−j)} Σ_w (1+|w|)^{−N} ‖a_{j'}‖^p_{ℓ^p(w; Q_r)}`.
pub fn scale_summed_block_norms_are_controlled(win: &EnumerationWindow) -> InequalityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(win.seed ^ 0x5eed);
    let (mut cases, mut worst) = (0usize, 0f64);
    for j in 0..=win.scale_gap {
        let scales: Vec<i32> = win.scales(j, 5).collect();
        for _ in 0..win.trials {
            let coeffs: Vec<Vec<f64>> = scales.iter().map(|_| win.random_coefficients(&mut rng)).collect();
            let mut lhs = 0.0;
            for k in 0..(1i64 << j) {
                let mut inner = 0.0;
                for (jp, a) in scales.iter().zip(&coeffs) {
                    for (w, s) in win.block_sums(j, k, *jp, a) {
                        inner += win.weight(w as f64) * s.powf(1.0 / win.p);
                    }
                }
                lhs += inner.powf(win.p);
            }
            let mut rhs = 0.0;
            for (jp, a) in scales.iter().zip(&coeffs) {
                // blocks around Q_r are those around its level-0 cube Q_{0,0}
                let blocks: f64 = win
                    .block_sums(0, 0, *jp, a)
                    .iter()
                    .map(|(w, s)| win.weight(*w as f64) * s)
                    .sum();
                rhs += 2f64.powf(win.delta * (jp - j) as f64) * blocks;
            }
            if lhs == 0.0 {
                continue;
            }
            cases += 1;
            worst = worst.max(lhs / rhs);
        }
    }
    win.report("scale_summed_block_norms_are_controlled", cases, worst)
}

/// For `j < j' + 2`, a same-scale pair sum splits into block norms with the
/// factor `2^{n(j'−j)(1−2/p)}`:
/// `Σ |u_{k'}||v_{k''}|(1+|2^{j−j'}k'−k|)^{−N}(1+|k'−k''|)^{−N}
///  ≤ C Σ_{w,w'} (1+|w|)^{−N}(1+|w−w'|)^{−N} 2^{(j'−j)(1−2/p)} ‖u‖_{ℓ^p(w)} ‖v‖_{ℓ^p(w')}`.
pub fn pair_sum_splits_with_scale_factor(win: &EnumerationWindow) -> InequalityReport {
    let j = 0;
    let pairs = coefficient_pairs(win);
    let (mut cases, mut worst) = (0usize, 0f64);
    for jp in win.scales(j, 1) {
        let factor = 2f64.powf((jp - j) as f64 * (1.0 - 2.0 / win.p));
        for k in win.translations() {
            for (u, v) in &pairs {
                let mut lhs = 0.0;
                for kp in win.translations().filter(|&kp| u[win.index(kp)] != 0.0) {
                    let near = win.weight(2f64.powi(j - jp) * kp as f64 - k as f64);
                    for kpp in win.translations().filter(|&kpp| v[win.index(kpp)] != 0.0) {
                        lhs += u[win.index(kp)].abs() * v[win.index(kpp)].abs() * near * win.weight((kp - kpp) as f64);
                    }
                }
                if lhs == 0.0 {
                    continue;
                }
                let su = win.block_sums(j, k, jp, u);
                let sv = win.block_sums(j, k, jp, v);
                let mut rhs = 0.0;
                for (w, a) in &su {
                    for (wp, b) in &sv {
                        rhs += win.weight(*w as f64) * win.weight((w - wp) as f64) * factor * (a * b).powf(1.0 / win.p);
                    }
                }
                cases += 1;
                worst = worst.max(lhs / rhs);
            }
        }
    }
    win.report("pair_sum_splits_with_scale_factor", cases, worst)
}

/// All five checks on one window.
pub fn check_all(win: &EnumerationWindow) -> Vec<InequalityReport> {
    vec![
        shift_decay_is_dominated_by_block_decay(win),
        separated_blocks_force_cross_scale_decay(win),
        neighbour_sum_splits_into_block_norms(win),
        scale_summed_block_norms_are_controlled(win),
        pair_sum_splits_with_scale_factor(win),
    ]
}
