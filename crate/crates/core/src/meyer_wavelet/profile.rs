//! Frequency profiles `Ψ⁰`, `Ω` and the tensor wavelet symbols.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::C64;

const FLAT_EDGE: f64 = 2.0 * PI / 3.0;
const SUPPORT_EDGE: f64 = 4.0 * PI / 3.0;
const RADICAND_TOL: f64 = 1e-14;

/// Smooth step on `[0, 1]`: `ρ(x)/(ρ(x)+ρ(1−x))` with `ρ(x) = exp(−1/x)`.
pub fn meyer_ramp(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Position of `|ξ|` inside the transition band, mapped affinely onto `[0, 1]`.
fn band_position(xi: f64) -> f64 {
    3.0 * xi.abs() / (2.0 * PI) - 1.0
}

pub fn psi0(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= FLAT_EDGE {
        1.0
    } else if a >= SUPPORT_EDGE {
        0.0
    } else {
        (0.5 * PI * meyer_ramp(band_position(a))).cos()
    }
}

/// `sqrt(Ψ⁰(ξ/2)² − Ψ⁰(ξ)²)`, evaluated in closed form to avoid cancellation:
/// on the inner band `Ψ⁰(ξ/2) = 1`, on the outer band `Ψ⁰(ξ) = 0`.
pub fn omega(xi: f64) -> f64 {
    let a = xi.abs();
    if a <= FLAT_EDGE || a >= 2.0 * SUPPORT_EDGE {
        0.0
    } else if a < SUPPORT_EDGE {
        (0.5 * PI * meyer_ramp(band_position(a))).sin()
    } else {
        psi0(0.5 * a)
    }
}

/// `Ψ¹(ξ) = Ω(ξ) e^{−iξ/2}`.
pub fn psi1(xi: f64) -> C64 {
    C64::from_polar(omega(xi), -0.5 * xi)
}

pub fn factor(bit: u8, xi: f64) -> C64 {
    if bit == 0 {
        C64::new(psi0(xi), 0.0)
    } else {
        psi1(xi)
    }
}

/// `Φ̂^ε(ξ) = Π_i Ψ^{ε_i}(ξ_i)`; bit `i` of `eps` is `ε_{i+1}`.
pub fn wavelet_hat(eps: u8, xi: &[f64]) -> C64 {
    xi.iter()
        .enumerate()
        .fold(C64::new(1.0, 0.0), |acc, (i, &x)| acc * factor((eps >> i) & 1, x))
}

/// Packs `(ε_1, …, ε_n)` into the bit layout used by [`wavelet_hat`].
pub fn eps_from_bits(bits: &[u8]) -> u8 {
    bits.iter()
        .enumerate()
        .fold(0u8, |acc, (i, &b)| acc | ((b & 1) << i))
}

/// A user-supplied `Ψ⁰`. The Meyer construction is the default; custom profiles are
/// validated against the radicand condition on a sample grid before use.
#[derive(Clone)]
pub struct FrequencyProfile {
    psi0: fn(f64) -> f64,
    samples: Vec<f64>,
}

impl std::fmt::Debug for FrequencyProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrequencyProfile")
            .field("samples", &self.samples.len())
            .finish()
    }
}

impl FrequencyProfile {
    pub const SAMPLES: usize = 4096;

    pub fn meyer() -> Self {
        Self::custom(psi0).expect("Meyer profile satisfies the radicand condition")
    }

    pub fn custom(psi0: fn(f64) -> f64) -> Result<Self> {
        let h = 2.0 * SUPPORT_EDGE / Self::SAMPLES as f64;
        let samples: Vec<f64> = (0..=Self::SAMPLES).map(|i| psi0(i as f64 * h)).collect();
        let profile = FrequencyProfile { psi0, samples };
        for i in 0..=Self::SAMPLES {
            let xi = i as f64 * h;
            let radicand = profile.radicand(xi);
            if radicand < -RADICAND_TOL {
                return Err(Error::InvalidProfile { xi, radicand });
            }
        }
        Ok(profile)
    }

    /// `Ψ⁰` sampled uniformly on `[0, 8π/3]`.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn psi0(&self, xi: f64) -> f64 {
        (self.psi0)(xi)
    }

    pub fn radicand(&self, xi: f64) -> f64 {
        let outer = (self.psi0)(0.5 * xi);
        let inner = (self.psi0)(xi);
        outer * outer - inner * inner
    }

    pub fn omega(&self, xi: f64) -> f64 {
        self.radicand(xi).max(0.0).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_omega_matches_definition() {
        let generic = FrequencyProfile::meyer();
        for i in 0..400 {
            let xi = -9.0 + i as f64 * 0.045;
            assert!((generic.omega(xi) - omega(xi)).abs() < 1e-7, "xi={xi}");
            assert!((generic.omega(xi).powi(2) - omega(xi).powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_non_monotone_profile() {
        fn bumpy(xi: f64) -> f64 {
            let a = xi.abs();
            if a <= 1.0 {
                1.0
            } else if a <= 2.0 {
                0.2
            } else if a <= 4.0 {
                0.9
            } else {
                0.0
            }
        }
        assert!(matches!(
            FrequencyProfile::custom(bumpy),
            Err(Error::InvalidProfile { .. })
        ));
    }

    #[test]
    fn eps_bit_layout() {
        assert_eq!(eps_from_bits(&[0, 1]), 2);
        assert_eq!(eps_from_bits(&[1, 0, 1]), 5);
    }
}
