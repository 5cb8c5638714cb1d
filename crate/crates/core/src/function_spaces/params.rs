use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::meyer_wavelet::WaveletIndex;

/// Regularity, integrability and time-weight indices of the Besov-Q and tent norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub m: f64,
    pub m_prime: f64,
}

impl Default for SpaceParams {
    /// Critical, admissible indices for `n = 2`, `β = 3/4`, `p = q = 2`.
    fn default() -> Self {
        SpaceParams {
            gamma1: 0.0,
            gamma2: 0.5,
            p: 2.0,
            q: 2.0,
            beta: 0.75,
            m: 3.0,
            m_prime: 0.5,
        }
    }
}

impl SpaceParams {
    pub fn new(gamma1: f64, gamma2: f64, p: f64, q: f64, beta: f64, m: f64, m_prime: f64) -> Result<Self> {
        let params = SpaceParams {
            gamma1,
            gamma2,
            p,
            q,
            beta,
            m,
            m_prime,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters on the critical line `γ1 = γ2 − 2β + 1`.
    pub fn critical(gamma2: f64, p: f64, q: f64, beta: f64, m: f64, m_prime: f64) -> Result<Self> {
        Self::new(gamma2 - 2.0 * beta + 1.0, gamma2, p, q, beta, m, m_prime)
    }

    pub fn with_q(self, q: f64) -> Self {
        SpaceParams { q, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma1, self.gamma2, self.p, self.q, self.beta, self.m, self.m_prime];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(invalid("space parameters must be finite"));
        }
        if self.p <= 1.0 || self.q <= 1.0 {
            return Err(invalid(format!("p = {} and q = {} must exceed 1", self.p, self.q)));
        }
        if self.beta <= 0.5 {
            return Err(invalid(format!("beta = {} must exceed 1/2", self.beta)));
        }
        if self.m_prime <= 0.0 {
            return Err(invalid(format!("m' = {} must be positive", self.m_prime)));
        }
        Ok(())
    }

    pub fn is_critical(&self, tol: f64) -> bool {
        (self.gamma1 - (self.gamma2 - 2.0 * self.beta + 1.0)).abs() <= tol
    }

    pub fn check_critical(&self) -> Result<()> {
        if self.is_critical(1e-12) {
            Ok(())
        } else {
            Err(invalid(format!(
                "gamma1 = {} is off the critical line gamma2 - 2 beta + 1 = {}",
                self.gamma1,
                self.gamma2 - 2.0 * self.beta + 1.0
            )))
        }
    }

    /// Index constraints under which the well-posedness theory applies.
    pub fn check_admissible(&self, dim: usize) -> Result<()> {
        self.validate()?;
        let n = dim as f64;
        let (p, b) = (self.p, self.beta);
        if self.m <= p.max(n / (2.0 * b)) {
            return Err(invalid(format!("m = {} must exceed max(p, n/(2 beta))", self.m)));
        }
        if self.m_prime >= 1f64.min(p / (2.0 * b)) {
            return Err(invalid(format!("m' = {} must be below min(1, p/(2 beta))", self.m_prime)));
        }
        let lower = if p <= 2.0 { (2.0 * b - 2.0) / p } else { b - 1.0 };
        if !(self.gamma2 > lower && self.gamma2 <= n / p) {
            return Err(invalid(format!(
                "gamma2 = {} must lie in ({lower}, {}]",
                self.gamma2,
                n / p
            )));
        }
        Ok(())
    }

    /// Shell weight exponent `γ1 + n/2 − n/p`.
    pub fn shell_exponent(&self, dim: usize) -> f64 {
        let n = dim as f64;
        self.gamma1 + n / 2.0 - n / self.p
    }

    /// Cube prefactor exponent `γ2/n − 1/p` of `|Q|`.
    pub fn cube_exponent(&self, dim: usize) -> f64 {
        self.gamma2 / dim as f64 - 1.0 / self.p
    }
}

/// `Q_{j0,k0}`: side `2^{-j0}` in lattice units, corner `k0·2^{-j0}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    pub j0: i32,
    pub k0: Vec<i64>,
}

impl DyadicCube {
    pub fn new(j0: i32, k0: &[i64]) -> Self {
        DyadicCube { j0, k0: k0.to_vec() }
    }

    pub fn dim(&self) -> usize {
        self.k0.len()
    }

    pub fn measure(&self) -> f64 {
        2f64.powi(-(self.j0 * self.dim() as i32))
    }

    /// Whether `Q_{j,k} ⊂ Q_{j0,k0}`.
    pub fn contains(&self, idx: &WaveletIndex) -> bool {
        if idx.j < self.j0 {
            return false;
        }
        let shift = (idx.j - self.j0) as u32;
        self.k0
            .iter()
            .zip(idx.k.iter())
            .all(|(&c, &k)| k.div_euclid(1i64 << shift) == c)
    }
}
