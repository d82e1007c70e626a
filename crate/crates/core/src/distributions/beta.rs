use rand::Rng;
use serde::Serialize;

use super::gamma::{ln_gamma_variate, log_add_exp};
use crate::error::{domain, Result};
use crate::special::{beta_inc_pair, inv_reg_inc_beta, log_beta_unchecked};

/// Shape parameters of a Beta(a, b) distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite() && b > 0.0 && b.is_finite()) {
            return Err(domain(format!("Beta shapes must be positive and finite, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    /// Beta(αu, α(1−u)).
    pub fn from_mean_concentration(mean: f64, concentration: f64) -> Result<Self> {
        if !(mean > 0.0 && mean < 1.0) {
            return Err(domain(format!("mean must lie in (0, 1), got {mean}")));
        }
        Self::new(concentration * mean, concentration * (1.0 - mean))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn mean(&self) -> f64 {
        self.a / (self.a + self.b)
    }

    pub fn concentration(&self) -> f64 {
        self.a + self.b
    }

    /// ab / ((a+b)² (a+b+1)).
    pub fn variance(&self) -> f64 {
        let s = self.a + self.b;
        self.a * self.b / (s * s * (s + 1.0))
    }

    /// The same distribution reflected through x ↦ 1 − x.
    pub fn swapped(&self) -> Self {
        Self { a: self.b, b: self.a }
    }

    pub fn log_density(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x < 1.0) {
            return Err(domain(format!("Beta density requires 0 < x < 1, got {x}")));
        }
        Ok(self.log_density_unchecked(x))
    }

    pub(crate) fn log_density_unchecked(&self, x: f64) -> f64 {
        (self.a - 1.0) * x.ln() + (self.b - 1.0) * (-x).ln_1p() - log_beta_unchecked(self.a, self.b)
    }

    /// P(X ≤ x), clamped to 0 and 1 outside the support.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            beta_inc_pair(x, 1.0 - x, self.a, self.b).0
        }
    }

    pub fn quantile(&self, q: f64) -> Result<f64> {
        inv_reg_inc_beta(q, self.a, self.b)
    }

    pub fn median(&self) -> f64 {
        inv_reg_inc_beta(0.5, self.a, self.b).expect("valid shapes")
    }

    /// One draw G_a / (G_a + G_b) from two Gamma variates.
    ///
    /// For shapes far below one the exact draw can lie below the smallest
    /// representable positive double; such draws round to 0.0 (or 1.0).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let la = ln_gamma_variate(self.a, rng);
        let lb = ln_gamma_variate(self.b, rng);
        (la - log_add_exp(la, lb)).exp()
    }
}

/// Whether some Beta distribution has mean `u` and variance `v`.
pub fn beta_exists(u: f64, v: f64) -> bool {
    v > 0.0 && v < 0.25 && (u - 0.5).abs() < 0.5 * (1.0 - 4.0 * v).sqrt()
}
