use serde::Serialize;

use crate::distributions::power_sums;
use crate::error::{Error, Result};

/// The scale constraint h(a) = 0 imposed on the parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum ScaleConstraint {
    /// Σ a_i = α.
    Concentration(f64),
    /// Var(X) = v for a two-parameter (Beta) vector; requires 0 < v < 1/4.
    Variance(f64),
    /// Taylor-approximated E CosErr(X, E X) = κ.
    MeanCosineError(f64),
}

impl ScaleConstraint {
    /// Checks the constraint value and that it applies to `k` parameters.
    pub fn validate(&self, k: usize) -> Result<()> {
        match *self {
            Self::Concentration(alpha) if !(alpha > 0.0 && alpha.is_finite()) => {
                Err(Error::InfeasibleConstraint(format!("concentration must be positive, got {alpha}")))
            }
            Self::Variance(v) if !(v > 0.0 && v < 0.25) => {
                Err(Error::InfeasibleConstraint(format!("a Beta variance must lie in (0, 1/4), got {v}")))
            }
            Self::Variance(_) if k != 2 => Err(Error::InfeasibleConstraint(format!(
                "the variance constraint is defined for Beta distributions only (K = 2), got K = {k}"
            ))),
            Self::MeanCosineError(kappa) if !(kappa > 0.0 && kappa.is_finite()) => {
                Err(Error::InfeasibleConstraint(format!("mean cosine error must be positive, got {kappa}")))
            }
            _ => Ok(()),
        }
    }

    /// h(a). Ratio form for concentration; log-ratio forms for variance and
    /// cosine error.
    pub fn value(&self, a: &[f64]) -> f64 {
        match *self {
            Self::Concentration(alpha) => a.iter().sum::<f64>() / alpha - 1.0,
            Self::Variance(v) => {
                let (x, y) = (a[0], a[1]);
                let s = x + y;
                x.ln() + y.ln() - 2.0 * s.ln() - (s + 1.0).ln() - v.ln()
            }
            Self::MeanCosineError(kappa) => {
                let (s1, s2, s3) = power_sums(a);
                -std::f64::consts::LN_2 + s1.ln() - (1.0 + s1).ln() - s2.ln() + (s1 - s3 / s2).ln() - kappa.ln()
            }
        }
    }

    /// ∂h/∂a_j for every j.
    pub fn jacobian(&self, a: &[f64]) -> Vec<f64> {
        match *self {
            Self::Concentration(alpha) => vec![1.0 / alpha; a.len()],
            Self::Variance(_) => {
                let s = a[0] + a[1];
                let common = 2.0 / s + 1.0 / (s + 1.0);
                vec![1.0 / a[0] - common, 1.0 / a[1] - common]
            }
            Self::MeanCosineError(_) => {
                let (s1, s2, s3) = power_sums(a);
                let common = 1.0 / s1 - 1.0 / (1.0 + s1);
                let spread = s1 - s3 / s2;
                a.iter()
                    .map(|&aj| {
                        let inner = 1.0 - (3.0 * aj * aj * s2 - 2.0 * aj * s3) / (s2 * s2);
                        common - 2.0 * aj / s2 + inner / spread
                    })
                    .collect()
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Concentration(_) => "concentration",
            Self::Variance(_) => "variance",
            Self::MeanCosineError(_) => "cosine",
        }
    }

    pub fn target(&self) -> f64 {
        match *self {
            Self::Concentration(x) | Self::Variance(x) | Self::MeanCosineError(x) => x,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{taylor_mean_cosine_error, DirichletParams};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn central_difference(c: &ScaleConstraint, a: &[f64], j: usize, h: f64) -> f64 {
        let mut up = a.to_vec();
        let mut down = a.to_vec();
        up[j] += h;
        down[j] -= h;
        (c.value(&up) - c.value(&down)) / (2.0 * h)
    }

    #[test]
    fn values_vanish_on_the_constraint_set() {
        assert_eq!(ScaleConstraint::Concentration(5.0).value(&[2.0, 3.0]), 0.0);
        assert!(ScaleConstraint::Variance(1.0 / 12.0).value(&[1.0, 1.0]).abs() < 1e-15);
        let alpha = 3.0;
        let kappa = 1.0 / (2.0 * (1.0 + alpha));
        let h = ScaleConstraint::MeanCosineError(kappa).value(&[alpha / 2.0, alpha / 2.0]);
        assert!(h.abs() < 1e-14);
    }

    #[test]
    fn cosine_value_is_log_ratio_of_taylor_mean() {
        let a = vec![0.4, 2.0, 0.05, 7.0];
        let t = taylor_mean_cosine_error(&DirichletParams::new(a.clone()).unwrap());
        let kappa = 0.013;
        let h = ScaleConstraint::MeanCosineError(kappa).value(&a);
        assert!((h - (t / kappa).ln()).abs() < 1e-13);
    }

    #[test]
    fn concentration_jacobian_is_flat() {
        let j = ScaleConstraint::Concentration(4.0).jacobian(&[1.0, 2.0, 3.0]);
        assert!(j.iter().all(|&x| x == 0.25));
    }

    #[test]
    fn cosine_jacobian_symmetric_on_symmetric_point() {
        let j = ScaleConstraint::MeanCosineError(0.1).jacobian(&[1.5, 1.5]);
        assert_eq!(j[0], j[1]);
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let k = rng.random_range(2..8);
            let a: Vec<f64> = (0..k).map(|_| 10f64.powf(rng.random_range(-1.0..1.5))).collect();
            let ab = [a[0], a[1]];
            let cases: [(ScaleConstraint, &[f64]); 3] = [
                (ScaleConstraint::Concentration(3.7), &a),
                (ScaleConstraint::Variance(0.05), &ab),
                (ScaleConstraint::MeanCosineError(0.02), &a),
            ];
            for (c, point) in cases {
                let jac = c.jacobian(point);
                for j in 0..point.len() {
                    let h = 1e-6 * point[j].max(1e-2);
                    let fd = central_difference(&c, point, j, h);
                    let tol = 1e-5 * jac[j].abs().max(1.0);
                    assert!((jac[j] - fd).abs() < tol, "{c:?} at {point:?}, j={j}: {} vs {fd}", jac[j]);
                }
            }
        }
    }

    #[test]
    fn validation() {
        assert!(ScaleConstraint::Variance(0.25).validate(2).is_err());
        assert!(ScaleConstraint::Variance(0.26).validate(2).is_err());
        assert!(ScaleConstraint::Variance(0.0).validate(2).is_err());
        assert!(ScaleConstraint::Variance(0.1).validate(3).is_err());
        assert!(ScaleConstraint::Variance(0.1).validate(2).is_ok());
        assert!(ScaleConstraint::Concentration(-1.0).validate(4).is_err());
        assert!(ScaleConstraint::MeanCosineError(0.0).validate(4).is_err());
    }
}
