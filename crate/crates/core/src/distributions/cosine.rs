//! Cosine error between simplex points and its second-order Taylor mean.

use super::dirichlet::{DirichletParams, SimplexPoint};
use crate::error::{Error, Result};

/// 1 − xᵀc / (‖x‖ ‖c‖).
pub fn cosine_error(x: &SimplexPoint, c: &SimplexPoint) -> Result<f64> {
    if x.len() != c.len() {
        return Err(Error::DimensionMismatch { expected: c.len(), got: x.len() });
    }
    Ok(cosine_error_slices(x.as_slice(), c.as_slice()))
}

pub(crate) fn cosine_error_slices(x: &[f64], c: &[f64]) -> f64 {
    let (mut dot, mut xx, mut cc) = (0.0, 0.0, 0.0);
    for (xi, ci) in x.iter().zip(c) {
        dot += xi * ci;
        xx += xi * xi;
        cc += ci * ci;
    }
    (1.0 - dot / (xx.sqrt() * cc.sqrt())).clamp(0.0, 1.0)
}

/// (s1, s2, s3) with s_k = Σ a_i^k.
pub(crate) fn power_sums(a: &[f64]) -> (f64, f64, f64) {
    a.iter().fold((0.0, 0.0, 0.0), |(s1, s2, s3), &x| {
        let x2 = x * x;
        (s1 + x, s2 + x2, s3 + x2 * x)
    })
}

/// Second-order Taylor approximation of E CosErr(X, E X) for
/// X ~ Dirichlet(a):  s1 / (2 (1 + s1) s2) · (s1 − s3 / s2).
pub fn taylor_mean_cosine_error(p: &DirichletParams) -> f64 {
    let (s1, s2, s3) = power_sums(p.alpha());
    s1 / (2.0 * (1.0 + s1) * s2) * (s1 - s3 / s2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_points_have_zero_error() {
        let x = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert_eq!(cosine_error(&x, &x).unwrap(), 0.0);
    }

    #[test]
    fn near_orthogonal_points() {
        let eps = 1e-9;
        let x = SimplexPoint::new(vec![1.0, eps]).unwrap();
        let c = SimplexPoint::new(vec![eps, 1.0]).unwrap();
        assert!((cosine_error(&x, &c).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn direct_arithmetic_example() {
        let x = SimplexPoint::binary(0.5).unwrap();
        let c = SimplexPoint::binary(0.8).unwrap();
        let want = 1.0 - 0.5 / (0.5f64.sqrt() * 0.68f64.sqrt());
        assert!((cosine_error(&x, &c).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.14251).abs() < 1e-5);
    }

    #[test]
    fn dimension_mismatch() {
        let x = SimplexPoint::binary(0.5).unwrap();
        let c = SimplexPoint::new(vec![1.0; 3]).unwrap();
        assert!(cosine_error(&x, &c).is_err());
    }

    #[test]
    fn symmetric_taylor_value() {
        for alpha in [0.1, 1.0, 7.5, 300.0] {
            let p = DirichletParams::new(vec![alpha / 2.0; 2]).unwrap();
            let want = 1.0 / (2.0 * (1.0 + alpha));
            assert!((taylor_mean_cosine_error(&p) - want).abs() < 1e-12);
        }
        let p = DirichletParams::new(vec![0.5, 0.5]).unwrap();
        assert!((taylor_mean_cosine_error(&p) - 0.25).abs() < 1e-15);
    }
}
