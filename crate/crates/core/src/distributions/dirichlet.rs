use rand::Rng;
use serde::Serialize;

use super::beta::BetaParams;
use super::gamma::{ln_gamma_variate, log_sum_exp};
use crate::error::{domain, Error, Result};
use crate::special::log_gamma_unchecked;

/// A point of the open probability simplex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexPoint(Vec<f64>);

impl SimplexPoint {
    /// Normalizes `coords` to sum to one. Every entry must be positive and
    /// finite, and there must be at least two.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(domain(format!("a simplex point needs at least 2 coordinates, got {}", coords.len())));
        }
        if let Some(bad) = coords.iter().find(|c| !(**c > 0.0 && c.is_finite())) {
            return Err(domain(format!("simplex coordinates must be positive, got {bad}")));
        }
        let total: f64 = coords.iter().sum();
        Ok(Self(coords.into_iter().map(|c| c / total).collect()))
    }

    /// The Beta-case target (c, 1 − c).
    pub fn binary(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(domain(format!("target location must lie in (0, 1), got {c}")));
        }
        Ok(Self(vec![c, 1.0 - c]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// Shape parameters a_1..a_K of a Dirichlet distribution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirichletParams {
    alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(domain(format!("a Dirichlet needs K >= 2 shapes, got {}", alpha.len())));
        }
        if let Some(bad) = alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(domain(format!("Dirichlet shapes must be positive and finite, got {bad}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn concentration(&self) -> f64 {
        self.alpha.iter().sum()
    }

    pub fn mean(&self) -> Vec<f64> {
        let s = self.concentration();
        self.alpha.iter().map(|a| a / s).collect()
    }

    /// X_i ~ Beta(a_i, Σ_{j≠i} a_j).
    pub fn marginal(&self, i: usize) -> Result<BetaParams> {
        let a = *self.alpha.get(i).ok_or(Error::DimensionMismatch { expected: self.len(), got: i + 1 })?;
        BetaParams::new(a, self.concentration() - a)
    }

    /// Two-coordinate view as a Beta distribution over the first coordinate.
    pub fn as_beta(&self) -> Result<BetaParams> {
        if self.len() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: self.len() });
        }
        BetaParams::new(self.alpha[0], self.alpha[1])
    }

    pub fn log_density(&self, x: &SimplexPoint) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(self.log_density_at(x.as_slice()))
    }

    pub(crate) fn log_density_at(&self, x: &[f64]) -> f64 {
        let s = self.concentration();
        let norm = log_gamma_unchecked(s) - self.alpha.iter().map(|&a| log_gamma_unchecked(a)).sum::<f64>();
        norm + self.alpha.iter().zip(x).map(|(a, xi)| (a - 1.0) * xi.ln()).sum::<f64>()
    }

    pub(crate) fn check_dim(&self, k: usize) -> Result<()> {
        if k == self.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.len(), got: k })
        }
    }

    /// Normalized independent Gamma draws, written into `out`.
    ///
    /// Coordinates whose value falls below the smallest positive double come
    /// out as exact zeros.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.len());
        for (o, &a) in out.iter_mut().zip(&self.alpha) {
            *o = ln_gamma_variate(a, rng);
        }
        let lse = log_sum_exp(out);
        for o in out.iter_mut() {
            *o = (*o - lse).exp();
        }
    }

    /// One draw as a [`SimplexPoint`]; underflowed coordinates are floored at
    /// `f64::MIN_POSITIVE`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SimplexPoint {
        let mut x = vec![0.0; self.len()];
        self.sample_into(rng, &mut x);
        for xi in x.iter_mut() {
            *xi = xi.max(f64::MIN_POSITIVE);
        }
        SimplexPoint::new(x).expect("positive coordinates")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn simplex_point_normalizes_and_validates() {
        let p = SimplexPoint::new(vec![1.0, 3.0]).unwrap();
        assert_eq!(p.as_slice(), &[0.25, 0.75]);
        assert!(SimplexPoint::new(vec![1.0, 0.0]).is_err());
        assert!(SimplexPoint::new(vec![1.0, -1.0]).is_err());
        assert!(SimplexPoint::new(vec![1.0]).is_err());
        assert!(SimplexPoint::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn dirichlet_validates() {
        assert!(DirichletParams::new(vec![1.0]).is_err());
        assert!(DirichletParams::new(vec![1.0, 0.0]).is_err());
        assert!(DirichletParams::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn flat_density_is_ln_2() {
        let p = DirichletParams::new(vec![1.0; 3]).unwrap();
        let x = SimplexPoint::new(vec![0.1, 0.5, 0.4]).unwrap();
        assert!((p.log_density(&x).unwrap() - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn two_coordinates_reduce_to_beta() {
        let p = DirichletParams::new(vec![2.0, 2.0]).unwrap();
        let x = SimplexPoint::binary(0.5).unwrap();
        let beta = BetaParams::new(2.0, 2.0).unwrap();
        assert!((p.log_density(&x).unwrap() - beta.log_density(0.5).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn density_matches_direct_arithmetic() {
        // Γ(12) / (Γ(3)Γ(4)Γ(5)) · 0.2² · 0.3³ · 0.5⁴ = 39916800 / (2·6·24) · ...
        let want = (39_916_800.0f64 / 288.0).ln() + 2.0 * 0.2f64.ln() + 3.0 * 0.3f64.ln() + 4.0 * 0.5f64.ln();
        let p = DirichletParams::new(vec![3.0, 4.0, 5.0]).unwrap();
        let x = SimplexPoint::new(vec![0.2, 0.3, 0.5]).unwrap();
        assert!((p.log_density(&x).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn density_dimension_mismatch() {
        let p = DirichletParams::new(vec![3.0, 4.0, 5.0]).unwrap();
        let x = SimplexPoint::binary(0.3).unwrap();
        assert_eq!(p.log_density(&x), Err(Error::DimensionMismatch { expected: 3, got: 2 }));
    }

    #[test]
    fn samples_sum_to_one_and_flat_mean() {
        let p = DirichletParams::new(vec![1.0; 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut mean = [0.0; 3];
        for _ in 0..n {
            let x = p.sample(&mut rng);
            assert!((x.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (m, xi) in mean.iter_mut().zip(x.as_slice()) {
                *m += xi / n as f64;
            }
        }
        for m in mean {
            assert!((m - 1.0 / 3.0).abs() < 0.003, "{m}");
        }
    }

    #[test]
    fn marginals_match_beta_cdf() {
        let p = DirichletParams::new(vec![0.3, 2.0, 5.0, 0.7]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let draws: Vec<SimplexPoint> = (0..n).map(|_| p.sample(&mut rng)).collect();
        for i in 0..p.len() {
            let marginal = p.marginal(i).unwrap();
            let mut xs: Vec<f64> = draws.iter().map(|d| d.as_slice()[i]).collect();
            xs.sort_by(f64::total_cmp);
            let d = xs
                .iter()
                .enumerate()
                .map(|(j, &x)| {
                    let f = marginal.cdf(x);
                    ((j + 1) as f64 / n as f64 - f).max(f - j as f64 / n as f64)
                })
                .fold(0.0, f64::max);
            assert!(d < 0.01, "coordinate {i}: KS {d}");
        }
    }

    #[test]
    fn tiny_shapes_never_produce_nan() {
        let p = DirichletParams::new(vec![1e-8, 1e-8, 1e-8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let x = p.sample(&mut rng);
            assert!(x.as_slice().iter().all(|v| v.is_finite() && *v > 0.0));
        }
    }
}
