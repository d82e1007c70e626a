use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::gamma::log_add_exp;
use crate::distributions::BetaParams;
use crate::error::{domain, Error};

/// The four univariate targets of the sampler comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TargetDistribution {
    /// Beta(1, 1).
    A,
    /// Beta(1, 1000).
    B,
    /// 0.75 Beta(2, 5) + 0.25 Beta(10, 2).
    C,
    /// Beta(1/2, 1/2).
    D,
}

const MIX_WEIGHTS: [f64; 2] = [0.75, 0.25];

fn beta(a: f64, b: f64) -> BetaParams {
    BetaParams::new(a, b).expect("fixed valid shapes")
}

impl TargetDistribution {
    pub const ALL: [Self; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn label(&self) -> &'static str {
        match self {
            Self::A => "A",
            Self::B => "B",
            Self::C => "C",
            Self::D => "D",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::A => "uniform Beta(1,1)",
            Self::B => "unimodal at zero Beta(1,1000)",
            Self::C => "bimodal mixture 0.75 Beta(2,5) + 0.25 Beta(10,2)",
            Self::D => "bimodal at zero and one Beta(1/2,1/2)",
        }
    }

    fn components(&self) -> [BetaParams; 2] {
        match self {
            Self::A => [beta(1.0, 1.0); 2],
            Self::B => [beta(1.0, 1000.0); 2],
            Self::C => [beta(2.0, 5.0), beta(10.0, 2.0)],
            Self::D => [beta(0.5, 0.5); 2],
        }
    }

    /// ln π(x) for x ∈ (0, 1); −∞ outside.
    pub fn log_density(&self, x: f64) -> f64 {
        if !(x > 0.0 && x < 1.0) {
            return f64::NEG_INFINITY;
        }
        let [p, q] = self.components();
        match self {
            Self::C => log_add_exp(
                MIX_WEIGHTS[0].ln() + p.log_density_unchecked(x),
                MIX_WEIGHTS[1].ln() + q.log_density_unchecked(x),
            ),
            _ => p.log_density_unchecked(x),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let [p, q] = self.components();
        match self {
            Self::C => MIX_WEIGHTS[0] * p.cdf(x) + MIX_WEIGHTS[1] * q.cdf(x),
            _ => p.cdf(x),
        }
    }

    /// Exact draws, used to check the sampler diagnostics.
    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let [p, q] = self.components();
        match self {
            Self::C if rng.random::<f64>() >= MIX_WEIGHTS[0] => q.sample(rng),
            _ => p.sample(rng),
        }
    }
}

impl fmt::Display for TargetDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for TargetDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(Self::A),
            "B" => Ok(Self::B),
            "C" => Ok(Self::C),
            "D" => Ok(Self::D),
            _ => Err(domain(format!("unknown target {s:?}; expected A, B, C or D"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdfs_are_monotone_from_zero_to_one() {
        for t in TargetDistribution::ALL {
            assert_eq!(t.cdf(0.0), 0.0);
            assert_eq!(t.cdf(1.0), 1.0);
            let mut prev = 0.0;
            for i in 1..1000 {
                let f = t.cdf(i as f64 / 1000.0);
                assert!(f >= prev, "{t}");
                prev = f;
            }
        }
    }

    #[test]
    fn densities_integrate_to_one() {
        // Midpoint rule on the CDF scale: Σ π(x) Δx ≈ 1 away from singular ends.
        for t in [TargetDistribution::A, TargetDistribution::C] {
            let n = 100_000;
            let total: f64 = (0..n).map(|i| t.log_density((i as f64 + 0.5) / n as f64).exp() / n as f64).sum();
            assert!((total - 1.0).abs() < 1e-6, "{t}: {total}");
        }
    }

    #[test]
    fn mixture_density_matches_direct_sum() {
        let x: f64 = 0.37;
        let p = 0.75 * 30.0 * x * (1.0 - x).powi(4) + 0.25 * 110.0 * x.powi(9) * (1.0 - x);
        assert!((TargetDistribution::C.log_density(x) - p.ln()).abs() < 1e-13);
    }

    #[test]
    fn outside_support_is_impossible() {
        for t in TargetDistribution::ALL {
            assert_eq!(t.log_density(0.0), f64::NEG_INFINITY);
            assert_eq!(t.log_density(1.0), f64::NEG_INFINITY);
        }
    }

    #[test]
    fn labels_round_trip() {
        for t in TargetDistribution::ALL {
            assert_eq!(t.label().parse::<TargetDistribution>().unwrap(), t);
        }
        assert!("E".parse::<TargetDistribution>().is_err());
    }
}
