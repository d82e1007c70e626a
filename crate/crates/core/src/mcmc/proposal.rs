use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::BetaParams;
use crate::error::{domain, Error, Result};
use crate::solver::{
    adaptive_sd, adaptive_variance_method, mean_method_beta, mean_method_fixed_variance, median_method,
    solve_max_density_beta, ScaleConstraint, SolverConfig,
};

/// How the Beta proposal is built from the current state x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", content = "scale")]
pub enum ProposalMethod {
    /// I: maximum density at x with variance v.
    MaxDensity { v: f64 },
    /// II: mean x, concentration α.
    MeanConcentration { alpha: f64 },
    /// III: mean x, variance v; moves to states without such a Beta are
    /// rejected.
    MeanVariance { v: f64 },
    /// IV: mean x, standard deviation min{x, 1 − x, √v_cap}.
    MeanAdaptive { v_cap: f64 },
    /// Median x, concentration α.
    MedianConcentration { alpha: f64 },
    /// Median x, variance v.
    MedianVariance { v: f64 },
    /// Median x, standard deviation min{x, 1 − x, √v_cap}.
    MedianAdaptive { v_cap: f64 },
}

pub const DEFAULT_VARIANCE: f64 = 0.1;
pub const DEFAULT_CONCENTRATION: f64 = 5.0;

impl ProposalMethod {
    /// I–IV with the tuned scales v = 0.1 and α = 5.
    pub const PRIMARY: [Self; 4] = [
        Self::MaxDensity { v: DEFAULT_VARIANCE },
        Self::MeanConcentration { alpha: DEFAULT_CONCENTRATION },
        Self::MeanVariance { v: DEFAULT_VARIANCE },
        Self::MeanAdaptive { v_cap: DEFAULT_VARIANCE },
    ];

    pub const MEDIAN: [Self; 3] = [
        Self::MedianConcentration { alpha: DEFAULT_CONCENTRATION },
        Self::MedianVariance { v: DEFAULT_VARIANCE },
        Self::MedianAdaptive { v_cap: DEFAULT_VARIANCE },
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Self::MaxDensity { .. } => "I",
            Self::MeanConcentration { .. } => "II",
            Self::MeanVariance { .. } => "III",
            Self::MeanAdaptive { .. } => "IV",
            Self::MedianConcentration { .. } => "M-alpha",
            Self::MedianVariance { .. } => "M-v",
            Self::MedianAdaptive { .. } => "M-adaptive",
        }
    }

    /// The scale parameter (v, α or v_cap).
    pub fn scale(&self) -> f64 {
        match *self {
            Self::MaxDensity { v }
            | Self::MeanVariance { v }
            | Self::MedianVariance { v }
            | Self::MeanAdaptive { v_cap: v }
            | Self::MedianAdaptive { v_cap: v }
            | Self::MeanConcentration { alpha: v }
            | Self::MedianConcentration { alpha: v } => v,
        }
    }

    /// The same method with a different scale parameter.
    pub fn with_scale(self, s: f64) -> Self {
        match self {
            Self::MaxDensity { .. } => Self::MaxDensity { v: s },
            Self::MeanConcentration { .. } => Self::MeanConcentration { alpha: s },
            Self::MeanVariance { .. } => Self::MeanVariance { v: s },
            Self::MeanAdaptive { .. } => Self::MeanAdaptive { v_cap: s },
            Self::MedianConcentration { .. } => Self::MedianConcentration { alpha: s },
            Self::MedianVariance { .. } => Self::MedianVariance { v: s },
            Self::MedianAdaptive { .. } => Self::MedianAdaptive { v_cap: s },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.scale();
        let ok = match self {
            Self::MeanConcentration { .. } | Self::MedianConcentration { .. } => s > 0.0 && s.is_finite(),
            _ => s > 0.0 && s < 0.25,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InfeasibleConstraint(format!("method {} cannot use scale {s}", self.label())))
        }
    }
}

impl fmt::Display for ProposalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Parses a label with an optional scale override, e.g. `I`, `II=3`,
/// `M-v=0.05`.
impl FromStr for ProposalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (label, scale) = match s.split_once('=') {
            Some((l, v)) => {
                let v: f64 = v.trim().parse().map_err(|_| domain(format!("bad scale in method {s:?}")))?;
                (l.trim(), Some(v))
            }
            None => (s.trim(), None),
        };
        let base =
            Self::PRIMARY.into_iter().chain(Self::MEDIAN).find(|m| m.label().eq_ignore_ascii_case(label)).ok_or_else(
                || domain(format!("unknown method {label:?}; expected I, II, III, IV, M-alpha, M-v or M-adaptive")),
            )?;
        let m = scale.map_or(base, |v| base.with_scale(v));
        m.validate()?;
        Ok(m)
    }
}

/// Proposal parameters (a_x, b_x) at state x.
///
/// Method III reports [`Error::NonExistence`] when no Beta has mean x and
/// variance v. Solver failures come back as their own errors.
pub fn propose(method: &ProposalMethod, x: f64, cfg: &SolverConfig) -> Result<BetaParams> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("state must lie in (0, 1), got {x}")));
    }
    match *method {
        ProposalMethod::MaxDensity { v } => solve_max_density_beta(x, ScaleConstraint::Variance(v), cfg)?.beta(),
        ProposalMethod::MeanConcentration { alpha } => mean_method_beta(x, alpha),
        ProposalMethod::MeanVariance { v } => mean_method_fixed_variance(x, v),
        ProposalMethod::MeanAdaptive { v_cap } => adaptive_variance_method(x, v_cap),
        ProposalMethod::MedianConcentration { alpha } => median_method(x, ScaleConstraint::Concentration(alpha)),
        ProposalMethod::MedianVariance { v } => median_method(x, ScaleConstraint::Variance(v)),
        ProposalMethod::MedianAdaptive { v_cap } => {
            let sd = adaptive_sd(x, v_cap);
            median_method(x, ScaleConstraint::Variance(sd * sd))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_concentration_example() {
        let p = propose(&ProposalMethod::MeanConcentration { alpha: 5.0 }, 0.3, &SolverConfig::default()).unwrap();
        assert!((p.a() - 1.5).abs() < 1e-15 && (p.b() - 3.5).abs() < 1e-15);
    }

    #[test]
    fn max_density_hits_variance() {
        let p = propose(&ProposalMethod::MaxDensity { v: 0.1 }, 0.5, &SolverConfig::default()).unwrap();
        assert!((p.variance() / 0.1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn adaptive_near_zero() {
        let p = propose(&ProposalMethod::MeanAdaptive { v_cap: 0.1 }, 0.001, &SolverConfig::default()).unwrap();
        assert!((p.mean() - 0.001).abs() < 1e-15);
        assert!((p.variance().sqrt() - 0.001).abs() < 1e-12);
    }

    #[test]
    fn method_three_nonexistence() {
        let m = ProposalMethod::MeanVariance { v: 0.1 };
        assert!(matches!(propose(&m, 0.9, &SolverConfig::default()), Err(Error::NonExistence { .. })));
        assert!(propose(&m, 0.25, &SolverConfig::default()).is_ok());
    }

    #[test]
    fn median_variants_pin_the_median() {
        let cfg = SolverConfig::default();
        for m in ProposalMethod::MEDIAN {
            for x in [0.001, 0.25, 0.9] {
                let p = propose(&m, x, &cfg).unwrap();
                assert!((p.median() - x).abs() <= 1e-8, "{m} at {x}");
            }
        }
    }

    #[test]
    fn parse_labels_and_overrides() {
        assert_eq!("I".parse::<ProposalMethod>().unwrap(), ProposalMethod::MaxDensity { v: 0.1 });
        assert_eq!("ii=3".parse::<ProposalMethod>().unwrap(), ProposalMethod::MeanConcentration { alpha: 3.0 });
        assert_eq!("M-v=0.05".parse::<ProposalMethod>().unwrap(), ProposalMethod::MedianVariance { v: 0.05 });
        assert!("I=0.3".parse::<ProposalMethod>().is_err());
        assert!("V".parse::<ProposalMethod>().is_err());
        for m in ProposalMethod::PRIMARY.into_iter().chain(ProposalMethod::MEDIAN) {
            assert_eq!(m.label().parse::<ProposalMethod>().unwrap(), m);
        }
    }
}
