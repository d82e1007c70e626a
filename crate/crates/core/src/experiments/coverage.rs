use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::hpd::hpd_interval;
use super::write_csv;
use crate::distributions::BetaParams;
use crate::error::{domain, Result};
use crate::fmt::num;
use crate::solver::{mean_method_beta, solve_max_density_beta, ScaleConstraint, SolverConfig};
use crate::special::log_binomial_pmf;

/// How the Beta prior is built from (c, α).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorMethod {
    Mean,
    MaxDensity,
}

impl PriorMethod {
    pub const ALL: [Self; 2] = [Self::Mean, Self::MaxDensity];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::MaxDensity => "max-density",
        }
    }

    pub fn prior(&self, c: f64, alpha: f64) -> Result<BetaParams> {
        match self {
            Self::Mean => mean_method_beta(c, alpha),
            Self::MaxDensity => {
                solve_max_density_beta(c, ScaleConstraint::Concentration(alpha), &SolverConfig::default())?.beta()
            }
        }
    }
}

/// Whether the prior location is the fixed `c` or the true θ₀ itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetMode {
    FixedC,
    Oracle,
}

impl TargetMode {
    pub const ALL: [Self; 2] = [Self::FixedC, Self::Oracle];

    pub fn label(&self) -> &'static str {
        match self {
            Self::FixedC => "fixed-c",
            Self::Oracle => "oracle",
        }
    }
}

pub const DEFAULT_GRID_POINTS: usize = 400;
pub const DEFAULT_GRID_RANGE: (f64, f64) = (1e-6, 0.9);

/// `n` points log-spaced from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => (l + (h - l) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageSpec {
    pub n: u64,
    pub alpha: f64,
    pub c: f64,
    pub theta_grid: Vec<f64>,
    pub level: f64,
    pub prior_method: PriorMethod,
    pub target_mode: TargetMode,
}

impl Default for CoverageSpec {
    fn default() -> Self {
        Self {
            n: 100,
            alpha: 10.0,
            c: 1e-3,
            theta_grid: log_grid(DEFAULT_GRID_RANGE.0, DEFAULT_GRID_RANGE.1, DEFAULT_GRID_POINTS),
            level: 0.95,
            prior_method: PriorMethod::Mean,
            target_mode: TargetMode::FixedC,
        }
    }
}

impl CoverageSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("n must be at least 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(domain(format!("level must lie in (0, 1), got {}", self.level)));
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return Err(domain(format!("c must lie in (0, 1), got {}", self.c)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(domain(format!("alpha must be positive, got {}", self.alpha)));
        }
        if let Some(t) = self.theta_grid.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(domain(format!("θ grid values must lie in (0, 1), got {t}")));
        }
        Ok(())
    }
}

/// HPD intervals of the posteriors Beta(a₀ + y, b₀ + n − y), y = 0..=n.
pub fn posterior_intervals(prior: &BetaParams, n: u64, level: f64) -> Result<Vec<(f64, f64)>> {
    (0..=n)
        .map(|y| {
            let post = BetaParams::new(prior.a() + y as f64, prior.b() + (n - y) as f64)?;
            hpd_interval(&post, level)
        })
        .collect()
}

/// Σ_y Binomial(y | n, θ₀) · 1(θ₀ ∈ interval_y).
pub fn coverage_from_intervals(intervals: &[(f64, f64)], theta0: f64) -> Result<f64> {
    let n = (intervals.len() - 1) as u64;
    let mut total = 0.0;
    for (y, &(lo, hi)) in intervals.iter().enumerate() {
        if lo <= theta0 && theta0 <= hi {
            total += log_binomial_pmf(y as u64, n, theta0)?.exp();
        }
    }
    Ok(total.min(1.0))
}

/// Exact frequentist coverage of the HPD interval at θ₀.
pub fn exact_coverage(spec: &CoverageSpec, theta0: f64) -> Result<f64> {
    spec.validate()?;
    if !(theta0 > 0.0 && theta0 < 1.0) {
        return Err(domain(format!("θ₀ must lie in (0, 1), got {theta0}")));
    }
    let c = match spec.target_mode {
        TargetMode::FixedC => spec.c,
        TargetMode::Oracle => theta0,
    };
    let prior = spec.prior_method.prior(c, spec.alpha)?;
    coverage_from_intervals(&posterior_intervals(&prior, spec.n, spec.level)?, theta0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub mode: TargetMode,
    pub method: PriorMethod,
    pub theta0: f64,
    pub coverage: f64,
}

/// Coverage over the θ grid for both prior methods and both target modes.
pub fn coverage_curve(spec: &CoverageSpec) -> Result<Vec<CoverageRow>> {
    coverage_rows(spec, &TargetMode::ALL, &PriorMethod::ALL)
}

/// Coverage over the θ grid for the chosen modes and methods, in that order.
///
/// Fixed-c posteriors do not depend on θ₀, so their intervals are computed
/// once per method.
pub fn coverage_rows(spec: &CoverageSpec, modes: &[TargetMode], methods: &[PriorMethod]) -> Result<Vec<CoverageRow>> {
    spec.validate()?;
    let mut rows = Vec::with_capacity(modes.len() * methods.len() * spec.theta_grid.len());
    for &mode in modes {
        for &method in methods {
            let cov: Vec<f64> = match mode {
                TargetMode::FixedC => {
                    let intervals = posterior_intervals(&method.prior(spec.c, spec.alpha)?, spec.n, spec.level)?;
                    spec.theta_grid.iter().map(|&t| coverage_from_intervals(&intervals, t)).collect::<Result<_>>()?
                }
                TargetMode::Oracle => spec
                    .theta_grid
                    .par_iter()
                    .map(|&t| {
                        let prior = method.prior(t, spec.alpha)?;
                        coverage_from_intervals(&posterior_intervals(&prior, spec.n, spec.level)?, t)
                    })
                    .collect::<Result<_>>()?,
            };
            rows.extend(spec.theta_grid.iter().zip(cov).map(|(&theta0, coverage)| CoverageRow {
                mode,
                method,
                theta0,
                coverage,
            }));
        }
    }
    Ok(rows)
}

/// Columns: mode, method, theta0, coverage.
pub fn write_coverage_csv<W: Write>(rows: &[CoverageRow], w: W) -> Result<()> {
    write_csv(
        w,
        &["mode", "method", "theta0", "coverage"],
        rows.iter()
            .map(|r| vec![r.mode.label().to_string(), r.method.label().to_string(), num(r.theta0), num(r.coverage)]),
    )
}
