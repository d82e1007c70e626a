use std::io::Write;

use serde::Serialize;

use super::coverage::log_grid;
use super::write_csv;
use crate::distributions::{logit_distance_log_density, BetaParams};
use crate::error::{domain, Result};
use crate::fmt::num;
use crate::solver::{mean_method_beta, median_method, solve_max_density_beta, ScaleConstraint, SolverConfig};

/// How a Beta with location c and concentration α is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocationMethod {
    Mean,
    MaxDensity,
    Median,
}

impl LocationMethod {
    pub const ALL: [Self; 3] = [Self::Mean, Self::MaxDensity, Self::Median];

    pub fn label(&self) -> &'static str {
        match self {
            Self::Mean => "mean",
            Self::MaxDensity => "max-density",
            Self::Median => "median",
        }
    }

    pub fn params(&self, c: f64, alpha: f64) -> Result<BetaParams> {
        match self {
            Self::Mean => mean_method_beta(c, alpha),
            Self::MaxDensity => {
                solve_max_density_beta(c, ScaleConstraint::Concentration(alpha), &SolverConfig::default())?.beta()
            }
            Self::Median => median_method(c, ScaleConstraint::Concentration(alpha)),
        }
    }
}

impl std::str::FromStr for LocationMethod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| domain(format!("unknown method {s:?}; expected mean, max-density or median")))
    }
}

pub const PERCENTILES: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// 25 log-spaced concentrations from 0.1 to 100.
pub fn default_alphas() -> Vec<f64> {
    log_grid(0.1, 100.0, 25)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PercentileRow {
    pub method: LocationMethod,
    pub c: f64,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub value: f64,
}

/// Percentiles 5, 25, 50, 75, 95 of the Beta chosen by `method` at each α.
pub fn percentile_table(method: LocationMethod, c: f64, alphas: &[f64]) -> Result<Vec<PercentileRow>> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain(format!("c must lie in (0, 1), got {c}")));
    }
    let mut rows = Vec::with_capacity(alphas.len() * PERCENTILES.len());
    for &alpha in alphas {
        let params = method.params(c, alpha)?;
        for p in PERCENTILES {
            rows.push(PercentileRow { method, c, alpha, a: params.a(), b: params.b(), p, value: params.quantile(p)? });
        }
    }
    Ok(rows)
}

/// Columns: method, c, alpha, a, b, p, value.
pub fn write_percentile_csv<W: Write>(rows: &[PercentileRow], w: W) -> Result<()> {
    write_csv(
        w,
        &["method", "c", "alpha", "a", "b", "p", "value"],
        rows.iter().map(|r| {
            vec![r.method.label().to_string(), num(r.c), num(r.alpha), num(r.a), num(r.b), num(r.p), num(r.value)]
        }),
    )
}

/// 400 log-spaced distances from 1e-4 to 1e3.
pub fn default_y_grid() -> Vec<f64> {
    log_grid(1e-4, 1e3, 400)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogitRow {
    pub method: LocationMethod,
    pub c: f64,
    pub alpha: f64,
    pub y: f64,
    pub density: f64,
}

/// Density of Y = |logit(X) − logit(c)| on `y_grid` for each method and α.
pub fn logit_comparison(c: f64, alphas: &[f64], methods: &[LocationMethod], y_grid: &[f64]) -> Result<Vec<LogitRow>> {
    let mut rows = Vec::with_capacity(alphas.len() * methods.len() * y_grid.len());
    for &method in methods {
        for &alpha in alphas {
            let params = method.params(c, alpha)?;
            for &y in y_grid {
                let density = logit_distance_log_density(&params, c, y)?.exp();
                rows.push(LogitRow { method, c, alpha, y, density });
            }
        }
    }
    Ok(rows)
}

/// Columns: method, c, alpha, y, density.
pub fn write_logit_csv<W: Write>(rows: &[LogitRow], w: W) -> Result<()> {
    write_csv(
        w,
        &["method", "c", "alpha", "y", "density"],
        rows.iter().map(|r| vec![r.method.label().to_string(), num(r.c), num(r.alpha), num(r.y), num(r.density)]),
    )
}
