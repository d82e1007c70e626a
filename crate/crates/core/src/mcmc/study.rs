use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::chain::{run_chain, MhRun, DEFAULT_BURNIN, DEFAULT_ITERS};
use super::diagnostics::{acf, ks_distance_by};
use super::proposal::ProposalMethod;
use super::target::TargetDistribution;
use crate::error::{domain, Error, Result};
use crate::fmt::num;
use crate::seed::{derive_seed, hash_label};
use crate::solver::SolverConfig;

pub const DEFAULT_MAX_LAG: usize = 50;
pub const DEFAULT_REPS: usize = 100;

/// The grid of chains to run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySpec {
    pub targets: Vec<TargetDistribution>,
    pub methods: Vec<ProposalMethod>,
    pub reps: usize,
    pub iters: usize,
    pub burnin: usize,
    pub base_seed: u64,
    pub max_lag: usize,
    pub solver: SolverConfig,
}

impl Default for StudySpec {
    fn default() -> Self {
        Self {
            targets: TargetDistribution::ALL.to_vec(),
            methods: ProposalMethod::PRIMARY.to_vec(),
            reps: DEFAULT_REPS,
            iters: DEFAULT_ITERS,
            burnin: DEFAULT_BURNIN,
            base_seed: 0,
            max_lag: DEFAULT_MAX_LAG,
            solver: SolverConfig::default(),
        }
    }
}

/// Seed of one replicate, a hash of (base seed, target, method and its
/// scale, replicate index). Independent of the order of the grid.
pub fn replicate_seed(base_seed: u64, target: TargetDistribution, method: &ProposalMethod, rep: usize) -> u64 {
    derive_seed(
        base_seed,
        &[hash_label(target.label()), hash_label(method.label()), method.scale().to_bits(), rep as u64],
    )
}

/// Diagnostics of one replicate chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateRow {
    pub target: TargetDistribution,
    pub method: ProposalMethod,
    pub rep: usize,
    pub seed: u64,
    pub ks: f64,
    pub acceptance_rate: f64,
    pub reverse_impossible: usize,
    pub solver_failures: usize,
    pub boundary_rejections: usize,
    /// ρ̂(0..=max_lag). A chain that never moved after burn-in has ρ̂ ≡ 1.
    pub acf: Vec<f64>,
}

/// Across-replicate ACF summary at one lag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfSummary {
    pub target: TargetDistribution,
    pub method: ProposalMethod,
    pub lag: usize,
    pub acf_mean: f64,
    pub acf_sd: f64,
}

fn summarize(run: &MhRun, rep: usize, max_lag: usize) -> Result<ReplicateRow> {
    let acf = match acf(&run.states, max_lag) {
        Ok(r) => r,
        Err(Error::DegenerateSeries(_)) => vec![1.0; max_lag + 1],
        Err(e) => return Err(e),
    };
    Ok(ReplicateRow {
        target: run.target,
        method: run.method,
        rep,
        seed: run.seed,
        ks: ks_distance_by(&run.states, |x| run.target.cdf(x))?,
        acceptance_rate: run.acceptance_rate(),
        reverse_impossible: run.reverse_impossible,
        solver_failures: run.solver_failures,
        boundary_rejections: run.boundary_rejections,
        acf,
    })
}

/// Runs every (target, method, replicate) chain in parallel. Rows come back
/// ordered by target, then method, then replicate, whatever the scheduling.
pub fn replicate_study(spec: &StudySpec) -> Result<Vec<ReplicateRow>> {
    if spec.reps == 0 || spec.iters <= spec.max_lag {
        return Err(domain("need reps > 0 and iters > max_lag"));
    }
    for m in &spec.methods {
        m.validate()?;
    }
    let jobs: Vec<(TargetDistribution, ProposalMethod, usize)> = spec
        .targets
        .iter()
        .flat_map(|&t| spec.methods.iter().flat_map(move |&m| (0..spec.reps).map(move |r| (t, m, r))))
        .collect();
    jobs.par_iter()
        .map(|&(t, m, rep)| {
            let seed = replicate_seed(spec.base_seed, t, &m, rep);
            let run = run_chain(t, m, spec.iters, spec.burnin, seed, &spec.solver)?;
            summarize(&run, rep, spec.max_lag)
        })
        .collect()
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let sd = if xs.len() > 1 { (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt() } else { 0.0 };
    (mean, sd)
}

/// Mean and standard deviation of ρ̂(k) over replicates, per (target, method).
pub fn acf_summary(rows: &[ReplicateRow]) -> Vec<AcfSummary> {
    let mut out = Vec::new();
    let mut groups: Vec<(TargetDistribution, ProposalMethod)> = Vec::new();
    for r in rows {
        if !groups.contains(&(r.target, r.method)) {
            groups.push((r.target, r.method));
        }
    }
    for (t, m) in groups {
        let members: Vec<&ReplicateRow> = rows.iter().filter(|r| r.target == t && r.method == m).collect();
        let lags = members.iter().map(|r| r.acf.len()).min().unwrap_or(0);
        for lag in 0..lags {
            let xs: Vec<f64> = members.iter().map(|r| r.acf[lag]).collect();
            let (acf_mean, acf_sd) = mean_sd(&xs);
            out.push(AcfSummary { target: t, method: m, lag, acf_mean, acf_sd });
        }
    }
    out
}

/// Median KS distance over replicates of one (target, method) cell.
pub fn median_ks(rows: &[ReplicateRow], target: TargetDistribution, method: &ProposalMethod) -> Option<f64> {
    let mut ks: Vec<f64> = rows.iter().filter(|r| r.target == target && r.method == *method).map(|r| r.ks).collect();
    if ks.is_empty() {
        return None;
    }
    ks.sort_by(f64::total_cmp);
    let n = ks.len();
    Some(if n % 2 == 1 { ks[n / 2] } else { 0.5 * (ks[n / 2 - 1] + ks[n / 2]) })
}

/// Columns: target, method, scale, rep, seed, ks, acceptance_rate,
/// reverse_impossible, solver_failures, boundary_rejections.
pub fn write_ks_csv<W: Write>(rows: &[ReplicateRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let res: std::result::Result<(), csv::Error> = (|| {
        wtr.write_record([
            "target",
            "method",
            "scale",
            "rep",
            "seed",
            "ks",
            "acceptance_rate",
            "reverse_impossible",
            "solver_failures",
            "boundary_rejections",
        ])?;
        for r in rows {
            wtr.write_record([
                r.target.label().to_string(),
                r.method.label().to_string(),
                num(r.method.scale()),
                r.rep.to_string(),
                r.seed.to_string(),
                num(r.ks),
                num(r.acceptance_rate),
                r.reverse_impossible.to_string(),
                r.solver_failures.to_string(),
                r.boundary_rejections.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    })();
    res.map_err(|e| domain(format!("writing CSV: {e}")))
}

/// Columns: target, method, scale, lag, acf_mean, acf_sd.
pub fn write_acf_csv<W: Write>(summary: &[AcfSummary], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let res: std::result::Result<(), csv::Error> = (|| {
        wtr.write_record(["target", "method", "scale", "lag", "acf_mean", "acf_sd"])?;
        for s in summary {
            wtr.write_record([
                s.target.label().to_string(),
                s.method.label().to_string(),
                num(s.method.scale()),
                s.lag.to_string(),
                num(s.acf_mean),
                num(s.acf_sd),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    })();
    res.map_err(|e| domain(format!("writing CSV: {e}")))
}

/// Columns: target, method, scale, rep, lag, acf.
pub fn write_acf_replicates_csv<W: Write>(rows: &[ReplicateRow], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let res: std::result::Result<(), csv::Error> = (|| {
        wtr.write_record(["target", "method", "scale", "rep", "lag", "acf"])?;
        for r in rows {
            for (lag, v) in r.acf.iter().enumerate() {
                wtr.write_record([
                    r.target.label().to_string(),
                    r.method.label().to_string(),
                    num(r.method.scale()),
                    r.rep.to_string(),
                    lag.to_string(),
                    num(*v),
                ])?;
            }
        }
        wtr.flush()?;
        Ok(())
    })();
    res.map_err(|e| domain(format!("writing CSV: {e}")))
}
