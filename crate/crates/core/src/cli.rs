//! Command-line front end. Every subcommand that writes files also writes
//! `manifest.json`, whose `argv` replays the run byte for byte.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::distributions::{taylor_mean_cosine_error, SimplexPoint};
use crate::experiments::{
    coverage_rows, default_alphas, iqr_at_matched_average, load_cosmic_path, log_grid, logit_comparison,
    percentile_table, signature_scale_sweep, summarize_sweep, synthetic_catalog, write_catalog, write_coverage_csv,
    write_logit_csv, write_percentile_csv, write_summary_csv, write_sweep_csv, CoverageSpec, LocationMethod,
    PriorMethod, ScaleSweep, TargetMode, DEFAULT_GRID_POINTS, DEFAULT_GRID_RANGE, DEFAULT_MC_SAMPLES,
};
use crate::fmt::num;
use crate::mcmc::{
    acf_summary, replicate_study, write_acf_csv, write_acf_replicates_csv, write_ks_csv, ProposalMethod, StudySpec,
    TargetDistribution,
};
use crate::solver::{solve_max_density, ScaleConstraint, SolverConfig};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "maxdens", version, about = "Maximum-density Beta and Dirichlet parameterization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one maximum-density problem and print the parameters.
    Solve(SolveArgs),
    /// Metropolis-Hastings replicate study: KS distances and autocorrelations.
    Mh(MhArgs),
    /// Exact frequentist coverage of Beta-Binomial HPD intervals.
    Coverage(CoverageArgs),
    /// Density of the logit distance |logit(X) − logit(c)| per method.
    Logit(LogitArgs),
    /// Percentiles of Beta distributions located at c per method.
    Percentiles(PercentileArgs),
    /// Monte Carlo mean cosine error of signature Dirichlets over a scale grid.
    Signatures(SignatureArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Solve(_) => "solve",
            Self::Mh(_) => "mh",
            Self::Coverage(_) => "coverage",
            Self::Logit(_) => "logit",
            Self::Percentiles(_) => "percentiles",
            Self::Signatures(_) => "signatures",
            Self::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Newton step size.
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    /// Iteration budget of the first attempt.
    #[arg(long, default_value_t = 100)]
    pub maxiter: usize,
    /// Convergence tolerance on |h| + Σ|a/a′ − 1|.
    #[arg(long, default_value = "1e-8")]
    pub tol: f64,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        SolverConfig { rho: self.rho, maxiter: self.maxiter, tol: self.tol, ..SolverConfig::default() }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Beta,
    Dirichlet,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    Concentration,
    Variance,
    Cosine,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[arg(long, value_enum, default_value_t = Family::Beta)]
    pub family: Family,
    /// Target location: c for beta, a comma-separated vector for dirichlet
    /// (normalized to sum to one).
    #[arg(long, value_delimiter = ',', required = true)]
    pub target: Vec<f64>,
    #[arg(long, value_enum)]
    pub constraint: ConstraintKind,
    /// Constraint value: α, v or κ.
    #[arg(long)]
    pub value: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Also write solve.csv and the manifest to this directory.
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MhArgs {
    #[arg(long, value_delimiter = ',', default_value = "A,B,C,D")]
    pub targets: Vec<TargetDistribution>,
    /// Proposal methods as LABEL or LABEL=scale: I, II, III, IV, M-alpha,
    /// M-v, M-adaptive.
    #[arg(long, value_delimiter = ',', default_value = "I,II,III,IV")]
    pub methods: Vec<ProposalMethod>,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub iters: usize,
    #[arg(long, default_value_t = 100)]
    pub burnin: usize,
    #[arg(long, default_value_t = 50)]
    pub max_lag: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeChoice {
    Fixed,
    Oracle,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PriorChoice {
    Mean,
    MaxDensity,
    Both,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CoverageArgs {
    /// Binomial sample size.
    #[arg(long, default_value_t = 100)]
    pub n: u64,
    /// Prior concentration.
    #[arg(long, default_value_t = 10.0)]
    pub alpha: f64,
    /// Prior location in fixed mode.
    #[arg(long, default_value_t = 1e-3)]
    pub c: f64,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long, value_enum, default_value_t = ModeChoice::Both)]
    pub mode: ModeChoice,
    #[arg(long, value_enum, default_value_t = PriorChoice::Both)]
    pub prior: PriorChoice,
    #[arg(long, default_value_t = DEFAULT_GRID_RANGE.0)]
    pub theta_min: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_RANGE.1)]
    pub theta_max: f64,
    /// Number of log-spaced θ₀ values.
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    pub theta_points: usize,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LogitArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.2")]
    pub c: Vec<f64>,
    /// Concentrations; defaults to 25 log-spaced values in [0.1, 100].
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "mean,max-density,median")]
    pub methods: Vec<LocationMethod>,
    #[arg(long, default_value_t = 1e-4)]
    pub y_min: f64,
    #[arg(long, default_value_t = 1e3)]
    pub y_max: f64,
    #[arg(long, default_value_t = 400)]
    pub y_points: usize,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PercentileArgs {
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.2")]
    pub c: Vec<f64>,
    /// Concentrations; defaults to 25 log-spaced values in [0.1, 100].
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', default_value = "mean,max-density,median")]
    pub methods: Vec<LocationMethod>,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SignatureArgs {
    /// Tab-separated catalog with a Type column and one column per
    /// signature. Without it a synthetic catalog is generated.
    #[arg(long)]
    pub catalog: Option<PathBuf>,
    /// Size of the synthetic catalog.
    #[arg(long, default_value_t = 10)]
    pub synthetic: usize,
    /// Mean-method concentrations; defaults to 8 log-spaced values in
    /// [10^1.5, 10^5].
    #[arg(long, value_delimiter = ',')]
    pub alphas: Option<Vec<f64>>,
    /// Maximum-density cosine-error targets; defaults to 7 log-spaced
    /// values in [1e-4, 0.1].
    #[arg(long, value_delimiter = ',')]
    pub kappas: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    pub mc_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest: PathBuf,
    /// Output directory for the replayed run.
    #[arg(long)]
    pub out: PathBuf,
}

/// Written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Arguments after the binary name, without `--out`.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    /// Every parameter after defaults are applied.
    pub parameters: serde_json::Value,
    /// File names relative to the output directory.
    pub outputs: Vec<String>,
}

/// Drops `--out DIR` and `--out=DIR` from an argument list.
pub fn strip_out(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
        } else if !a.starts_with("--out=") {
            out.push(a.clone());
        }
    }
    out
}

/// Parses `argv` (without the binary name) and runs it.
pub fn run(argv: &[String]) -> anyhow::Result<()> {
    let cli = Cli::try_parse_from(std::iter::once("maxdens".to_string()).chain(argv.iter().cloned()))?;
    execute(cli.command, &strip_out(argv))
}

fn execute(command: Command, argv: &[String]) -> anyhow::Result<()> {
    match command {
        Command::Solve(a) => cmd_solve(&a, argv),
        Command::Mh(a) => cmd_mh(&a, argv),
        Command::Coverage(a) => cmd_coverage(&a, argv),
        Command::Logit(a) => cmd_logit(&a, argv),
        Command::Percentiles(a) => cmd_percentiles(&a, argv),
        Command::Signatures(a) => cmd_signatures(&a, argv),
        Command::Replay(a) => cmd_replay(&a),
    }
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?))
}

fn write_manifest<P: Serialize>(
    dir: &Path,
    subcommand: &str,
    argv: &[String],
    seed: Option<u64>,
    params: &P,
    outputs: &[&str],
) -> anyhow::Result<()> {
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: subcommand.into(),
        argv: argv.to_vec(),
        seed,
        parameters: serde_json::to_value(params)?,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
    };
    let mut w = create(dir, MANIFEST_FILE)?;
    serde_json::to_writer_pretty(&mut w, &manifest)?;
    w.write_all(b"\n")?;
    Ok(())
}

fn prepare(dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn cmd_solve(args: &SolveArgs, argv: &[String]) -> anyhow::Result<()> {
    let target = match args.family {
        Family::Beta => match args.target.as_slice() {
            [c] => SimplexPoint::binary(*c)?,
            other => bail!("--family beta takes one target value, got {}", other.len()),
        },
        Family::Dirichlet => SimplexPoint::new(args.target.clone())?,
    };
    let constraint = match args.constraint {
        ConstraintKind::Concentration => ScaleConstraint::Concentration(args.value),
        ConstraintKind::Variance => ScaleConstraint::Variance(args.value),
        ConstraintKind::Cosine => ScaleConstraint::MeanCosineError(args.value),
    };
    let report = solve_max_density(&target, constraint, &args.solver.config())?;
    let p = &report.params;
    let mut summary: Vec<(String, String)> = vec![
        ("constraint".into(), constraint.label().into()),
        ("value".into(), num(args.value)),
        ("converged".into(), report.converged.to_string()),
        ("iterations".into(), report.iterations.to_string()),
        ("restarts".into(), report.restarts.to_string()),
        ("final_rho".into(), num(report.final_rho)),
        ("final_maxiter".into(), report.final_maxiter.to_string()),
        ("final_h".into(), num(report.final_h)),
        ("final_step_norm".into(), num(report.final_step_norm)),
        ("kkt_residual".into(), num(report.kkt_residual)),
        ("log_density_at_target".into(), num(p.log_density(&target)?)),
        ("concentration".into(), num(p.concentration())),
        ("taylor_mean_cosine_error".into(), num(taylor_mean_cosine_error(p))),
    ];
    if let Ok(b) = p.as_beta() {
        summary.push(("variance".into(), num(b.variance())));
        summary.push(("mean".into(), num(b.mean())));
        summary.push(("median".into(), num(b.median())));
    }
    let mut text = String::new();
    for (i, a) in p.alpha().iter().enumerate() {
        text.push_str(&format!("a[{i}]={}\n", num(*a)));
    }
    for (k, v) in &summary {
        text.push_str(&format!("{k}={v}\n"));
    }
    print_ignoring_closed_pipe(&text)?;
    if let Some(dir) = &args.out {
        prepare(dir)?;
        let mut w = csv::Writer::from_writer(create(dir, "solve.csv")?);
        w.write_record(["field", "value"])?;
        for (i, a) in p.alpha().iter().enumerate() {
            w.write_record([format!("a[{i}]"), num(*a)])?;
        }
        for (k, v) in &summary {
            w.write_record([k, v])?;
        }
        w.flush()?;
        write_manifest(dir, "solve", argv, None, args, &["solve.csv"])?;
    }
    Ok(())
}

/// Writes to stdout; a reader that has gone away (`| head`) is not an error.
fn print_ignoring_closed_pipe(text: &str) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn cmd_mh(args: &MhArgs, argv: &[String]) -> anyhow::Result<()> {
    let spec = StudySpec {
        targets: args.targets.clone(),
        methods: args.methods.clone(),
        reps: args.reps,
        iters: args.iters,
        burnin: args.burnin,
        base_seed: args.seed,
        max_lag: args.max_lag,
        solver: args.solver.config(),
    };
    let rows = replicate_study(&spec)?;
    prepare(&args.out)?;
    write_ks_csv(&rows, create(&args.out, "ks.csv")?)?;
    write_acf_csv(&acf_summary(&rows), create(&args.out, "acf.csv")?)?;
    write_acf_replicates_csv(&rows, create(&args.out, "acf_replicates.csv")?)?;
    write_manifest(&args.out, "mh", argv, Some(args.seed), args, &["ks.csv", "acf.csv", "acf_replicates.csv"])
}

fn cmd_coverage(args: &CoverageArgs, argv: &[String]) -> anyhow::Result<()> {
    let spec = CoverageSpec {
        n: args.n,
        alpha: args.alpha,
        c: args.c,
        theta_grid: log_grid(args.theta_min, args.theta_max, args.theta_points),
        level: args.level,
        ..CoverageSpec::default()
    };
    let modes: &[TargetMode] = match args.mode {
        ModeChoice::Fixed => &[TargetMode::FixedC],
        ModeChoice::Oracle => &[TargetMode::Oracle],
        ModeChoice::Both => &TargetMode::ALL,
    };
    let methods: &[PriorMethod] = match args.prior {
        PriorChoice::Mean => &[PriorMethod::Mean],
        PriorChoice::MaxDensity => &[PriorMethod::MaxDensity],
        PriorChoice::Both => &PriorMethod::ALL,
    };
    let rows = coverage_rows(&spec, modes, methods)?;
    prepare(&args.out)?;
    write_coverage_csv(&rows, create(&args.out, "coverage.csv")?)?;
    write_manifest(&args.out, "coverage", argv, None, args, &["coverage.csv"])
}

fn cmd_logit(args: &LogitArgs, argv: &[String]) -> anyhow::Result<()> {
    let alphas = args.alphas.clone().unwrap_or_else(default_alphas);
    let y_grid = log_grid(args.y_min, args.y_max, args.y_points);
    let mut rows = Vec::new();
    for &c in &args.c {
        rows.extend(logit_comparison(c, &alphas, &args.methods, &y_grid)?);
    }
    prepare(&args.out)?;
    write_logit_csv(&rows, create(&args.out, "logit.csv")?)?;
    write_manifest(&args.out, "logit", argv, None, args, &["logit.csv"])
}

fn cmd_percentiles(args: &PercentileArgs, argv: &[String]) -> anyhow::Result<()> {
    let alphas = args.alphas.clone().unwrap_or_else(default_alphas);
    let mut rows = Vec::new();
    for &method in &args.methods {
        for &c in &args.c {
            rows.extend(percentile_table(method, c, &alphas)?);
        }
    }
    prepare(&args.out)?;
    write_percentile_csv(&rows, create(&args.out, "percentiles.csv")?)?;
    write_manifest(&args.out, "percentiles", argv, None, args, &["percentiles.csv"])
}

fn cmd_signatures(args: &SignatureArgs, argv: &[String]) -> anyhow::Result<()> {
    let catalog = match &args.catalog {
        Some(path) => load_cosmic_path(path)?,
        None => synthetic_catalog(args.synthetic, args.seed)?,
    };
    let mean = ScaleSweep::Mean(args.alphas.clone().unwrap_or_else(|| ScaleSweep::default_mean().grid().to_vec()));
    let max_density = ScaleSweep::MaxDensity(
        args.kappas.clone().unwrap_or_else(|| ScaleSweep::default_max_density().grid().to_vec()),
    );
    let mut rows = signature_scale_sweep(&catalog, &mean, args.mc_samples, args.seed)?;
    let md_rows = signature_scale_sweep(&catalog, &max_density, args.mc_samples, args.seed)?;
    let mean_summary = summarize_sweep(&rows);
    let md_summary = summarize_sweep(&md_rows);
    let matched = iqr_at_matched_average(&md_summary, &mean_summary);
    rows.extend(md_rows);
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        eprintln!("warning: {failures} sweep cells failed; see the error column of sweep.csv");
    }

    prepare(&args.out)?;
    let mut outputs = vec!["sweep.csv", "summary.csv", "matched_iqr.csv"];
    write_sweep_csv(&rows, create(&args.out, "sweep.csv")?)?;
    let summaries: Vec<_> = mean_summary.into_iter().chain(md_summary).collect();
    write_summary_csv(&summaries, create(&args.out, "summary.csv")?)?;
    let mut w = csv::Writer::from_writer(create(&args.out, "matched_iqr.csv")?);
    w.write_record(["average", "iqr_max_density", "iqr_mean"])?;
    for m in &matched {
        w.write_record([num(m.average), num(m.iqr_candidate), num(m.iqr_reference)])?;
    }
    w.flush()?;
    if args.catalog.is_none() {
        write_catalog(&catalog, create(&args.out, "catalog.tsv")?)?;
        outputs.push("catalog.tsv");
    }
    write_manifest(&args.out, "signatures", argv, Some(args.seed), args, &outputs)
}

fn cmd_replay(args: &ReplayArgs) -> anyhow::Result<()> {
    let file = File::open(&args.manifest).with_context(|| format!("opening {}", args.manifest.display()))?;
    let manifest: RunManifest = serde_json::from_reader(std::io::BufReader::new(file))
        .with_context(|| format!("parsing {}", args.manifest.display()))?;
    if manifest.argv.first().map(String::as_str) == Some("replay") {
        bail!("a manifest cannot record a replay");
    }
    let mut argv = manifest.argv.clone();
    argv.push("--out".into());
    argv.push(args.out.to_string_lossy().into_owned());
    run(&argv)
}

/// Process exit code for an error: 2 for infeasible or nonexistent
/// constraints, 3 for convergence failure, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<crate::Error>() {
        Some(crate::Error::InfeasibleConstraint(_) | crate::Error::NonExistence { .. }) => 2,
        Some(crate::Error::ConvergenceFailure { .. }) => 3,
        _ => 1,
    }
}

/// One-line JSON description of an error for stderr.
pub fn error_line(err: &anyhow::Error) -> String {
    let kind = err.downcast_ref::<crate::Error>().map_or("error", crate::Error::kind);
    serde_json::json!({ "error": kind, "message": format!("{err:#}"), "exit_code": exit_code(err) }).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn strip_out_removes_both_forms() {
        assert_eq!(strip_out(&s(&["mh", "--out", "d", "--reps", "2"])), s(&["mh", "--reps", "2"]));
        assert_eq!(strip_out(&s(&["mh", "--out=d"])), s(&["mh"]));
    }

    #[test]
    fn defaults_match_the_documented_values() {
        let cli = Cli::try_parse_from(["maxdens", "mh"]).unwrap();
        let Command::Mh(a) = cli.command else { panic!() };
        assert_eq!((a.reps, a.iters, a.burnin, a.seed), (100, 10_000, 100, 0));
        assert_eq!((a.solver.rho, a.solver.maxiter, a.solver.tol), (0.5, 100, 1e-8));
        assert_eq!(a.methods, ProposalMethod::PRIMARY.to_vec());
        let cli = Cli::try_parse_from(["maxdens", "coverage"]).unwrap();
        let Command::Coverage(a) = cli.command else { panic!() };
        assert_eq!((a.n, a.alpha, a.c), (100, 10.0, 1e-3));
    }

    #[test]
    fn exit_codes() {
        let infeasible = anyhow::Error::from(crate::Error::InfeasibleConstraint("v".into()));
        assert_eq!(exit_code(&infeasible), 2);
        let slow = anyhow::Error::from(crate::Error::ConvergenceFailure { iterations: 1, restarts: 5 });
        assert_eq!(exit_code(&slow), 3);
        assert_eq!(exit_code(&anyhow::anyhow!("io")), 1);
        let line: serde_json::Value = serde_json::from_str(&error_line(&infeasible)).unwrap();
        assert_eq!(line["error"], "infeasible_constraint");
    }
}
