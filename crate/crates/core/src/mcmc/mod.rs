//! Metropolis–Hastings on (0, 1) with Beta proposals built from the current
//! state, plus the autocorrelation and Kolmogorov–Smirnov diagnostics.

mod chain;
mod diagnostics;
mod proposal;
mod study;
mod target;

pub use chain::{
    log_hastings_ratio, mh_step, run_chain, ChainState, MhRun, StepOutcome, DEFAULT_BURNIN, DEFAULT_ITERS,
    INITIAL_STATE,
};
pub use diagnostics::{acf, ks_distance_by};
pub use proposal::{propose, ProposalMethod, DEFAULT_CONCENTRATION, DEFAULT_VARIANCE};
pub use study::{
    acf_summary, median_ks, replicate_seed, replicate_study, write_acf_csv, write_acf_replicates_csv, write_ks_csv,
    AcfSummary, ReplicateRow, StudySpec, DEFAULT_MAX_LAG, DEFAULT_REPS,
};
pub use target::TargetDistribution;

/// Kolmogorov–Smirnov distance between chain states and the exact target CDF.
pub fn ks_distance(states: &[f64], target: &TargetDistribution) -> crate::Result<f64> {
    ks_distance_by(states, |x| target.cdf(x))
}
