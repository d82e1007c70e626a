use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::proposal::{propose, ProposalMethod};
use super::target::TargetDistribution;
use crate::distributions::BetaParams;
use crate::error::{domain, Error, Result};
use crate::solver::SolverConfig;

pub const INITIAL_STATE: f64 = 0.25;
pub const DEFAULT_ITERS: usize = 10_000;
pub const DEFAULT_BURNIN: usize = 100;

/// What happened on one Metropolis–Hastings move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted,
    /// Hastings test failed.
    Rejected,
    /// No proposal distribution exists at x′, so the reverse move is
    /// impossible (method III).
    ReverseImpossible,
    /// The parameter solve at x′ failed.
    SolverFailure,
    /// The Beta draw rounded to 0 or 1.
    Boundary,
}

/// ln of π(x′) Beta(x | a_x′, b_x′) / (π(x) Beta(x′ | a_x, b_x)).
///
/// Swapping the roles of (x, p_x) and (x′, p_x′) negates the result.
pub fn log_hastings_ratio(target: &TargetDistribution, x: f64, px: &BetaParams, x_new: f64, p_new: &BetaParams) -> f64 {
    (target.log_density(x_new) + p_new.log_density_unchecked(x))
        - (target.log_density(x) + px.log_density_unchecked(x_new))
}

/// A chain position together with the proposal parameters at it, so each
/// move needs only the solve at x′.
pub struct ChainState {
    x: f64,
    params: BetaParams,
}

impl ChainState {
    pub fn new(method: &ProposalMethod, x: f64, cfg: &SolverConfig) -> Result<Self> {
        Ok(Self { x, params: propose(method, x, cfg)? })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn params(&self) -> &BetaParams {
        &self.params
    }

    pub fn step<R: Rng + ?Sized>(
        &mut self,
        target: &TargetDistribution,
        method: &ProposalMethod,
        cfg: &SolverConfig,
        rng: &mut R,
    ) -> StepOutcome {
        let x_new = self.params.sample(rng);
        if !(x_new > 0.0 && x_new < 1.0) {
            return StepOutcome::Boundary;
        }
        let p_new = match propose(method, x_new, cfg) {
            Ok(p) => p,
            Err(Error::NonExistence { .. }) => return StepOutcome::ReverseImpossible,
            Err(_) => return StepOutcome::SolverFailure,
        };
        let log_ratio = log_hastings_ratio(target, self.x, &self.params, x_new, &p_new);
        let u: f64 = rng.sample(Open01);
        if u.ln() < log_ratio {
            self.x = x_new;
            self.params = p_new;
            StepOutcome::Accepted
        } else {
            StepOutcome::Rejected
        }
    }
}

/// One move from `x`, returning the next state and whether it moved.
pub fn mh_step<R: Rng + ?Sized>(
    target: &TargetDistribution,
    method: &ProposalMethod,
    x: f64,
    cfg: &SolverConfig,
    rng: &mut R,
) -> Result<(f64, bool)> {
    let mut state = ChainState::new(method, x, cfg)?;
    let outcome = state.step(target, method, cfg, rng);
    Ok((state.x, outcome == StepOutcome::Accepted))
}

/// Post-burn-in states and move counts of one chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MhRun {
    pub target: TargetDistribution,
    pub method: ProposalMethod,
    pub seed: u64,
    pub iters: usize,
    pub burnin: usize,
    pub states: Vec<f64>,
    /// Counts over burn-in and sampling moves together.
    pub accepted: usize,
    pub reverse_impossible: usize,
    pub solver_failures: usize,
    pub boundary_rejections: usize,
}

impl MhRun {
    pub fn moves(&self) -> usize {
        self.iters + self.burnin
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.accepted as f64 / self.moves() as f64
    }
}

/// Runs `burnin + iters` moves from x = 0.25 with a ChaCha8 stream seeded by
/// `seed`, keeping the last `iters` states.
pub fn run_chain(
    target: TargetDistribution,
    method: ProposalMethod,
    iters: usize,
    burnin: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<MhRun> {
    if iters == 0 {
        return Err(domain("iters must be positive"));
    }
    method.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = ChainState::new(&method, INITIAL_STATE, cfg)?;
    let mut run = MhRun {
        target,
        method,
        seed,
        iters,
        burnin,
        states: Vec::with_capacity(iters),
        accepted: 0,
        reverse_impossible: 0,
        solver_failures: 0,
        boundary_rejections: 0,
    };
    for i in 0..burnin + iters {
        match state.step(&target, &method, cfg, &mut rng) {
            StepOutcome::Accepted => run.accepted += 1,
            StepOutcome::Rejected => {}
            StepOutcome::ReverseImpossible => run.reverse_impossible += 1,
            StepOutcome::SolverFailure => run.solver_failures += 1,
            StepOutcome::Boundary => run.boundary_rejections += 1,
        }
        if i >= burnin {
            run.states.push(state.x());
        }
    }
    Ok(run)
}
