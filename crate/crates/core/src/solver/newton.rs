use serde::Serialize;

use super::baselines::mean_method_fixed_variance;
use super::constraint::ScaleConstraint;
use super::kkt::{gradient_hessian, newton_eq_step};
use crate::distributions::{BetaParams, DirichletParams, SimplexPoint};
use crate::error::{domain, Error, Result};
use crate::special::log_gamma_unchecked;

/// Step size, iteration budget, tolerance and restart budget of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub rho: f64,
    pub maxiter: usize,
    pub tol: f64,
    pub max_restarts: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { rho: 0.5, maxiter: 100, tol: 1e-8, max_restarts: 5 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(domain(format!("step size must lie in (0, 1], got {}", self.rho)));
        }
        if self.maxiter == 0 {
            return Err(domain("maxiter must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(domain(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

/// Outcome of a successful solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub params: DirichletParams,
    /// Iterations summed over every attempt, including failed ones.
    pub iterations: usize,
    pub restarts: usize,
    /// h(a) at the returned parameters.
    pub final_h: f64,
    /// Σ |a_i / a_i′ − 1| of the last update.
    pub final_step_norm: f64,
    pub converged: bool,
    /// Step size and iteration budget of the attempt that converged.
    pub final_rho: f64,
    pub final_maxiter: usize,
    /// ‖g + λ Jᵀ‖∞ with λ from a KKT solve at the returned parameters.
    pub kkt_residual: f64,
}

impl SolveReport {
    /// The two-parameter solution as a Beta distribution.
    pub fn beta(&self) -> Result<BetaParams> {
        self.params.as_beta()
    }
}

struct Attempt {
    a: Vec<f64>,
    iterations: usize,
    converged: bool,
    step_norm: f64,
}

/// One run of the damped equality-constrained Newton iteration.
fn newton_attempt(
    ln_c: &[f64],
    constraint: &ScaleConstraint,
    init: &[f64],
    rho: f64,
    maxiter: usize,
    tol: f64,
) -> Attempt {
    let mut a = init.to_vec();
    let mut step_norm = f64::INFINITY;
    for iter in 1..=maxiter {
        let (g, hess) = gradient_hessian(ln_c, &a);
        let h = constraint.value(&a);
        let jac = constraint.jacobian(&a);
        if !h.is_finite() || jac.iter().any(|j| !j.is_finite()) {
            return Attempt { a, iterations: iter, converged: false, step_norm };
        }
        let delta = match newton_eq_step(&g, &hess, &jac, h) {
            Ok((delta, _lambda)) => delta,
            Err(_) => return Attempt { a, iterations: iter, converged: false, step_norm },
        };
        let prev = a.clone();
        for ((ai, &pi), di) in a.iter_mut().zip(&prev).zip(&delta) {
            *ai = pi + rho * di;
            if *ai <= 0.0 {
                *ai = pi / 2.0;
            }
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Attempt { a: prev, iterations: iter, converged: false, step_norm };
        }
        step_norm = a.iter().zip(&prev).map(|(x, p)| (x / p - 1.0).abs()).sum();
        if h.abs() + step_norm < tol {
            return Attempt { a, iterations: iter, converged: true, step_norm };
        }
    }
    Attempt { a, iterations: maxiter, converged: false, step_norm }
}

fn kkt_residual(ln_c: &[f64], constraint: &ScaleConstraint, a: &[f64]) -> f64 {
    let (g, hess) = gradient_hessian(ln_c, a);
    let jac = constraint.jacobian(a);
    let h = constraint.value(a);
    match newton_eq_step(&g, &hess, &jac, h) {
        Ok((_, lambda)) => g.iter().zip(&jac).map(|(gi, ji)| (gi + lambda * ji).abs()).fold(0.0, f64::max),
        Err(_) => f64::INFINITY,
    }
}

/// Full Newton steps (ρ = 1) taken after convergence while they keep every
/// shape positive and shrink the KKT residual.
const POLISH_STEPS: usize = 8;

fn polish(ln_c: &[f64], constraint: &ScaleConstraint, a: Vec<f64>) -> (Vec<f64>, f64) {
    let mut best = a;
    let mut best_res = kkt_residual(ln_c, constraint, &best);
    for _ in 0..POLISH_STEPS {
        let (g, hess) = gradient_hessian(ln_c, &best);
        let h = constraint.value(&best);
        let Ok((delta, _)) = newton_eq_step(&g, &hess, &constraint.jacobian(&best), h) else {
            break;
        };
        let next: Vec<f64> = best.iter().zip(&delta).map(|(x, d)| x + d).collect();
        if next.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            break;
        }
        let res = kkt_residual(ln_c, constraint, &next);
        let feasible = constraint.value(&next).abs() <= constraint.value(&best).abs().max(1e-12);
        if !(res < best_res && feasible) {
            break;
        }
        best = next;
        best_res = res;
    }
    (best, best_res)
}

/// Runs attempts from `init`, shrinking ρ by 5 and growing maxiter by 5
/// after each failure, up to `cfg.max_restarts` restarts.
fn solve_from(ln_c: &[f64], constraint: &ScaleConstraint, init: &[f64], cfg: &SolverConfig) -> Result<SolveReport> {
    let mut rho = cfg.rho;
    let mut maxiter = cfg.maxiter;
    let mut total = 0;
    for restart in 0..=cfg.max_restarts {
        let attempt = newton_attempt(ln_c, constraint, init, rho, maxiter, cfg.tol);
        total += attempt.iterations;
        if attempt.converged {
            let (a, kkt) = polish(ln_c, constraint, attempt.a);
            return Ok(SolveReport {
                final_h: constraint.value(&a),
                params: DirichletParams::new(a)?,
                iterations: total,
                restarts: restart,
                final_step_norm: attempt.step_norm,
                converged: true,
                final_rho: rho,
                final_maxiter: maxiter,
                kkt_residual: kkt,
            });
        }
        rho /= 5.0;
        maxiter *= 5;
    }
    Err(Error::ConvergenceFailure { iterations: total, restarts: cfg.max_restarts })
}

/// Solves from each start in turn and keeps the converged solution with the
/// highest density at c. The first start is the primary one; the others only
/// matter for nonlinear constraints, whose feasible set is not convex and can
/// carry more than one stationary point.
fn solve_multistart(
    ln_c: &[f64],
    constraint: &ScaleConstraint,
    starts: &[Vec<f64>],
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    cfg.validate()?;
    constraint.validate(ln_c.len())?;
    let mut best: Option<(f64, SolveReport)> = None;
    let mut first_err = None;
    let mut spent = 0;
    for init in starts {
        // Once a start has converged, later ones get no more restarts than it
        // needed.
        let cfg = match &best {
            Some((_, b)) => &SolverConfig { max_restarts: cfg.max_restarts.min(b.restarts), ..*cfg },
            None => cfg,
        };
        match solve_from(ln_c, constraint, init, cfg) {
            Ok(mut r) => {
                spent += r.iterations;
                r.iterations = spent;
                let obj = log_density_ln(ln_c, r.params.alpha());
                if best.as_ref().is_none_or(|(b, _)| obj > *b) {
                    best = Some((obj, r));
                } else if let Some((_, b)) = best.as_mut() {
                    b.iterations = spent;
                }
            }
            Err(e) => {
                if let Error::ConvergenceFailure { iterations, .. } = e {
                    spent += iterations;
                }
                first_err.get_or_insert(e);
            }
        }
    }
    match (best, first_err) {
        (Some((_, r)), _) => Ok(r),
        (None, Some(Error::ConvergenceFailure { restarts, .. })) => {
            Err(Error::ConvergenceFailure { iterations: spent, restarts })
        }
        (None, Some(e)) => Err(e),
        (None, None) => Err(domain("no starting point")),
    }
}

fn log_density_ln(ln_c: &[f64], a: &[f64]) -> f64 {
    let s: f64 = a.iter().sum();
    log_gamma_unchecked(s) + a.iter().zip(ln_c).map(|(&ai, &lc)| (ai - 1.0) * lc - log_gamma_unchecked(ai)).sum::<f64>()
}

fn alt_starts(c: &[f64], constraint: &ScaleConstraint) -> Vec<Vec<f64>> {
    let mut starts = Vec::new();
    match *constraint {
        ScaleConstraint::Concentration(_) => return starts,
        ScaleConstraint::Variance(v) if c.len() == 2 => {
            if let Ok(p) = mean_method_fixed_variance(c[0], v) {
                starts.push(vec![p.a(), p.b()]);
            }
        }
        _ => {}
    }
    starts
}

fn algorithm1_init(c: &[f64]) -> Vec<f64> {
    c.iter().map(|ci| 10.0 * (ci + 1.0) / 2.0).collect()
}

/// Maximizes Dirichlet(c | a) subject to h(a) = 0, starting from
/// a_i = 10 (c_i + 1) / 2.
///
/// Nonlinear constraints also start from a = c and, for a Beta variance, from
/// the mean-matched parameters when they exist.
pub fn solve_max_density(c: &SimplexPoint, constraint: ScaleConstraint, cfg: &SolverConfig) -> Result<SolveReport> {
    let c = c.as_slice();
    let ln_c: Vec<f64> = c.iter().map(|x| x.ln()).collect();
    let mut starts = vec![algorithm1_init(c)];
    if !matches!(constraint, ScaleConstraint::Concentration(_)) {
        starts.push(c.to_vec());
    }
    starts.extend(alt_starts(c, &constraint));
    solve_multistart(&ln_c, &constraint, &starts, cfg)
}

/// Maximizes Beta(c | a, b) subject to h(a, b) = 0, starting from
/// (a, b) = (c, 1 − c).
///
/// A variance constraint also starts from (5 (c + 1), 5 (2 − c)) and from the
/// mean-matched parameters when they exist.
pub fn solve_max_density_beta(c: f64, constraint: ScaleConstraint, cfg: &SolverConfig) -> Result<SolveReport> {
    if !(c > 0.0 && c < 1.0) {
        return Err(domain(format!("target location must lie in (0, 1), got {c}")));
    }
    let ln_c = [c.ln(), (-c).ln_1p()];
    let target = [c, 1.0 - c];
    let mut starts = vec![target.to_vec()];
    if !matches!(constraint, ScaleConstraint::Concentration(_)) {
        starts.push(algorithm1_init(&target));
    }
    starts.extend(alt_starts(&target, &constraint));
    solve_multistart(&ln_c, &constraint, &starts, cfg)
}
