//! The maximum-density parameter solver and its baselines.
//!
//! `solve_max_density` minimizes f(a) = −ln Dirichlet(c | a) subject to a
//! single equality constraint h(a) = 0 with a damped Newton iteration on the
//! KKT system, halving any coordinate that the step would make nonpositive.
//! When an attempt exhausts its budget the step size is divided by five, the
//! budget multiplied by five, and the iteration restarted.

mod baselines;
mod constraint;
mod kkt;
mod newton;

pub use baselines::{
    adaptive_sd, adaptive_variance_method, mean_method, mean_method_beta, mean_method_fixed_variance, median_method,
};
pub use constraint::ScaleConstraint;
pub use kkt::{neg_log_density_gradient_hessian, newton_eq_step};
pub use newton::{solve_max_density, solve_max_density_beta, SolveReport, SolverConfig};
