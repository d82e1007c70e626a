//! Beta and Dirichlet value types, densities, moments and sampling, plus the
//! logit-distance density and the cosine-error machinery.

mod beta;
mod cosine;
mod dirichlet;
pub(crate) mod gamma;
mod logit;

pub use beta::{beta_exists, BetaParams};
pub use cosine::{cosine_error, taylor_mean_cosine_error};
pub(crate) use cosine::{cosine_error_slices, power_sums};
pub use dirichlet::{DirichletParams, SimplexPoint};
pub use logit::{log1p_exp, logit, logit_distance_log_density, logit_distance_samples};
