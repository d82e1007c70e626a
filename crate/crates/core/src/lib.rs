pub mod cli;
pub mod distributions;
pub mod error;
pub mod experiments;
pub mod fmt;
pub mod mcmc;
pub mod seed;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
