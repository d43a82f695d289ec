//! Gaussian-process Bayesian optimization with a Matérn 5/2 kernel.

mod acquisition;
mod bayesopt;
mod kernel;
mod model;

use thiserror::Error;

pub use acquisition::{expected_improvement, normal_cdf, normal_pdf, ucb_acquisition, Acquisition};
pub use bayesopt::{
    argmax_acquisition, bayesopt_loop, default_bounds, propose_next, random_search, BayesOptOutcome, Evaluation,
    OptimizeConfig, LENGTHSCALE_GRID, LOCAL_SCALES,
};
pub use kernel::{matern52_profile, Matern52};
pub use model::{GpModel, Posterior, JITTER_LADDER};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite input")]
    NonFiniteInput,
    #[error("cannot fit a GP to zero observations")]
    Empty,
    #[error("covariance matrix is not positive definite even with jitter {max_jitter}")]
    IllConditioned { max_jitter: f64 },
    #[error("invalid optimizer configuration: {0}")]
    InvalidConfig(String),
    #[error("every objective evaluation failed")]
    AllEvaluationsFailed,
}
