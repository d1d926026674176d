//! Gaussian-process regression of an opponent's offer stream.
//!
//! Each issue dimension gets its own process over round indices. Kernel
//! inverses are never formed: predictions go through a Cholesky factor of
//! `K + noise·I`, with diagonal jitter escalated on failure.

mod bench;
mod fit;
mod kernel;
pub mod linalg;
mod model;

pub use bench::{predict_next, repeat_last_distance, walk_forward_distance, walk_forward_errors, KernelChoice};
pub use fit::{fit_hyperparams, fit_hyperparams_with, log_marginal_likelihood, nelder_mead, MAX_ITERATIONS, START_POINTS};
pub use kernel::{kernel_eval, KernelFamily, KernelSpec, MaternNu};
pub use model::{covariance_matrix, factor_covariance, gp_predict, gp_sample, GpModel, GpOutput, Prediction, PriorMean};
