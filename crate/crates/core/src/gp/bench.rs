//! Walk-forward evaluation of offer-stream predictors.
//!
//! Each offer from the third onward is predicted from all earlier offers;
//! the score is the mean Euclidean distance between offer and prediction.

use super::fit::fit_hyperparams;
use super::kernel::{KernelFamily, KernelSpec};
use super::model::{GpModel, PriorMean};
use crate::error::{Error, Result};

/// How the kernel of each walk-forward step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelChoice {
    /// Refit hyperparameters on the prefix at every step.
    Fitted(KernelFamily),
    Fixed(KernelSpec),
}

/// Offers are 1-based rounds: offer `t` (0-based) sits at round `t + 1`.
fn check_series(series: &[Vec<f64>]) -> Result<usize> {
    if series.len() < 3 {
        return Err(Error::InsufficientData(format!("walk-forward needs 3 offers, got {}", series.len())));
    }
    let dims = series[0].len();
    if dims == 0 || series.iter().any(|o| o.len() != dims) {
        return Err(Error::Config("offers must share a non-zero dimension".into()));
    }
    Ok(dims)
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// GP predictive mean of offer `t` given offers `0..t`.
pub fn predict_next(prefix: &[Vec<f64>], choice: &KernelChoice) -> Result<Vec<f64>> {
    let dims = prefix[0].len();
    let rounds: Vec<f64> = (1..=prefix.len()).map(|r| r as f64).collect();
    let targets: Vec<Vec<f64>> = (0..dims).map(|d| prefix.iter().map(|o| o[d]).collect()).collect();
    let specs = targets
        .iter()
        .map(|ys| match choice {
            KernelChoice::Fitted(family) => fit_hyperparams(&rounds, ys, *family).value,
            KernelChoice::Fixed(spec) => *spec,
        })
        .collect();
    let model = GpModel::fit(rounds, targets, specs, PriorMean::Empirical)?;
    Ok(model.predict((prefix.len() + 1) as f64).into_iter().map(|p| p.mean).collect())
}

/// Per-offer prediction errors (offer index 2 onward).
pub fn walk_forward_errors(series: &[Vec<f64>], choice: &KernelChoice) -> Result<Vec<f64>> {
    check_series(series)?;
    (2..series.len())
        .map(|t| Ok(euclidean(&series[t], &predict_next(&series[..t], choice)?)))
        .collect()
}

pub fn walk_forward_distance(series: &[Vec<f64>], choice: &KernelChoice) -> Result<f64> {
    let errors = walk_forward_errors(series, choice)?;
    Ok(errors.iter().sum::<f64>() / errors.len() as f64)
}

/// Baseline predictor: the next offer repeats the last one.
pub fn repeat_last_distance(series: &[Vec<f64>]) -> Result<f64> {
    check_series(series)?;
    let total: f64 = (2..series.len()).map(|t| euclidean(&series[t], &series[t - 1])).sum();
    Ok(total / (series.len() - 2) as f64)
}
