use rand::Rng;
use serde::{Deserialize, Serialize};

use super::hypothesis::{generate_hypotheses, Hypothesis};
use crate::error::{Error, Result};
use crate::negotiation::{Bid, NegotiationDomain, Value};
use crate::Flagged;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtilityModelConfig {
    pub hypotheses: usize,
    /// Per-round drop of the opponent's expected offer utility.
    pub concession_rate: f64,
    /// Standard deviation of the Gaussian likelihood around the concession line.
    pub likelihood_sigma: f64,
}

impl Default for UtilityModelConfig {
    fn default() -> Self {
        Self { hypotheses: 128, concession_rate: 0.002, likelihood_sigma: 0.25 }
    }
}

/// Posterior over opponent-profile hypotheses.
///
/// The opponent is assumed to concede linearly: its offer at round `x` has
/// own utility near `1 - concession_rate * x`.
#[derive(Debug, Clone)]
pub struct OpponentUtilityModel {
    domain: NegotiationDomain,
    hypotheses: Vec<Hypothesis>,
    pub concession_rate: f64,
    pub likelihood_sigma: f64,
    updates: usize,
}

impl OpponentUtilityModel {
    pub fn new(domain: NegotiationDomain, hypotheses: Vec<Hypothesis>, concession_rate: f64, likelihood_sigma: f64) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::Config("the utility model needs at least one hypothesis".into()));
        }
        if !(likelihood_sigma > 0.0) {
            return Err(Error::Config(format!("likelihood sigma must be positive, got {likelihood_sigma}")));
        }
        if !(concession_rate >= 0.0) {
            return Err(Error::Config(format!("concession rate must be non-negative, got {concession_rate}")));
        }
        let total: f64 = hypotheses.iter().map(|h| h.probability).sum();
        if (total - 1.0).abs() > 1e-9 || hypotheses.iter().any(|h| !(0.0..=1.0).contains(&h.probability)) {
            return Err(Error::Config(format!("hypothesis probabilities sum to {total}, not 1")));
        }
        Ok(Self { domain, hypotheses, concession_rate, likelihood_sigma, updates: 0 })
    }

    /// Fresh model with randomly generated hypotheses and a uniform prior.
    pub fn generate<R: Rng + ?Sized>(domain: &NegotiationDomain, config: &UtilityModelConfig, rng: &mut R) -> Result<Self> {
        let hypotheses = generate_hypotheses(domain, config.hypotheses, rng)?;
        Self::new(domain.clone(), hypotheses, config.concession_rate, config.likelihood_sigma)
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.hypotheses.iter().map(|h| h.probability).collect()
    }

    /// Number of observations absorbed so far.
    pub fn updates(&self) -> usize {
        self.updates
    }

    /// Expected own utility of the opponent's offer at `round`.
    pub fn expected_utility_at(&self, round: f64) -> f64 {
        (1.0 - self.concession_rate * round).clamp(0.0, 1.0)
    }

    /// Gaussian density of a hypothesised offer utility around the concession line.
    pub fn likelihood(&self, hypothesised: f64, round: f64) -> f64 {
        let z = (hypothesised - self.expected_utility_at(round)) / self.likelihood_sigma;
        (-0.5 * z * z).exp() / (self.likelihood_sigma * (2.0 * std::f64::consts::PI).sqrt())
    }

    /// Multiply every hypothesis by the likelihood of `bid` at `round` and
    /// renormalise. When every likelihood underflows the prior is kept and the
    /// result is flagged.
    pub fn bayes_update(&mut self, bid: &Bid, round: f64) -> Result<Flagged<()>> {
        let values = self.domain.resolve(bid)?;
        let posterior: Vec<f64> = self
            .hypotheses
            .iter()
            .map(|h| h.probability * self.likelihood(h.utility.utility_positional(&values), round))
            .collect();
        let total: f64 = posterior.iter().sum();
        self.updates += 1;
        if !(total > 0.0) || !total.is_finite() {
            return Ok(Flagged::fallback(()));
        }
        for (h, p) in self.hypotheses.iter_mut().zip(posterior) {
            h.probability = p / total;
        }
        Ok(Flagged::clean(()))
    }

    /// `sum_h P(h) u_h(bid)`.
    pub fn estimated_utility(&self, bid: &Bid) -> Result<f64> {
        let values = self.domain.resolve(bid)?;
        Ok(self.estimated_utility_positional(&values))
    }

    /// Same as [`Self::estimated_utility`] for values already in domain order.
    pub fn estimated_utility_positional(&self, values: &[&Value]) -> f64 {
        let total: f64 = self.hypotheses.iter().map(|h| h.probability * h.utility.utility_positional(values)).sum();
        total.clamp(0.0, 1.0)
    }

    pub fn domain(&self) -> &NegotiationDomain {
        &self.domain
    }
}
