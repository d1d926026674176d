use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gp::{fit_hyperparams, GpModel, KernelFamily, KernelSpec, Prediction, PriorMean};
use crate::negotiation::{Bid, NegotiationDomain};
use crate::Flagged;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrategyModelConfig {
    pub family: KernelFamily,
    /// Most recent offers kept as training data.
    pub window: usize,
    /// Most recent offers used when refitting hyperparameters.
    pub fit_window: usize,
}

impl Default for StrategyModelConfig {
    fn default() -> Self {
        Self { family: KernelFamily::RationalQuadratic, window: 100, fit_window: 32 }
    }
}

/// Hyperparameters are refit at 2, 3, 4 observations and then at every
/// power of two; in between only the factorisation is refreshed.
fn refit_due(observations: usize) -> bool {
    observations >= 2 && (observations <= 4 || observations.is_power_of_two())
}

/// GP regression of the opponent's offers, one process per issue.
#[derive(Debug, Clone)]
pub struct OpponentStrategyModel {
    domain: NegotiationDomain,
    config: StrategyModelConfig,
    rounds: Vec<f64>,
    offers: Vec<Vec<f64>>,
    observed: usize,
    specs: Vec<KernelSpec>,
    model: Option<GpModel>,
}

impl OpponentStrategyModel {
    pub fn new(domain: NegotiationDomain, config: StrategyModelConfig) -> Self {
        let specs = vec![KernelSpec::default_for(config.family); domain.len()];
        Self { domain, config, rounds: Vec::new(), offers: Vec::new(), observed: 0, specs, model: None }
    }

    /// Record the opponent's offer made at `round`; rounds must increase.
    pub fn observe(&mut self, round: f64, bid: &Bid) -> Result<()> {
        let coords = self.domain.to_vector(bid)?;
        if self.rounds.last().is_some_and(|last| *last >= round) {
            return Err(crate::Error::Config(format!("offer round {round} does not follow the previous one")));
        }
        self.rounds.push(round);
        self.offers.push(coords);
        self.observed += 1;
        if self.rounds.len() > self.config.window.max(2) {
            self.rounds.remove(0);
            self.offers.remove(0);
        }
        if self.rounds.len() < 2 {
            return Ok(());
        }
        if refit_due(self.observed) {
            let start = self.rounds.len().saturating_sub(self.config.fit_window.max(2));
            for d in 0..self.domain.len() {
                let ys: Vec<f64> = self.offers[start..].iter().map(|o| o[d]).collect();
                self.specs[d] = fit_hyperparams(&self.rounds[start..], &ys, self.config.family).value;
            }
        }
        let targets = (0..self.domain.len()).map(|d| self.offers.iter().map(|o| o[d]).collect()).collect();
        self.model = Some(GpModel::fit(self.rounds.clone(), targets, self.specs.clone(), PriorMean::Empirical)?);
        Ok(())
    }

    pub fn observations(&self) -> usize {
        self.observed
    }

    /// At least two offers seen, so predictions come from the GP.
    pub fn is_fitted(&self) -> bool {
        self.model.is_some()
    }

    pub fn gp(&self) -> Option<&GpModel> {
        self.model.as_ref()
    }

    pub fn specs(&self) -> &[KernelSpec] {
        &self.specs
    }

    pub fn domain(&self) -> &NegotiationDomain {
        &self.domain
    }

    /// Per-issue predictive distribution of the opponent's offer at `round`.
    pub fn predictive(&self, round: f64) -> Option<Vec<Prediction>> {
        self.model.as_ref().map(|m| m.predict(round))
    }

    /// Draw a bid from a predictive distribution, rounded and clamped per issue.
    pub fn sample_from<R: Rng + ?Sized>(&self, predictive: &[Prediction], rng: &mut R) -> Bid {
        let coords: Vec<f64> = predictive.iter().map(|p| p.sample(rng)).collect();
        self.domain.from_vector(&coords)
    }

    /// Predicted opponent offer at `round`; flagged uniform draw before two offers are known.
    pub fn predict_opponent_bid<R: Rng + ?Sized>(&self, round: f64, rng: &mut R) -> Flagged<Bid> {
        match self.predictive(round) {
            Some(p) => Flagged::clean(self.sample_from(&p, rng)),
            None => Flagged::fallback(self.domain.random_bid(rng)),
        }
    }
}
