use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::negotiation::{Bid, UtilityFunction};

/// Which of the searching agent's own bids may enter the tree.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", content = "threshold", rename_all = "lowercase")]
pub enum Pruning {
    #[default]
    None,
    /// Keep bids of own utility at least `θ`.
    Fixed(f64),
    /// Keep bids at least as good as the best offer the opponent has made.
    Variable,
}

impl fmt::Display for Pruning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pruning::None => f.write_str("none"),
            Pruning::Fixed(t) => write!(f, "fixed:{t}"),
            Pruning::Variable => f.write_str("variable"),
        }
    }
}

impl FromStr for Pruning {
    type Err = Error;

    /// `none`, `variable` or `fixed:<threshold>`.
    fn from_str(s: &str) -> Result<Self> {
        let p = match s.trim().to_ascii_lowercase().as_str() {
            "none" => Pruning::None,
            "variable" => Pruning::Variable,
            other => match other.strip_prefix("fixed:") {
                Some(t) => Pruning::Fixed(
                    t.parse().map_err(|_| Error::Config(format!("bad pruning threshold '{t}'")))?,
                ),
                None => return Err(Error::Config(format!("unknown pruning '{s}' (none, fixed:<θ>, variable)"))),
            },
        };
        p.validate()?;
        Ok(p)
    }
}

impl Pruning {
    pub fn validate(&self) -> Result<()> {
        match self {
            Pruning::Fixed(t) if !(0.0..=1.0).contains(t) => {
                Err(Error::Config(format!("pruning threshold {t} outside [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// Minimum own utility a kept bid must reach; `None` keeps everything.
    pub fn threshold(&self, state: &PruningState) -> Option<f64> {
        match self {
            Pruning::None => None,
            Pruning::Fixed(t) => Some(*t),
            Pruning::Variable => Some(state.best_opponent_offer_utility()),
        }
    }
}

/// Own utility of the best offer received so far. Never decreases.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PruningState {
    best_opponent_offer_utility: f64,
}

impl PruningState {
    pub fn best_opponent_offer_utility(&self) -> f64 {
        self.best_opponent_offer_utility
    }

    pub fn observe(&mut self, own_utility: f64) {
        if own_utility > self.best_opponent_offer_utility {
            self.best_opponent_offer_utility = own_utility.min(1.0);
        }
    }
}

/// Keep `bid` iff its own utility reaches the pruning threshold (inclusive).
pub fn prune_check(bid: &Bid, pruning: &Pruning, own_ufun: &UtilityFunction, state: &PruningState) -> bool {
    match pruning.threshold(state) {
        None => true,
        Some(t) => own_ufun.utility(bid).is_ok_and(|u| u >= t),
    }
}

/// Progressive widening: a node with `n_p` visits and `n_c` children may
/// grow a new child iff `n_p^alpha >= n_c`.
pub fn should_expand(n_p: u64, n_c: usize, alpha: f64) -> bool {
    (n_p as f64).powf(alpha) >= n_c as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MctsConfig {
    /// Progressive-widening exponent, in (0, 1].
    pub alpha: f64,
    /// Exploration constant.
    pub c: f64,
    pub simulation_budget: usize,
    /// Plies counted from the root after which a rollout scores reservation values.
    pub max_rollout_depth: usize,
    pub root_candidate_cap: usize,
    pub pruning: Pruning,
    /// Threads running simulations; 1 is bit-reproducible.
    pub workers: usize,
    /// Uniform draws tried per own-bid expansion before giving up.
    pub expansion_retries: usize,
    /// After the retries fail, move a drawn bid toward the own optimum until it passes pruning.
    pub repair_on_exhaustion: bool,
}

impl Default for MctsConfig {
    fn default() -> Self {
        Self {
            alpha: 0.489,
            c: 1.0,
            simulation_budget: 500,
            max_rollout_depth: 40,
            root_candidate_cap: 200,
            pruning: Pruning::None,
            workers: 1,
            expansion_retries: 100,
            repair_on_exhaustion: true,
        }
    }
}

impl MctsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(self.c >= 0.0) || !self.c.is_finite() {
            return Err(Error::Config(format!("exploration constant {} must be finite and >= 0", self.c)));
        }
        if self.simulation_budget == 0 {
            return Err(Error::Config("simulation budget must be at least 1".into()));
        }
        if self.max_rollout_depth == 0 || self.root_candidate_cap == 0 || self.workers == 0 {
            return Err(Error::Config("rollout depth, root cap and workers must be positive".into()));
        }
        self.pruning.validate()
    }
}
