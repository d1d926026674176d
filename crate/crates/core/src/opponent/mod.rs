//! Learned models of the opponent: its utility (Bayesian learning over
//! triangular-valuation hypotheses), its bidding strategy (GP regression of
//! its offers) and its acceptance rule.

mod acceptance;
mod hypothesis;
mod strategy_model;
mod utility_model;

pub use acceptance::{acceptance_decision, opponent_accepts, COLD_START_ACCEPTANCE};
pub use hypothesis::{generate_hypotheses, rank_to_weight, Hypothesis};
pub use strategy_model::{OpponentStrategyModel, StrategyModelConfig};
pub use utility_model::{OpponentUtilityModel, UtilityModelConfig};

pub use crate::negotiation::TriangularFn;
