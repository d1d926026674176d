//! Bilateral negotiation engine and the MoCaNA negotiating agent.
//!
//! The crate is organised the way a negotiation flows:
//!
//! - [`negotiation`]: domains, bids, utility profiles, the alternating-offers
//!   protocol and a session engine driving two [`Agent`]s to an outcome.
//! - [`gp`]: Gaussian-process regression over an opponent's offer stream.
//! - [`opponent`]: Bayesian estimation of the opponent's utility, the
//!   GP-backed model of its bidding strategy, and its acceptance rule.
//! - [`mcts`]: the progressive-widening Monte-Carlo tree search that picks
//!   MoCaNA's bids.
//! - [`agents`]: MoCaNA, RandomWalker and scripted/test agents.
//! - [`tournament`]: domain generation, seeded tournaments, reporting and the
//!   kernel benchmark.

pub mod agents;
pub mod error;
pub mod gp;
pub mod mcts;
pub mod negotiation;
pub mod opponent;
pub mod rng;
pub mod tournament;

pub use agents::Agent;
pub use error::{Error, Result};
pub use negotiation::{
    Bid, History, Issue, IssueKind, Message, NegotiationDomain, Player, SessionConfig,
    SessionOutcome, UtilityFunction, Value,
};

/// A value paired with a marker saying a fallback or clamp path produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged<T> {
    pub value: T,
    pub flagged: bool,
}

impl<T> Flagged<T> {
    pub fn clean(value: T) -> Self {
        Self { value, flagged: false }
    }

    pub fn fallback(value: T) -> Self {
        Self { value, flagged: true }
    }
}
