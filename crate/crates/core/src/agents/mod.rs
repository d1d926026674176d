//! The agent interface and the concrete agents.

mod conceder;
mod mocana;
mod random_walker;
mod registry;
mod scripted;

use std::time::Duration;

use crate::error::Result;
use crate::negotiation::{History, Message, NegotiationDomain, Player, UtilityFunction};

pub use conceder::Conceder;
pub use mocana::{MoCaNA, MocanaConfig, MocanaStats};
pub use random_walker::RandomWalker;
pub use registry::AgentSpec;
pub use scripted::ScriptedAgent;

/// A move: propose a bid, accept the last proposal, or reject and end.
pub type AgentAction = Message;

/// Everything an agent learns before a session starts.
#[derive(Debug, Clone, Copy)]
pub struct AgentSetup<'a> {
    pub domain: &'a NegotiationDomain,
    pub ufun: &'a UtilityFunction,
    pub player: Player,
    /// Seed of the agent's private RNG stream for this session.
    pub seed: u64,
}

/// Bounds of the running session as seen by the mover.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Deadline {
    /// Maximum number of messages, if any.
    pub round_bound: Option<usize>,
    pub time_bound: Option<Duration>,
    pub elapsed: Duration,
}

pub trait Agent {
    fn name(&self) -> String;

    /// Reset for a new session.
    fn prepare(&mut self, setup: &AgentSetup) -> Result<()>;

    /// Called only on the agent's turn with a non-terminal history.
    fn act(&mut self, history: &History, deadline: &Deadline) -> AgentAction;
}

/// The opponent's proposal this agent must answer, if the last message is one.
fn incoming_offer(history: &History) -> Option<&crate::negotiation::Bid> {
    match history.last() {
        Some(Message::Propose(bid)) => Some(bid),
        _ => None,
    }
}
