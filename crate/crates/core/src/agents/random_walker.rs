use super::{incoming_offer, Agent, AgentAction, AgentSetup, Deadline};
use crate::error::Result;
use crate::negotiation::{History, Message, NegotiationDomain, UtilityFunction};
use crate::rng::{seeded, SimRng};

/// Proposes uniformly random bids. Accepts an offer worth at least as much
/// as the random bid it would have proposed instead.
#[derive(Debug, Clone, Default)]
pub struct RandomWalker {
    state: Option<(NegotiationDomain, UtilityFunction, SimRng)>,
}

impl RandomWalker {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Agent for RandomWalker {
    fn name(&self) -> String {
        "random-walker".into()
    }

    fn prepare(&mut self, setup: &AgentSetup) -> Result<()> {
        self.state = Some((setup.domain.clone(), setup.ufun.clone(), seeded(setup.seed)));
        Ok(())
    }

    fn act(&mut self, history: &History, _deadline: &Deadline) -> AgentAction {
        let (domain, ufun, rng) = self.state.as_mut().expect("prepare before act");
        let bid = domain.random_bid(rng);
        match incoming_offer(history) {
            Some(offer) if ufun.utility_of(offer) >= ufun.utility_of(&bid) => Message::Accept,
            _ => Message::Propose(bid),
        }
    }
}
