use rand::Rng;

use super::{incoming_offer, Agent, AgentAction, AgentSetup, Deadline};
use crate::error::{Error, Result};
use crate::negotiation::{Bid, History, Message, NegotiationDomain, UtilityFunction};
use crate::rng::{seeded, SimRng};

const CANDIDATES: usize = 200;

/// Time-dependent test agent: its target utility drops by `rate` per own
/// proposal. Accepts offers reaching the current target.
#[derive(Debug, Clone)]
pub struct Conceder {
    rate: f64,
    proposals: usize,
    state: Option<(NegotiationDomain, UtilityFunction, SimRng)>,
}

impl Conceder {
    pub fn new(rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&rate) {
            return Err(Error::Config(format!("concession rate {rate} outside [0, 1]")));
        }
        Ok(Self { rate, proposals: 0, state: None })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    fn target(&self) -> f64 {
        (1.0 - self.rate * self.proposals as f64).max(0.0)
    }
}

/// Lowest-utility bid at or above `target` among random candidates, else the optimum.
fn bid_near<R: Rng + ?Sized>(domain: &NegotiationDomain, ufun: &UtilityFunction, target: f64, rng: &mut R) -> Bid {
    let mut best: Option<(Bid, f64)> = None;
    for _ in 0..CANDIDATES {
        let b = domain.random_bid(rng);
        let u = ufun.utility_of(&b);
        if u >= target && best.as_ref().is_none_or(|(_, bu)| u < *bu) {
            best = Some((b, u));
        }
    }
    best.map(|(b, _)| b).unwrap_or_else(|| domain.bid_from_values(ufun.best_values(domain)))
}

impl Agent for Conceder {
    fn name(&self) -> String {
        format!("conceder:{}", self.rate)
    }

    fn prepare(&mut self, setup: &AgentSetup) -> Result<()> {
        self.proposals = 0;
        self.state = Some((setup.domain.clone(), setup.ufun.clone(), seeded(setup.seed)));
        Ok(())
    }

    fn act(&mut self, history: &History, _deadline: &Deadline) -> AgentAction {
        let target = self.target();
        let (domain, ufun, rng) = self.state.as_mut().expect("prepare before act");
        if incoming_offer(history).is_some_and(|o| ufun.utility_of(o) >= target) {
            return Message::Accept;
        }
        let bid = bid_near(domain, ufun, target, rng);
        self.proposals += 1;
        Message::Propose(bid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negotiation::{Player, TriangularFn, Valuation};

    #[test]
    fn concedes_over_time() {
        let d = NegotiationDomain::integer_issues(3, 0, 10).unwrap();
        let tri = Valuation::Triangular(TriangularFn::Increasing { a: 0.0, b: 10.0 });
        let u = UtilityFunction::new(&d, vec![0.4, 0.3, 0.3], vec![tri.clone(), tri.clone(), tri]).unwrap();
        let mut c = Conceder::new(0.1).unwrap();
        c.prepare(&AgentSetup { domain: &d, ufun: &u, player: Player::One, seed: 0 }).unwrap();
        for k in 0..6 {
            let Message::Propose(b) = c.act(&History::new(), &Deadline::default()) else { panic!("expected proposal") };
            assert!(u.utility_of(&b) >= 1.0 - 0.1 * k as f64 - 1e-12);
        }
        assert!(Conceder::new(1.5).is_err());
    }
}
