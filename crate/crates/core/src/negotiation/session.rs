use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::domain::{Bid, NegotiationDomain};
use super::protocol::{History, Message, Player, SessionConfig};
use super::utility::UtilityFunction;
use crate::agents::{Agent, AgentSetup, Deadline};
use crate::error::Result;
use crate::rng::derive_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutcomeKind {
    Agreement { bid: Bid },
    Reject { by: Player },
    BoundReached,
    /// The offender sent an invalid bid or an illegal message.
    ProtocolViolation { offender: Player, reason: String },
}

impl OutcomeKind {
    pub fn label(&self) -> &'static str {
        match self {
            OutcomeKind::Agreement { .. } => "agreement",
            OutcomeKind::Reject { .. } => "reject",
            OutcomeKind::BoundReached => "bound",
            OutcomeKind::ProtocolViolation { .. } => "violation",
        }
    }

    pub fn is_agreement(&self) -> bool {
        matches!(self, OutcomeKind::Agreement { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub result: OutcomeKind,
    pub history: History,
    /// Indexed by player: `[player 1, player 2]`.
    pub utilities: [f64; 2],
    pub rounds_used: usize,
}

/// Drive two agents through the alternating-offers protocol.
///
/// Agent `i` is prepared with a seed derived from `(seed, i)`, so the outcome
/// is a pure function of the agents, profiles, config and seed (time bounds
/// aside).
pub fn run_session(
    agent1: &mut dyn Agent,
    agent2: &mut dyn Agent,
    domain: &NegotiationDomain,
    ufuns: [&UtilityFunction; 2],
    config: &SessionConfig,
    seed: u64,
) -> Result<SessionOutcome> {
    config.validate()?;
    agent1.prepare(&AgentSetup { domain, ufun: ufuns[0], player: Player::One, seed: derive_seed(seed, 1) })?;
    agent2.prepare(&AgentSetup { domain, ufun: ufuns[1], player: Player::Two, seed: derive_seed(seed, 2) })?;

    let start = Instant::now();
    let mut history = History::new();
    let reservation = config.reservation_utility;

    let finish = |result: OutcomeKind, history: History, utilities: [f64; 2]| SessionOutcome {
        rounds_used: history.len(),
        result,
        history,
        utilities,
    };

    loop {
        let elapsed = if config.time_bound.is_some() { start.elapsed() } else { Duration::ZERO };
        if config.bound_reached(&history, elapsed) {
            return Ok(finish(OutcomeKind::BoundReached, history, reservation));
        }
        let mover = history.turn_player();
        let deadline = Deadline { round_bound: config.message_bound(), time_bound: config.time_bound, elapsed };
        let message = match mover {
            Player::One => agent1.act(&history, &deadline),
            Player::Two => agent2.act(&history, &deadline),
        };

        if let Message::Propose(bid) = &message {
            let violations = domain.validate_bid(bid);
            if !violations.is_empty() {
                let reason = violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ");
                return Ok(finish(OutcomeKind::ProtocolViolation { offender: mover, reason }, history, reservation));
            }
        }
        let accepted = history.last_bid().cloned();
        if let Err(e) = history.push(message.clone()) {
            return Ok(finish(
                OutcomeKind::ProtocolViolation { offender: mover, reason: e.to_string() },
                history,
                reservation,
            ));
        }
        match message {
            Message::Propose(_) => {}
            Message::Reject => return Ok(finish(OutcomeKind::Reject { by: mover }, history, reservation)),
            Message::Accept => {
                let bid = accepted.expect("push rejects an opening accept");
                let utilities = [ufuns[0].utility(&bid)?, ufuns[1].utility(&bid)?];
                return Ok(finish(OutcomeKind::Agreement { bid }, history, utilities));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::ScriptedAgent;
    use crate::negotiation::{Valuation, Value};

    fn setup() -> (NegotiationDomain, UtilityFunction, UtilityFunction) {
        let d = NegotiationDomain::integer_issues(1, 0, 10).unwrap();
        let up = UtilityFunction::new(&d, vec![1.0], vec![Valuation::Linear { from: 0.0, to: 10.0 }]).unwrap();
        let down = UtilityFunction::new(&d, vec![1.0], vec![Valuation::Linear { from: 10.0, to: 0.0 }]).unwrap();
        (d, up, down)
    }

    fn bid(v: i64) -> Bid {
        Bid::new().with("issue1", Value::Int(v))
    }

    #[test]
    fn propose_then_accept() {
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::new(vec![Message::Propose(bid(6))]);
        let mut b = ScriptedAgent::new(vec![Message::Accept]);
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &SessionConfig::default(), 0).unwrap();
        assert_eq!(out.result, OutcomeKind::Agreement { bid: bid(6) });
        assert_eq!(out.rounds_used, 2);
        assert!((out.utilities[0] - 0.6).abs() < 1e-12);
        assert!((out.utilities[1] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn endless_proposals_hit_the_bound() {
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::cycling(vec![Message::Propose(bid(9))]);
        let mut b = ScriptedAgent::cycling(vec![Message::Propose(bid(1))]);
        let cfg = SessionConfig { reservation_utility: [0.1, 0.2], ..SessionConfig::with_round_bound(10) };
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &cfg, 0).unwrap();
        assert_eq!(out.result, OutcomeKind::BoundReached);
        assert_eq!(out.rounds_used, 10);
        assert_eq!(out.utilities, [0.1, 0.2]);
    }

    #[test]
    fn unbounded_session_stops_at_cap() {
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::cycling(vec![Message::Propose(bid(9))]);
        let mut b = ScriptedAgent::cycling(vec![Message::Propose(bid(1))]);
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &SessionConfig::default(), 0).unwrap();
        assert_eq!(out.result, OutcomeKind::BoundReached);
        assert_eq!(out.rounds_used, crate::negotiation::DEFAULT_MESSAGE_CAP);
    }

    #[test]
    fn fixed_tapes_match_hand_transcript() {
        // 1: propose 9, 2: propose 2, 1: propose 7, 2: propose 4, 1: propose 5, 2: accept -> agreement on 5
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::new(vec![
            Message::Propose(bid(9)),
            Message::Propose(bid(7)),
            Message::Propose(bid(5)),
        ]);
        let mut b = ScriptedAgent::new(vec![Message::Propose(bid(2)), Message::Propose(bid(4)), Message::Accept]);
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &SessionConfig::with_round_bound(50), 3).unwrap();
        let expected = History::from_messages(vec![
            Message::Propose(bid(9)),
            Message::Propose(bid(2)),
            Message::Propose(bid(7)),
            Message::Propose(bid(4)),
            Message::Propose(bid(5)),
            Message::Accept,
        ])
        .unwrap();
        assert_eq!(out.history, expected);
        assert_eq!(out.result, OutcomeKind::Agreement { bid: bid(5) });
        assert_eq!(out.rounds_used, 6);
        assert_eq!(out.utilities, [0.5, 0.5]);
    }

    #[test]
    fn reject_gives_reservation() {
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::new(vec![Message::Propose(bid(9))]);
        let mut b = ScriptedAgent::new(vec![Message::Reject]);
        let cfg = SessionConfig { reservation_utility: [0.05, 0.0], ..SessionConfig::default() };
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &cfg, 0).unwrap();
        assert_eq!(out.result, OutcomeKind::Reject { by: Player::Two });
        assert_eq!(out.utilities, [0.05, 0.0]);
    }

    #[test]
    fn invalid_bid_aborts_session() {
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::new(vec![Message::Propose(bid(11))]);
        let mut b = ScriptedAgent::new(vec![Message::Accept]);
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &SessionConfig::default(), 0).unwrap();
        assert!(matches!(out.result, OutcomeKind::ProtocolViolation { offender: Player::One, .. }));
        assert_eq!(out.utilities, [0.0, 0.0]);
        assert!(out.history.is_empty());
    }

    #[test]
    fn opening_accept_is_a_violation() {
        let (d, up, down) = setup();
        let mut a = ScriptedAgent::new(vec![Message::Accept]);
        let mut b = ScriptedAgent::new(vec![Message::Accept]);
        let out = run_session(&mut a, &mut b, &d, [&up, &down], &SessionConfig::default(), 0).unwrap();
        assert!(matches!(out.result, OutcomeKind::ProtocolViolation { offender: Player::One, .. }));
    }
}
