//! The alternating-offers game: players, messages, histories and turn order.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::domain::Bid;
use crate::error::{Error, Result};

/// Hard cap on history length when neither a round nor a time bound is set.
pub const DEFAULT_MESSAGE_CAP: usize = 1000;

/// Player 1 is the buyer and opens the negotiation; player 2 is the seller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    One,
    Two,
}

impl Player {
    pub fn other(self) -> Self {
        match self {
            Player::One => Player::Two,
            Player::Two => Player::One,
        }
    }

    /// 0 for player 1, 1 for player 2.
    pub fn index(self) -> usize {
        match self {
            Player::One => 0,
            Player::Two => 1,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "player {}", self.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Performative {
    Propose,
    Accept,
    Reject,
}

/// One protocol message; only proposals carry a bid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Message {
    Propose(Bid),
    Accept,
    Reject,
}

impl Message {
    pub fn performative(&self) -> Performative {
        match self {
            Message::Propose(_) => Performative::Propose,
            Message::Accept => Performative::Accept,
            Message::Reject => Performative::Reject,
        }
    }

    pub fn bid(&self) -> Option<&Bid> {
        match self {
            Message::Propose(b) => Some(b),
            _ => None,
        }
    }

    pub fn is_final(&self) -> bool {
        !matches!(self, Message::Propose(_))
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::Propose(b) => write!(f, "propose {b}"),
            Message::Accept => f.write_str("accept"),
            Message::Reject => f.write_str("reject"),
        }
    }
}

/// Player to move after `len` messages: even lengths belong to player 1.
pub fn turn_player_at(len: usize) -> Player {
    if len % 2 == 0 {
        Player::One
    } else {
        Player::Two
    }
}

/// Who sent the message at position `index`.
pub fn sender_of(index: usize) -> Player {
    turn_player_at(index)
}

/// A well-formed message sequence: nothing follows an accept or reject, and
/// the opening message is a proposal.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct History {
    messages: Vec<Message>,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_messages(messages: Vec<Message>) -> Result<Self> {
        let mut h = Self::new();
        for m in messages {
            h.push(m)?;
        }
        Ok(h)
    }

    pub fn push(&mut self, message: Message) -> Result<()> {
        if self.is_closed() {
            return Err(Error::InvalidHistory("no message may follow accept or reject".into()));
        }
        if self.messages.is_empty() && message.is_final() {
            return Err(Error::InvalidHistory(format!("{message} needs a proposal to answer")));
        }
        self.messages.push(message);
        Ok(())
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn last(&self) -> Option<&Message> {
        self.messages.last()
    }

    /// Ends with accept or reject.
    pub fn is_closed(&self) -> bool {
        self.messages.last().is_some_and(Message::is_final)
    }

    /// Bid of the most recent proposal, if the last message is one.
    pub fn last_bid(&self) -> Option<&Bid> {
        self.messages.last().and_then(Message::bid)
    }

    pub fn turn_player(&self) -> Player {
        turn_player_at(self.len())
    }

    /// `(position, bid)` of every proposal sent by `player`.
    pub fn proposals_by(&self, player: Player) -> impl Iterator<Item = (usize, &Bid)> {
        self.messages
            .iter()
            .enumerate()
            .filter(move |(i, _)| sender_of(*i) == player)
            .filter_map(|(i, m)| m.bid().map(|b| (i, b)))
    }
}

/// Player to move on a non-terminal history.
pub fn turn_player(history: &History) -> Player {
    history.turn_player()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    /// Maximum number of messages.
    pub round_bound: Option<usize>,
    /// Wall-clock bound, checked before each turn.
    pub time_bound: Option<Duration>,
    /// Message cap applied when both bounds are absent.
    pub unbounded_cap: usize,
    /// Utility per player when the session ends without agreement.
    pub reservation_utility: [f64; 2],
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self { round_bound: None, time_bound: None, unbounded_cap: DEFAULT_MESSAGE_CAP, reservation_utility: [0.0, 0.0] }
    }
}

impl SessionConfig {
    pub fn with_round_bound(round_bound: usize) -> Self {
        Self { round_bound: Some(round_bound), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.round_bound == Some(0) {
            return Err(Error::Config("round bound must be positive".into()));
        }
        if self.unbounded_cap == 0 {
            return Err(Error::Config("message cap must be positive".into()));
        }
        Ok(())
    }

    /// Effective message bound.
    pub fn message_bound(&self) -> Option<usize> {
        match (self.round_bound, self.time_bound) {
            (Some(r), _) => Some(r),
            (None, Some(_)) => None,
            (None, None) => Some(self.unbounded_cap),
        }
    }

    /// A bound (message count or wall clock) has been reached.
    pub fn bound_reached(&self, history: &History, elapsed: Duration) -> bool {
        self.message_bound().is_some_and(|b| history.len() >= b) || self.time_bound.is_some_and(|t| elapsed >= t)
    }

    pub fn reservation(&self, player: Player) -> f64 {
        self.reservation_utility[player.index()]
    }
}

/// Closed by accept/reject, or a configured bound has been hit.
pub fn is_terminal(history: &History, config: &SessionConfig, elapsed: Duration) -> bool {
    history.is_closed() || config.bound_reached(history, elapsed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::negotiation::Value;

    fn bid(v: i64) -> Bid {
        Bid::new().with("x", Value::Int(v))
    }

    #[test]
    fn buyer_opens_and_turns_alternate() {
        assert_eq!(turn_player_at(0), Player::One);
        assert_eq!(turn_player_at(1), Player::Two);
        assert_eq!(turn_player_at(6), Player::One);
        assert_eq!(turn_player(&History::new()), Player::One);
    }

    #[test]
    fn accept_closes_history() {
        let h = History::from_messages(vec![Message::Propose(bid(1)), Message::Accept]).unwrap();
        assert!(is_terminal(&h, &SessionConfig::default(), Duration::ZERO));
    }

    #[test]
    fn open_history_without_bound() {
        let h = History::from_messages(vec![Message::Propose(bid(1)), Message::Propose(bid(2))]).unwrap();
        let cfg = SessionConfig::default();
        assert!(!is_terminal(&h, &cfg, Duration::ZERO));
        assert!(is_terminal(&h, &SessionConfig::with_round_bound(2), Duration::ZERO));
    }

    #[test]
    fn unbounded_sessions_still_cap() {
        let cfg = SessionConfig::default();
        assert_eq!(cfg.message_bound(), Some(DEFAULT_MESSAGE_CAP));
        let timed = SessionConfig { time_bound: Some(Duration::from_secs(1)), ..SessionConfig::default() };
        assert_eq!(timed.message_bound(), None);
        let h = History::from_messages(vec![Message::Propose(bid(1))]).unwrap();
        assert!(is_terminal(&h, &timed, Duration::from_secs(2)));
        assert!(!is_terminal(&h, &timed, Duration::from_millis(10)));
    }

    #[test]
    fn malformed_histories_rejected() {
        assert!(History::from_messages(vec![Message::Accept]).is_err());
        assert!(History::from_messages(vec![Message::Reject]).is_err());
        assert!(History::from_messages(vec![Message::Propose(bid(1)), Message::Reject, Message::Propose(bid(2))]).is_err());
    }

    #[test]
    fn proposals_by_sender() {
        let h = History::from_messages(vec![
            Message::Propose(bid(1)),
            Message::Propose(bid(2)),
            Message::Propose(bid(3)),
        ])
        .unwrap();
        let one: Vec<usize> = h.proposals_by(Player::One).map(|(i, _)| i).collect();
        let two: Vec<usize> = h.proposals_by(Player::Two).map(|(i, _)| i).collect();
        assert_eq!(one, vec![0, 2]);
        assert_eq!(two, vec![1]);
    }

    #[test]
    fn message_wire_form() {
        assert_eq!(serde_json::to_string(&Message::Accept).unwrap(), r#""accept""#);
        assert_eq!(serde_json::to_string(&Message::Propose(bid(3))).unwrap(), r#"{"propose":{"x":3}}"#);
    }
}
