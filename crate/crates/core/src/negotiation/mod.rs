//! The bargaining game: domains, bids, utility profiles, messages, turn
//! order, terminal detection and the session engine.

mod domain;
mod profile;
mod protocol;
mod session;
mod utility;
mod valuation;

pub use domain::{Bid, Issue, IssueKind, NegotiationDomain, Value, Violation};
pub use profile::{DomainFile, ProfileSpec, Scenario};
pub use protocol::{
    is_terminal, sender_of, turn_player, turn_player_at, History, Message, Performative, Player, SessionConfig,
    DEFAULT_MESSAGE_CAP,
};
pub use session::{run_session, OutcomeKind, SessionOutcome};
pub use utility::UtilityFunction;
pub use valuation::{TriangularFn, Valuation};
