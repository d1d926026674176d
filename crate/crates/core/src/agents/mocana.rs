use serde::{Deserialize, Serialize};

use super::{incoming_offer, Agent, AgentAction, AgentSetup, Deadline};
use crate::error::Result;
use crate::mcts::{mcts_search, BidSampler, MctsConfig, Pruning, PruningState, SearchModels};
use crate::negotiation::{sender_of, Bid, History, Message, NegotiationDomain, Player, UtilityFunction};
use crate::opponent::{OpponentStrategyModel, OpponentUtilityModel, StrategyModelConfig, UtilityModelConfig};
use crate::rng::{seeded, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct MocanaConfig {
    pub mcts: MctsConfig,
    pub utility_model: UtilityModelConfig,
    pub strategy_model: StrategyModelConfig,
}

/// Counters kept over one session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct MocanaStats {
    /// Opponent proposals absorbed by the models.
    pub model_updates: usize,
    /// Model updates that failed or fell back to the prior.
    pub model_fallbacks: usize,
    /// Decisions where the search failed and a sampled bid was proposed.
    pub search_fallbacks: usize,
}

struct Session {
    domain: NegotiationDomain,
    ufun: UtilityFunction,
    player: Player,
    utility_model: OpponentUtilityModel,
    strategy_model: OpponentStrategyModel,
    pruning: PruningState,
    rng: SimRng,
    /// History prefix already absorbed.
    seen: usize,
}

/// Learns the opponent's utility and strategy, picks bids by tree search
/// and accepts an offer worth at least its own next bid. Deadlines are
/// ignored and it never rejects.
pub struct MoCaNA {
    config: MocanaConfig,
    session: Option<Session>,
    stats: MocanaStats,
}

impl MoCaNA {
    pub fn new(config: MocanaConfig) -> Result<Self> {
        config.mcts.validate()?;
        Ok(Self { config, session: None, stats: MocanaStats::default() })
    }

    pub fn config(&self) -> &MocanaConfig {
        &self.config
    }

    pub fn stats(&self) -> MocanaStats {
        self.stats
    }

    pub fn pruning_state(&self) -> Option<PruningState> {
        self.session.as_ref().map(|s| s.pruning)
    }

    pub fn utility_model(&self) -> Option<&OpponentUtilityModel> {
        self.session.as_ref().map(|s| &s.utility_model)
    }

    pub fn strategy_model(&self) -> Option<&OpponentStrategyModel> {
        self.session.as_ref().map(|s| &s.strategy_model)
    }

    /// Feed every opponent proposal not yet seen to both models and the pruning state.
    fn absorb(&mut self, history: &History) {
        let s = self.session.as_mut().expect("prepare before act");
        for (pos, m) in history.messages().iter().enumerate().skip(s.seen) {
            let Message::Propose(bid) = m else { continue };
            if sender_of(pos) == s.player {
                continue;
            }
            let round = pos as f64;
            let strategy = s.strategy_model.observe(round, bid);
            let utility = s.utility_model.bayes_update(bid, round);
            if strategy.is_err() || utility.as_ref().map_or(true, |f| f.flagged) {
                self.stats.model_fallbacks += 1;
            }
            s.pruning.observe(s.ufun.utility_of(bid));
            self.stats.model_updates += 1;
        }
        s.seen = history.len();
    }
}

impl Agent for MoCaNA {
    fn name(&self) -> String {
        "mocana".into()
    }

    fn prepare(&mut self, setup: &AgentSetup) -> Result<()> {
        let mut rng = seeded(setup.seed);
        let utility_model = OpponentUtilityModel::generate(setup.domain, &self.config.utility_model, &mut rng)?;
        self.session = Some(Session {
            domain: setup.domain.clone(),
            ufun: setup.ufun.clone(),
            player: setup.player,
            utility_model,
            strategy_model: OpponentStrategyModel::new(setup.domain.clone(), self.config.strategy_model),
            pruning: PruningState::default(),
            rng,
            seen: 0,
        });
        self.stats = MocanaStats::default();
        Ok(())
    }

    fn act(&mut self, history: &History, _deadline: &Deadline) -> AgentAction {
        self.absorb(history);
        let mcts = self.config.mcts;
        let s = self.session.as_mut().expect("prepare before act");
        let models = SearchModels { utility: &s.utility_model, strategy: &s.strategy_model };
        let candidate = match mcts_search(history, &s.domain, &s.ufun, models, &mcts, &s.pruning, &mut s.rng) {
            Ok(result) => result.bid,
            Err(_) => {
                self.stats.search_fallbacks += 1;
                fallback_bid(&s.domain, &s.ufun, &mcts, &s.pruning, &mut s.rng)
            }
        };
        if let Some(offer) = incoming_offer(history) {
            let u = s.ufun.utility_of(offer);
            let admissible = match mcts.pruning {
                Pruning::Fixed(t) => u >= t,
                _ => true,
            };
            if admissible && u >= s.ufun.utility_of(&candidate) {
                return Message::Accept;
            }
        }
        Message::Propose(candidate)
    }
}

/// A bid passing pruning, or the own optimum when none is found.
fn fallback_bid(
    domain: &NegotiationDomain,
    ufun: &UtilityFunction,
    config: &MctsConfig,
    state: &PruningState,
    rng: &mut SimRng,
) -> Bid {
    let repairing = MctsConfig { repair_on_exhaustion: true, ..*config };
    BidSampler::new(domain, ufun, &repairing, state)
        .sample(rng)
        .map(|(b, _)| b)
        .unwrap_or_else(|| domain.bid_from_values(ufun.best_values(domain)))
}
