use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::Rng;

use super::config::{should_expand, MctsConfig, PruningState};
use super::tree::{choose_bid, select_child, Side, Tree, ROOT};
use crate::error::Result;
use crate::gp::Prediction;
use crate::negotiation::{Bid, History, Message, NegotiationDomain, UtilityFunction, Value};
use crate::opponent::{acceptance_decision, OpponentStrategyModel, OpponentUtilityModel};
use crate::rng::{derive_seed, seeded};

/// Draws own bids that pass pruning: uniform retries, then an optional
/// repair toward the per-issue optimum.
#[derive(Debug, Clone)]
pub struct BidSampler<'a> {
    domain: &'a NegotiationDomain,
    ufun: &'a UtilityFunction,
    best: Vec<Value>,
    threshold: Option<f64>,
    retries: usize,
    repair: bool,
}

impl<'a> BidSampler<'a> {
    pub fn new(
        domain: &'a NegotiationDomain,
        ufun: &'a UtilityFunction,
        config: &MctsConfig,
        state: &PruningState,
    ) -> Self {
        Self {
            domain,
            ufun,
            best: ufun.best_values(domain),
            threshold: config.pruning.threshold(state),
            retries: config.expansion_retries,
            repair: config.repair_on_exhaustion,
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    fn utility(&self, values: &[Value]) -> f64 {
        self.ufun.utility_positional(&values.iter().collect::<Vec<_>>())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Value> {
        self.domain.issues().iter().map(|i| i.sample(rng)).collect()
    }

    /// A bid passing pruning with its own utility, or `None` when none was found.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<(Bid, f64)> {
        let Some(t) = self.threshold else {
            let values = self.draw(rng);
            let u = self.utility(&values);
            return Some((self.domain.bid_from_values(values), u));
        };
        let mut last = Vec::new();
        for _ in 0..self.retries.max(1) {
            last = self.draw(rng);
            let u = self.utility(&last);
            if u >= t {
                return Some((self.domain.bid_from_values(last), u));
            }
        }
        if !self.repair {
            return None;
        }
        self.repaired(last, t)
    }

    /// Switch issues to their best value, largest weighted gain first, until
    /// the threshold is met.
    fn repaired(&self, mut values: Vec<Value>, threshold: f64) -> Option<(Bid, f64)> {
        let weights = self.ufun.weights();
        let valuations = self.ufun.valuations();
        let mut gains: Vec<(usize, f64)> = (0..values.len())
            .map(|j| (j, weights[j] * (valuations[j].score(&self.best[j]) - valuations[j].score(&values[j]))))
            .collect();
        gains.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let mut u = self.utility(&values);
        for (j, gain) in gains {
            if u >= threshold || gain <= 0.0 {
                break;
            }
            values[j] = self.best[j].clone();
            u = self.utility(&values);
        }
        (u >= threshold).then(|| (self.domain.bid_from_values(values), u))
    }
}

/// Read-only inputs of one search, shared by all workers.
pub struct SearchContext<'a> {
    pub domain: &'a NegotiationDomain,
    pub own_ufun: &'a UtilityFunction,
    pub utility_model: &'a OpponentUtilityModel,
    pub strategy_model: &'a OpponentStrategyModel,
    pub config: MctsConfig,
    sampler: BidSampler<'a>,
    /// History length at the root.
    base: usize,
    root_last: Option<(Bid, Side)>,
    /// Opponent predictive distributions keyed by `position - base`.
    predictions: Vec<Option<Vec<Prediction>>>,
}

/// Opponent models consulted by the search.
#[derive(Clone, Copy)]
pub struct SearchModels<'a> {
    pub utility: &'a OpponentUtilityModel,
    pub strategy: &'a OpponentStrategyModel,
}

impl<'a> SearchContext<'a> {
    pub fn new(
        history: &History,
        domain: &'a NegotiationDomain,
        own_ufun: &'a UtilityFunction,
        models: SearchModels<'a>,
        config: &MctsConfig,
        state: &PruningState,
    ) -> Self {
        let base = history.len();
        // The searching agent is to move at the root, so the last message was the opponent's.
        let root_last = history.last().and_then(Message::bid).map(|b| (b.clone(), Side::Opponent));
        // Opponent messages sit at odd offsets from the root.
        let predictions = (0..=config.max_rollout_depth + 1)
            .map(|k| if k % 2 == 1 { models.strategy.predictive((base + k) as f64) } else { None })
            .collect();
        Self {
            domain,
            own_ufun,
            utility_model: models.utility,
            strategy_model: models.strategy,
            config: *config,
            sampler: BidSampler::new(domain, own_ufun, config, state),
            base,
            root_last,
            predictions,
        }
    }

    pub fn sampler(&self) -> &BidSampler<'a> {
        &self.sampler
    }

    fn position_of(&self, depth: usize) -> usize {
        self.base + depth.saturating_sub(1)
    }

    fn predictive(&self, position: usize) -> Option<&[Prediction]> {
        self.predictions.get(position.wrapping_sub(self.base)).and_then(|p| p.as_deref())
    }

    /// Opponent offer at `position`: GP draw, or uniform before the model is fitted.
    pub fn opponent_bid<R: Rng + ?Sized>(&self, position: usize, rng: &mut R) -> Bid {
        match self.predictive(position) {
            Some(p) => self.strategy_model.sample_from(p, rng),
            None => self.strategy_model.predict_opponent_bid(position as f64, rng).value,
        }
    }

    /// Whether the opponent, to move at `position`, accepts our `bid`.
    pub fn opponent_accepts<R: Rng + ?Sized>(&self, bid: &Bid, position: usize, rng: &mut R) -> bool {
        let predicted = self.strategy_model.is_fitted().then(|| self.opponent_bid(position, rng));
        acceptance_decision(self.utility_model, bid, predicted.as_ref()).map(|f| f.value).unwrap_or(false)
    }

    /// Own myopic rule: accept iff the offer is worth at least the counter-bid
    /// and passes pruning.
    pub fn own_accepts(&self, offer: &Bid, counter: Option<f64>) -> bool {
        let u = self.own_ufun.utility_of(offer);
        self.sampler.threshold.is_none_or(|t| u >= t) && counter.is_none_or(|c| u >= c)
    }

    /// Utilities of an agreement on `bid`: own, and estimated opponent.
    pub fn agreement(&self, bid: &Bid) -> (f64, f64) {
        (self.own_ufun.utility_of(bid), self.utility_model.estimated_utility(bid).unwrap_or(0.0))
    }

    pub fn reservation(&self) -> (f64, f64) {
        (self.own_ufun.no_agreement_utility, 0.0)
    }
}

/// Grow a child of `node`. Own moves are uniform bids passing pruning;
/// opponent moves are uniform bids. `None` when no admissible bid was found.
pub fn expand<R: Rng + ?Sized>(tree: &mut Tree, node: usize, ctx: &SearchContext, rng: &mut R) -> Option<usize> {
    let bid = match tree.node(node).mover.other() {
        Side::Own => ctx.sampler.sample(rng)?.0,
        Side::Opponent => ctx.domain.random_bid(rng),
    };
    Some(tree.add_child(node, bid))
}

/// Play out from `last` (the most recent bid and its mover) with `position`
/// the index of the next message. Returns (own utility, estimated opponent
/// utility); reservation values once `plies` messages pass without an end.
pub fn simulate<R: Rng + ?Sized>(
    ctx: &SearchContext,
    mut last: Option<(Bid, Side)>,
    mut position: usize,
    plies: usize,
    rng: &mut R,
) -> (f64, f64) {
    for _ in 0..plies {
        let responder = last.as_ref().map_or(Side::Own, |(_, mover)| mover.other());
        match responder {
            Side::Opponent => {
                let offer = &last.as_ref().expect("opponent responds to a bid").0;
                if ctx.opponent_accepts(offer, position, rng) {
                    return ctx.agreement(offer);
                }
                last = Some((ctx.opponent_bid(position, rng), Side::Opponent));
            }
            Side::Own => {
                let counter = ctx.sampler.sample(rng);
                if let Some((offer, _)) = &last {
                    if ctx.own_accepts(offer, counter.as_ref().map(|c| c.1)) {
                        return ctx.agreement(offer);
                    }
                }
                match counter {
                    Some((bid, _)) => last = Some((bid, Side::Own)),
                    None => return ctx.reservation(),
                }
            }
        }
        position += 1;
    }
    ctx.reservation()
}

/// Result of a tree descent: the visited path and either a terminal payoff
/// or the state a rollout should start from.
struct Descent {
    path: Vec<usize>,
    outcome: Option<(f64, f64)>,
    rollout: Option<(Option<(Bid, Side)>, usize, usize)>,
}

fn descend<R: Rng + ?Sized>(tree: &mut Tree, ctx: &SearchContext, rng: &mut R) -> Descent {
    let cfg = &ctx.config;
    let mut node = ROOT;
    let mut path = vec![ROOT];
    loop {
        let n_c = tree.node(node).children.len();
        let capped = node == ROOT && n_c >= cfg.root_candidate_cap;
        let depth_left = cfg.max_rollout_depth.saturating_sub(tree.node(node).depth);
        let mut expanded = None;
        if !capped && depth_left > 0 && should_expand(tree.node(node).visits, n_c, cfg.alpha) {
            expanded = expand(tree, node, ctx, rng);
        }
        let next = match expanded {
            Some(child) => child,
            None if tree.node(node).children.is_empty() || depth_left == 0 => {
                let last = rollout_last(tree, node, ctx);
                let position = ctx.position_of(tree.node(node).depth) + usize::from(node != ROOT);
                return Descent { path, outcome: None, rollout: Some((last, position, depth_left)) };
            }
            None => select_child(tree, node, tree.root().visits, cfg.c, cfg.alpha).expect("children exist"),
        };
        path.push(next);
        let child = tree.node(next);
        let bid = child.bid.clone().expect("non-root nodes carry a bid");
        let respond_at = ctx.position_of(child.depth) + 1;
        if expanded.is_some() {
            let plies = cfg.max_rollout_depth.saturating_sub(child.depth);
            return Descent { path, outcome: None, rollout: Some((Some((bid, child.mover)), respond_at, plies)) };
        }
        let accepted = match child.mover.other() {
            Side::Opponent => ctx.opponent_accepts(&bid, respond_at, rng),
            Side::Own => ctx.own_accepts(&bid, ctx.sampler.sample(rng).map(|c| c.1)),
        };
        if accepted {
            return Descent { path, outcome: Some(ctx.agreement(&bid)), rollout: None };
        }
        node = next;
    }
}

fn rollout_last(tree: &Tree, node: usize, ctx: &SearchContext) -> Option<(Bid, Side)> {
    if node == ROOT {
        ctx.root_last.clone()
    } else {
        let n = tree.node(node);
        n.bid.clone().map(|b| (b, n.mover))
    }
}

fn finish<R: Rng + ?Sized>(descent: Descent, ctx: &SearchContext, rng: &mut R) -> (Vec<usize>, f64, f64) {
    let (u_self, u_opp) = match (descent.outcome, descent.rollout) {
        (Some(o), _) => o,
        (None, Some((last, position, plies))) => simulate(ctx, last, position, plies, rng),
        (None, None) => ctx.reservation(),
    };
    (descent.path, u_self, u_opp)
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub bid: Bid,
    pub tree: Tree,
}

/// Build a fresh tree for the current position, run the simulation budget
/// and pick the bid maximising `(u(b) + score(b)) / 2` among root children.
pub fn mcts_search<R: Rng + ?Sized>(
    history: &History,
    domain: &NegotiationDomain,
    own_ufun: &UtilityFunction,
    models: SearchModels,
    config: &MctsConfig,
    state: &PruningState,
    rng: &mut R,
) -> Result<SearchResult> {
    config.validate()?;
    let ctx = SearchContext::new(history, domain, own_ufun, models, config, state);
    let tree = if config.workers == 1 {
        let mut tree = Tree::new(Side::Opponent);
        for _ in 0..config.simulation_budget {
            let descent = descend(&mut tree, &ctx, rng);
            let (path, u_self, u_opp) = finish(descent, &ctx, rng);
            tree.record_visit(&path);
            tree.record_scores(&path, u_self, u_opp);
        }
        tree
    } else {
        parallel_search(&ctx, rng.random())
    };
    let bid = choose_bid(&tree, own_ufun)?;
    Ok(SearchResult { bid, tree })
}

/// Simulations on `workers` threads sharing one locked tree. Visits are
/// recorded during descent so concurrent workers see up-to-date widening
/// counts; scores are added after the rollout.
fn parallel_search(ctx: &SearchContext, seed: u64) -> Tree {
    let tree = Mutex::new(Tree::new(Side::Opponent));
    let started = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for w in 0..ctx.config.workers {
            let (tree, started) = (&tree, &started);
            scope.spawn(move || {
                let mut rng = seeded(derive_seed(seed, w as u64));
                while started.fetch_add(1, Ordering::Relaxed) < ctx.config.simulation_budget {
                    let descent = {
                        let mut t = tree.lock().expect("tree lock");
                        let d = descend(&mut t, ctx, &mut rng);
                        t.record_visit(&d.path);
                        d
                    };
                    let (path, u_self, u_opp) = finish(descent, ctx, &mut rng);
                    tree.lock().expect("tree lock").record_scores(&path, u_self, u_opp);
                }
            });
        }
    });
    tree.into_inner().expect("tree lock")
}
