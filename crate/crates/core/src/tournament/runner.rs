use rayon::prelude::*;

use super::report::{SessionRow, TournamentReport};
use crate::agents::AgentSpec;
use crate::error::{Error, Result};
use crate::negotiation::{run_session, Scenario, SessionConfig};
use crate::rng::derive_seed;

#[derive(Debug, Clone)]
pub struct TournamentConfig {
    pub scenario: Scenario,
    /// Agents in slots 1 and 2; slot 1 always opens.
    pub agents: [AgentSpec; 2],
    /// Sessions per profile assignment; the tournament runs twice as many.
    pub repetitions: usize,
    pub session: SessionConfig,
    pub seed: u64,
    pub workers: usize,
}

impl TournamentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.scenario.pair()?;
        self.session.validate()
    }

    pub fn session_count(&self) -> usize {
        2 * self.repetitions
    }

    /// Seed of session `index`, independent of scheduling.
    pub fn session_seed(&self, index: usize) -> u64 {
        derive_seed(self.seed, index as u64)
    }
}

/// Sessions `0..r` give profile A to slot 1; sessions `r..2r` swap profiles.
/// A session that fails is recorded with outcome `error` and reservation
/// utilities.
pub fn run_session_row(config: &TournamentConfig, index: usize) -> SessionRow {
    let swapped = index >= config.repetitions;
    let seed = config.session_seed(index);
    let names = [config.agents[0].to_string(), config.agents[1].to_string()];
    let played = (|| -> Result<_> {
        let [a, b] = config.scenario.pair()?;
        let ufuns = if swapped { [b, a] } else { [a, b] };
        let mut agent1 = config.agents[0].build()?;
        let mut agent2 = config.agents[1].build()?;
        run_session(agent1.as_mut(), agent2.as_mut(), &config.scenario.domain, ufuns, &config.session, seed)
    })();
    let (outcome, rounds, [u1, u2]) = match played {
        Ok(o) => (o.result.label().to_string(), o.rounds_used, o.utilities),
        Err(_) => ("error".to_string(), 0, config.session.reservation_utility),
    };
    SessionRow { session: index, seed, agent1: names[0].clone(), agent2: names[1].clone(), swapped, outcome, rounds, u1, u2 }
}

/// Run every session on a pool of `workers` threads. Rows come back in
/// session order, so the report does not depend on the worker count.
pub fn run_tournament(config: &TournamentConfig) -> Result<TournamentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| (0..config.session_count()).into_par_iter().map(|i| run_session_row(config, i)).collect());
    Ok(TournamentReport::new(rows))
}
