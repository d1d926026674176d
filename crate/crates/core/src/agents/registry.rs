use std::fmt;
use std::path::PathBuf;

use super::{Agent, Conceder, MoCaNA, MocanaConfig, RandomWalker, ScriptedAgent};
use crate::error::{Error, Result};
use crate::negotiation::Message;

/// An agent chosen by name: `mocana`, `random-walker`, `scripted:<file>` or
/// `conceder:<rate>`.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentSpec {
    Mocana(MocanaConfig),
    RandomWalker,
    Scripted { path: PathBuf, tape: Vec<Message> },
    Conceder(f64),
}

impl AgentSpec {
    /// Parse a name, loading scripted tapes eagerly. MoCaNA gets `mocana`.
    pub fn parse(name: &str, mocana: MocanaConfig) -> Result<Self> {
        let name = name.trim();
        if let Some(path) = name.strip_prefix("scripted:") {
            let path = PathBuf::from(path);
            let tape = ScriptedAgent::load_tape(&path)?;
            return Ok(AgentSpec::Scripted { path, tape });
        }
        if let Some(rate) = name.strip_prefix("conceder:") {
            let rate: f64 = rate.parse().map_err(|_| Error::Config(format!("bad concession rate '{rate}'")))?;
            Conceder::new(rate)?;
            return Ok(AgentSpec::Conceder(rate));
        }
        match name.to_ascii_lowercase().as_str() {
            "mocana" => {
                mocana.mcts.validate()?;
                Ok(AgentSpec::Mocana(mocana))
            }
            "random-walker" | "randomwalker" | "random" => Ok(AgentSpec::RandomWalker),
            _ => Err(Error::Config(format!(
                "unknown agent '{name}' (mocana, random-walker, scripted:<file>, conceder:<rate>)"
            ))),
        }
    }

    pub fn build(&self) -> Result<Box<dyn Agent + Send>> {
        Ok(match self {
            AgentSpec::Mocana(config) => Box::new(MoCaNA::new(*config)?),
            AgentSpec::RandomWalker => Box::new(RandomWalker::new()),
            AgentSpec::Scripted { tape, .. } => Box::new(ScriptedAgent::new(tape.clone())),
            AgentSpec::Conceder(rate) => Box::new(Conceder::new(*rate)?),
        })
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Mocana(_) => f.write_str("mocana"),
            AgentSpec::RandomWalker => f.write_str("random-walker"),
            AgentSpec::Scripted { path, .. } => write!(f, "scripted:{}", path.display()),
            AgentSpec::Conceder(rate) => write!(f, "conceder:{rate}"),
        }
    }
}
