use std::path::Path;

use super::{Agent, AgentAction, AgentSetup, Deadline};
use crate::error::Result;
use crate::negotiation::{History, Message};

/// Replays a fixed tape of messages. A finished tape rejects, unless it cycles.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedAgent {
    tape: Vec<Message>,
    cycle: bool,
    next: usize,
}

impl ScriptedAgent {
    pub fn new(tape: Vec<Message>) -> Self {
        Self { tape, cycle: false, next: 0 }
    }

    pub fn cycling(tape: Vec<Message>) -> Self {
        Self { tape, cycle: true, next: 0 }
    }

    /// Load a JSON array of messages such as `[{"propose": {...}}, "accept"]`.
    pub fn load_tape(path: impl AsRef<Path>) -> Result<Vec<Message>> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn tape(&self) -> &[Message] {
        &self.tape
    }
}

impl Agent for ScriptedAgent {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn prepare(&mut self, _setup: &AgentSetup) -> Result<()> {
        self.next = 0;
        Ok(())
    }

    fn act(&mut self, _history: &History, _deadline: &Deadline) -> AgentAction {
        if self.tape.is_empty() || (!self.cycle && self.next >= self.tape.len()) {
            return Message::Reject;
        }
        let m = self.tape[self.next % self.tape.len()].clone();
        self.next += 1;
        m
    }
}
