use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};

/// Which knowledge sources a proof may draw on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Plain unification, no injected knowledge.
    None,
    /// Word abduction from lexical relations.
    W2w,
    /// Stored phrase axioms.
    P2p,
    #[default]
    W2wP2p,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::None, Mode::W2w, Mode::P2p, Mode::W2wP2p];

    pub fn word(self) -> bool {
        matches!(self, Mode::W2w | Mode::W2wP2p)
    }

    pub fn phrase(self) -> bool {
        matches!(self, Mode::P2p | Mode::W2wP2p)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::None => "none",
            Mode::W2w => "w2w",
            Mode::P2p => "p2p",
            Mode::W2wP2p => "w2w+p2p",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Mode::None),
            "w2w" => Ok(Mode::W2w),
            "p2p" => Ok(Mode::P2p),
            "w2w+p2p" => Ok(Mode::W2wP2p),
            other => Err(format!("unknown mode `{other}` (expected none, w2w, p2p or w2w+p2p)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Semantic role names. Any other binary predicate is a preposition.
    pub roles: BTreeSet<String>,
    pub mode: Mode,
    /// Synthesize phrase axioms on the fly for unproved sub-goals.
    pub abduce_phrases: bool,
    pub max_branches: usize,
    pub max_chain: usize,
    pub max_depth: usize,
    pub time_limit: Option<Duration>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            roles: ["subj", "obj"].iter().map(|s| s.to_string()).collect(),
            mode: Mode::W2wP2p,
            abduce_phrases: false,
            max_branches: 256,
            max_chain: 3,
            max_depth: 32,
            time_limit: None,
        }
    }
}

impl EngineConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_phrase_abduction(mut self, on: bool) -> Self {
        self.abduce_phrases = on;
        self
    }

    pub fn with_roles<I, S>(mut self, roles: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.roles = roles.into_iter().map(Into::into).collect();
        self
    }

    pub fn is_role(&self, name: &str) -> bool {
        self.roles.contains(name)
    }
}
