use thiserror::Error;

use crate::formula::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("formula is not basic: {0}")]
    NotBasic(String),
    #[error("cannot normalize `{0}`: equality must link a semantic role to a participant")]
    Normalization(String),
    #[error("`{0}` is not a configured semantic role")]
    UnknownRole(String),
    #[error("functional terms nest at most once: {0}")]
    NestedFunctional(String),
    #[error("bad variable name `{0}`")]
    BadVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("un-normalized atom `{0}` cannot become an edge")]
    Normalization(String),
    #[error("vertex `{0}` does not occur in the graph")]
    UnknownVertex(String),
    #[error("`{0}` is not a non-unified variable of the goal graph")]
    NotNonUnified(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProverError {
    #[error("rule application depth exceeded {0}")]
    DepthExceeded(usize),
    #[error("unification search truncated after {0} branches")]
    BranchLimitExceeded(usize),
    #[error("axiom chaining exceeded {0} rounds")]
    ChainLimitExceeded(usize),
    #[error("time limit reached")]
    Timeout,
    #[error("gold label must be yes or no for extraction")]
    UnknownGold,
    #[error(transparent)]
    Formula(#[from] FormulaError),
}

impl ProverError {
    /// Limit errors mean the search was cut short, not that it failed.
    pub fn is_truncation(&self) -> bool {
        matches!(
            self,
            ProverError::DepthExceeded(_)
                | ProverError::BranchLimitExceeded(_)
                | ProverError::ChainLimitExceeded(_)
                | ProverError::Timeout
        )
    }
}

#[derive(Debug, Error)]
pub enum KbError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
}
