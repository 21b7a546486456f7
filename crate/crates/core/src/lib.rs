//! Symbolic entailment engine over Neo-Davidsonian event-semantics formulas.
//!
//! A sentence pair arrives as two logical forms. The prover decomposes them
//! into atom pools, unifies goal variables against premise terms with
//! backtracking, injects lexical knowledge (word abduction), and, where a
//! phrase on the goal side stays unproved, aligns subgraphs of the two
//! meaning representations to synthesize a universally quantified phrasal
//! axiom.

pub mod axiom;
pub mod config;
pub mod error;
pub mod formula;
pub mod graph;
pub mod kb;
pub mod phrase;
pub mod prover;

pub use axiom::{Axiom, AxiomMode, Provenance};
pub use config::{EngineConfig, Mode};
pub use error::{FormulaError, GraphError, KbError, ProverError};
pub use formula::{
    decompose_basic, is_basic, normalize, parse_formula, print_formula, Atom, AtomSet, Formula,
    Sort, Term, Variable,
};
pub use graph::{Edge, EdgeLabel, SemGraph, Vertex};
pub use kb::{KnowledgeBase, RelationKind, WordRelation};
pub use prover::{classify, Label, ProofResult, ProofStatus};
