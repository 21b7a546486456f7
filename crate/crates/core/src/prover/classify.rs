use std::time::Instant;

use super::leaf::Ctx;
use super::reduce::{reduce_goal, Side, Tagged};
use super::{Label, ProofResult, ProofStatus, ProofStep};
use crate::axiom::{Axiom, AxiomMode, Provenance};
use crate::config::EngineConfig;
use crate::error::ProverError;
use crate::formula::{normalize, Formula};
use crate::kb::KnowledgeBase;

/// Which theorem is attempted: `T ⇒ H` or `T ⇒ ¬H`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Entail,
    Contradict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub label: Label,
    pub entail: ProofResult,
    pub contradict: ProofResult,
    /// Some attempt hit a search limit or the time limit.
    pub truncated: bool,
}

/// Axioms that a proof introduced by abduction, in trace order.
fn generated(states: &[super::ProofState]) -> Vec<Axiom> {
    let mut out: Vec<Axiom> = Vec::new();
    for st in states {
        for step in &st.trace {
            let ax = match step {
                ProofStep::WordAbduction { axiom, .. } if !axiom.negated => axiom,
                ProofStep::PhraseAbduction { axiom, .. } => axiom,
                _ => continue,
            };
            if !out.iter().any(|a| a.alpha_eq(ax)) {
                out.push(ax.clone());
            }
        }
    }
    out
}

fn prove_with(
    premise: &Formula,
    goal: &Formula,
    direction: Direction,
    kb: &KnowledgeBase,
    config: &EngineConfig,
    deadline: Option<Instant>,
) -> Result<ProofResult, ProverError> {
    let target = match direction {
        Direction::Entail => goal.clone(),
        Direction::Contradict => Formula::not(goal.clone()),
    };
    let alternatives = match reduce_goal(
        vec![Tagged::new(Side::Text, premise.clone())],
        Tagged::new(Side::Hypothesis, target),
        config,
    ) {
        Ok(alts) => alts,
        Err(e) if e.is_truncation() => return Ok(ProofResult::unprovable(true)),
        Err(e) => return Err(e),
    };
    let ctx = Ctx::new(config, kb, deadline, direction);
    let mut truncated = false;
    let mut last = None;
    'alts: for alt in &alternatives {
        let mut states = Vec::new();
        for ob in alt {
            let leaf = match ctx.prove_obligation(ob) {
                Ok(leaf) => leaf,
                Err(ProverError::Timeout) => return Err(ProverError::Timeout),
                Err(e) if e.is_truncation() => {
                    truncated = true;
                    continue 'alts;
                }
                Err(e) => return Err(e),
            };
            truncated |= leaf.truncated;
            if !leaf.proved {
                last = Some(leaf.state);
                continue 'alts;
            }
            states.push(leaf.state);
        }
        let final_state = states.last().cloned().unwrap_or_default();
        return Ok(ProofResult {
            status: ProofStatus::Proved,
            final_state,
            generated_axioms: generated(&states),
            obligations: states,
            truncated,
        });
    }
    let mut result = ProofResult::unprovable(truncated);
    if let Some(st) = last {
        result.obligations = vec![st.clone()];
        result.final_state = st;
    }
    Ok(result)
}

/// Attempts `premise ⊢ goal` (or `premise ⊢ ¬goal`) over normalized formulas.
/// Search limits give an unprovable result flagged as truncated.
pub fn prove(
    premise: &Formula,
    goal: &Formula,
    direction: Direction,
    kb: &KnowledgeBase,
    config: &EngineConfig,
) -> Result<ProofResult, ProverError> {
    let deadline = config.time_limit.map(|d| Instant::now() + d);
    match prove_with(premise, goal, direction, kb, config, deadline) {
        Err(ProverError::Timeout) => Ok(ProofResult::unprovable(true)),
        other => other,
    }
}

/// Labels a pair: yes if `T ⇒ H` is proved, otherwise no if `T ⇒ ¬H` is
/// proved, otherwise unknown.
pub fn classify(
    premise: &Formula,
    hypothesis: &Formula,
    kb: &KnowledgeBase,
    config: &EngineConfig,
) -> Result<Classification, ProverError> {
    let t = normalize(premise, config)?;
    let h = normalize(hypothesis, config)?;
    let deadline = config.time_limit.map(|d| Instant::now() + d);
    let attempt = |direction| match prove_with(&t, &h, direction, kb, config, deadline) {
        Err(ProverError::Timeout) => Ok(ProofResult::unprovable(true)),
        other => other,
    };
    let entail = attempt(Direction::Entail)?;
    let contradict = if entail.is_proved() {
        ProofResult::unprovable(false)
    } else {
        attempt(Direction::Contradict)?
    };
    let label = if entail.is_proved() {
        Label::Yes
    } else if contradict.is_proved() {
        Label::No
    } else {
        Label::Unknown
    };
    let truncated = label == Label::Unknown && (entail.truncated || contradict.truncated);
    Ok(Classification { label, entail, contradict, truncated })
}

/// Proves a labeled pair in its gold direction with phrase abduction on and
/// returns the word and phrase axioms of the first completed proof.
pub fn extract_from_pair(
    premise: &Formula,
    hypothesis: &Formula,
    gold: Label,
    kb: &KnowledgeBase,
    config: &EngineConfig,
) -> Result<Vec<Axiom>, ProverError> {
    let direction = match gold {
        Label::Yes => Direction::Entail,
        Label::No => Direction::Contradict,
        Label::Unknown => return Err(ProverError::UnknownGold),
    };
    let t = normalize(premise, config)?;
    let h = normalize(hypothesis, config)?;
    let config = config.clone().with_phrase_abduction(true);
    let deadline = config.time_limit.map(|d| Instant::now() + d);
    let result = prove_with(&t, &h, direction, kb, &config, deadline)?;
    if !result.is_proved() {
        return Ok(Vec::new());
    }
    let phrase_axioms: Vec<&Axiom> = result
        .obligations
        .iter()
        .flat_map(|st| &st.trace)
        .filter_map(|s| match s {
            ProofStep::PhraseAbduction { axiom, .. } => Some(axiom),
            _ => None,
        })
        .collect();
    Ok(result
        .generated_axioms
        .into_iter()
        .map(|ax| {
            let mode = if phrase_axioms.contains(&&ax) { AxiomMode::Phrase } else { AxiomMode::Word };
            ax.with_provenance(Provenance { pair: String::new(), mode, gold: Some(gold) })
        })
        .collect())
}
