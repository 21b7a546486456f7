//! Backtracking unification of sub-goals against the premise pool.

use std::time::Instant;

use super::matching::{unify_atom, PoolIndex, Substitution};
use super::{ProofState, ProofStep};
use crate::axiom::Axiom;
use crate::config::EngineConfig;
use crate::error::ProverError;
use crate::formula::{Atom, Term};
use crate::kb::{KnowledgeBase, RelationKind};

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Word abduction with synonym and hypernym relations.
    pub word: bool,
    /// Word abduction may also use antonym relations.
    pub antonym: bool,
    /// Cut a branch as soon as some sub-goal has no exact candidate.
    pub prune: bool,
    pub max_branches: usize,
    pub deadline: Option<Instant>,
}

impl SearchOptions {
    pub fn exact(config: &EngineConfig) -> Self {
        SearchOptions {
            word: false,
            antonym: false,
            prune: false,
            max_branches: config.max_branches,
            deadline: None,
        }
    }
}

/// What the leaf callback decides.
pub(crate) enum Visit {
    Continue,
    Stop,
}

pub(crate) struct Searcher<'a> {
    pub opts: SearchOptions,
    pub kb: &'a KnowledgeBase,
    pub leaves: usize,
}

fn goal_key(a: &Atom) -> (&str, usize, &Atom) {
    (a.predicate(), a.arity(), a)
}

fn sorted_goals(state: &ProofState) -> Vec<Atom> {
    let mut goals: Vec<&Atom> = state.subgoals.iter().collect();
    goals.sort_by(|a, b| goal_key(a).cmp(&goal_key(b)));
    goals.into_iter().cloned().collect()
}

fn matched(state: &ProofState, goal: &Atom, premise: &Atom, delta: Substitution) -> ProofState {
    let mut next = state.clone();
    next.subgoals.remove(goal);
    next.subst.extend(delta.clone());
    next.trace.push(ProofStep::Match { premise: premise.clone(), goal: goal.clone(), bindings: delta });
    next
}

impl<'a> Searcher<'a> {
    pub(crate) fn new(opts: SearchOptions, kb: &'a KnowledgeBase) -> Self {
        Searcher { opts, kb, leaves: 0 }
    }

    fn exact_candidates(&self, state: &ProofState, idx: &PoolIndex<'_>, goal: &Atom) -> Vec<(Atom, Substitution)> {
        idx.candidates(goal)
            .filter_map(|p| unify_atom(goal, p, &state.subst, &state.flexible).map(|d| (p.clone(), d)))
            .collect()
    }

    fn word_candidates(&self, state: &ProofState, idx: &PoolIndex<'_>, goal: &Atom) -> Vec<(Atom, Substitution, RelationKind)> {
        let Atom::Unary { pred: g, arg } = goal else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for source in idx.predicates() {
            if source == g.as_str() {
                continue;
            }
            let Some(rel) = self.kb.lookup(source, g) else { continue };
            if rel.kind == RelationKind::Antonym && !self.opts.antonym {
                continue;
            }
            let probe = Atom::unary(source, arg.clone());
            for p in idx.with_pred(source) {
                if let Some(d) = unify_atom(&probe, p, &state.subst, &state.flexible) {
                    out.push((p.clone(), d, rel.kind));
                }
            }
        }
        out
    }

    pub(crate) fn explore(
        &mut self,
        state: ProofState,
        idx: &PoolIndex<'_>,
        visit: &mut dyn FnMut(ProofState) -> Result<Visit, ProverError>,
    ) -> Result<Visit, ProverError> {
        if let Some(d) = self.opts.deadline {
            if Instant::now() >= d {
                return Err(ProverError::Timeout);
            }
        }
        let goals = sorted_goals(&state);
        let mut chosen = None;
        for g in &goals {
            let cands = self.exact_candidates(&state, idx, g);
            if cands.is_empty() {
                if self.opts.prune {
                    return self.leaf(state, visit);
                }
                continue;
            }
            if chosen.is_none() {
                chosen = Some((g.clone(), cands));
                if !self.opts.prune {
                    break;
                }
            }
        }
        if let Some((g, cands)) = chosen {
            for (p, delta) in cands {
                if let Visit::Stop = self.explore(matched(&state, &g, &p, delta), idx, visit)? {
                    return Ok(Visit::Stop);
                }
            }
            return Ok(Visit::Continue);
        }
        if self.opts.word || self.opts.antonym {
            for g in goals.iter().filter(|g| g.arity() == 1) {
                let cands = self.word_candidates(&state, idx, g);
                if cands.is_empty() {
                    continue;
                }
                for (p, delta, kind) in cands {
                    let negated = kind == RelationKind::Antonym;
                    let sort = match g.args()[0] {
                        Term::Var(v) => v.sort,
                        t => t.sort(),
                    };
                    let axiom = Axiom::word(p.predicate(), g.predicate(), sort, negated);
                    let mut next = state.clone();
                    next.subgoals.remove(g);
                    next.subst.extend(delta.clone());
                    if negated {
                        next.antonym_steps += 1;
                    }
                    next.used_axioms.push(axiom.clone());
                    next.trace.push(ProofStep::WordAbduction { axiom, premise: p, goal: g.clone(), bindings: delta });
                    if let Visit::Stop = self.explore(next, idx, visit)? {
                        return Ok(Visit::Stop);
                    }
                }
                return Ok(Visit::Continue);
            }
        }
        self.leaf(state, visit)
    }

    fn leaf(
        &mut self,
        state: ProofState,
        visit: &mut dyn FnMut(ProofState) -> Result<Visit, ProverError>,
    ) -> Result<Visit, ProverError> {
        self.leaves += 1;
        if self.leaves > self.opts.max_branches {
            return Err(ProverError::BranchLimitExceeded(self.opts.max_branches));
        }
        visit(state)
    }
}

/// Enumerates the maximal branches of exact-match unification in search
/// order: sub-goals by (predicate, arity, atom), candidates by atom order.
pub fn unify_search(state: &ProofState, config: &EngineConfig) -> Result<Vec<ProofState>, ProverError> {
    let kb = KnowledgeBase::new();
    let mut searcher = Searcher::new(SearchOptions::exact(config), &kb);
    let idx = PoolIndex::new(&state.premises);
    let mut out = Vec::new();
    searcher.explore(state.clone(), &idx, &mut |s| {
        out.push(s);
        Ok(Visit::Continue)
    })?;
    Ok(out)
}

/// Removes the first unary sub-goal that a lexical relation links to a
/// premise predicate, recording the word axiom used.
pub fn word_abduction(state: &ProofState, kb: &KnowledgeBase) -> Option<(ProofState, Axiom)> {
    let opts = SearchOptions { word: true, antonym: false, prune: false, max_branches: usize::MAX, deadline: None };
    let searcher = Searcher::new(opts, kb);
    let idx = PoolIndex::new(&state.premises);
    for g in sorted_goals(state).iter().filter(|g| g.arity() == 1) {
        if let Some((p, delta, _)) = searcher.word_candidates(state, &idx, g).into_iter().next() {
            let sort = g.args()[0].sort();
            let axiom = Axiom::word(p.predicate(), g.predicate(), sort, false);
            let mut next = state.clone();
            next.subgoals.remove(g);
            next.subst.extend(delta.clone());
            next.used_axioms.push(axiom.clone());
            next.trace.push(ProofStep::WordAbduction { axiom: axiom.clone(), premise: p, goal: g.clone(), bindings: delta });
            return Some((next, axiom));
        }
    }
    None
}
