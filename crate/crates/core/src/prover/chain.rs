//! Forward chaining with universally quantified rules (∀-E followed by →-E).

use std::collections::{BTreeMap, BTreeSet};

use super::matching::{apply_subst, homomorphisms, PoolIndex, Substitution};
use super::{ProofState, ProofStep};
use crate::axiom::Axiom;
use crate::config::EngineConfig;
use crate::error::ProverError;
use crate::formula::{Atom, AtomSet, FreshVars, Sort, Term, Variable};

const MATCH_LIMIT: usize = 4096;

/// An axiom with functional arguments replaced by role-filler variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompiledRule {
    pub axiom: Axiom,
    pub antecedent: Vec<Atom>,
    pub consequent: Vec<Atom>,
    pub universal: BTreeSet<Variable>,
    pub existential: BTreeSet<Variable>,
}

impl CompiledRule {
    pub fn compile(axiom: &Axiom) -> CompiledRule {
        let all: BTreeSet<Variable> = axiom
            .antecedent
            .variables
            .union(&axiom.consequent.variables)
            .copied()
            .collect();
        let mut fresh = FreshVars::avoiding(&all);
        let mut fillers: BTreeMap<(String, Term), Term> = BTreeMap::new();
        for a in axiom.antecedent.iter() {
            if let Atom::Role { role, event, filler } = a {
                if !filler.is_functional() {
                    fillers.entry((role.clone(), event.clone())).or_insert_with(|| filler.clone());
                }
            }
        }
        let mut flatten_side = |atoms: &AtomSet, fillers: &mut BTreeMap<(String, Term), Term>| {
            let mut out: Vec<Atom> = Vec::new();
            let mut extra: Vec<Atom> = Vec::new();
            for a in atoms.iter() {
                let mut resolve = |t: &Term, extra: &mut Vec<Atom>, fresh: &mut FreshVars| match t {
                    Term::Func(role, ev) => {
                        let key = (role.clone(), (**ev).clone());
                        fillers
                            .entry(key)
                            .or_insert_with(|| {
                                let v = Term::Var(fresh.fresh(Sort::Entity));
                                extra.push(Atom::role(role.clone(), (**ev).clone(), v.clone()));
                                v
                            })
                            .clone()
                    }
                    other => other.clone(),
                };
                let args: Vec<Term> = a.args().into_iter().map(|t| resolve(t, &mut extra, &mut fresh)).collect();
                out.push(rebuild(a, &args));
            }
            out.extend(extra);
            out.sort();
            out.dedup();
            out
        };
        let antecedent = flatten_side(&axiom.antecedent, &mut fillers);
        let consequent = flatten_side(&axiom.consequent, &mut fillers);
        let universal: BTreeSet<Variable> = antecedent.iter().flat_map(Atom::vars).collect();
        let existential = consequent
            .iter()
            .flat_map(Atom::vars)
            .filter(|v| !universal.contains(v))
            .collect();
        CompiledRule { axiom: axiom.clone(), antecedent, consequent, universal, existential }
    }

    pub fn is_negative(&self) -> bool {
        self.axiom.negated
    }

    /// Substitutions for the universal variables under which the antecedent holds.
    pub fn matches(&self, pool: &AtomSet) -> Vec<Substitution> {
        let idx = PoolIndex::new(pool);
        homomorphisms(&self.antecedent, &idx, &self.universal, &Substitution::new(), MATCH_LIMIT)
    }

    /// True when antecedent and consequent hold together somewhere in the pool;
    /// for a negative rule this is a contradiction.
    pub fn violated_in(&self, pool: &AtomSet) -> bool {
        let idx = PoolIndex::new(pool);
        let flex: BTreeSet<Variable> = self.universal.union(&self.existential).copied().collect();
        let pattern: Vec<Atom> = self.antecedent.iter().chain(&self.consequent).cloned().collect();
        !homomorphisms(&pattern, &idx, &flex, &Substitution::new(), 1).is_empty()
    }

    /// Instantiates the consequent under `sigma`. Returns `None` when it
    /// already holds in the pool. A role atom whose filler is existential
    /// reuses the pool's filler for the same role and event.
    fn instantiate(&self, sigma: &Substitution, pool: &AtomSet, fresh: &mut FreshVars) -> Option<Vec<Atom>> {
        let idx = PoolIndex::new(pool);
        let found = homomorphisms(&self.consequent, &idx, &self.existential, sigma, 1);
        if !found.is_empty() {
            return None;
        }
        let mut full = sigma.clone();
        for a in &self.consequent {
            if let Atom::Role { role, event, filler: Term::Var(v) } = a {
                if self.existential.contains(v) && !full.contains_key(v) {
                    let ev = super::matching::apply_term(event, &full);
                    if let Some(Atom::Role { filler, .. }) = idx
                        .with_pred(role)
                        .find(|p| matches!(p, Atom::Role { event: e, .. } if *e == ev))
                    {
                        full.insert(*v, filler.clone());
                    }
                }
            }
        }
        for v in &self.existential {
            if !full.contains_key(v) {
                full.insert(*v, Term::Var(fresh.fresh(v.sort)));
            }
        }
        Some(
            self.consequent
                .iter()
                .map(|a| apply_subst(a, &full))
                .filter(|a| !pool.contains(a))
                .collect(),
        )
    }
}

fn rebuild(a: &Atom, args: &[Term]) -> Atom {
    match a {
        Atom::Unary { pred, .. } => Atom::unary(pred.clone(), args[0].clone()),
        Atom::Binary { pred, .. } => Atom::binary(pred.clone(), args[0].clone(), args[1].clone()),
        Atom::Role { role, .. } => Atom::role(role.clone(), args[0].clone(), args[1].clone()),
        Atom::Eq(..) => Atom::Eq(args[0].clone(), args[1].clone()),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainOutcome {
    pub pool: AtomSet,
    pub steps: Vec<ProofStep>,
    pub used: Vec<Axiom>,
    /// More firings were possible when the round limit was reached.
    pub truncated: bool,
}

/// Saturates the pool with the positive rules for at most `max_chain`
/// rounds. Each (rule, substitution) pair fires at most once.
pub fn forward_chain(pool: &AtomSet, rules: &[CompiledRule], max_chain: usize, avoid: &BTreeSet<Variable>) -> ChainOutcome {
    let mut out = ChainOutcome { pool: pool.clone(), ..ChainOutcome::default() };
    let mut fresh = FreshVars::avoiding(pool.variables.iter().chain(avoid));
    let mut fired: BTreeSet<(usize, Vec<(Variable, Term)>)> = BTreeSet::new();
    let positive: Vec<(usize, &CompiledRule)> =
        rules.iter().enumerate().filter(|(_, r)| !r.is_negative()).collect();
    for round in 0..=max_chain {
        let mut added_any = false;
        let snapshot = out.pool.clone();
        for &(i, rule) in &positive {
            for sigma in rule.matches(&snapshot) {
                let key = (i, sigma.iter().map(|(v, t)| (*v, t.clone())).collect::<Vec<_>>());
                if fired.contains(&key) {
                    continue;
                }
                if round == max_chain {
                    if rule.instantiate(&sigma, &out.pool, &mut fresh.clone()).is_some_and(|a| !a.is_empty()) {
                        out.truncated = true;
                        return out;
                    }
                    continue;
                }
                fired.insert(key);
                let Some(added) = rule.instantiate(&sigma, &out.pool, &mut fresh) else {
                    continue;
                };
                if added.is_empty() {
                    continue;
                }
                for a in &added {
                    out.pool.insert(a.clone());
                }
                added_any = true;
                if !out.used.contains(&rule.axiom) {
                    out.used.push(rule.axiom.clone());
                }
                out.steps.push(ProofStep::AxiomApply { axiom: rule.axiom.clone(), binding: sigma, added });
            }
        }
        if !added_any {
            break;
        }
    }
    out
}

/// Fires one axiom on a state, producing one successor per matching
/// substitution whose consequent is not yet present. A state that already
/// carries `max_chain` axiom applications cannot be extended.
pub fn apply_axiom(axiom: &Axiom, state: &ProofState, config: &EngineConfig) -> Result<Vec<ProofState>, ProverError> {
    let rule = CompiledRule::compile(axiom);
    let fired = state
        .trace
        .iter()
        .filter(|s| matches!(s, ProofStep::AxiomApply { .. }))
        .count();
    if fired >= config.max_chain {
        return Err(ProverError::ChainLimitExceeded(config.max_chain));
    }
    let avoid: BTreeSet<Variable> = state.subgoals.variables.iter().copied().collect();
    let mut fresh = FreshVars::avoiding(state.premises.variables.iter().chain(&avoid));
    let mut out = Vec::new();
    for sigma in rule.matches(&state.premises) {
        let Some(added) = rule.instantiate(&sigma, &state.premises, &mut fresh) else {
            continue;
        };
        let mut next = state.clone();
        for a in &added {
            next.premises.insert(a.clone());
        }
        next.used_axioms.push(axiom.clone());
        next.trace.push(ProofStep::AxiomApply { axiom: axiom.clone(), binding: sigma, added });
        out.push(next);
    }
    Ok(out)
}
