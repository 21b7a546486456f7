//! Brute-force entailment check for the basic fragment, used as test ground truth.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::formula::{Atom, AtomSet, Term, Variable};

pub const ORACLE_LIMIT: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle would enumerate {0} mappings")]
pub struct OracleTooLarge(pub u128);

fn subterms(t: &Term, out: &mut BTreeSet<Term>) {
    out.insert(t.clone());
    if let Term::Func(_, a) = t {
        subterms(a, out);
    }
}

/// True iff some total sort-respecting map from the goal's variables to
/// premise terms sends every goal atom to an atom of the premise set.
/// Quantified variables that occur in no atom are vacuous.
pub fn oracle_entails(premise: &AtomSet, goal: &AtomSet) -> Result<bool, OracleTooLarge> {
    let mut terms = BTreeSet::new();
    for a in premise.iter() {
        for t in a.args() {
            subterms(t, &mut terms);
        }
    }
    let vars: BTreeSet<Variable> = goal.iter().flat_map(Atom::vars).collect();
    let vars: Vec<Variable> = vars.into_iter().collect();
    let pools: Vec<Vec<Term>> = vars
        .iter()
        .map(|v| terms.iter().filter(|t| t.sort() == v.sort).cloned().collect())
        .collect();
    let total = pools.iter().fold(1u128, |acc, p| acc.saturating_mul(p.len() as u128));
    if total > ORACLE_LIMIT {
        return Err(OracleTooLarge(total));
    }
    if total == 0 {
        return Ok(vars.is_empty() && goal.iter().all(|a| premise.contains(a)));
    }
    let mut counter = vec![0usize; vars.len()];
    loop {
        let map: BTreeMap<Variable, Term> =
            vars.iter().zip(&counter).enumerate().map(|(i, (v, &c))| (*v, pools[i][c].clone())).collect();
        let image = |a: &Atom| a.rename(&|v| map.get(&v).cloned().unwrap_or(Term::Var(v)));
        if goal.iter().all(|a| premise.contains(&image(a))) {
            return Ok(true);
        }
        let mut i = 0;
        loop {
            if i == counter.len() {
                return Ok(false);
            }
            counter[i] += 1;
            if counter[i] < pools[i].len() {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}
