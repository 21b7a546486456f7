use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{Atom, AtomSet, Term, Variable};

/// Goal variable ↦ premise term. Sort-preserving by construction.
pub type Substitution = BTreeMap<Variable, Term>;

pub fn apply_term(t: &Term, subst: &Substitution) -> Term {
    t.rename(&|v| subst.get(&v).cloned().unwrap_or(Term::Var(v)))
}

pub fn apply_subst(a: &Atom, subst: &Substitution) -> Atom {
    a.map_terms(&|t| apply_term(t, subst))
}

fn unify_term(
    goal: &Term,
    premise: &Term,
    subst: &Substitution,
    flexible: &BTreeSet<Variable>,
    delta: &mut Substitution,
) -> bool {
    match goal {
        Term::Var(v) if flexible.contains(v) => {
            if let Some(bound) = subst.get(v).or_else(|| delta.get(v)) {
                return bound == premise;
            }
            if v.sort != premise.sort() {
                return false;
            }
            delta.insert(*v, premise.clone());
            true
        }
        Term::Func(r, a) => match premise {
            Term::Func(s, b) => r == s && unify_term(a, b, subst, flexible, delta),
            _ => false,
        },
        rigid => rigid == premise,
    }
}

/// Extends `subst` so that `goal` becomes `premise`; returns the new bindings.
pub fn unify_atom(
    goal: &Atom,
    premise: &Atom,
    subst: &Substitution,
    flexible: &BTreeSet<Variable>,
) -> Option<Substitution> {
    if !goal.same_head(premise) {
        return None;
    }
    let mut delta = Substitution::new();
    for (t, u) in goal.args().into_iter().zip(premise.args()) {
        if !unify_term(t, u, subst, flexible, &mut delta) {
            return None;
        }
    }
    Some(delta)
}

/// Pool atoms grouped by predicate for candidate lookup.
pub(crate) struct PoolIndex<'a> {
    by_pred: BTreeMap<&'a str, Vec<&'a Atom>>,
}

impl<'a> PoolIndex<'a> {
    pub(crate) fn new(pool: &'a AtomSet) -> Self {
        let mut by_pred: BTreeMap<&str, Vec<&Atom>> = BTreeMap::new();
        for a in pool.iter() {
            by_pred.entry(a.predicate()).or_default().push(a);
        }
        PoolIndex { by_pred }
    }

    pub(crate) fn candidates<'s>(&'s self, goal: &'s Atom) -> impl Iterator<Item = &'a Atom> + 's {
        let pred = goal.predicate();
        self.by_pred
            .get(pred)
            .into_iter()
            .flatten()
            .copied()
            .filter(move |p| p.same_head(goal))
    }

    pub(crate) fn predicates(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.by_pred.keys().copied()
    }

    pub(crate) fn with_pred(&self, pred: &str) -> impl Iterator<Item = &'a Atom> + '_ {
        self.by_pred.get(pred).into_iter().flatten().copied()
    }
}

/// Every extension of `init` that maps all `pattern` atoms into the pool.
pub(crate) fn homomorphisms(
    pattern: &[Atom],
    pool: &PoolIndex<'_>,
    flexible: &BTreeSet<Variable>,
    init: &Substitution,
    limit: usize,
) -> Vec<Substitution> {
    fn go(
        pattern: &[Atom],
        i: usize,
        pool: &PoolIndex<'_>,
        flexible: &BTreeSet<Variable>,
        subst: &mut Substitution,
        out: &mut Vec<Substitution>,
        limit: usize,
    ) {
        if out.len() >= limit {
            return;
        }
        let Some(goal) = pattern.get(i) else {
            out.push(subst.clone());
            return;
        };
        for cand in pool.candidates(goal) {
            if let Some(delta) = unify_atom(goal, cand, subst, flexible) {
                let keys: Vec<Variable> = delta.keys().copied().collect();
                subst.extend(delta);
                go(pattern, i + 1, pool, flexible, subst, out, limit);
                for k in keys {
                    subst.remove(&k);
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut subst = init.clone();
    go(pattern, 0, pool, flexible, &mut subst, &mut out, limit);
    out
}
