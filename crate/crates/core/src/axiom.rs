//! Universally quantified implications injected into proofs.
//!
//! An axiom reads `∀u (⋀antecedent → ∃e ⋀consequent)` where `u` are the
//! antecedent variables and `e` the rest. Word axioms relate two one-place
//! predicates; phrase axioms relate subgraphs found by alignment. A `negated` axiom has consequent `¬∃e ⋀consequent` and only
//! arises from antonym relations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::formula::{decompose_basic, parse_atom, role_link, Atom, AtomSet, Formula, FreshVars, Sort, Term, Variable};
use crate::prover::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxiomMode {
    Word,
    Phrase,
}

impl fmt::Display for AxiomMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AxiomMode::Word => "word",
            AxiomMode::Phrase => "phrase",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Provenance {
    pub pair: String,
    pub mode: AxiomMode,
    pub gold: Option<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Axiom {
    pub antecedent: AtomSet,
    pub consequent: AtomSet,
    /// The variables of the antecedent.
    pub universal: BTreeSet<Variable>,
    /// Consequent variables that do not occur in the antecedent.
    pub existential: BTreeSet<Variable>,
    pub negated: bool,
    pub provenance: Option<Provenance>,
}

impl Axiom {
    /// Builds a canonical axiom: consequent atoms already present in the
    /// antecedent are dropped and variables are renamed deterministically.
    pub fn new(
        antecedent: impl IntoIterator<Item = Atom>,
        consequent: impl IntoIterator<Item = Atom>,
    ) -> Axiom {
        Axiom::build(antecedent, consequent, false)
    }

    pub fn negative(
        antecedent: impl IntoIterator<Item = Atom>,
        consequent: impl IntoIterator<Item = Atom>,
    ) -> Axiom {
        Axiom::build(antecedent, consequent, true)
    }

    fn build(
        antecedent: impl IntoIterator<Item = Atom>,
        consequent: impl IntoIterator<Item = Atom>,
        negated: bool,
    ) -> Axiom {
        let ant: Vec<Atom> = antecedent.into_iter().collect();
        let ant_set: BTreeSet<&Atom> = ant.iter().collect();
        let cons: Vec<Atom> = consequent
            .into_iter()
            .filter(|a| negated || !ant_set.contains(a))
            .collect();
        canonical(ant, cons, negated)
    }

    /// `∀x (from(x) → to(x))`, or `→ ¬to(x)` when `negated`.
    pub fn word(from: &str, to: &str, sort: Sort, negated: bool) -> Axiom {
        let v = Term::Var(Variable::new(sort, 1));
        Axiom::build([Atom::unary(from, v.clone())], [Atom::unary(to, v)], negated)
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Axiom {
        self.provenance = Some(provenance);
        self
    }

    pub fn mode(&self) -> Option<AxiomMode> {
        self.provenance.as_ref().map(|p| p.mode)
    }

    /// Equal up to a sort-preserving bijective renaming of variables.
    /// Provenance is ignored.
    pub fn alpha_eq(&self, other: &Axiom) -> bool {
        if self.negated != other.negated
            || self.antecedent.len() != other.antecedent.len()
            || self.consequent.len() != other.consequent.len()
            || self.universal.len() != other.universal.len()
            || self.existential.len() != other.existential.len()
            || self.signature() != other.signature()
        {
            return false;
        }
        let left: Vec<(bool, &Atom)> = self
            .antecedent
            .iter()
            .map(|a| (true, a))
            .chain(self.consequent.iter().map(|a| (false, a)))
            .collect();
        let mut bij = Bijection::default();
        match_all(&left, 0, other, &mut bij)
    }

    /// Name-independent fingerprint: the multiset of atom shapes on each side.
    pub fn signature(&self) -> String {
        let side = |set: &AtomSet| {
            let mut keys: Vec<String> = set.iter().map(shape).collect();
            keys.sort();
            keys.join(",")
        };
        format!(
            "{}|{}|{}",
            side(&self.antecedent),
            if self.negated { "-" } else { "+" },
            side(&self.consequent)
        )
    }

    pub fn to_formula(&self) -> Formula {
        let body = |set: &AtomSet| {
            let mut atoms: Vec<&Atom> = set.iter().collect();
            atoms.sort_by_cached_key(|a| a.to_string());
            Formula::and(atoms.into_iter().cloned().map(Formula::Atom))
        };
        let mut cons = Formula::exists_many(self.existential.iter().copied(), body(&self.consequent));
        if self.negated {
            cons = Formula::not(cons);
        }
        let inner = if self.antecedent.is_empty() {
            cons
        } else {
            Formula::implies(body(&self.antecedent), cons)
        };
        Formula::forall_many(self.universal.iter().copied(), inner)
    }

    pub fn to_record(&self) -> AxiomRecord {
        AxiomRecord {
            antecedent: self.antecedent.iter().map(Atom::to_string).collect(),
            consequent: self.consequent.iter().map(Atom::to_string).collect(),
            universal: self.universal.iter().copied().collect(),
            existential: self.existential.iter().copied().collect(),
            negated: self.negated,
            provenance: self.provenance.clone(),
        }
    }

    /// Reads `∀x̄ (A → B)` or `∀x̄ (A → ¬B)` with basic `A` and `B`.
    pub fn from_formula(f: &Formula) -> Option<Axiom> {
        let mut body = f;
        while let Formula::Forall(_, b) = body {
            body = b;
        }
        let Formula::Implies(a, b) = body else { return None };
        let ant = decompose_basic(a).ok()?;
        match &**b {
            Formula::Not(c) => Some(Axiom::negative(ant.atoms, decompose_basic(c).ok()?.atoms)),
            b => Some(Axiom::new(ant.atoms, decompose_basic(b).ok()?.atoms)),
        }
    }

    pub fn from_record(rec: &AxiomRecord, config: &EngineConfig) -> Result<Axiom, String> {
        let atoms = |texts: &[String]| -> Result<AtomSet, String> {
            texts
                .iter()
                .map(|t| {
                    let a = parse_atom(t, config).map_err(|e| format!("atom `{t}`: {e}"))?;
                    role_link(&a, config).map_err(|e| format!("atom `{t}`: {e}"))
                })
                .collect()
        };
        let antecedent = atoms(&rec.antecedent)?;
        let consequent = atoms(&rec.consequent)?;
        let universal: BTreeSet<Variable> = rec.universal.iter().copied().collect();
        let existential: BTreeSet<Variable> = rec.existential.iter().copied().collect();
        let ant_vars = antecedent.variables.clone();
        let cons_extra: BTreeSet<Variable> =
            consequent.variables.difference(&ant_vars).copied().collect();
        if universal != ant_vars || existential != cons_extra {
            return Err("variable lists do not match the atoms".to_string());
        }
        Ok(Axiom {
            antecedent,
            consequent,
            universal,
            existential,
            negated: rec.negated,
            provenance: rec.provenance.clone(),
        })
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

/// One line of an axiom file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomRecord {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub universal: Vec<Variable>,
    pub existential: Vec<Variable>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

fn shape(a: &Atom) -> String {
    let erased = a.rename(&|v| Term::Var(Variable::new(v.sort, 0)));
    let kind = match a {
        Atom::Unary { .. } => 'u',
        Atom::Binary { .. } => 'b',
        Atom::Role { .. } => 'r',
        Atom::Eq(..) => 'e',
    };
    format!("{kind}{erased}")
}

/// Renames variables in order of first occurrence, visiting atoms sorted by
/// their name-independent shape. Universals are numbered before existentials.
fn canonical(ant: Vec<Atom>, cons: Vec<Atom>, negated: bool) -> Axiom {
    let ant_vars: BTreeSet<Variable> = ant.iter().flat_map(Atom::vars).collect();
    let order = |atoms: &[Atom]| {
        let mut keyed: Vec<(String, &Atom)> = atoms.iter().map(|a| (shape(a), a)).collect();
        keyed.sort();
        let mut seen = Vec::new();
        for (_, a) in keyed {
            for t in a.args() {
                let mut vs = BTreeSet::new();
                t.collect_vars(&mut vs);
                for v in vs {
                    if !seen.contains(&v) {
                        seen.push(v);
                    }
                }
            }
        }
        seen
    };
    let mut fresh = FreshVars::default();
    let mut map: BTreeMap<Variable, Variable> = BTreeMap::new();
    for v in order(&ant) {
        map.insert(v, fresh.fresh(v.sort));
    }
    for v in order(&cons) {
        if !ant_vars.contains(&v) {
            map.insert(v, fresh.fresh(v.sort));
        }
    }
    let rename = |a: &Atom| a.rename(&|v| Term::Var(map.get(&v).copied().unwrap_or(v)));
    let antecedent: AtomSet = ant.iter().map(rename).collect();
    let consequent: AtomSet = cons.iter().map(rename).collect();
    let universal = antecedent.variables.clone();
    let existential = consequent
        .variables
        .difference(&universal)
        .copied()
        .collect();
    Axiom { antecedent, consequent, universal, existential, negated, provenance: None }
}

#[derive(Default)]
struct Bijection {
    fwd: BTreeMap<Variable, Variable>,
    bwd: BTreeMap<Variable, Variable>,
}

fn match_all(left: &[(bool, &Atom)], i: usize, other: &Axiom, bij: &mut Bijection) -> bool {
    let Some(&(in_ant, atom)) = left.get(i) else {
        return true;
    };
    let pool = if in_ant { &other.antecedent } else { &other.consequent };
    for cand in pool.iter() {
        if !atom.same_head(cand) {
            continue;
        }
        let mut added = Vec::new();
        let ok = atom
            .args()
            .iter()
            .zip(cand.args())
            .all(|(t, u)| bind_term(t, u, bij, &mut added));
        if ok && match_all(left, i + 1, other, bij) {
            return true;
        }
        for v in added {
            if let Some(w) = bij.fwd.remove(&v) {
                bij.bwd.remove(&w);
            }
        }
    }
    false
}

fn bind_term(t: &Term, u: &Term, bij: &mut Bijection, added: &mut Vec<Variable>) -> bool {
    match (t, u) {
        (Term::Const(a), Term::Const(b)) => a == b,
        (Term::Func(r, a), Term::Func(s, b)) => r == s && bind_term(a, b, bij, added),
        (Term::Var(v), Term::Var(w)) => {
            if v.sort != w.sort {
                return false;
            }
            match (bij.fwd.get(v), bij.bwd.get(w)) {
                (Some(x), _) => x == w,
                (None, Some(_)) => false,
                (None, None) => {
                    bij.fwd.insert(*v, *w);
                    bij.bwd.insert(*w, *v);
                    added.push(*v);
                    true
                }
            }
        }
        _ => false,
    }
}
