//! Natural-deduction prover for event-semantics formulas.
//!
//! Non-basic formulas are decomposed by introduction and elimination rules
//! into obligations whose goal is basic or `False`. Each obligation is closed
//! by backtracking unification of sub-goal atoms against the premise pool,
//! escalating to word abduction and then phrase abduction when exact matching
//! saturates.

mod chain;
mod classify;
mod leaf;
mod matching;
mod oracle;
mod reduce;
mod search;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::axiom::Axiom;
use crate::formula::{Atom, AtomSet, Term, Variable};

pub use chain::{apply_axiom, forward_chain, CompiledRule};
pub use classify::{classify, extract_from_pair, prove, Classification, Direction};
pub use matching::{apply_subst, unify_atom, Substitution};
pub use oracle::{oracle_entails, OracleTooLarge, ORACLE_LIMIT};
pub use reduce::{reduce_goal, Obligation, Side, Tagged};
pub use search::{unify_search, word_abduction, SearchOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Yes,
    No,
    Unknown,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::Yes, Label::No, Label::Unknown];

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Yes => "yes",
            Label::No => "no",
            Label::Unknown => "unknown",
        })
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "yes" | "entailment" => Ok(Label::Yes),
            "no" | "contradiction" => Ok(Label::No),
            "unknown" | "neutral" => Ok(Label::Unknown),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// Natural-deduction rules for non-basic connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    OrIntro,
    OrElim,
    ImpliesIntro,
    ImpliesElim,
    NotIntro,
    NotElim,
    ForallIntro,
    ForallElim,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::OrIntro => "∨-I",
            Rule::OrElim => "∨-E",
            Rule::ImpliesIntro => "→-I",
            Rule::ImpliesElim => "→-E",
            Rule::NotIntro => "¬-I",
            Rule::NotElim => "¬-E",
            Rule::ForallIntro => "∀-I",
            Rule::ForallElim => "∀-E",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProofStep {
    Match { premise: Atom, goal: Atom, bindings: Substitution },
    RuleApp(Rule),
    WordAbduction { axiom: Axiom, premise: Atom, goal: Atom, bindings: Substitution },
    PhraseAbduction { axiom: Axiom, covered: Vec<Atom> },
    AxiomApply { axiom: Axiom, binding: Substitution, added: Vec<Atom> },
    /// A phrase alignment was found but no premise edge anchors it.
    NoAnchor { reach: Vec<Atom> },
}

fn fmt_subst(s: &Substitution) -> String {
    s.iter().map(|(v, t)| format!("{v}:={t}")).collect::<Vec<_>>().join(",")
}

fn fmt_atoms(atoms: &[Atom]) -> String {
    atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ProofStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProofStep::Match { premise, goal, bindings } => write!(
                f,
                "match\tpremise={premise}\tgoal={goal}\tsubst={}",
                fmt_subst(bindings)
            ),
            ProofStep::RuleApp(r) => write!(f, "rule\t{r}"),
            ProofStep::WordAbduction { axiom, premise, goal, bindings } => write!(
                f,
                "word-abduction\taxiom={axiom}\tpremise={premise}\tgoal={goal}\tsubst={}",
                fmt_subst(bindings)
            ),
            ProofStep::PhraseAbduction { axiom, covered } => {
                write!(f, "phrase-abduction\taxiom={axiom}\tcovers={}", fmt_atoms(covered))
            }
            ProofStep::AxiomApply { axiom, binding, added } => write!(
                f,
                "axiom\taxiom={axiom}\tsubst={}\tadded={}",
                fmt_subst(binding),
                fmt_atoms(added)
            ),
            ProofStep::NoAnchor { reach } => write!(f, "no-anchor\treach={}", fmt_atoms(reach)),
        }
    }
}

/// One branch of a proof of a single obligation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProofState {
    /// The premise pool after forward chaining.
    pub premises: AtomSet,
    /// The sub-goals the branch started from.
    pub initial_subgoals: AtomSet,
    /// Remaining sub-goals, written over goal variables.
    pub subgoals: AtomSet,
    /// Goal variables that may still be bound; other goal terms are rigid.
    pub flexible: BTreeSet<Variable>,
    pub subst: Substitution,
    pub trace: Vec<ProofStep>,
    pub used_axioms: Vec<Axiom>,
    /// Number of antonym abductions on this branch.
    pub antonym_steps: usize,
}

impl ProofState {
    pub fn new(premises: AtomSet, subgoals: AtomSet, flexible: BTreeSet<Variable>) -> Self {
        ProofState {
            premises,
            initial_subgoals: subgoals.clone(),
            subgoals,
            flexible,
            ..ProofState::default()
        }
    }

    pub fn is_proved(&self) -> bool {
        self.subgoals.is_empty()
    }

    /// Sub-goals with the current substitution applied.
    pub fn resolved_subgoals(&self) -> AtomSet {
        self.subgoals.iter().map(|a| apply_subst(a, &self.subst)).collect()
    }

    /// Goal variables that are neither bound nor rigid.
    pub fn unbound(&self) -> BTreeSet<Variable> {
        self.subgoals
            .iter()
            .flat_map(Atom::vars)
            .filter(|v| self.flexible.contains(v) && !self.subst.contains_key(v))
            .collect()
    }

    pub fn trace_text(&self) -> String {
        self.trace.iter().map(|s| format!("{s}\n")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProofStatus {
    Proved,
    Unprovable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofResult {
    pub status: ProofStatus,
    /// The last obligation examined: the closing one when proved.
    pub final_state: ProofState,
    /// Final states of every obligation of the successful alternative.
    pub obligations: Vec<ProofState>,
    pub generated_axioms: Vec<Axiom>,
    /// A search limit cut the attempt short.
    pub truncated: bool,
}

impl ProofResult {
    pub fn unprovable(truncated: bool) -> Self {
        ProofResult {
            status: ProofStatus::Unprovable,
            final_state: ProofState::default(),
            obligations: Vec::new(),
            generated_axioms: Vec::new(),
            truncated,
        }
    }

    pub fn is_proved(&self) -> bool {
        self.status == ProofStatus::Proved
    }

    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for (i, st) in self.obligations.iter().enumerate() {
            out.push_str(&format!("obligation\t{}\n", i + 1));
            out.push_str(&st.trace_text());
        }
        out
    }
}

/// Re-applies a branch's steps to its initial sub-goals and checks that
/// every step is justified and a proved branch ends with no sub-goals.
pub fn replay(state: &ProofState) -> Result<(), String> {
    let pool = &state.premises;
    let mut goals = state.initial_subgoals.clone();
    let mut subst = Substitution::new();
    let extend = |subst: &mut Substitution, delta: &Substitution| -> Result<(), String> {
        for (v, t) in delta {
            if v.sort != t.sort() {
                return Err(format!("binding {v}:={t} changes sort"));
            }
            if let Some(old) = subst.insert(*v, t.clone()) {
                if &old != t {
                    return Err(format!("{v} rebound from {old} to {t}"));
                }
            }
        }
        Ok(())
    };
    for step in &state.trace {
        match step {
            ProofStep::Match { premise, goal, bindings } => {
                extend(&mut subst, bindings)?;
                if !pool.contains(premise) {
                    return Err(format!("premise {premise} not in pool"));
                }
                if &apply_subst(goal, &subst) != premise {
                    return Err(format!("{goal} does not match {premise}"));
                }
                if !goals.remove(goal) {
                    return Err(format!("goal {goal} already removed"));
                }
            }
            ProofStep::WordAbduction { axiom, premise, goal, bindings } => {
                extend(&mut subst, bindings)?;
                if !pool.contains(premise) {
                    return Err(format!("premise {premise} not in pool"));
                }
                let (Atom::Unary { pred: p, arg: a }, Atom::Unary { pred: g, arg: b }) = (premise, goal) else {
                    return Err("word abduction on a non-unary atom".into());
                };
                let ant = axiom.antecedent.iter().next().map(|x| x.predicate().to_string());
                let con = axiom.consequent.iter().next().map(|x| x.predicate().to_string());
                if ant.as_deref() != Some(p.as_str()) || con.as_deref() != Some(g.as_str()) {
                    return Err(format!("axiom {axiom} does not relate {p} to {g}"));
                }
                if &b_resolve(b, &subst) != a {
                    return Err(format!("{goal} not unified with {premise}"));
                }
                if !goals.remove(goal) {
                    return Err(format!("goal {goal} already removed"));
                }
            }
            ProofStep::PhraseAbduction { covered, .. } => {
                for g in covered {
                    if !goals.remove(g) {
                        return Err(format!("goal {g} already removed"));
                    }
                }
            }
            ProofStep::AxiomApply { added, .. } => {
                if let Some(a) = added.iter().find(|a| !pool.contains(a)) {
                    return Err(format!("chained atom {a} missing from pool"));
                }
            }
            ProofStep::RuleApp(_) | ProofStep::NoAnchor { .. } => {}
        }
    }
    if subst != state.subst {
        return Err("replayed substitution differs".into());
    }
    if state.is_proved() && !goals.is_empty() {
        return Err(format!("{} sub-goals left after replay", goals.len()));
    }
    if goals != state.subgoals {
        return Err("replayed sub-goals differ".into());
    }
    Ok(())
}

fn b_resolve(t: &Term, subst: &Substitution) -> Term {
    match t {
        Term::Var(v) => subst.get(v).cloned().unwrap_or_else(|| t.clone()),
        other => other.clone(),
    }
}
