//! Closing a single obligation: pool construction, forward chaining,
//! unification search and, on saturated branches, phrase abduction.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::chain::{forward_chain, CompiledRule};
use super::classify::Direction;
use super::matching::{PoolIndex, Substitution};
use super::reduce::{Obligation, Side};
use super::search::{Searcher, SearchOptions, Visit};
use super::{ProofState, ProofStep, Rule};
use crate::axiom::{Axiom, AxiomMode};
use crate::config::EngineConfig;
use crate::error::ProverError;
use crate::formula::{decompose_basic, Atom, AtomSet, Formula, FreshVars, Term, Variable};
use crate::kb::{KnowledgeBase, RelationKind};
use crate::phrase::generate_phrase_axioms;

pub(crate) struct Ctx<'a> {
    pub config: &'a EngineConfig,
    pub kb: &'a KnowledgeBase,
    /// Stored axioms admitted by the mode, compiled once per proof.
    pub stored: Vec<CompiledRule>,
    pub deadline: Option<Instant>,
    pub direction: Direction,
}

impl<'a> Ctx<'a> {
    pub(crate) fn new(
        config: &'a EngineConfig,
        kb: &'a KnowledgeBase,
        deadline: Option<Instant>,
        direction: Direction,
    ) -> Self {
        let stored = kb
            .axioms()
            .iter()
            .filter(|ax| match ax.mode() {
                Some(AxiomMode::Word) => config.mode.word(),
                _ => config.mode.phrase(),
            })
            .map(CompiledRule::compile)
            .collect();
        Ctx { config, kb, stored, deadline, direction }
    }
}

/// The outcome of one obligation: the proved branch, or the first saturated
/// branch when no branch closes.
#[derive(Clone, Debug)]
pub(crate) struct Leaf {
    pub state: ProofState,
    pub proved: bool,
    pub truncated: bool,
}

/// Premise atoms split by origin, and rules taken from universal premises.
struct Pool {
    text: AtomSet,
    hyp: AtomSet,
    rules: Vec<CompiledRule>,
}

fn build_pool(ob: &Obligation, fresh: &mut FreshVars) -> Pool {
    let mut used: BTreeSet<Variable> = ob.goal.formula.all_vars();
    let mut pool = Pool { text: AtomSet::new(), hyp: AtomSet::new(), rules: Vec::new() };
    for p in &ob.premises {
        let f = p.formula.rename_apart(&used, fresh);
        used.extend(f.all_vars());
        if f.is_basic() {
            if let Ok(atoms) = decompose_basic(&f) {
                let side = if p.side == Side::Text { &mut pool.text } else { &mut pool.hyp };
                for a in atoms.atoms {
                    side.insert(a);
                }
                side.variables.extend(atoms.variables);
            }
        } else if matches!(f, Formula::Forall(..)) {
            if let Some(ax) = Axiom::from_formula(&f) {
                pool.rules.push(CompiledRule::compile(&ax));
            }
        }
    }
    pool
}

fn union(a: &AtomSet, b: &AtomSet) -> AtomSet {
    let mut out = a.clone();
    for x in b.iter() {
        out.insert(x.clone());
    }
    out.variables.extend(b.variables.iter().copied());
    out
}

/// Renames the goal's quantified variables to fresh ones outside `avoid`, in
/// order, and flattens functional arguments. Returns the sub-goals and the
/// flexible variables.
fn prepare_goal(goal: &AtomSet, avoid: &BTreeSet<Variable>) -> (AtomSet, BTreeSet<Variable>) {
    let free: BTreeSet<Variable> =
        goal.iter().flat_map(Atom::vars).filter(|v| !goal.variables.contains(v)).collect();
    let mut fresh = FreshVars::avoiding(avoid.iter().chain(&free));
    let map: BTreeMap<Variable, Term> =
        goal.variables.iter().map(|v| (*v, Term::Var(fresh.fresh(v.sort)))).collect();
    let renamed: AtomSet = goal
        .iter()
        .map(|a| a.rename(&|v| map.get(&v).cloned().unwrap_or(Term::Var(v))))
        .collect();
    let mut keep: BTreeSet<Variable> = avoid.clone();
    keep.extend(renamed.iter().flat_map(Atom::vars));
    let flat = renamed.flatten_functional_avoiding(&keep);
    let flexible = flat.iter().flat_map(Atom::vars).filter(|v| !free.contains(v)).collect();
    (flat, flexible)
}

fn vars_of(s: &AtomSet) -> BTreeSet<Variable> {
    let mut out: BTreeSet<Variable> = s.iter().flat_map(Atom::vars).collect();
    out.extend(s.variables.iter().copied());
    out
}

fn chained(pool: &AtomSet, rules: &[CompiledRule], ctx: &Ctx<'_>, avoid: &BTreeSet<Variable>) -> (ProofState, bool) {
    let flat = pool.flatten_functional_avoiding(avoid);
    let out = forward_chain(&flat, rules, ctx.config.max_chain, avoid);
    let mut st = ProofState { premises: out.pool, ..ProofState::default() };
    st.trace = out.steps;
    st.used_axioms = out.used;
    (st, out.truncated)
}

impl Ctx<'_> {
    fn options(&self, word: bool, antonym: bool, phrases: bool) -> SearchOptions {
        SearchOptions {
            word,
            antonym,
            prune: !(word || antonym || phrases),
            max_branches: self.config.max_branches,
            deadline: self.deadline,
        }
    }

    fn check_deadline(&self) -> Result<(), ProverError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(ProverError::Timeout),
            _ => Ok(()),
        }
    }

    /// Runs the unification search on `start`, escalating to phrase abduction
    /// on saturated branches when `phrases` is set.
    fn search(&self, start: ProofState, opts: SearchOptions, phrases: bool, need_antonym: bool) -> Result<Leaf, ProverError> {
        let idx_pool = start.premises.clone();
        let idx = PoolIndex::new(&idx_pool);
        let mut searcher = Searcher::new(opts, self.kb);
        let mut first: Option<ProofState> = None;
        let mut proved: Option<ProofState> = None;
        let config = self.config;
        searcher.explore(start.clone(), &idx, &mut |mut st: ProofState| {
            if need_antonym && st.antonym_steps == 0 {
                first.get_or_insert(st);
                return Ok(Visit::Continue);
            }
            if st.is_proved() {
                proved = Some(st);
                return Ok(Visit::Stop);
            }
            if phrases {
                if let Ok(out) = generate_phrase_axioms(&st, config) {
                    for reach in &out.no_anchor {
                        st.trace.push(ProofStep::NoAnchor { reach: reach.clone() });
                    }
                    if out.complete && !out.axioms.is_empty() {
                        for (axiom, covered) in out.axioms {
                            for g in &covered {
                                st.subgoals.remove(g);
                            }
                            st.used_axioms.push(axiom.clone());
                            st.trace.push(ProofStep::PhraseAbduction { axiom, covered });
                        }
                        proved = Some(st);
                        return Ok(Visit::Stop);
                    }
                }
            }
            first.get_or_insert(st);
            Ok(Visit::Continue)
        })?;
        Ok(match proved {
            Some(state) => Leaf { state, proved: true, truncated: false },
            None => Leaf { state: first.unwrap_or(start), proved: false, truncated: false },
        })
    }

    fn prove_basic(
        &self,
        pool: &AtomSet,
        rules: &[CompiledRule],
        goal: &AtomSet,
        phrases: bool,
        prefix: &[ProofStep],
    ) -> Result<Leaf, ProverError> {
        let goal_vars = vars_of(goal);
        let (mut st, truncated) = chained(pool, rules, self, &goal_vars);
        let mut avoid = vars_of(&st.premises);
        avoid.extend(pool.variables.iter().copied());
        let (subgoals, flexible) = prepare_goal(goal, &avoid);
        st.initial_subgoals = subgoals.clone();
        st.subgoals = subgoals;
        st.flexible = flexible;
        let mut trace = prefix.to_vec();
        trace.append(&mut st.trace);
        st.trace = trace;
        let word = self.config.mode.word();
        let mut leaf = self.search(st, self.options(word, false, phrases), phrases, false)?;
        leaf.truncated |= truncated && !leaf.proved;
        Ok(leaf)
    }

    /// A contradiction among the premises: a violated negative rule, or an
    /// antonym pair of predications on the same term.
    fn contradiction(&self, pool: &Pool, rules: &[CompiledRule], prefix: &[ProofStep]) -> Result<Leaf, ProverError> {
        let all = union(&pool.text, &pool.hyp);
        let (st, truncated) = chained(&all, rules, self, &BTreeSet::new());
        let mut base = st.clone();
        let mut trace = prefix.to_vec();
        trace.extend(st.trace.iter().cloned());
        base.trace = trace;
        for r in rules.iter().filter(|r| r.is_negative()) {
            if r.violated_in(&st.premises) {
                let mut done = base.clone();
                done.used_axioms.push(r.axiom.clone());
                done.trace.push(ProofStep::AxiomApply {
                    axiom: r.axiom.clone(),
                    binding: Substitution::new(),
                    added: Vec::new(),
                });
                return Ok(Leaf { state: done, proved: true, truncated: false });
            }
        }
        if self.config.mode.word() {
            for a in st.premises.iter() {
                let Atom::Unary { pred: p, arg } = a else { continue };
                for b in st.premises.iter() {
                    let Atom::Unary { pred: q, arg: arg2 } = b else { continue };
                    if arg != arg2 || p == q {
                        continue;
                    }
                    if self.kb.lookup(p, q).is_some_and(|r| r.kind == RelationKind::Antonym) {
                        let axiom = Axiom::word(p, q, arg.sort(), true);
                        let mut done = base.clone();
                        done.initial_subgoals = AtomSet::from_atoms([b.clone()]);
                        done.antonym_steps = 1;
                        done.used_axioms.push(axiom.clone());
                        done.trace.push(ProofStep::WordAbduction {
                            axiom,
                            premise: a.clone(),
                            goal: b.clone(),
                            bindings: Substitution::new(),
                        });
                        return Ok(Leaf { state: done, proved: true, truncated: false });
                    }
                }
            }
            // Hypothesis atoms unified against the text with at least one antonym step.
            if !pool.text.is_empty() && !pool.hyp.is_empty() {
                self.check_deadline()?;
                let (mut tst, _) = chained(&pool.text, rules, self, &vars_of(&pool.hyp));
                let subgoals = pool.hyp.flatten_functional_avoiding(&vars_of(&tst.premises));
                tst.flexible = subgoals.iter().flat_map(Atom::vars).collect();
                tst.initial_subgoals = subgoals.clone();
                tst.subgoals = subgoals;
                let mut trace = prefix.to_vec();
                trace.append(&mut tst.trace);
                tst.trace = trace;
                let leaf = self.search(tst, self.options(true, true, false), false, true)?;
                if leaf.proved {
                    return Ok(leaf);
                }
            }
        }
        Ok(Leaf { state: base, proved: false, truncated })
    }

    pub(crate) fn prove_obligation(&self, ob: &Obligation) -> Result<Leaf, ProverError> {
        self.check_deadline()?;
        let mut all: BTreeSet<Variable> = ob.goal.formula.all_vars();
        for p in &ob.premises {
            all.extend(p.formula.all_vars());
        }
        let mut fresh = FreshVars::avoiding(&all);
        let pool = build_pool(ob, &mut fresh);
        let mut rules = pool.rules.clone();
        rules.extend(self.stored.iter().cloned());
        let prefix: Vec<ProofStep> = ob.rules.iter().map(|r| ProofStep::RuleApp(*r)).collect();

        if ob.goal.formula == Formula::False {
            return self.contradiction(&pool, &rules, &prefix);
        }
        let Ok(goal) = decompose_basic(&ob.goal.formula) else {
            return Ok(Leaf { state: ProofState::default(), proved: false, truncated: false });
        };
        let merged = union(&pool.text, &pool.hyp);
        let phrases = self.config.abduce_phrases;

        let reversed = self.direction == Direction::Contradict
            && ob.rules.contains(&Rule::NotElim)
            && ob.goal.side == Side::Text
            && pool.text.is_empty()
            && !pool.hyp.is_empty();
        if !reversed {
            return self.prove_basic(&merged, &rules, &goal, phrases, &prefix);
        }
        let sound = self.prove_basic(&merged, &rules, &goal, false, &prefix)?;
        if sound.proved || !(self.config.mode.phrase() || phrases) {
            return Ok(sound);
        }
        // The negated text's body as pool, the hypothesis as goal.
        let flipped = self.prove_basic(&goal, &rules, &pool.hyp, phrases, &prefix)?;
        if flipped.proved {
            return Ok(flipped);
        }
        let truncated = sound.truncated || flipped.truncated;
        Ok(Leaf { truncated, ..sound })
    }
}
