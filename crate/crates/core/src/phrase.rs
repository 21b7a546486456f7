//! Subgraph alignment between the premise pool and unproved sub-goals, and
//! synthesis of phrase axioms from the aligned subgraphs.

use std::collections::{BTreeMap, BTreeSet};

use crate::axiom::Axiom;
use crate::config::EngineConfig;
use crate::error::GraphError;
use crate::formula::{Atom, AtomSet, Sort, Term, Variable};
use crate::graph::{edge_to_atom, to_graph, Edge, EdgeLabel, SemGraph, Vertex};
use crate::prover::{apply_subst, ProofState, Substitution};

/// One aligned pair of subgraphs: the unproved goal phrase and the premise
/// edges around its unified vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alignment {
    /// Smallest non-unified variable of the partition; `None` for a residual
    /// group whose variables are all unified.
    pub representative: Option<Variable>,
    pub members: BTreeSet<Variable>,
    pub reach: BTreeSet<Edge>,
    pub corr: BTreeSet<Edge>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlignmentResult {
    pub partitions: Vec<Alignment>,
    pub residual: Vec<Alignment>,
    pub unifier: Substitution,
}

/// Result of phrase abduction on one branch.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PhraseOutcome {
    /// Each axiom with the original sub-goal atoms it discharges.
    pub axioms: Vec<(Axiom, Vec<Atom>)>,
    /// Reach sets whose axiom was suppressed for lack of an anchor.
    pub no_anchor: Vec<Vec<Atom>>,
    /// Every remaining sub-goal is discharged by some axiom.
    pub complete: bool,
}

/// The phrase set of `x`: the non-role edges incident to it.
pub fn phrase_set(graph: &SemGraph, x: Variable) -> Result<BTreeSet<Edge>, GraphError> {
    let v = Vertex::Var(x);
    if !graph.contains_vertex(&v) {
        return Err(GraphError::UnknownVertex(x.to_string()));
    }
    Ok(graph.incident(&v).filter(|e| !e.label.is_role()).cloned().collect())
}

fn closure(graph: &SemGraph, start: impl IntoIterator<Item = Variable>) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    let mut seen = BTreeSet::new();
    let mut stack: Vec<Variable> = start.into_iter().collect();
    while let Some(x) = stack.pop() {
        if !seen.insert(x) {
            continue;
        }
        for e in graph.incident(&Vertex::Var(x)).filter(|e| !e.label.is_role()) {
            if out.insert(e.clone()) {
                stack.extend(e.var_vertices());
            }
        }
    }
    out
}

/// Reach(v): phrase sets reachable from that of `v` through shared variable
/// vertices, never through a role edge.
pub fn reach(v: Variable, goal_graph: &SemGraph) -> Result<BTreeSet<Edge>, GraphError> {
    if !goal_graph.non_unified.contains(&v) {
        return Err(GraphError::NotNonUnified(v.to_string()));
    }
    Ok(closure(goal_graph, [v]))
}

fn term_vertices(edges: &BTreeSet<Edge>) -> BTreeSet<Vertex> {
    edges
        .iter()
        .flat_map(|e| [&e.src, &e.dst])
        .filter(|v| !matches!(v, Vertex::Pred(_)))
        .cloned()
        .collect()
}

/// Corr: premise edges leaving the vertices of `reach` that also occur in the
/// premise graph, plus the `isa` edges of the targets of prepositions among
/// them. Role edges are left out.
pub fn corr(reach: &BTreeSet<Edge>, premise_graph: &SemGraph) -> BTreeSet<Edge> {
    corr_of(&term_vertices(reach), premise_graph)
}

fn corr_of(anchors: &BTreeSet<Vertex>, premise_graph: &SemGraph) -> BTreeSet<Edge> {
    let mut out = BTreeSet::new();
    for anchor in anchors {
        if !premise_graph.contains_vertex(anchor) {
            continue;
        }
        for e in premise_graph.outgoing(anchor).filter(|e| !e.label.is_role()) {
            out.insert(e.clone());
            if let (EdgeLabel::Prep(_), Vertex::Var(_)) = (&e.label, &e.dst) {
                out.extend(premise_graph.outgoing(&e.dst).filter(|f| f.label == EdgeLabel::Isa).cloned());
            }
        }
    }
    out
}

/// Splits the goal graph's non-role edges into connected groups and pairs
/// each with its premise correspondence.
pub fn align(premise_graph: &SemGraph, goal_graph: &SemGraph, unifier: &Substitution) -> AlignmentResult {
    let mut result = AlignmentResult { unifier: unifier.clone(), ..AlignmentResult::default() };
    let mut done: BTreeSet<Variable> = BTreeSet::new();
    for &v in &goal_graph.non_unified {
        if done.contains(&v) {
            continue;
        }
        let reach = closure(goal_graph, [v]);
        let mut members: BTreeSet<Variable> =
            reach.iter().flat_map(Edge::var_vertices).filter(|x| goal_graph.non_unified.contains(x)).collect();
        members.insert(v);
        done.extend(members.iter().copied());
        // The event of a role link into the partition anchors it as well.
        let mut anchors = term_vertices(&reach);
        anchors.extend(
            goal_graph
                .edges
                .iter()
                .filter(|e| e.label.is_role() && e.dst.as_var().is_some_and(|x| members.contains(&x)))
                .map(|e| e.src.clone()),
        );
        let corr = corr_of(&anchors, premise_graph);
        result.partitions.push(Alignment { representative: Some(v), members, reach, corr });
    }
    let claimed: BTreeSet<&Edge> = result.partitions.iter().flat_map(|p| &p.reach).collect();
    let mut rest: Vec<Edge> =
        goal_graph.edges.iter().filter(|e| !e.label.is_role() && !claimed.contains(e)).cloned().collect();
    while let Some(seed) = rest.first().cloned() {
        let mut group = closure(goal_graph, seed.var_vertices());
        group.insert(seed);
        rest.retain(|e| !group.contains(e));
        let corr = corr(&group, premise_graph);
        result.residual.push(Alignment { representative: None, members: BTreeSet::new(), reach: group, corr });
    }
    result
}

fn rename_var(a: &Atom, from: Variable, to: &Term) -> Atom {
    a.rename(&|v| if v == from { to.clone() } else { Term::Var(v) })
}

/// The premise graph and the graph of resolved remaining sub-goals, with
/// premise variables marked unified.
pub fn alignment_graphs(state: &ProofState, config: &EngineConfig) -> Result<(SemGraph, SemGraph), GraphError> {
    let resolved: AtomSet = state.subgoals.iter().map(|g| apply_subst(g, &state.subst)).collect();
    let pool_vars: BTreeSet<Variable> = state.premises.iter().flat_map(Atom::vars).collect();
    let premise_graph = to_graph(&state.premises, config)?;
    let goal_graph = to_graph(&resolved, config)?.with_unified(&pool_vars);
    Ok((premise_graph, goal_graph))
}

/// Synthesizes phrase axioms for the unproved sub-goals of a saturated branch.
pub fn generate_phrase_axioms(state: &ProofState, config: &EngineConfig) -> Result<PhraseOutcome, GraphError> {
    let mut origin: BTreeMap<Atom, Vec<Atom>> = BTreeMap::new();
    for g in state.subgoals.iter() {
        origin.entry(apply_subst(g, &state.subst)).or_default().push(g.clone());
    }
    let resolved = AtomSet::from_atoms(origin.keys().cloned());
    let mut outcome = PhraseOutcome::default();
    if resolved.is_empty() {
        outcome.complete = true;
        return Ok(outcome);
    }
    let pool_vars: BTreeSet<Variable> = state.premises.iter().flat_map(Atom::vars).collect();
    let (premise_graph, goal_graph) = alignment_graphs(state, config)?;
    let alignment = align(&premise_graph, &goal_graph, &state.subst);

    let goal_roles: Vec<&Atom> = resolved.iter().filter(|a| matches!(a, Atom::Role { .. })).collect();
    let pool_roles: Vec<&Atom> = state.premises.iter().filter(|a| matches!(a, Atom::Role { .. })).collect();
    let mut covered: BTreeSet<Atom> = BTreeSet::new();

    for part in alignment.partitions.iter().chain(&alignment.residual) {
        let reach_atoms: Vec<Atom> = part.reach.iter().map(edge_to_atom).collect();
        if part.corr.is_empty() {
            outcome.no_anchor.push(reach_atoms);
            continue;
        }
        let mut ant: Vec<Atom> = part.corr.iter().map(edge_to_atom).collect();
        let mut cons = reach_atoms.clone();
        let mut discharged = reach_atoms.clone();
        let axiom_vars = |ant: &[Atom], cons: &[Atom]| -> BTreeSet<Variable> {
            ant.iter().chain(cons).flat_map(Atom::vars).collect()
        };

        // A non-unified filler of a remaining role link becomes a functional term.
        for r in &goal_roles {
            let Atom::Role { role, event, filler: Term::Var(v) } = r else { continue };
            let Term::Var(e) = event else { continue };
            if !part.members.contains(v) || !axiom_vars(&ant, &cons).contains(e) || v == e {
                continue;
            }
            let f = Term::func(role.clone(), event.clone());
            cons = cons.iter().map(|a| rename_var(a, *v, &f)).collect();
            discharged.push((*r).clone());
        }

        // Pool role links between axiom variables are folded into functional terms.
        let mut replaced: BTreeSet<Variable> = BTreeSet::new();
        for r in &pool_roles {
            let Atom::Role { role, event: Term::Var(e), filler: Term::Var(v) } = r else { continue };
            let vars = axiom_vars(&ant, &cons);
            if v == e || v.sort != Sort::Entity || replaced.contains(v) || replaced.contains(e) {
                continue;
            }
            if !vars.contains(v) || !vars.contains(e) {
                continue;
            }
            let f = Term::func(role.clone(), Term::Var(*e));
            ant = ant.iter().map(|a| rename_var(a, *v, &f)).collect();
            cons = cons.iter().map(|a| rename_var(a, *v, &f)).collect();
            replaced.insert(*v);
        }

        let ant_vars: BTreeSet<Variable> = ant.iter().flat_map(Atom::vars).collect();
        let anchored = cons
            .iter()
            .flat_map(Atom::vars)
            .all(|x| ant_vars.contains(&x) || !pool_vars.contains(&x));
        if !anchored {
            outcome.no_anchor.push(reach_atoms);
            continue;
        }
        let axiom = Axiom::new(ant, cons);
        if axiom.consequent.is_empty() {
            continue;
        }
        let mut atoms: Vec<Atom> = discharged.iter().flat_map(|a| origin.get(a).cloned().unwrap_or_default()).collect();
        atoms.sort();
        atoms.dedup();
        covered.extend(atoms.iter().cloned());
        if let Some((_, prev)) = outcome.axioms.iter_mut().find(|(a, _)| a.alpha_eq(&axiom)) {
            prev.extend(atoms);
            prev.sort();
            prev.dedup();
        } else {
            outcome.axioms.push((axiom, atoms));
        }
    }
    outcome.complete = state.subgoals.iter().all(|g| covered.contains(g));
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse_atom, role_link};

    fn atom(t: &str) -> Atom {
        let cfg = EngineConfig::default();
        role_link(&parse_atom(t, &cfg).unwrap(), &cfg).unwrap()
    }

    fn graph(ts: &[&str]) -> SemGraph {
        to_graph(&ts.iter().map(|t| atom(t)).collect(), &EngineConfig::default()).unwrap()
    }

    fn x(i: u32) -> Variable {
        Variable::entity(i)
    }

    fn y(i: u32) -> Variable {
        Variable::event(i)
    }

    fn edges(ts: &[&str]) -> BTreeSet<Edge> {
        let cfg = EngineConfig::default();
        ts.iter().map(|t| crate::graph::atom_to_edge(&atom(t), &cfg).unwrap()).collect()
    }

    fn fig2_goal() -> SemGraph {
        graph(&["piece(x5)", "into(y1,x5)"]).with_unified(&BTreeSet::from([y(1)]))
    }

    fn fig2_premise() -> SemGraph {
        graph(&["lady(x1)", "meat(x2)", "cut(y1)", "up(y1)", "precisely(y1)", "subj(y1)=x1", "obj(y1)=x2"])
    }

    #[test]
    fn phrase_set_of_x5() {
        let g = fig2_goal();
        assert_eq!(phrase_set(&g, x(5)).unwrap(), edges(&["into(y1,x5)", "piece(x5)"]));
        assert!(phrase_set(&g, x(9)).is_err());
    }

    #[test]
    fn phrase_set_of_premise_event() {
        let p = fig2_premise();
        assert_eq!(phrase_set(&p, y(1)).unwrap(), edges(&["cut(y1)", "up(y1)", "precisely(y1)"]));
    }

    #[test]
    fn role_only_variable_has_empty_phrase_set() {
        let g = graph(&["subj(y1)=x1"]);
        assert!(phrase_set(&g, x(1)).unwrap().is_empty());
    }

    #[test]
    fn reach_and_corr_of_x5() {
        let g = fig2_goal();
        let r = reach(x(5), &g).unwrap();
        assert_eq!(r, edges(&["into(y1,x5)", "piece(x5)"]));
        assert_eq!(corr(&r, &fig2_premise()), edges(&["cut(y1)", "up(y1)", "precisely(y1)"]));
        assert_eq!(reach(y(1), &g), Err(GraphError::NotNonUnified("y1".into())));
    }

    #[test]
    fn reach_follows_non_unified_events() {
        let g = graph(&["into(y2,x5)", "fast(y2)", "subj(y2)=x6", "tall(x6)"]);
        let r = reach(x(5), &g).unwrap();
        assert_eq!(r, edges(&["into(y2,x5)", "fast(y2)"]));
    }

    #[test]
    fn isolated_non_unified_variable_reaches_nothing() {
        let mut g = SemGraph::default();
        g.non_unified.insert(x(7));
        assert!(reach(x(7), &g).unwrap().is_empty());
    }

    #[test]
    fn fig2_axiom() {
        let pool: AtomSet =
            ["lady(x1)", "meat(x2)", "cut(y1)", "up(y1)", "precisely(y1)", "subj(y1)=x1", "obj(y1)=x2"]
                .iter()
                .map(|t| atom(t))
                .collect();
        let goals: AtomSet = ["piece(x5)", "into(y2,x5)"].iter().map(|t| atom(t)).collect();
        let mut st = ProofState::new(pool, goals, BTreeSet::from([x(5), y(2)]));
        st.subst.insert(y(2), Term::Var(y(1)));
        let out = generate_phrase_axioms(&st, &EngineConfig::default()).unwrap();
        assert!(out.complete);
        assert_eq!(out.axioms.len(), 1);
        assert_eq!(
            out.axioms[0].0.to_string(),
            "forall y1 ((cut(y1) & precisely(y1) & up(y1)) -> exists x1 (into(y1,x1) & piece(x1)))"
        );
    }

    #[test]
    fn nothing_left_means_no_axioms() {
        let pool: AtomSet = [atom("dog(x1)")].into_iter().collect();
        let st = ProofState::new(pool, AtomSet::new(), BTreeSet::new());
        let out = generate_phrase_axioms(&st, &EngineConfig::default()).unwrap();
        assert!(out.axioms.is_empty() && out.complete);
    }

    #[test]
    fn unanchored_reach_is_suppressed() {
        let pool: AtomSet = [atom("dog(x1)")].into_iter().collect();
        let goals: AtomSet = [atom("cat(x5)")].into_iter().collect();
        let st = ProofState::new(pool, goals, BTreeSet::from([x(5)]));
        let out = generate_phrase_axioms(&st, &EngineConfig::default()).unwrap();
        assert!(out.axioms.is_empty());
        assert_eq!(out.no_anchor, vec![vec![atom("cat(x5)")]]);
        assert!(!out.complete);
    }
}
