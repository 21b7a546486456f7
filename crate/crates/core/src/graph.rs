//! Directed labeled graphs for basic formulas.
//!
//! Terms become vertices and content-word predicates become their own
//! vertices reached by an `isa` edge. Prepositions and semantic roles are
//! labeled edges between term vertices. [`edge_to_atom`] maps an edge back to
//! the atom it stands for.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::config::EngineConfig;
use crate::error::GraphError;
use crate::formula::{Atom, AtomSet, Formula, Term, Variable};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Var(Variable),
    Const(String),
    /// A one-place predicate; never has outgoing edges.
    Pred(String),
}

impl Vertex {
    pub fn from_term(t: &Term) -> Option<Vertex> {
        match t {
            Term::Var(v) => Some(Vertex::Var(*v)),
            Term::Const(c) => Some(Vertex::Const(c.clone())),
            Term::Func(..) => None,
        }
    }

    pub fn as_term(&self) -> Option<Term> {
        match self {
            Vertex::Var(v) => Some(Term::Var(*v)),
            Vertex::Const(c) => Some(Term::Const(c.clone())),
            Vertex::Pred(_) => None,
        }
    }

    pub fn as_var(&self) -> Option<Variable> {
        match self {
            Vertex::Var(v) => Some(*v),
            _ => None,
        }
    }

    fn debug_name(&self) -> String {
        match self {
            Vertex::Var(v) => format!("var:{v}"),
            Vertex::Const(c) => format!("const:{c}"),
            Vertex::Pred(p) => format!("pred:{p}"),
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Var(v) => write!(f, "{v}"),
            Vertex::Const(c) | Vertex::Pred(c) => f.write_str(c),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeLabel {
    Isa,
    Prep(String),
    Role(String),
}

impl EdgeLabel {
    pub fn is_role(&self) -> bool {
        matches!(self, EdgeLabel::Role(_))
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Isa => f.write_str("isa"),
            EdgeLabel::Prep(p) | EdgeLabel::Role(p) => f.write_str(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub src: Vertex,
    pub label: EdgeLabel,
    pub dst: Vertex,
}

impl Edge {
    pub fn new(src: Vertex, label: EdgeLabel, dst: Vertex) -> Self {
        Edge { src, label, dst }
    }

    pub fn isa(src: Vertex, pred: impl Into<String>) -> Self {
        Edge::new(src, EdgeLabel::Isa, Vertex::Pred(pred.into()))
    }

    pub fn touches(&self, v: &Vertex) -> bool {
        &self.src == v || &self.dst == v
    }

    /// Variable endpoints of the edge.
    pub fn var_vertices(&self) -> impl Iterator<Item = Variable> + '_ {
        [&self.src, &self.dst].into_iter().filter_map(Vertex::as_var)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}, {}, {}⟩", self.src, self.label, self.dst)
    }
}

/// The atom a labeled edge encodes.
pub fn edge_to_atom(e: &Edge) -> Atom {
    let src = e.src.as_term().expect("edge source is a term vertex");
    match &e.label {
        EdgeLabel::Isa => {
            let pred = match &e.dst {
                Vertex::Pred(p) => p.clone(),
                other => other.to_string(),
            };
            Atom::unary(pred, src)
        }
        EdgeLabel::Prep(p) => Atom::binary(p.clone(), src, e.dst.as_term().expect("term vertex")),
        EdgeLabel::Role(r) => Atom::role(r.clone(), src, e.dst.as_term().expect("term vertex")),
    }
}

/// Inverse of [`edge_to_atom`] for flattened, normalized atoms.
pub fn atom_to_edge(atom: &Atom, config: &EngineConfig) -> Result<Edge, GraphError> {
    let vertex = |t: &Term| {
        Vertex::from_term(t).ok_or_else(|| GraphError::Normalization(atom.to_string()))
    };
    match atom {
        Atom::Unary { pred, arg } => Ok(Edge::isa(vertex(arg)?, pred.clone())),
        Atom::Binary { pred, left, right } => {
            let label = if config.is_role(pred) {
                EdgeLabel::Role(pred.clone())
            } else {
                EdgeLabel::Prep(pred.clone())
            };
            Ok(Edge::new(vertex(left)?, label, vertex(right)?))
        }
        Atom::Role { role, event, filler } => {
            Ok(Edge::new(vertex(event)?, EdgeLabel::Role(role.clone()), vertex(filler)?))
        }
        Atom::Eq(..) => Err(GraphError::Normalization(atom.to_string())),
    }
}

/// A meaning-representation graph with its variables split into unified and
/// non-unified ones. Snapshots are immutable; [`SemGraph::with_unified`]
/// returns a new one.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SemGraph {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<Edge>,
    pub unified: BTreeSet<Variable>,
    pub non_unified: BTreeSet<Variable>,
}

impl SemGraph {
    pub fn from_edges(edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut g = SemGraph::default();
        for e in edges {
            g.vertices.insert(e.src.clone());
            g.vertices.insert(e.dst.clone());
            g.edges.insert(e);
        }
        g.non_unified = g.variables();
        g
    }

    pub fn variables(&self) -> BTreeSet<Variable> {
        self.vertices.iter().filter_map(Vertex::as_var).collect()
    }

    /// Marks the given variables unified; every other variable vertex is non-unified.
    pub fn with_unified(&self, unified: &BTreeSet<Variable>) -> SemGraph {
        let vars = self.variables();
        SemGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            unified: vars.intersection(unified).copied().collect(),
            non_unified: vars.difference(unified).copied().collect(),
        }
    }

    pub fn contains_vertex(&self, v: &Vertex) -> bool {
        self.vertices.contains(v)
    }

    pub fn outgoing<'a>(&'a self, v: &'a Vertex) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.src == v)
    }

    pub fn incident<'a>(&'a self, v: &'a Vertex) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| e.touches(v))
    }

    pub fn atoms(&self) -> AtomSet {
        self.edges.iter().map(edge_to_atom).collect()
    }

    /// True when no directed cycle runs through preposition or role edges.
    pub fn is_acyclic(&self) -> bool {
        let mut succ: BTreeMap<&Vertex, Vec<&Vertex>> = BTreeMap::new();
        for e in &self.edges {
            succ.entry(&e.src).or_default().push(&e.dst);
        }
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state: BTreeMap<&Vertex, u8> = BTreeMap::new();
        fn visit<'a>(
            v: &'a Vertex,
            succ: &BTreeMap<&'a Vertex, Vec<&'a Vertex>>,
            state: &mut BTreeMap<&'a Vertex, u8>,
        ) -> bool {
            match state.get(v).copied().unwrap_or(0) {
                1 => return false,
                2 => return true,
                _ => {}
            }
            state.insert(v, 1);
            for w in succ.get(v).into_iter().flatten() {
                if !visit(w, succ, state) {
                    return false;
                }
            }
            state.insert(v, 2);
            true
        }
        self.vertices.iter().all(|v| visit(v, &succ, &mut state))
    }

    /// Line-oriented dump: a `#semgraph v1` header, one `vertex` line per
    /// vertex, then one `edge` line per edge.
    pub fn to_debug_text(&self) -> String {
        let mut out = String::from("#semgraph v1\n");
        for v in &self.vertices {
            let status = match v {
                Vertex::Var(x) if self.unified.contains(x) => " unified",
                Vertex::Var(_) => " non-unified",
                _ => "",
            };
            out.push_str(&format!("vertex {}{status}\n", v.debug_name()));
        }
        for e in &self.edges {
            let label = match &e.label {
                EdgeLabel::Isa => "isa".to_string(),
                EdgeLabel::Prep(p) => format!("prep:{p}"),
                EdgeLabel::Role(r) => format!("role:{r}"),
            };
            out.push_str(&format!(
                "edge {} {label} {}\n",
                e.src.debug_name(),
                e.dst.debug_name()
            ));
        }
        out
    }
}

/// Builds the graph of an atom set. Functional arguments are first replaced by
/// role-filler vertices; all variables start out non-unified.
pub fn to_graph(atoms: &AtomSet, config: &EngineConfig) -> Result<SemGraph, GraphError> {
    let flat = atoms.flatten_functional();
    let edges = flat
        .iter()
        .map(|a| atom_to_edge(a, config))
        .collect::<Result<Vec<_>, _>>()?;
    let mut g = SemGraph::from_edges(edges);
    for v in &flat.variables {
        g.vertices.insert(Vertex::Var(*v));
        g.non_unified.insert(*v);
    }
    Ok(g)
}

/// Existential closure over every variable vertex of the conjunction of the edge atoms.
pub fn from_graph(g: &SemGraph) -> Result<Formula, GraphError> {
    if g.edges.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let body = Formula::and(g.edges.iter().map(|e| Formula::Atom(edge_to_atom(e))));
    Ok(Formula::exists_many(g.variables(), body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{decompose_basic, normalize, parse_formula};

    fn atoms(text: &str) -> AtomSet {
        let cfg = EngineConfig::default();
        let f = normalize(&parse_formula(text, &cfg).unwrap(), &cfg).unwrap();
        decompose_basic(&f).unwrap()
    }

    fn var(name: &str) -> Vertex {
        Vertex::Var(Variable::from_name(name).unwrap())
    }

    #[test]
    fn girl_skipping_rope_graph() {
        let a = atoms(
            "exists x1 x2 x3 y1 (girl(x1) & rope(x2) & sidewalk(x3) & skip(y1) \
             & subj(y1)=x1 & obj(y1)=x2 & on(y1,x3))",
        );
        let g = to_graph(&a, &EngineConfig::default()).unwrap();
        assert_eq!(g.edges.len(), 7);
        let isa = g.edges.iter().filter(|e| e.label == EdgeLabel::Isa).count();
        assert_eq!(isa, 4);
        assert!(g.edges.contains(&Edge::new(var("y1"), EdgeLabel::Role("subj".into()), var("x1"))));
        assert!(g.edges.contains(&Edge::new(var("y1"), EdgeLabel::Role("obj".into()), var("x2"))));
        assert!(g.edges.contains(&Edge::new(var("y1"), EdgeLabel::Prep("on".into()), var("x3"))));
        assert!(g.is_acyclic());
        assert_eq!(g.non_unified.len(), 4);
        assert!(g.unified.is_empty());
    }

    #[test]
    fn empty_atoms_give_empty_graph() {
        let g = to_graph(&AtomSet::new(), &EngineConfig::default()).unwrap();
        assert!(g.edges.is_empty() && g.vertices.is_empty());
        assert_eq!(from_graph(&g), Err(GraphError::EmptyGraph));
    }

    #[test]
    fn pi_covers_the_three_edge_kinds() {
        let into = Edge::new(var("y1"), EdgeLabel::Prep("into".into()), var("x5"));
        assert_eq!(edge_to_atom(&into).to_string(), "into(y1,x5)");
        let piece = Edge::isa(var("x5"), "piece");
        assert_eq!(edge_to_atom(&piece).to_string(), "piece(x5)");
        let subj = Edge::new(var("y1"), EdgeLabel::Role("subj".into()), var("x1"));
        assert_eq!(edge_to_atom(&subj).to_string(), "subj(y1)=x1");
    }

    #[test]
    fn single_isa_edge_round_trip() {
        let g = SemGraph::from_edges([Edge::isa(var("x1"), "dog")]);
        assert_eq!(from_graph(&g).unwrap().to_string(), "exists x1 (dog(x1))");
    }

    #[test]
    fn goal_graph_of_cutting_meat_into_pieces() {
        let a = atoms(
            "exists x3 x4 x5 y2 (meat(x4) & woman(x3) & cut(y2) & piece(x5) & into(y2,x5) \
             & subj(y2,x3) & obj(y2,x4))",
        );
        let g = to_graph(&a, &EngineConfig::default()).unwrap();
        let labels: BTreeSet<String> = g
            .edges
            .iter()
            .filter(|e| e.label != EdgeLabel::Isa)
            .map(|e| e.label.to_string())
            .collect();
        assert_eq!(labels, ["into", "obj", "subj"].iter().map(|s| s.to_string()).collect());
        assert_eq!(g.edges.len(), 7);
    }

    #[test]
    fn functional_argument_gets_role_filler_vertex() {
        let cfg = EngineConfig::default();
        let f = parse_formula("exists y1 (burn(y1) & camera(obj(y1)))", &cfg).unwrap();
        let g = to_graph(&decompose_basic(&f).unwrap(), &cfg).unwrap();
        assert!(g.edges.contains(&Edge::new(var("y1"), EdgeLabel::Role("obj".into()), var("x1"))));
        assert!(g.edges.contains(&Edge::isa(var("x1"), "camera")));
    }

    #[test]
    fn unified_partition_is_a_new_snapshot() {
        let g = to_graph(&atoms("exists x1 y1 (run(y1) & subj(y1)=x1)"), &EngineConfig::default())
            .unwrap();
        let g2 = g.with_unified(&BTreeSet::from([Variable::event(1)]));
        assert_eq!(g.unified.len(), 0);
        assert_eq!(g2.unified, BTreeSet::from([Variable::event(1)]));
        assert_eq!(g2.non_unified, BTreeSet::from([Variable::entity(1)]));
    }

    #[test]
    fn debug_text_lists_vertices_and_edges() {
        let g = SemGraph::from_edges([Edge::new(var("y1"), EdgeLabel::Prep("on".into()), var("x1"))]);
        assert_eq!(
            g.to_debug_text(),
            "#semgraph v1\nvertex var:x1 non-unified\nvertex var:y1 non-unified\nedge var:y1 prep:on var:x1\n"
        );
    }

    #[test]
    fn leftover_equality_is_rejected() {
        let x1 = Term::Var(Variable::entity(1));
        let x2 = Term::Var(Variable::entity(2));
        let set = AtomSet::from_atoms([Atom::Eq(x1, x2)]);
        assert!(matches!(
            to_graph(&set, &EngineConfig::default()),
            Err(GraphError::Normalization(_))
        ));
    }
}
