//! Seeded generators for random formulas, atom sets and axioms.

use entail_core::{Atom, AtomSet, Axiom, AxiomMode, Formula, Label, Provenance, Sort, Term, Variable};
use rand::seq::SliceRandom;
use rand::Rng;

const UNARY: [&str; 4] = ["dog", "run", "red", "cut"];
const PREPS: [&str; 2] = ["on", "in"];
const ROLES: [&str; 2] = ["subj", "obj"];

fn pick<'a, R: Rng>(rng: &mut R, xs: &[&'a str]) -> &'a str {
    xs.choose(rng).unwrap()
}

/// A random basic atom over variables `x1..=x<ents>` and `y1..=y<evs>`,
/// already in normalized form (role links are `Atom::Role`).
pub fn basic_atom<R: Rng>(rng: &mut R, ents: u32, evs: u32) -> Atom {
    let ent = |rng: &mut R| Term::var(Variable::entity(rng.gen_range(1..=ents)));
    let ev = |rng: &mut R| Term::var(Variable::event(rng.gen_range(1..=evs)));
    let any = |rng: &mut R| if rng.gen_bool(0.6) { ent(rng) } else { ev(rng) };
    match rng.gen_range(0..10) {
        0..=4 => Atom::unary(pick(rng, &UNARY), any(rng)),
        5..=6 => Atom::binary(pick(rng, &PREPS), any(rng), ent(rng)),
        _ => Atom::role(pick(rng, &ROLES), ev(rng), ent(rng)),
    }
}

/// 1 to `max` random atoms; at most 3 entity and 2 event variables.
pub fn basic_set<R: Rng>(rng: &mut R, max: usize) -> AtomSet {
    let n = rng.gen_range(1..=max);
    let mut set = AtomSet::new();
    while set.len() < n {
        set.insert(basic_atom(rng, 3, 2));
    }
    set.variables = set.iter().flat_map(Atom::vars).collect();
    set
}

/// A goal entailed by `premise`: a subset of its atoms with each variable
/// consistently renamed to a fresh one.
pub fn entailed_goal<R: Rng>(rng: &mut R, premise: &AtomSet) -> AtomSet {
    let atoms: Vec<&Atom> = premise.iter().collect();
    let k = rng.gen_range(1..=atoms.len());
    let chosen: Vec<&Atom> = atoms.choose_multiple(rng, k).copied().collect();
    let shift = |v: Variable| Term::var(Variable::new(v.sort, v.index + 10));
    let mut set: AtomSet = chosen.iter().map(|a| a.rename(&shift)).collect();
    set.variables = set.iter().flat_map(Atom::vars).collect();
    set
}

struct Scope {
    ents: Vec<Variable>,
    evs: Vec<Variable>,
    next_ent: u32,
    next_ev: u32,
}

impl Scope {
    fn fresh(&mut self, sort: Sort) -> Variable {
        match sort {
            Sort::Entity => {
                self.next_ent += 1;
                Variable::entity(self.next_ent)
            }
            Sort::Event => {
                self.next_ev += 1;
                Variable::event(self.next_ev)
            }
        }
    }

    fn bind(&mut self, v: Variable) {
        match v.sort {
            Sort::Entity => self.ents.push(v),
            Sort::Event => self.evs.push(v),
        }
    }

    fn unbind(&mut self, v: Variable) {
        match v.sort {
            Sort::Entity => self.ents.retain(|w| *w != v),
            Sort::Event => self.evs.retain(|w| *w != v),
        }
    }
}

fn entity_term<R: Rng>(rng: &mut R, s: &Scope) -> Term {
    if !s.evs.is_empty() && rng.gen_bool(0.15) {
        let e = *s.evs.choose(rng).unwrap();
        return Term::func(pick(rng, &ROLES), Term::var(e));
    }
    match s.ents.choose(rng) {
        Some(v) if rng.gen_bool(0.9) => Term::var(*v),
        _ => Term::constant("john"),
    }
}

fn raw_atom<R: Rng>(rng: &mut R, s: &Scope) -> Atom {
    let any = |rng: &mut R| match s.evs.choose(rng) {
        Some(e) if rng.gen_bool(0.4) => Term::var(*e),
        _ => entity_term(rng, s),
    };
    match rng.gen_range(0..10) {
        0..=4 => Atom::unary(pick(rng, &UNARY), any(rng)),
        5..=6 => Atom::binary(pick(rng, &PREPS), any(rng), entity_term(rng, s)),
        _ => match s.evs.choose(rng) {
            Some(e) => {
                let filler = match s.ents.choose(rng) {
                    Some(v) => Term::var(*v),
                    None => Term::constant("john"),
                };
                Atom::Eq(Term::func(pick(rng, &ROLES), Term::var(*e)), filler)
            }
            None => Atom::unary(pick(rng, &UNARY), entity_term(rng, s)),
        },
    }
}

fn quantified<R: Rng>(rng: &mut R, s: &mut Scope, depth: u32, basic: bool, universal: bool) -> Formula {
    let n = rng.gen_range(1..=2);
    let vars: Vec<Variable> = (0..n)
        .map(|_| s.fresh(if rng.gen_bool(0.6) { Sort::Entity } else { Sort::Event }))
        .collect();
    for v in &vars {
        s.bind(*v);
    }
    let body = formula_in(rng, s, depth, basic);
    for v in &vars {
        s.unbind(*v);
    }
    if universal {
        Formula::forall_many(vars, body)
    } else {
        Formula::exists_many(vars, body)
    }
}

fn formula_in<R: Rng>(rng: &mut R, s: &mut Scope, depth: u32, basic: bool) -> Formula {
    let top = if depth == 0 { 2 } else if basic { 4 } else { 8 };
    match rng.gen_range(0..top) {
        0 | 1 => Formula::atom(raw_atom(rng, s)),
        2 => {
            let n = rng.gen_range(2..=3);
            Formula::and((0..n).map(|_| formula_in(rng, s, depth - 1, basic)).collect::<Vec<_>>())
        }
        3 => quantified(rng, s, depth - 1, basic, false),
        4 => Formula::not(formula_in(rng, s, depth - 1, basic)),
        5 => Formula::or(formula_in(rng, s, depth - 1, basic), formula_in(rng, s, depth - 1, basic)),
        6 => Formula::implies(formula_in(rng, s, depth - 1, basic), formula_in(rng, s, depth - 1, basic)),
        _ => quantified(rng, s, depth - 1, basic, true),
    }
}

/// A closed formula as the parser would produce it: role links are written
/// as equalities and functional terms may appear in argument positions.
pub fn formula<R: Rng>(rng: &mut R, basic: bool) -> Formula {
    let mut s = Scope { ents: Vec::new(), evs: Vec::new(), next_ent: 0, next_ev: 0 };
    quantified(rng, &mut s, 3, basic, false)
}

/// A random axiom carrying the unique predicate `k<id>` in its antecedent.
pub fn axiom<R: Rng>(rng: &mut R, id: usize) -> Axiom {
    let mut ant: Vec<Atom> = vec![Atom::unary(format!("k{id}"), Term::var(Variable::entity(1)))];
    for _ in 0..rng.gen_range(0..3) {
        ant.push(basic_atom(rng, 2, 1));
    }
    let mut cons: Vec<Atom> = vec![Atom::unary("mark", Term::var(Variable::entity(rng.gen_range(1..=3))))];
    for _ in 0..rng.gen_range(0..2) {
        cons.push(basic_atom(rng, 3, 2));
    }
    let ax = if rng.gen_bool(0.2) { Axiom::negative(ant, cons) } else { Axiom::new(ant, cons) };
    if rng.gen_bool(0.5) {
        let mode = if rng.gen_bool(0.5) { AxiomMode::Word } else { AxiomMode::Phrase };
        let gold = *[None, Some(Label::Yes), Some(Label::No)].choose(rng).unwrap();
        ax.with_provenance(Provenance { pair: format!("pair-{id}"), mode, gold })
    } else {
        ax
    }
}
