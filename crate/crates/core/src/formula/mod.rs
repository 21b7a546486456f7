//! Terms, atoms and formulas of Neo-Davidsonian event semantics.
//!
//! Variables carry their sort in the name: `x<N>` ranges over entities and
//! `y<N>` over events. Content words are one-place predicates, prepositions
//! are two-place predicates and semantic roles link an event to a participant
//! (`subj(y1)=x1`).

mod normalize;
mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::error::FormulaError;

pub use normalize::{normalize, role_link};
pub use parse::{parse_atom, parse_formula, parse_term, ParseError};
pub use print::print_formula;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sort {
    Entity,
    Event,
}

impl Sort {
    pub fn prefix(self) -> char {
        match self {
            Sort::Entity => 'x',
            Sort::Event => 'y',
        }
    }
}

/// A sorted variable. Ordering puts entities before events, then by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Variable {
    pub sort: Sort,
    pub index: u32,
}

impl Variable {
    pub fn new(sort: Sort, index: u32) -> Self {
        Variable { sort, index }
    }

    pub fn entity(index: u32) -> Self {
        Variable::new(Sort::Entity, index)
    }

    pub fn event(index: u32) -> Self {
        Variable::new(Sort::Event, index)
    }

    /// Recognizes `x<digits>` / `y<digits>`. Anything else is not a variable name.
    pub fn from_name(name: &str) -> Option<Self> {
        let mut chars = name.chars();
        let sort = match chars.next()? {
            'x' => Sort::Entity,
            'y' => Sort::Event,
            _ => return None,
        };
        let digits = chars.as_str();
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        digits.parse().ok().map(|index| Variable { sort, index })
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sort.prefix(), self.index)
    }
}

impl FromStr for Variable {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variable::from_name(s).ok_or_else(|| FormulaError::BadVariable(s.to_string()))
    }
}

impl Serialize for Variable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Variable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Hands out variables that do not collide with any already in use.
#[derive(Clone, Debug, Default)]
pub struct FreshVars {
    next: BTreeMap<Sort, u32>,
}

impl FreshVars {
    pub fn avoiding<'a>(vars: impl IntoIterator<Item = &'a Variable>) -> Self {
        let mut fresh = FreshVars::default();
        for v in vars {
            fresh.reserve(*v);
        }
        fresh
    }

    pub fn reserve(&mut self, v: Variable) {
        let next = self.next.entry(v.sort).or_insert(1);
        if v.index >= *next {
            *next = v.index + 1;
        }
    }

    pub fn fresh(&mut self, sort: Sort) -> Variable {
        let next = self.next.entry(sort).or_insert(1);
        let v = Variable::new(sort, *next);
        *next += 1;
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(Variable),
    /// `role(t)`; the argument is never itself functional.
    Func(String, Box<Term>),
}

impl Term {
    pub fn var(v: Variable) -> Self {
        Term::Var(v)
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn func(role: impl Into<String>, arg: Term) -> Self {
        Term::Func(role.into(), Box::new(arg))
    }

    /// Constants and role fillers range over entities.
    pub fn sort(&self) -> Sort {
        match self {
            Term::Var(v) => v.sort,
            Term::Const(_) | Term::Func(..) => Sort::Entity,
        }
    }

    pub fn as_var(&self) -> Option<Variable> {
        match self {
            Term::Var(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_functional(&self) -> bool {
        matches!(self, Term::Func(..))
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Variable>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::Const(_) => {}
            Term::Func(_, arg) => arg.collect_vars(out),
        }
    }

    pub fn rename(&self, map: &dyn Fn(Variable) -> Term) -> Term {
        match self {
            Term::Var(v) => map(*v),
            Term::Const(_) => self.clone(),
            Term::Func(r, arg) => Term::Func(r.clone(), Box::new(arg.rename(map))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `F(t)`: a content word.
    Unary { pred: String, arg: Term },
    /// `G(t,u)`: a preposition.
    Binary { pred: String, left: Term, right: Term },
    /// `role(event)=filler`: the normalized form of a semantic role link.
    Role { role: String, event: Term, filler: Term },
    /// `t = u` as written, before normalization.
    Eq(Term, Term),
}

impl Atom {
    pub fn unary(pred: impl Into<String>, arg: Term) -> Self {
        Atom::Unary { pred: pred.into(), arg }
    }

    pub fn binary(pred: impl Into<String>, left: Term, right: Term) -> Self {
        Atom::Binary { pred: pred.into(), left, right }
    }

    pub fn role(role: impl Into<String>, event: Term, filler: Term) -> Self {
        Atom::Role { role: role.into(), event, filler }
    }

    /// Predicate symbol used for matching; `=` for raw equalities.
    pub fn predicate(&self) -> &str {
        match self {
            Atom::Unary { pred, .. } | Atom::Binary { pred, .. } => pred,
            Atom::Role { role, .. } => role,
            Atom::Eq(..) => "=",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Atom::Unary { .. } => 1,
            _ => 2,
        }
    }

    pub fn args(&self) -> Vec<&Term> {
        match self {
            Atom::Unary { arg, .. } => vec![arg],
            Atom::Binary { left, right, .. } => vec![left, right],
            Atom::Role { event, filler, .. } => vec![event, filler],
            Atom::Eq(l, r) => vec![l, r],
        }
    }

    /// Same predicate and shape, arguments ignored.
    pub fn same_head(&self, other: &Atom) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
            && self.predicate() == other.predicate()
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        for t in self.args() {
            t.collect_vars(&mut out);
        }
        out
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Atom {
        match self {
            Atom::Unary { pred, arg } => Atom::Unary { pred: pred.clone(), arg: f(arg) },
            Atom::Binary { pred, left, right } => Atom::Binary {
                pred: pred.clone(),
                left: f(left),
                right: f(right),
            },
            Atom::Role { role, event, filler } => Atom::Role {
                role: role.clone(),
                event: f(event),
                filler: f(filler),
            },
            Atom::Eq(l, r) => Atom::Eq(f(l), f(r)),
        }
    }

    pub fn rename(&self, map: &dyn Fn(Variable) -> Term) -> Atom {
        self.map_terms(&|t| t.rename(map))
    }

    pub fn has_functional_arg(&self) -> bool {
        self.args().iter().any(|t| t.is_functional())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    /// n-ary; printed left-associatively.
    And(Vec<Formula>),
    Exists(Variable, Box<Formula>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Variable, Box<Formula>),
    False,
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    /// Flattens nested conjunctions; a single conjunct is returned as is.
    pub fn and(parts: impl IntoIterator<Item = Formula>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Formula::And(flat)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists_many(vars: impl IntoIterator<Item = Variable>, body: Formula) -> Self {
        let vars: Vec<_> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::Exists(v, Box::new(acc)))
    }

    pub fn forall_many(vars: impl IntoIterator<Item = Variable>, body: Formula) -> Self {
        let vars: Vec<_> = vars.into_iter().collect();
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::Forall(v, Box::new(acc)))
    }

    /// Only atoms, conjunction and existential quantification.
    pub fn is_basic(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::And(parts) => parts.iter().all(Formula::is_basic),
            Formula::Exists(_, body) => body.is_basic(),
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Variable> {
        fn go(f: &Formula, bound: &mut Vec<Variable>, out: &mut BTreeSet<Variable>) {
            match f {
                Formula::Atom(a) => {
                    for v in a.vars() {
                        if !bound.contains(&v) {
                            out.insert(v);
                        }
                    }
                }
                Formula::And(parts) => parts.iter().for_each(|p| go(p, bound, out)),
                Formula::Exists(v, b) | Formula::Forall(v, b) => {
                    bound.push(*v);
                    go(b, bound, out);
                    bound.pop();
                }
                Formula::Not(b) => go(b, bound, out),
                Formula::Or(a, b) | Formula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::False => {}
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Variable> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| out.extend(a.vars()));
        self.visit_binders(&mut |v| {
            out.insert(v);
        });
        out
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&Atom)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::And(parts) => parts.iter().for_each(|p| p.visit_atoms(f)),
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::Not(b) => b.visit_atoms(f),
            Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
            Formula::False => {}
        }
    }

    fn visit_binders(&self, f: &mut dyn FnMut(Variable)) {
        match self {
            Formula::Atom(_) | Formula::False => {}
            Formula::And(parts) => parts.iter().for_each(|p| p.visit_binders(f)),
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                f(*v);
                b.visit_binders(f);
            }
            Formula::Not(b) => b.visit_binders(f),
            Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_binders(f);
                b.visit_binders(f);
            }
        }
    }

    /// Capture-free substitution of free variables.
    pub fn substitute(&self, map: &BTreeMap<Variable, Term>) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.rename(&|v| map.get(&v).cloned().unwrap_or(Term::Var(v)))),
            Formula::And(parts) => Formula::And(parts.iter().map(|p| p.substitute(map)).collect()),
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = Box::new(b.substitute(&inner));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(*v, body)
                } else {
                    Formula::Forall(*v, body)
                }
            }
            Formula::Not(b) => Formula::not(b.substitute(map)),
            Formula::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::False => Formula::False,
        }
    }

    /// Renames every bound variable that is also in `avoid` to a fresh one.
    pub fn rename_apart(&self, avoid: &BTreeSet<Variable>, fresh: &mut FreshVars) -> Formula {
        match self {
            Formula::Atom(_) | Formula::False => self.clone(),
            Formula::And(parts) => {
                Formula::And(parts.iter().map(|p| p.rename_apart(avoid, fresh)).collect())
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                let (nv, body) = if avoid.contains(v) {
                    let nv = fresh.fresh(v.sort);
                    let map = BTreeMap::from([(*v, Term::Var(nv))]);
                    (nv, b.substitute(&map))
                } else {
                    fresh.reserve(*v);
                    (*v, (**b).clone())
                };
                let body = Box::new(body.rename_apart(avoid, fresh));
                if matches!(self, Formula::Exists(..)) {
                    Formula::Exists(nv, body)
                } else {
                    Formula::Forall(nv, body)
                }
            }
            Formula::Not(b) => Formula::not(b.rename_apart(avoid, fresh)),
            Formula::Or(a, b) => Formula::or(a.rename_apart(avoid, fresh), b.rename_apart(avoid, fresh)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_apart(avoid, fresh), b.rename_apart(avoid, fresh))
            }
        }
    }
}

/// The matrix of a basic formula: its atoms plus every variable they mention.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct AtomSet {
    pub atoms: BTreeSet<Atom>,
    pub variables: BTreeSet<Variable>,
}

impl AtomSet {
    pub fn new() -> Self {
        AtomSet::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut set = AtomSet::new();
        for a in atoms {
            set.insert(a);
        }
        set
    }

    pub fn insert(&mut self, atom: Atom) -> bool {
        self.variables.extend(atom.vars());
        self.atoms.insert(atom)
    }

    pub fn remove(&mut self, atom: &Atom) -> bool {
        self.atoms.remove(atom)
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }

    /// All terms that occur as atom arguments, functional ones included.
    pub fn terms(&self) -> BTreeSet<Term> {
        self.atoms
            .iter()
            .flat_map(|a| a.args().into_iter().cloned())
            .collect()
    }

    /// `∃vars (a1 & ... & an)`; the empty set yields `None`.
    pub fn to_formula(&self) -> Option<Formula> {
        if self.atoms.is_empty() {
            return None;
        }
        let body = Formula::and(self.atoms.iter().cloned().map(Formula::Atom));
        Some(Formula::exists_many(self.variables.iter().copied(), body))
    }

    /// Replaces every functional argument `role(t)` by the filler of an existing
    /// `role(t)=u` link, or by a fresh entity variable plus a new link.
    pub fn flatten_functional(&self) -> AtomSet {
        self.flatten_functional_avoiding(&BTreeSet::new())
    }

    /// As [`AtomSet::flatten_functional`], with new variables also kept apart from `avoid`.
    pub fn flatten_functional_avoiding(&self, avoid: &BTreeSet<Variable>) -> AtomSet {
        if !self.atoms.iter().any(Atom::has_functional_arg) {
            return self.clone();
        }
        let mut fresh = FreshVars::avoiding(self.variables.iter().chain(avoid));
        let mut fillers: BTreeMap<(String, Term), Term> = BTreeMap::new();
        for a in &self.atoms {
            if let Atom::Role { role, event, filler } = a {
                if !event.is_functional() && !filler.is_functional() {
                    fillers
                        .entry((role.clone(), event.clone()))
                        .or_insert_with(|| filler.clone());
                }
            }
        }
        let mut out = AtomSet::new();
        let mut extra = Vec::new();
        for flat in self.atoms.iter().cloned() {
            let mut resolve = |t: &Term| -> Term {
                match t {
                    Term::Func(role, arg) => {
                        let key = (role.clone(), (**arg).clone());
                        fillers
                            .entry(key)
                            .or_insert_with(|| {
                                let v = Term::Var(fresh.fresh(Sort::Entity));
                                extra.push(Atom::role(role.clone(), (**arg).clone(), v.clone()));
                                v
                            })
                            .clone()
                    }
                    other => other.clone(),
                }
            };
            let flat = match flat {
                Atom::Unary { pred, arg } => Atom::Unary { pred, arg: resolve(&arg) },
                Atom::Binary { pred, left, right } => {
                    let left = resolve(&left);
                    Atom::Binary { pred, left, right: resolve(&right) }
                }
                Atom::Role { role, event, filler } => {
                    let event = resolve(&event);
                    Atom::Role { role, event, filler: resolve(&filler) }
                }
                Atom::Eq(l, r) => {
                    let l = resolve(&l);
                    Atom::Eq(l, resolve(&r))
                }
            };
            out.insert(flat);
        }
        for a in extra {
            out.insert(a);
        }
        out.variables.extend(self.variables.iter().copied());
        out
    }
}

impl FromIterator<Atom> for AtomSet {
    fn from_iter<I: IntoIterator<Item = Atom>>(iter: I) -> Self {
        AtomSet::from_atoms(iter)
    }
}

pub fn is_basic(f: &Formula) -> bool {
    f.is_basic()
}

/// Strips `∃` and flattens `∧`, collecting the quantified variables.
pub fn decompose_basic(f: &Formula) -> Result<AtomSet, FormulaError> {
    fn go(f: &Formula, out: &mut AtomSet) -> Result<(), FormulaError> {
        match f {
            Formula::Atom(a) => {
                out.insert(a.clone());
                Ok(())
            }
            Formula::And(parts) => parts.iter().try_for_each(|p| go(p, out)),
            Formula::Exists(v, body) => {
                out.variables.insert(*v);
                go(body, out)
            }
            other => Err(FormulaError::NotBasic(other.to_string())),
        }
    }
    let mut out = AtomSet::new();
    go(f, &mut out)?;
    Ok(out)
}

/// Checks the role-link shape invariants of a single atom against the configured roles.
pub(crate) fn check_roles(atom: &Atom, config: &EngineConfig) -> Result<(), FormulaError> {
    for t in atom.args() {
        if let Term::Func(r, arg) = t {
            if !config.is_role(r) {
                return Err(FormulaError::UnknownRole(r.clone()));
            }
            if arg.is_functional() {
                return Err(FormulaError::NestedFunctional(t.to_string()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variable_names_carry_sort() {
        assert_eq!(Variable::from_name("x12"), Some(Variable::entity(12)));
        assert_eq!(Variable::from_name("y3"), Some(Variable::event(3)));
        assert_eq!(Variable::from_name("z1"), None);
        assert_eq!(Variable::from_name("x"), None);
        assert_eq!(Variable::from_name("xylophone"), None);
    }

    #[test]
    fn fresh_vars_skip_used_indices() {
        let used = [Variable::entity(1), Variable::entity(4), Variable::event(2)];
        let mut fresh = FreshVars::avoiding(&used);
        assert_eq!(fresh.fresh(Sort::Entity), Variable::entity(5));
        assert_eq!(fresh.fresh(Sort::Event), Variable::event(3));
        assert_eq!(fresh.fresh(Sort::Entity), Variable::entity(6));
    }

    #[test]
    fn flatten_reuses_existing_role_filler() {
        let y1 = Term::Var(Variable::event(1));
        let x2 = Term::Var(Variable::entity(2));
        let set = AtomSet::from_atoms([
            Atom::role("obj", y1.clone(), x2.clone()),
            Atom::unary("camera", Term::func("obj", y1.clone())),
        ]);
        let flat = set.flatten_functional();
        assert!(flat.contains(&Atom::unary("camera", x2)));
        assert_eq!(flat.len(), 2);
    }

    #[test]
    fn flatten_introduces_fresh_filler() {
        let y1 = Term::Var(Variable::event(1));
        let set = AtomSet::from_atoms([
            Atom::unary("fire", Term::func("obj", y1.clone())),
            Atom::binary("to", y1.clone(), Term::func("obj", y1.clone())),
        ]);
        let flat = set.flatten_functional();
        let x1 = Term::Var(Variable::entity(1));
        assert!(flat.contains(&Atom::role("obj", y1.clone(), x1.clone())));
        assert!(flat.contains(&Atom::unary("fire", x1.clone())));
        assert!(flat.contains(&Atom::binary("to", y1, x1)));
        assert_eq!(flat.len(), 3);
    }
}
