use std::fmt;

use super::{Atom, Formula, Term, Variable};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => write!(f, "{v}"),
            Term::Func(r, arg) => write!(f, "{r}({arg})"),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Unary { pred, arg } => write!(f, "{pred}({arg})"),
            Atom::Binary { pred, left, right } => write!(f, "{pred}({left},{right})"),
            Atom::Role { role, event, filler } => write!(f, "{role}({event})={filler}"),
            Atom::Eq(l, r) => write!(f, "{l}={r}"),
        }
    }
}

/// Collects a run of nested quantifiers of the same kind.
fn quantifier_run(f: &Formula) -> (Vec<Variable>, &Formula) {
    let universal = matches!(f, Formula::Forall(..));
    let mut vars = Vec::new();
    let mut cur = f;
    loop {
        match cur {
            Formula::Exists(v, b) if !universal => {
                vars.push(*v);
                cur = b;
            }
            Formula::Forall(v, b) if universal => {
                vars.push(*v);
                cur = b;
            }
            _ => return (vars, cur),
        }
    }
}

fn write_bare(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f {
        Formula::And(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.write_str(" & ")?;
                }
                write!(out, "{p}")?;
            }
            Ok(())
        }
        Formula::Or(a, b) => write!(out, "{a} | {b}"),
        Formula::Implies(a, b) => write!(out, "{a} -> {b}"),
        other => write!(out, "{other}"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::False => f.write_str("False"),
            Formula::Not(b) => write!(f, "-{b}"),
            Formula::And(parts) if parts.is_empty() => f.write_str("()"),
            Formula::And(_) | Formula::Or(..) | Formula::Implies(..) => {
                f.write_str("(")?;
                write_bare(self, f)?;
                f.write_str(")")
            }
            Formula::Exists(..) | Formula::Forall(..) => {
                let (vars, body) = quantifier_run(self);
                f.write_str(if matches!(self, Formula::Exists(..)) { "exists" } else { "forall" })?;
                for v in vars {
                    write!(f, " {v}")?;
                }
                f.write_str(" (")?;
                write_bare(body, f)?;
                f.write_str(")")
            }
        }
    }
}

/// Canonical text rendering; parsing it back yields the same formula.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}
