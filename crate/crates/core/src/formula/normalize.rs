use std::collections::BTreeMap;

use super::{check_roles, Atom, Formula, FreshVars, Term, Variable};
use crate::config::EngineConfig;
use crate::error::FormulaError;

/// Canonical form: bound variables renamed to `x1..`/`y1..` in binding order,
/// role equalities and `role(t,u)` spellings rewritten to role links, and
/// nested conjunctions flattened.
pub fn normalize(f: &Formula, config: &EngineConfig) -> Result<Formula, FormulaError> {
    let mut counters = FreshVars::avoiding(&f.free_vars());
    let mut scope: Vec<(Variable, Variable)> = Vec::new();
    go(f, config, &mut counters, &mut scope)
}

fn go(
    f: &Formula,
    config: &EngineConfig,
    counters: &mut FreshVars,
    scope: &mut Vec<(Variable, Variable)>,
) -> Result<Formula, FormulaError> {
    Ok(match f {
        Formula::Atom(a) => {
            let map: BTreeMap<Variable, Variable> = scope.iter().copied().collect();
            let renamed = a.rename(&|v| Term::Var(map.get(&v).copied().unwrap_or(v)));
            Formula::Atom(role_link(&renamed, config)?)
        }
        Formula::And(parts) => Formula::and(
            parts
                .iter()
                .map(|p| go(p, config, counters, scope))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        Formula::Exists(v, b) | Formula::Forall(v, b) => {
            let nv = counters.fresh(v.sort);
            scope.push((*v, nv));
            let body = go(b, config, counters, scope);
            scope.pop();
            let body = Box::new(body?);
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(nv, body)
            } else {
                Formula::Forall(nv, body)
            }
        }
        Formula::Not(b) => Formula::not(go(b, config, counters, scope)?),
        Formula::Or(a, b) => Formula::or(go(a, config, counters, scope)?, go(b, config, counters, scope)?),
        Formula::Implies(a, b) => Formula::implies(
            go(a, config, counters, scope)?,
            go(b, config, counters, scope)?,
        ),
        Formula::False => Formula::False,
    })
}

/// Rewrites a single atom into its role-link form where one applies.
pub fn role_link(atom: &Atom, config: &EngineConfig) -> Result<Atom, FormulaError> {
    check_roles(atom, config)?;
    match atom {
        Atom::Eq(l, r) => match (l, r) {
            (Term::Func(role, ev), other) | (other, Term::Func(role, ev)) if !other.is_functional() => {
                Ok(Atom::Role { role: role.clone(), event: (**ev).clone(), filler: other.clone() })
            }
            _ => Err(FormulaError::Normalization(atom.to_string())),
        },
        Atom::Binary { pred, left, right } if config.is_role(pred) => Ok(Atom::Role {
            role: pred.clone(),
            event: left.clone(),
            filler: right.clone(),
        }),
        Atom::Role { role, .. } if !config.is_role(role) => {
            Err(FormulaError::UnknownRole(role.clone()))
        }
        other => Ok(other.clone()),
    }
}
