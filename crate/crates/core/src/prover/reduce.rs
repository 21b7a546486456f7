//! Decomposition of non-basic formulas into obligations.

use std::collections::BTreeMap;

use super::Rule;
use crate::config::EngineConfig;
use crate::error::ProverError;
use crate::formula::{Formula, FreshVars, Term, Variable};

const MAX_ALTERNATIVES: usize = 4096;

/// Which sentence of the pair a formula came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Text,
    Hypothesis,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tagged {
    pub side: Side,
    pub formula: Formula,
}

impl Tagged {
    pub fn new(side: Side, formula: Formula) -> Self {
        Tagged { side, formula }
    }
}

/// A leaf of the decomposition: its goal is basic or `False`, and no premise
/// is a conjunction, disjunction or implication at the top level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub premises: Vec<Tagged>,
    pub goal: Tagged,
    /// Rules applied on the way from the root to this obligation.
    pub rules: Vec<Rule>,
}

/// A set of obligations that together prove the root goal.
pub type Alternative = Vec<Obligation>;

/// Applies introduction rules to the goal and elimination rules to the
/// premises until every obligation has a basic or `False` goal. Returns the
/// alternatives in the order they should be tried.
pub fn reduce_goal(
    premises: Vec<Tagged>,
    goal: Tagged,
    config: &EngineConfig,
) -> Result<Vec<Alternative>, ProverError> {
    let mut all: Vec<Variable> = Vec::new();
    for f in premises.iter().chain(std::iter::once(&goal)) {
        all.extend(f.formula.all_vars());
    }
    let mut ctx = Reducer { fresh: FreshVars::avoiding(&all), max_depth: config.max_depth };
    ctx.reduce(premises, goal, Vec::new(), 0)
}

struct Reducer {
    fresh: FreshVars,
    max_depth: usize,
}

fn product(left: Vec<Alternative>, right: Vec<Alternative>) -> Result<Vec<Alternative>, ProverError> {
    if left.len().saturating_mul(right.len()) > MAX_ALTERNATIVES {
        return Err(ProverError::BranchLimitExceeded(MAX_ALTERNATIVES));
    }
    let mut out = Vec::new();
    for a in &left {
        for b in &right {
            out.push(a.iter().chain(b).cloned().collect());
        }
    }
    Ok(out)
}

fn with(mut rules: Vec<Rule>, r: Rule) -> Vec<Rule> {
    rules.push(r);
    rules
}

impl Reducer {
    fn reduce(
        &mut self,
        premises: Vec<Tagged>,
        goal: Tagged,
        rules: Vec<Rule>,
        depth: usize,
    ) -> Result<Vec<Alternative>, ProverError> {
        if depth > self.max_depth {
            return Err(ProverError::DepthExceeded(self.max_depth));
        }
        let side = goal.side;
        match goal.formula {
            Formula::Not(a) => {
                let mut p = premises;
                p.push(Tagged::new(side, *a));
                self.reduce(p, Tagged::new(side, Formula::False), with(rules, Rule::NotIntro), depth + 1)
            }
            Formula::Or(a, b) => {
                let rules = with(rules, Rule::OrIntro);
                let mut out = self.reduce(premises.clone(), Tagged::new(side, *a), rules.clone(), depth + 1)?;
                out.extend(self.reduce(premises, Tagged::new(side, *b), rules, depth + 1)?);
                Ok(out)
            }
            Formula::Implies(a, b) => {
                let mut p = premises;
                p.push(Tagged::new(side, *a));
                self.reduce(p, Tagged::new(side, *b), with(rules, Rule::ImpliesIntro), depth + 1)
            }
            Formula::Forall(v, a) => {
                let nv = self.fresh.fresh(v.sort);
                let body = a.substitute(&BTreeMap::from([(v, Term::Var(nv))]));
                self.reduce(premises, Tagged::new(side, body), with(rules, Rule::ForallIntro), depth + 1)
            }
            Formula::And(parts) if !parts.iter().all(Formula::is_basic) => {
                let mut acc: Vec<Alternative> = vec![Vec::new()];
                for part in parts {
                    let alts = self.reduce(premises.clone(), Tagged::new(side, part), rules.clone(), depth + 1)?;
                    acc = product(acc, alts)?;
                }
                Ok(acc)
            }
            // Existential goals over non-basic bodies need a witness choice
            // before decomposition; they are outside the supported fragment.
            Formula::Exists(_, ref body) if !body.is_basic() => Ok(Vec::new()),
            formula => self.eliminate(premises, Tagged::new(side, formula), rules, depth),
        }
    }

    fn eliminate(
        &mut self,
        premises: Vec<Tagged>,
        goal: Tagged,
        rules: Vec<Rule>,
        depth: usize,
    ) -> Result<Vec<Alternative>, ProverError> {
        if depth > self.max_depth {
            return Err(ProverError::DepthExceeded(self.max_depth));
        }
        let pos = premises.iter().position(|p| match &p.formula {
            Formula::And(parts) => !parts.iter().all(Formula::is_basic),
            Formula::Exists(_, body) => !body.is_basic(),
            Formula::Or(..) | Formula::Implies(..) => true,
            _ => false,
        });
        if let Some(i) = pos {
            let mut rest = premises;
            let Tagged { side, formula } = rest.remove(i);
            return match formula {
                Formula::And(parts) => {
                    rest.extend(parts.into_iter().map(|f| Tagged::new(side, f)));
                    self.eliminate(rest, goal, rules, depth + 1)
                }
                Formula::Exists(v, body) => {
                    let nv = self.fresh.fresh(v.sort);
                    let body = body.substitute(&BTreeMap::from([(v, Term::Var(nv))]));
                    rest.push(Tagged::new(side, body));
                    self.eliminate(rest, goal, rules, depth + 1)
                }
                Formula::Or(a, b) => {
                    let rules = with(rules, Rule::OrElim);
                    let mut left = rest.clone();
                    left.push(Tagged::new(side, *a));
                    let mut right = rest;
                    right.push(Tagged::new(side, *b));
                    let l = self.eliminate(left, goal.clone(), rules.clone(), depth + 1)?;
                    let r = self.eliminate(right, goal, rules, depth + 1)?;
                    product(l, r)
                }
                Formula::Implies(a, b) => {
                    let use_rules = with(rules.clone(), Rule::ImpliesElim);
                    let antecedent = self.reduce(rest.clone(), Tagged::new(side, *a), use_rules.clone(), depth + 1)?;
                    let mut used = if *b == goal.formula {
                        antecedent
                    } else {
                        let mut with_b = rest.clone();
                        with_b.push(Tagged::new(side, *b));
                        let cont = self.eliminate(with_b, goal.clone(), use_rules, depth + 1)?;
                        product(antecedent, cont)?
                    };
                    used.extend(self.eliminate(rest, goal, rules, depth + 1)?);
                    Ok(used)
                }
                _ => unreachable!("only decomposable premises are selected"),
            };
        }
        let mut out = Vec::new();
        if goal.formula == Formula::False {
            for (i, p) in premises.iter().enumerate() {
                if let Formula::Not(a) = &p.formula {
                    let mut rest = premises.clone();
                    rest.remove(i);
                    let target = Tagged::new(p.side, (**a).clone());
                    out.extend(self.reduce(rest, target, with(rules.clone(), Rule::NotElim), depth + 1)?);
                }
            }
        }
        out.push(vec![Obligation { premises, goal, rules }]);
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(text: &str) -> Formula {
        parse_formula(text, &EngineConfig::default()).unwrap()
    }

    #[test]
    fn negated_goal_against_negated_premise() {
        let t = f("-exists x1 y1 x2 (man(x1) & cut(y1) & potato(x2) & subj(y1)=x1 & obj(y1)=x2)");
        let h = f("exists x1 y1 x2 x3 (man(x1) & slice(y1) & potato(x2) & into(y1,x3) & piece(x3) & subj(y1)=x1 & obj(y1)=x2)");
        let alts = reduce_goal(
            vec![Tagged::new(Side::Text, t.clone())],
            Tagged::new(Side::Hypothesis, Formula::not(h.clone())),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(alts.len(), 2);
        let first = &alts[0][0];
        assert_eq!(first.rules, vec![Rule::NotIntro, Rule::NotElim]);
        assert_eq!(first.premises, vec![Tagged::new(Side::Hypothesis, h.clone())]);
        let Formula::Not(body) = t else { unreachable!() };
        assert_eq!(first.goal, Tagged::new(Side::Text, *body));
        assert_eq!(alts[1][0].goal.formula, Formula::False);
    }

    #[test]
    fn disjunctive_goal_tries_both_sides() {
        let alts = reduce_goal(
            vec![Tagged::new(Side::Text, f("exists x1 (a(x1))"))],
            Tagged::new(Side::Hypothesis, f("exists x1 (a(x1)) | exists x1 (b(x1))")),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(alts.len(), 2);
        assert_eq!(alts[0][0].goal.formula, f("exists x1 (a(x1))"));
        assert_eq!(alts[0][0].rules, vec![Rule::OrIntro]);
    }

    #[test]
    fn implication_premise_needs_its_antecedent() {
        let alts = reduce_goal(
            vec![
                Tagged::new(Side::Text, f("exists x1 (a(x1)) -> exists x1 (b(x1))")),
                Tagged::new(Side::Text, f("exists x1 (a(x1))")),
            ],
            Tagged::new(Side::Hypothesis, f("exists x1 (b(x1))")),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(alts[0].len(), 1);
        assert_eq!(alts[0][0].goal.formula, f("exists x1 (a(x1))"));
        assert_eq!(alts[0][0].rules, vec![Rule::ImpliesElim]);
        assert_eq!(alts.len(), 2);
    }

    #[test]
    fn disjunctive_premise_splits_into_two_obligations() {
        let alts = reduce_goal(
            vec![Tagged::new(Side::Text, f("exists x1 (a(x1)) | exists x1 (b(x1))"))],
            Tagged::new(Side::Hypothesis, f("exists x1 (c(x1))")),
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(alts.len(), 1);
        assert_eq!(alts[0].len(), 2);
    }

    #[test]
    fn depth_limit() {
        let mut text = String::from("exists x1 (a(x1))");
        for _ in 0..40 {
            text = format!("-{text}");
        }
        let cfg = EngineConfig::default();
        let err = reduce_goal(vec![], Tagged::new(Side::Hypothesis, f(&text)), &cfg).unwrap_err();
        assert_eq!(err, ProverError::DepthExceeded(cfg.max_depth));
    }
}
