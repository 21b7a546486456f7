#![allow(dead_code)]

pub mod gen;

use std::path::PathBuf;

use entail_core::prover::extract_from_pair;
use entail_core::{parse_formula, Axiom, EngineConfig, Formula, KnowledgeBase, Label, Mode};
use serde::Deserialize;

#[derive(Deserialize)]
struct Row {
    id: String,
    premise: String,
    hypothesis: String,
    gold: Label,
}

pub struct Pair {
    pub id: String,
    pub premise: Formula,
    pub hypothesis: Formula,
    pub gold: Label,
}

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn formula(text: &str) -> Formula {
    parse_formula(text, &EngineConfig::default()).unwrap_or_else(|e| panic!("{text}: {e}"))
}

pub fn axiom(text: &str) -> Axiom {
    Axiom::from_formula(&formula(text)).unwrap_or_else(|| panic!("not an axiom: {text}"))
}

pub fn pairs(name: &str) -> Vec<Pair> {
    let text = std::fs::read_to_string(data(name)).unwrap();
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let row: Row = serde_json::from_str(l).unwrap();
            Pair {
                premise: formula(&row.premise),
                hypothesis: formula(&row.hypothesis),
                id: row.id,
                gold: row.gold,
            }
        })
        .collect()
}

pub fn pair(name: &str, id: &str) -> Pair {
    pairs(name).into_iter().find(|p| p.id == id).unwrap()
}

pub fn relations() -> KnowledgeBase {
    KnowledgeBase::load_word_relations(data("relations.tsv")).unwrap()
}

pub fn extract(p: &Pair, kb: &KnowledgeBase) -> Vec<Axiom> {
    let cfg = EngineConfig::default().with_mode(Mode::W2wP2p);
    extract_from_pair(&p.premise, &p.hypothesis, p.gold, kb, &cfg).unwrap()
}

/// Relations plus every axiom extracted from the training fixtures.
pub fn trained_kb() -> KnowledgeBase {
    let mut kb = relations();
    let learned: Vec<Axiom> = pairs("train.jsonl").iter().flat_map(|p| extract(p, &relations())).collect();
    for ax in learned {
        kb.insert_axiom(ax);
    }
    kb
}

/// The maximal basic subformulas of `f`.
pub fn basic_parts(f: &Formula) -> Vec<&Formula> {
    if f.is_basic() {
        return vec![f];
    }
    match f {
        Formula::And(ps) => ps.iter().flat_map(basic_parts).collect(),
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => basic_parts(a),
        Formula::Or(a, b) | Formula::Implies(a, b) => {
            let mut out = basic_parts(a);
            out.extend(basic_parts(b));
            out
        }
        Formula::Atom(_) | Formula::False => Vec::new(),
    }
}
