mod common;

use common::*;
use entail_core::prover::{ProofStep, Rule};
use entail_core::{classify, AxiomMode, EngineConfig, KnowledgeBase, Label, Mode};

fn has(learned: &[entail_core::Axiom], text: &str) -> bool {
    let want = axiom(text);
    learned.iter().any(|a| a.alpha_eq(&want))
}

#[test]
fn lady_meat_extracts_one_word_and_one_phrase_axiom() {
    let learned = extract(&pair("train.jsonl", "lady-meat"), &relations());
    assert_eq!(learned.len(), 2);
    assert_eq!(learned[0].mode(), Some(AxiomMode::Word));
    assert_eq!(learned[0].to_string(), "forall x1 (lady(x1) -> woman(x1))");
    assert_eq!(learned[1].mode(), Some(AxiomMode::Phrase));
    assert_eq!(
        learned[1].to_string(),
        "forall y1 ((cut(y1) & precisely(y1) & up(y1)) -> exists x1 (into(y1,x1) & piece(x1)))"
    );
}

#[test]
fn contradiction_extraction_carries_gold_no() {
    let learned = extract(&pair("train.jsonl", "man-potato"), &relations());
    assert!(has(&learned, "forall y1 (cut(y1) -> slice(y1))"));
    assert!(learned.iter().all(|a| a.provenance.as_ref().unwrap().gold == Some(Label::No)));
}

#[test]
fn jump_on_trampoline_is_in_the_air() {
    let learned = extract(&pair("train.jsonl", "boy-air"), &relations());
    assert!(has(&learned, "forall x1 (child(x1) -> boy(x1))"));
    assert!(has(&learned, "forall x1 (outfit(x1) -> clothes(x1))"));
    let air = learned
        .iter()
        .find(|a| a.consequent.iter().any(|c| c.predicate() == "air"))
        .expect("no axiom for `in the air`");
    assert!(air.antecedent.iter().any(|c| c.predicate() == "jump"));
    assert!(air.existential.len() == 1);
}

#[test]
fn talk_on_phone_makes_a_call() {
    let learned = extract(&pair("train.jsonl", "make-call"), &relations());
    assert!(has(&learned, "forall x1 y1 ((talk(y1) & on(y1,x1) & phone(x1)) -> make(y1))"));
    assert!(has(&learned, "forall x1 y1 ((talk(y1) & on(y1,x1) & phone(x1)) -> call(obj(y1)))"));
}

#[test]
fn modes_are_monotone_on_the_mini_suite() {
    let kb = trained_kb();
    let proved = |mode: Mode| -> Vec<String> {
        let cfg = EngineConfig::default().with_mode(mode);
        pairs("mini_suite.jsonl")
            .into_iter()
            .filter(|p| classify(&p.premise, &p.hypothesis, &kb, &cfg).unwrap().label != Label::Unknown)
            .map(|p| p.id)
            .collect()
    };
    let (none, w2w, all) = (proved(Mode::None), proved(Mode::W2w), proved(Mode::W2wP2p));
    assert!(none.iter().all(|id| w2w.contains(id)));
    assert!(w2w.iter().all(|id| all.contains(id)));
    assert!(w2w.len() < all.len());
    assert!(none.len() < w2w.len());
}

#[test]
fn stored_phrase_axioms_need_phrase_mode() {
    let kb = trained_kb();
    let p = pair("mini_suite.jsonl", "p1");
    let w2w = classify(&p.premise, &p.hypothesis, &kb, &EngineConfig::default().with_mode(Mode::W2w)).unwrap();
    assert_eq!(w2w.label, Label::Unknown);
    let full = classify(&p.premise, &p.hypothesis, &kb, &EngineConfig::default()).unwrap();
    assert_eq!(full.label, Label::Yes);
    let applied = full
        .entail
        .obligations
        .iter()
        .flat_map(|s| &s.trace)
        .any(|s| matches!(s, ProofStep::AxiomApply { .. }));
    assert!(applied);
}

#[test]
fn antonyms_give_contradictions() {
    let p = pair("mini_suite.jsonl", "n3");
    let c = classify(&p.premise, &p.hypothesis, &relations(), &EngineConfig::default()).unwrap();
    assert_eq!(c.label, Label::No);
    let none = classify(&p.premise, &p.hypothesis, &relations(), &EngineConfig::default().with_mode(Mode::None)).unwrap();
    assert_eq!(none.label, Label::Unknown);
}

#[test]
fn negated_text_uses_not_elimination() {
    let p = pair("mini_suite.jsonl", "n1");
    let c = classify(&p.premise, &p.hypothesis, &KnowledgeBase::new(), &EngineConfig::default()).unwrap();
    assert_eq!(c.label, Label::No);
    let rules: Vec<&Rule> = c
        .contradict
        .obligations
        .iter()
        .flat_map(|s| &s.trace)
        .filter_map(|s| match s {
            ProofStep::RuleApp(r) => Some(r),
            _ => None,
        })
        .collect();
    assert!(rules.iter().any(|r| matches!(r, Rule::NotIntro | Rule::NotElim)), "{rules:?}");
}

#[test]
fn proofs_replay() {
    let kb = trained_kb();
    for p in pairs("mini_suite.jsonl") {
        let c = classify(&p.premise, &p.hypothesis, &kb, &EngineConfig::default()).unwrap();
        let res = if c.label == Label::Yes { &c.entail } else { &c.contradict };
        for st in &res.obligations {
            if st.is_proved() {
                entail_core::prover::replay(st).unwrap_or_else(|e| panic!("{}: {e}", p.id));
            }
        }
    }
}
