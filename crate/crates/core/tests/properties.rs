mod common;

use std::collections::BTreeSet;

use common::*;
use entail_core::axiom::Axiom;
use entail_core::graph::{from_graph, to_graph};
use entail_core::phrase::{align, reach};
use entail_core::prover::{oracle_entails, prove, replay, unify_search, Direction, ProofState, Substitution};
use entail_core::{
    decompose_basic, normalize, parse_formula, print_formula, Atom, Edge, EngineConfig, KnowledgeBase, Mode, SemGraph,
    Term, Variable,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn brute_reach(v: Variable, g: &SemGraph) -> BTreeSet<Edge> {
    let plain: Vec<&Edge> = g.edges.iter().filter(|e| !e.label.is_role()).collect();
    let mut vars = BTreeSet::from([v]);
    loop {
        let before = vars.len();
        for e in &plain {
            let ev: BTreeSet<Variable> = e.var_vertices().collect();
            if !ev.is_disjoint(&vars) {
                vars.extend(ev);
            }
        }
        if vars.len() == before {
            break;
        }
    }
    plain.into_iter().filter(|e| e.var_vertices().any(|x| vars.contains(&x))).cloned().collect()
}

fn random_graph(r: &mut ChaCha8Rng) -> SemGraph {
    let atoms = gen::basic_set(r, 8);
    let vars: Vec<Variable> = atoms.variables.iter().copied().collect();
    let unified: BTreeSet<Variable> = vars.into_iter().filter(|_| r.gen_bool(0.4)).collect();
    to_graph(&atoms, &EngineConfig::default()).unwrap().with_unified(&unified)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let f = gen::formula(&mut rng(seed), seed % 2 == 0);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, &EngineConfig::default()).unwrap(), f);
    }

    #[test]
    fn normalize_is_idempotent(seed in any::<u64>()) {
        let cfg = EngineConfig::default();
        let f = gen::formula(&mut rng(seed), false);
        let once = normalize(&f, &cfg).unwrap();
        prop_assert_eq!(normalize(&once, &cfg).unwrap(), once);
    }

    #[test]
    fn graph_round_trip_is_equivalent(seed in any::<u64>()) {
        let cfg = EngineConfig::default();
        let f = normalize(&gen::formula(&mut rng(seed), true), &cfg).unwrap();
        let atoms = decompose_basic(&f).unwrap();
        let flat = atoms.flatten_functional();
        let graph = to_graph(&atoms, &cfg).unwrap();
        let back = decompose_basic(&from_graph(&graph).unwrap()).unwrap();
        prop_assert!(oracle_entails(&flat, &back).unwrap());
        prop_assert!(oracle_entails(&back, &flat).unwrap());
    }

    #[test]
    fn axiom_records_round_trip(seed in any::<u64>()) {
        let ax = gen::axiom(&mut rng(seed), (seed % 1000) as usize);
        let back = Axiom::from_record(&ax.to_record(), &EngineConfig::default()).unwrap();
        prop_assert_eq!(back, ax);
    }

    #[test]
    fn alpha_equivalence_ignores_names(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ant = gen::basic_set(&mut r, 3);
        let cons = gen::basic_set(&mut r, 2);
        let shift = |v: Variable| Term::var(Variable::new(v.sort, v.index * 3 + 7));
        let a = Axiom::new(ant.iter().cloned(), cons.iter().cloned());
        let b = Axiom::new(ant.iter().map(|x| x.rename(&shift)), cons.iter().map(|x| x.rename(&shift)));
        prop_assert!(a.alpha_eq(&b));
        prop_assert!(b.alpha_eq(&a));
    }

    #[test]
    fn unification_branches_replay_and_keep_sorts(seed in any::<u64>()) {
        let mut r = rng(seed);
        let premises = gen::basic_set(&mut r, 6);
        let goals = if r.gen_bool(0.5) { gen::entailed_goal(&mut r, &premises) } else { gen::basic_set(&mut r, 4) };
        let goals = {
            let shift = |v: Variable| Term::var(Variable::new(v.sort, v.index + 20));
            let mut g: entail_core::AtomSet = goals.iter().map(|a| a.rename(&shift)).collect();
            g.variables = g.iter().flat_map(Atom::vars).collect();
            g
        };
        let want = oracle_entails(&premises, &goals).unwrap();
        let state = ProofState::new(premises, goals.clone(), goals.variables.clone());
        let branches = unify_search(&state, &EngineConfig::default()).unwrap();
        prop_assert!(!branches.is_empty());
        for b in &branches {
            prop_assert!(replay(b).is_ok(), "{:?}", replay(b));
            let s: &Substitution = &b.subst;
            prop_assert!(s.iter().all(|(v, t)| v.sort == t.sort()));
        }
        prop_assert_eq!(branches.iter().any(ProofState::is_proved), want);
    }

    #[test]
    fn prover_agrees_with_oracle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let cfg = EngineConfig::default().with_mode(Mode::None);
        let premises = gen::basic_set(&mut r, 6);
        let goal = if r.gen_bool(0.5) { gen::entailed_goal(&mut r, &premises) } else { gen::basic_set(&mut r, 6) };
        let want = oracle_entails(&premises, &goal).unwrap();
        let t = normalize(&premises.to_formula().unwrap(), &cfg).unwrap();
        let h = normalize(&goal.to_formula().unwrap(), &cfg).unwrap();
        let res = prove(&t, &h, Direction::Entail, &KnowledgeBase::new(), &cfg).unwrap();
        prop_assert_eq!(res.is_proved(), want);
    }

    #[test]
    fn reach_matches_brute_force(seed in any::<u64>()) {
        let g = random_graph(&mut rng(seed));
        for &v in &g.non_unified {
            prop_assert_eq!(reach(v, &g).unwrap(), brute_reach(v, &g));
        }
        for &v in &g.unified {
            prop_assert!(reach(v, &g).is_err());
        }
    }

    #[test]
    fn alignment_partitions_the_goal_edges(seed in any::<u64>()) {
        let mut r = rng(seed);
        let goal = random_graph(&mut r);
        let premise = to_graph(&gen::basic_set(&mut r, 6), &EngineConfig::default()).unwrap();
        let result = align(&premise, &goal, &Substitution::new());
        let groups: Vec<_> = result.partitions.iter().chain(&result.residual).collect();
        let mut seen: BTreeSet<&Edge> = BTreeSet::new();
        for g in &groups {
            for e in &g.reach {
                prop_assert!(seen.insert(e), "edge {} in two groups", e);
            }
            prop_assert!(g.corr.iter().all(|e| premise.edges.contains(e) && !e.label.is_role()));
        }
        let plain: BTreeSet<&Edge> = goal.edges.iter().filter(|e| !e.label.is_role()).collect();
        prop_assert_eq!(seen, plain);
        let mut members: BTreeSet<Variable> = BTreeSet::new();
        for p in &result.partitions {
            prop_assert!(p.members.is_disjoint(&members));
            members.extend(p.members.iter().copied());
        }
        let touched: BTreeSet<Variable> = goal
            .edges
            .iter()
            .filter(|e| !e.label.is_role())
            .flat_map(|e| e.var_vertices().collect::<Vec<_>>())
            .filter(|v| goal.non_unified.contains(v))
            .collect();
        prop_assert!(touched.is_subset(&members));
    }
}
