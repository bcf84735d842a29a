mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::*;
use mtw_core::games::{ef_solve, efq_solve, shelah_solve, verify_strategy, EfGame, Player, Solver};
use mtw_core::interpolation::{
    craig, craig_sorted, prop, robinson_join, separate, verify_interpolant, InterpolationBounds,
    InterpolationResult, PcClass, RobinsonInput, RobinsonResult, SeparationResult,
};
use mtw_core::semantics::{
    entails_bounded, find_model, hintikka_rank_formula, rank_classes, relativize_formula, satisfies,
    satisfies_sentence, Assignment, EntailOptions, EntailmentVerdict,
};
use mtw_core::structures::{isomorphism, pure_set, Structure};
use mtw_core::syntax::{dual_negation, parse_open_formula, rename, un_ex_sorts, Formula, Term, Vocabulary};
use mtw_core::tableau::{check_hintikka, prove, replay, term_model, TableauBounds, TableauVerdict};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

/// Every assignment of the free variables of `f` into `m`.
fn assignments_for(m: &Structure, f: &Formula) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for (v, s) in f.free_vars() {
        out = out
            .into_iter()
            .flat_map(|a| {
                m.domain(s)
                    .iter()
                    .map(|e| {
                        let mut b = a.clone();
                        b.insert(v.clone(), (s, *e));
                        b
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

fn same_shape(a: &Structure, b: &Structure) -> bool {
    a.voc == b.voc && a.domains == b.domains && a.relations == b.relations && a.constants == b.constants
}

/// A copy of `m` with its elements permuted by `perm` (indices into the universe).
fn permuted(m: &Structure, perm: &[usize]) -> (Structure, BTreeMap<u32, u32>) {
    let univ: Vec<u32> = m.universe().into_iter().collect();
    let map: BTreeMap<u32, u32> = univ.iter().enumerate().map(|(i, e)| (*e, univ[perm[i] % univ.len()])).collect();
    let image: BTreeSet<u32> = map.values().copied().collect();
    if image.len() != univ.len() {
        return (m.clone(), univ.iter().map(|e| (*e, *e)).collect());
    }
    (m.map_elements(&map), map)
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn vocabulary_of_connectives(f in rp_formula(3), g in rp_formula(3)) {
        let both = Formula::And(vec![f.clone(), g.clone()]);
        prop_assert_eq!(both.vocabulary(), f.vocabulary().union(&g.vocabulary()).unwrap());
        prop_assert_eq!(Formula::not(f.clone()).vocabulary(), f.vocabulary());
    }

    #[test]
    fn dual_negation_is_an_involution(f in rp_formula(3)) {
        prop_assume!(matches!(f, Formula::And(_) | Formula::Or(_) | Formula::Quant { .. } | Formula::Top | Formula::Bottom));
        let norm = |g: &Formula| g.strip_double_negations().alpha_normalize();
        prop_assert_eq!(norm(&dual_negation(&dual_negation(&f))), norm(&f));
    }

    #[test]
    fn un_ex_sorts_ignore_symbol_names(f in rp_formula(3)) {
        let map: BTreeMap<String, String> = [("R".to_string(), "S".to_string()), ("P".to_string(), "T".to_string())].into();
        let g = rename(&f, &map, &Vocabulary::new()).unwrap();
        prop_assert_eq!(un_ex_sorts(&g), un_ex_sorts(&f));
        prop_assert!(!g.vocabulary().contains_symbol("R"));
    }

    #[test]
    fn print_then_parse_is_identity(f in rp_formula(4)) {
        let text = f.to_string();
        let free = [("x", 0), ("y", 0), ("z", 0)];
        let canonical = f.alpha_normalize();
        prop_assert_eq!(parse_open_formula(&text, &rp_vocabulary(), &free).unwrap(), canonical.clone());
        let again = parse_open_formula(&canonical.to_string(), &rp_vocabulary(), &free).unwrap();
        prop_assert_eq!(again, canonical);
    }

    #[test]
    fn reducts_compose(m in rp_structure(4)) {
        let mut m = m;
        m.set_relation("Q", &[0], [vec![0]]);
        let sigma = Vocabulary::new().with_sort(0).with_relation("R", &[0, 0]).with_relation("P", &[0]);
        let sigma2 = Vocabulary::new().with_sort(0).with_relation("P", &[0]);
        let step = m.reduct(&sigma).unwrap().reduct(&sigma2).unwrap();
        prop_assert_eq!(step, m.reduct(&sigma2).unwrap());
    }

    #[test]
    fn relativize_full_domain_and_idempotent(m in rp_structure(4), keep in proptest::collection::btree_set(0u32..4, 1..=4)) {
        prop_assert_eq!(m.relativize(0, m.domain(0)).unwrap(), m.clone());
        let keep: BTreeSet<u32> = keep.into_iter().filter(|e| m.domain(0).contains(e)).collect();
        prop_assume!(!keep.is_empty());
        let once = m.relativize(0, &keep).unwrap();
        prop_assert_eq!(once.relativize(0, &keep).unwrap(), once);
    }

    #[test]
    fn isomorphism_is_an_equivalence(m in rp_structure(4), p1 in proptest::collection::vec(0usize..4, 4), p2 in proptest::collection::vec(0usize..4, 4)) {
        let id = isomorphism(&m, &m).unwrap().unwrap();
        prop_assert!(same_shape(&m.map_elements(&id), &m));
        let (n, _) = permuted(&m, &p1);
        let (k, _) = permuted(&n, &p2);
        let f = isomorphism(&m, &n).unwrap().expect("a permuted copy is isomorphic");
        prop_assert!(same_shape(&m.map_elements(&f), &n));
        let inverse: BTreeMap<u32, u32> = f.iter().map(|(a, b)| (*b, *a)).collect();
        prop_assert!(same_shape(&n.map_elements(&inverse), &m));
        prop_assert!(isomorphism(&n, &m).unwrap().is_some());
        let g = isomorphism(&n, &k).unwrap().unwrap();
        let composed: BTreeMap<u32, u32> = f.iter().map(|(a, b)| (*a, g[b])).collect();
        prop_assert!(same_shape(&m.map_elements(&composed), &k));
    }

    #[test]
    fn disjoint_union_sizes(ms in proptest::collection::vec(rp_structure(3), 1..4)) {
        let u = Structure::disjoint_union(&ms).unwrap();
        prop_assert_eq!(u.domain(0).len(), ms.iter().map(|m| m.domain(0).len()).sum::<usize>());
    }

    #[test]
    fn dual_negation_flips_truth(m in rp_structure(3), f in rp_formula(3)) {
        let d = dual_negation(&f);
        for asg in assignments_for(&m, &f) {
            prop_assert_eq!(satisfies(&m, &d, &asg).unwrap(), !satisfies(&m, &f, &asg).unwrap());
        }
    }

    #[test]
    fn rank_formula_holds_in_its_structure(m in rp_structure(3), n in 0usize..=2) {
        let h = hintikka_rank_formula(&m, n).unwrap();
        prop_assert!(satisfies_sentence(&m, &h).unwrap());
    }

    #[test]
    fn relativization_matches_substructure(m in rp_structure(4), f in rp_sentence(3)) {
        let marked = m.relations["P"].iter().map(|t| t[0]).collect::<BTreeSet<u32>>();
        prop_assume!(!marked.is_empty());
        let guard = Formula::atom("P", vec![Term::var("g", 0)]);
        let rel = relativize_formula(&f, &guard).unwrap();
        let sub = m.relativize(0, &marked).unwrap();
        prop_assert_eq!(satisfies_sentence(&m, &rel).unwrap(), satisfies_sentence(&sub, &f).unwrap());
    }

    #[test]
    fn countermodels_re_verify(premise in rp_sentence(2), conclusion in rp_sentence(2)) {
        let verdict = entails_bounded(std::slice::from_ref(&premise), &conclusion, 2, &EntailOptions::default()).unwrap();
        if let EntailmentVerdict::Countermodel(m, asg) = verdict {
            prop_assert!(satisfies(&m, &premise, &asg).unwrap());
            prop_assert!(!satisfies(&m, &conclusion, &asg).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn rank_classes_refine(ms in proptest::collection::vec(rp_structure(3), 2..6)) {
        let coarse = rank_classes(&ms, 1).unwrap();
        let fine = rank_classes(&ms, 2).unwrap();
        for class in &fine {
            prop_assert!(coarse.iter().any(|c| class.iter().all(|i| c.contains(i))));
        }
    }

    #[test]
    fn ef_symmetric_and_monotone(m in rp_structure(3), n in rp_structure(3)) {
        let mut last = Player::Duplicator;
        for r in 0..=2 {
            let a = ef_solve(&m, &n, r).unwrap();
            let b = ef_solve(&n, &m, r).unwrap();
            prop_assert_eq!(a.winner, b.winner);
            if last == Player::Spoiler {
                prop_assert_eq!(a.winner, Player::Spoiler);
            }
            last = a.winner;
            verify_strategy(&EfGame::new(&m, &n, r).unwrap(), &a).unwrap();
        }
    }

    #[test]
    fn singleton_threshold_game_is_ef(a in 1u32..=4, b in 1u32..=4, r in 0usize..=2) {
        let (m, n) = (pure_set(a), pure_set(b));
        prop_assert_eq!(efq_solve(&m, &n, r, 1).unwrap().winner, ef_solve(&m, &n, r).unwrap().winner);
    }

    #[test]
    fn shelah_isomorphic_copies(m in rp_structure(2), perm in proptest::collection::vec(0usize..2, 2), beta in 0usize..=2, theta in 0usize..=2) {
        let mut m = m;
        m.relations.remove("R");
        m.voc.relations.remove("R");
        let (n, _) = permuted(&m, &perm);
        prop_assert_eq!(shelah_solve(&m, &n, beta, theta).unwrap().winner, Player::Duplicator);
    }

    #[test]
    fn tableau_verdicts_check_out(f in rp_sentence(3), g in rp_sentence(2)) {
        let gamma = [f.clone(), g.clone()];
        let gamma = gamma.iter().map(Formula::expand_thresholds).collect::<Vec<_>>();
        let bounds = TableauBounds::default();
        let verdict = prove(&gamma, bounds).unwrap();
        prop_assert_eq!(&prove(&gamma, bounds).unwrap(), &verdict);
        match verdict {
            TableauVerdict::Closed(tree) => {
                replay(&tree).unwrap();
                let voc = rp_vocabulary();
                prop_assert!(find_model(&voc, &gamma, 3, &EntailOptions::default()).unwrap().is_none());
            }
            TableauVerdict::Satisfiable { hintikka, model, .. } => {
                prop_assert!(check_hintikka(&hintikka).is_empty());
                let tm = term_model(&hintikka).unwrap();
                for root in &gamma {
                    prop_assert!(satisfies_sentence(&tm, root).unwrap());
                    prop_assert!(satisfies_sentence(&model, root).unwrap());
                }
            }
            TableauVerdict::Unknown(_) => {}
        }
    }

    #[test]
    fn propositional_interpolants_verify(a in prop_formula(&["p", "q", "r"], 3), b in prop_formula(&["q", "r", "s"], 3)) {
        // Make the implication valid by weakening the conclusion.
        let psi = Formula::Or(vec![b, a.clone()]);
        let bounds = InterpolationBounds::default();
        match craig(&a, &psi, &bounds).unwrap() {
            InterpolationResult::Interpolant { theta, report, .. } => {
                prop_assert!(report.passes(), "{theta}");
                prop_assert!(letters(&theta).is_subset(&letters(&a)));
                let again = verify_interpolant(&a, &theta, &psi, &bounds);
                prop_assert!(again.passes());
            }
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn sorted_interpolants_respect_sorts(f in rp_sentence(2)) {
        let phi = Formula::And(vec![f.clone(), Formula::exists("x", 0, Formula::atom("P", vec![Term::var("x", 0)]))]);
        let psi = Formula::Or(vec![Formula::not(f), Formula::exists("y", 0, Formula::atom("P", vec![Term::var("y", 0)]))]);
        if let InterpolationResult::Interpolant { theta, report, .. } = craig_sorted(&phi, &psi, &InterpolationBounds::default()).unwrap() {
            let (un, ex) = un_ex_sorts(&theta);
            prop_assert!(un.is_subset(&un_ex_sorts(&phi).0));
            prop_assert!(ex.is_subset(&un_ex_sorts(&psi).1));
            prop_assert!(report.consistent());
        }
    }

    #[test]
    fn robinson_models_satisfy_all_theories(s0 in proptest::collection::vec(any::<bool>(), 2), f1 in prop_formula(&["p", "q", "a"], 2), f2 in prop_formula(&["p", "q", "b"], 2)) {
        let sigma0: Vec<Formula> = ["p", "q"].iter().zip(&s0).map(|(l, v)| if *v { Formula::prop(l) } else { Formula::not(Formula::prop(l)) }).collect();
        let voc = |ls: &[&str]| ls.iter().fold(Vocabulary::new(), |v, l| v.with_relation(l, &[]));
        let input = RobinsonInput {
            sigma0: sigma0.clone(),
            sigma1: vec![f1.clone()],
            sigma2: vec![f2.clone()],
            vocab0: voc(&["p", "q"]),
            vocab1: voc(&["p", "q", "a"]),
            vocab2: voc(&["p", "q", "b"]),
        };
        let all: Vec<Formula> = sigma0.iter().cloned().chain([f1, f2]).collect();
        match robinson_join(&input, &InterpolationBounds::default()) {
            Ok(RobinsonResult::Joint(m)) => {
                for f in &all {
                    prop_assert!(satisfies_sentence(&m, f).unwrap());
                }
            }
            Err(mtw_core::interpolation::InterpolationError::PremiseUnsatisfiable) => {
                prop_assert!(prop::satisfiable(&all).is_none());
            }
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn separations_check_by_truth_table(a in prop_formula(&["p", "q", "h"], 3)) {
        // The second class hides `h` differently and is disjoint from the first.
        let k0 = Formula::And(vec![a.clone(), Formula::prop("h")]);
        let k1 = Formula::And(vec![Formula::not(a.clone()), Formula::prop("k")]);
        let visible = Vocabulary::new().with_relation("p", &[]).with_relation("q", &[]);
        let c0 = PcClass { matrix: k0.clone(), visible: visible.clone() };
        let c1 = PcClass { matrix: k1.clone(), visible };
        let letters_pq = vec!["p".to_string(), "q".to_string()];
        let hidden0 = vec!["h".to_string()];
        let hidden1 = vec!["k".to_string()];
        let in_class = |k: &Formula, hidden: &[String], v: &BTreeSet<String>| {
            assignments(hidden).iter().any(|extra| {
                let w: BTreeSet<String> = v.union(extra).cloned().collect();
                truth(k, &w)
            })
        };
        let overlap = assignments(&letters_pq).iter().any(|v| in_class(&k0, &hidden0, v) && in_class(&k1, &hidden1, v));
        match separate(&c0, &c1, &InterpolationBounds::default()).unwrap() {
            SeparationResult::Separated { theta, .. } => {
                prop_assert!(!overlap);
                for v in assignments(&letters_pq) {
                    if in_class(&k0, &hidden0, &v) {
                        prop_assert!(truth(&theta, &v));
                    }
                    if in_class(&k1, &hidden1, &v) {
                        prop_assert!(!truth(&theta, &v));
                    }
                }
            }
            SeparationResult::Overlap(_) => prop_assert!(overlap),
            SeparationResult::Unknown(why) => prop_assert!(false, "{why}"),
        }
    }
}

#[test]
fn engine_moves_follow_solved_values() {
    // For small pairs, the solver's best move keeps a won position won.
    let m = structure_from(3, &[(0, 1), (1, 2)], &[0]);
    let n = structure_from(3, &[(0, 1), (1, 2)], &[1]);
    let g = EfGame::new(&m, &n, 2).unwrap();
    let s = Solver::new(&g);
    let mut state = mtw_core::games::Game::initial(&g);
    while let mtw_core::games::Status::ToMove(p) = mtw_core::games::Game::status(&g, &state) {
        let mv = s.best_move(&state).unwrap();
        let next = mtw_core::games::Game::apply(&g, &state, &mv);
        if s.value(&state) == p {
            assert_eq!(s.value(&next), p);
        }
        state = next;
    }
}
