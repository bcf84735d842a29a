//! Generators shared by the property and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use mtw_core::structures::Structure;
use mtw_core::syntax::{Formula, Quantifier, Term, Vocabulary};
use proptest::prelude::*;
use rand::Rng;

pub const VARS: [&str; 3] = ["x", "y", "z"];

/// `R: 0 0`, `P: 0`.
pub fn rp_vocabulary() -> Vocabulary {
    Vocabulary::new().with_sort(0).with_relation("R", &[0, 0]).with_relation("P", &[0])
}

pub fn structure_from(n: u32, edges: &[(u32, u32)], marked: &[u32]) -> Structure {
    let mut m = Structure::on_elements(Vocabulary::new(), n);
    m.set_relation("R", &[0, 0], edges.iter().filter(|(a, b)| *a < n && *b < n).map(|(a, b)| vec![*a, *b]));
    m.set_relation("P", &[0], marked.iter().filter(|a| **a < n).map(|a| vec![*a]));
    m
}

/// Structures over `R: 0 0`, `P: 0` with 1 to `max` elements.
pub fn rp_structure(max: u32) -> impl Strategy<Value = Structure> {
    (1..=max).prop_flat_map(|n| {
        let pairs: Vec<(u32, u32)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        (
            Just(n),
            proptest::sample::subsequence(pairs.clone(), 0..=pairs.len()),
            proptest::sample::subsequence((0..n).collect::<Vec<_>>(), 0..=n as usize),
        )
            .prop_map(|(n, edges, marked)| structure_from(n, &edges, &marked))
    })
}

fn var(i: usize) -> Term {
    Term::var(VARS[i], 0)
}

/// Formulas over `R`, `P` and equality with variables `x, y, z`, possibly open.
pub fn rp_formula(depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        (0..3usize, 0..3usize).prop_map(|(a, b)| Formula::atom("R", vec![var(a), var(b)])),
        (0..3usize).prop_map(|a| Formula::atom("P", vec![var(a)])),
        (0..3usize, 0..3usize).prop_map(|(a, b)| Formula::eq(var(a), var(b))),
        Just(Formula::Top),
        Just(Formula::Bottom),
    ];
    leaf.prop_recursive(depth, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Formula::Or),
            (0..4u32, 0..3usize, inner).prop_map(|(q, v, body)| {
                let q = match q {
                    0 | 1 => Quantifier::Forall,
                    2 => Quantifier::Exists,
                    _ => Quantifier::AtLeast(2),
                };
                Formula::quant(q, VARS[v], 0, body)
            }),
        ]
    })
}

/// Binds the free variables of `f`, alternately universally and existentially.
pub fn close(f: Formula) -> Formula {
    let mut g = f;
    for (i, (v, s)) in g.free_vars().into_iter().enumerate() {
        g = if i % 2 == 0 { Formula::forall(&v, s, g) } else { Formula::exists(&v, s, g) };
    }
    g
}

pub fn rp_sentence(depth: u32) -> impl Strategy<Value = Formula> {
    rp_formula(depth).prop_map(close)
}

/// Random propositional formula over `letters`.
pub fn random_prop(rng: &mut impl Rng, letters: &[&str], depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return Formula::prop(letters[rng.gen_range(0..letters.len())]);
    }
    match rng.gen_range(0..4) {
        0 => Formula::not(random_prop(rng, letters, depth - 1)),
        1 => Formula::And(vec![random_prop(rng, letters, depth - 1), random_prop(rng, letters, depth - 1)]),
        2 => Formula::Or(vec![random_prop(rng, letters, depth - 1), random_prop(rng, letters, depth - 1)]),
        _ => Formula::implies(random_prop(rng, letters, depth - 1), random_prop(rng, letters, depth - 1)),
    }
}

pub fn prop_formula(letters: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = proptest::sample::select(letters).prop_map(Formula::prop);
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            proptest::collection::vec(inner.clone(), 2).prop_map(Formula::And),
            proptest::collection::vec(inner.clone(), 2).prop_map(Formula::Or),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
        ]
    })
}

/// Proposition letters of a propositional formula.
pub fn letters(f: &Formula) -> BTreeSet<String> {
    f.vocabulary().relations.keys().cloned().collect()
}

/// Truth value of a propositional formula; `true_letters` lists the true letters.
pub fn truth(f: &Formula, true_letters: &BTreeSet<String>) -> bool {
    match f {
        Formula::Atom { rel, .. } => true_letters.contains(rel),
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !truth(g, true_letters),
        Formula::And(fs) => fs.iter().all(|g| truth(g, true_letters)),
        Formula::Or(fs) => fs.iter().any(|g| truth(g, true_letters)),
        other => panic!("not propositional: {other}"),
    }
}

/// All subsets of `letters`.
pub fn assignments(letters: &[String]) -> Vec<BTreeSet<String>> {
    (0u32..1 << letters.len())
        .map(|mask| (0..letters.len()).filter(|i| mask >> i & 1 == 1).map(|i| letters[i].clone()).collect())
        .collect()
}
