//! Propositional helpers: truth tables over proposition letters and the
//! smallest formula whose truth table lies between two bounds.

use std::collections::{BTreeMap, BTreeSet};

use crate::structures::Structure;
use crate::syntax::{Formula, Vocabulary};

/// Letters per truth table; beyond this the enumeration is refused.
pub const MAX_LETTERS: usize = 20;

pub type Valuation = BTreeSet<String>;

/// No quantifiers, no equality, every relation of arity zero.
pub fn is_propositional(f: &Formula) -> bool {
    let mut ok = true;
    f.walk(&mut |g| match g {
        Formula::Atom { args, .. } if !args.is_empty() => ok = false,
        Formula::Eq(..) | Formula::Quant { .. } => ok = false,
        _ => {}
    });
    ok
}

pub fn letters(f: &Formula) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    f.walk(&mut |g| {
        if let Formula::Atom { rel, .. } = g {
            out.insert(rel.clone());
        }
    });
    out
}

pub fn letters_of(fs: &[Formula]) -> BTreeSet<String> {
    fs.iter().flat_map(letters).collect()
}

pub fn eval(f: &Formula, v: &Valuation) -> bool {
    match f {
        Formula::Atom { rel, .. } => v.contains(rel),
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !eval(g, v),
        Formula::And(fs) => fs.iter().all(|g| eval(g, v)),
        Formula::Or(fs) => fs.iter().any(|g| eval(g, v)),
        Formula::Eq(..) | Formula::Quant { .. } => unreachable!("not propositional"),
    }
}

/// Every valuation of `vars`, in binary counting order with the first
/// letter as the lowest bit.
pub fn valuations(vars: &[String]) -> impl Iterator<Item = Valuation> + '_ {
    assert!(vars.len() <= MAX_LETTERS, "too many letters for a truth table");
    (0u64..(1 << vars.len())).map(move |m| {
        vars.iter()
            .enumerate()
            .filter(|(i, _)| m >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect()
    })
}

/// A valuation satisfying every formula, if one exists.
pub fn satisfiable(fs: &[Formula]) -> Option<Valuation> {
    let vars: Vec<String> = letters_of(fs).into_iter().collect();
    let found = valuations(&vars).find(|v| fs.iter().all(|f| eval(f, v)));
    found
}

/// `Ok` when the premises entail the conclusion, else a countervaluation.
pub fn entails(premises: &[Formula], conclusion: &Formula) -> Result<(), Valuation> {
    let mut fs = premises.to_vec();
    fs.push(Formula::not(conclusion.clone()));
    match satisfiable(&fs) {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

/// The valuation as a one-element structure over `voc`.
pub fn valuation_model(voc: &Vocabulary, v: &Valuation) -> Structure {
    let mut m = Structure::on_elements(voc.clone(), 1);
    for p in voc.relations.keys() {
        let tuples = if v.contains(p) { vec![vec![]] } else { vec![] };
        m.set_relation(p, &[], tuples);
    }
    m
}

/// Rows of the truth table of `f` over `vars` (bit `i` of the row index is
/// the value of `vars[i]`) as a bit mask.
pub fn table(f: &Formula, vars: &[String]) -> u64 {
    assert!(vars.len() <= 6, "table masks hold at most 6 letters");
    valuations(vars)
        .enumerate()
        .filter(|(_, v)| eval(f, v))
        .fold(0, |m, (i, _)| m | 1 << i)
}

/// Rows over the visible letters `vars` that extend to a model of `f`.
pub fn projection(f: &Formula, vars: &[String]) -> u64 {
    let hidden: Vec<String> = letters(f).into_iter().filter(|p| !vars.contains(p)).collect();
    let mut mask = 0;
    for (i, v) in valuations(vars).enumerate() {
        let extends = valuations(&hidden).any(|h| {
            let mut w = v.clone();
            w.extend(h);
            eval(f, &w)
        });
        if extends {
            mask |= 1 << i;
        }
    }
    mask
}

/// Rows over `vars` all of whose extensions satisfy `f`.
pub fn universal_projection(f: &Formula, vars: &[String]) -> u64 {
    let full = if vars.len() == 6 { u64::MAX } else { (1 << (1 << vars.len())) - 1 };
    full & !projection(&Formula::not(f.clone()), vars)
}

/// The formula listing the rows of `mask` as conjunctions of literals.
pub fn dnf(mask: u64, vars: &[String]) -> Formula {
    let rows: Vec<Formula> = valuations(vars)
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, v)| {
            Formula::and(
                vars.iter()
                    .map(|p| {
                        if v.contains(p) {
                            Formula::prop(p)
                        } else {
                            Formula::not(Formula::prop(p))
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    Formula::or(rows)
}

/// Cap on candidate formulas built while searching for a small formula.
const SEARCH_BUDGET: usize = 2_000_000;

/// The smallest formula over `vars` (at most 3 letters) whose table `t`
/// satisfies `lo ⊆ t ⊆ hi`, by node count and then formula order, among
/// formulas of at most `max_size` nodes. And/Or take two or more
/// arguments and do not nest in themselves.
pub fn smallest_between(vars: &[String], lo: u64, hi: u64, max_size: usize) -> Option<Formula> {
    assert!(vars.len() <= 3);
    let rows = 1usize << vars.len();
    let full: u64 = (1 << rows) - 1;
    let fits = |t: u64| t & lo == lo && t & !hi & full == 0;
    // best[t] = least formula of minimal size with table t
    let mut best: BTreeMap<u64, (usize, Formula)> = BTreeMap::new();
    let mut by_size: Vec<Vec<(u64, Formula)>> = vec![vec![]; max_size + 1];
    let mut leaves = vec![(full, Formula::Top), (0, Formula::Bottom)];
    for p in vars {
        leaves.push((table(&Formula::prop(p), vars), Formula::prop(p)));
    }
    let mut budget = SEARCH_BUDGET;
    for n in 1..=max_size {
        let mut found: BTreeMap<u64, Formula> = BTreeMap::new();
        let mut offer = |t: u64, f: Formula, best: &BTreeMap<u64, (usize, Formula)>| {
            if best.contains_key(&t) {
                return;
            }
            match found.get(&t) {
                Some(g) if *g <= f => {}
                _ => {
                    found.insert(t, f);
                }
            }
        };
        if n == 1 {
            for (t, f) in &leaves {
                offer(*t, f.clone(), &best);
            }
        } else {
            for (t, f) in &by_size[n - 1] {
                offer(full & !t, Formula::not(f.clone()), &best);
            }
            // Lists of two or more children whose sizes sum to n - 1.
            let reps: Vec<(usize, u64, Formula)> = (1..n - 1)
                .flat_map(|s| by_size[s].iter().map(move |(t, f)| (s, *t, f.clone())))
                .collect();
            for conj in [true, false] {
                let mut stack: Vec<(usize, usize, u64, Vec<usize>)> = vec![(0, n - 1, if conj { full } else { 0 }, vec![])];
                while let Some((start, left, acc, picked)) = stack.pop() {
                    if left == 0 {
                        if picked.len() >= 2 {
                            let fs: Vec<Formula> = picked.iter().map(|i| reps[*i].2.clone()).collect();
                            let f = if conj { Formula::And(fs) } else { Formula::Or(fs) };
                            offer(acc, f, &best);
                        }
                        continue;
                    }
                    if budget == 0 {
                        return None;
                    }
                    budget -= 1;
                    for (i, (s, t, f)) in reps.iter().enumerate().skip(start) {
                        if *s > left {
                            continue;
                        }
                        let nested = matches!((conj, f), (true, Formula::And(_)) | (false, Formula::Or(_)));
                        if nested {
                            continue;
                        }
                        let acc = if conj { acc & t } else { acc | t };
                        let mut p = picked.clone();
                        p.push(i);
                        stack.push((i, left - s, acc, p));
                    }
                }
            }
        }
        let hit = found.iter().filter(|(t, _)| fits(**t)).map(|(_, f)| f).min().cloned();
        for (t, f) in found {
            best.insert(t, (n, f.clone()));
            by_size[n].push((t, f));
        }
        if hit.is_some() {
            return hit;
        }
    }
    None
}
