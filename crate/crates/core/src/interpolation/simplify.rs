//! Equivalence-preserving clean-up of extracted interpolants.

use crate::syntax::{Formula, Quantifier, Term};

/// Flattens And/Or, absorbs constants, drops duplicates and double
/// negations, and eliminates `∃z (z = t ∧ …)` and `∀z (z ≠ t ∨ …)`.
/// Repeated until nothing changes.
pub fn simplify(f: &Formula) -> Formula {
    let mut cur = f.clone();
    for _ in 0..16 {
        let next = step(&cur);
        if next == cur {
            break;
        }
        cur = next;
    }
    cur
}

fn step(f: &Formula) -> Formula {
    match f {
        Formula::Eq(a, b) if a == b => Formula::Top,
        Formula::Not(g) => match step(g) {
            Formula::Top => Formula::Bottom,
            Formula::Bottom => Formula::Top,
            Formula::Not(h) => *h,
            g => Formula::not(g),
        },
        Formula::And(fs) => junction(fs, true),
        Formula::Or(fs) => junction(fs, false),
        Formula::Quant { q, var, sort, body } => {
            let body = step(body);
            if matches!(q, Quantifier::Forall | Quantifier::Exists) {
                if let Some(g) = one_point(*q, var, *sort, &body) {
                    return g;
                }
            }
            Formula::quant(*q, var, *sort, body)
        }
        _ => f.clone(),
    }
}

fn junction(fs: &[Formula], conj: bool) -> Formula {
    let (unit, zero) = if conj {
        (Formula::Top, Formula::Bottom)
    } else {
        (Formula::Bottom, Formula::Top)
    };
    let mut out: Vec<Formula> = Vec::new();
    for g in fs {
        let g = step(g);
        let parts = match g {
            Formula::And(hs) if conj => hs,
            Formula::Or(hs) if !conj => hs,
            g => vec![g],
        };
        for h in parts {
            if h == zero {
                return zero;
            }
            if h != unit && !out.contains(&h) {
                out.push(h);
            }
        }
    }
    let complementary = out.iter().any(|g| out.contains(&Formula::not(g.clone())));
    if complementary {
        return zero;
    }
    match out.len() {
        0 => unit,
        1 => out.pop().unwrap(),
        _ if conj => Formula::And(out),
        _ => Formula::Or(out),
    }
}

/// `∃z (… ∧ z = t ∧ …)` becomes `(… ∧ …)[z := t]`; dually for `∀`.
/// Only same-sort equations with `t` free of `z` qualify.
fn one_point(q: Quantifier, var: &str, sort: crate::syntax::Sort, body: &Formula) -> Option<Formula> {
    let universal = q == Quantifier::Forall;
    let parts: Vec<Formula> = match (body, universal) {
        (Formula::And(fs), false) | (Formula::Or(fs), true) => fs.clone(),
        (g, _) => vec![g.clone()],
    };
    let z = Term::var(var, sort);
    let pick = |g: &Formula| -> Option<Term> {
        let e = match (g, universal) {
            (Formula::Not(e), true) => &**e,
            (e, false) => e,
            _ => return None,
        };
        let Formula::Eq(a, b) = e else { return None };
        let t = if *a == z {
            b
        } else if *b == z {
            a
        } else {
            return None;
        };
        let free = Formula::eq(t.clone(), t.clone()).free_vars();
        (t.sort() == sort && !free.iter().any(|(v, _)| v == var)).then(|| t.clone())
    };
    let (i, t) = parts.iter().enumerate().find_map(|(i, g)| pick(g).map(|t| (i, t)))?;
    let rest: Vec<Formula> = parts
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, g)| g.substitute(var, &t))
        .collect();
    Some(if universal { Formula::or(rest) } else { Formula::and(rest) })
}
