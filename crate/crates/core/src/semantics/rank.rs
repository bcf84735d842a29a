use std::collections::BTreeSet;

use super::SemanticsError;
use crate::games::{ef_solve, Player};
use crate::structures::{Elem, Structure};
use crate::syntax::{Formula, Sort, Term};

const NODE_BUDGET: usize = 4_000_000;

fn mk_and(mut v: Vec<Formula>) -> Formula {
    match v.len() {
        0 => Formula::Top,
        1 => v.pop().unwrap(),
        _ => Formula::And(v),
    }
}

fn mk_or(mut v: Vec<Formula>) -> Formula {
    match v.len() {
        0 => Formula::Bottom,
        1 => v.pop().unwrap(),
        _ => Formula::Or(v),
    }
}

struct Builder<'a> {
    m: &'a Structure,
    stem: String,
    nodes: usize,
}

impl Builder<'_> {
    fn var(&self, i: usize, sort: Sort) -> Term {
        Term::var(&format!("{}{}", self.stem, i + 1), sort)
    }

    /// The atomic type of the tuple `picked` together with the constants.
    fn atomic(&mut self, picked: &[(Elem, Sort)]) -> Formula {
        let m = self.m;
        let mut terms: Vec<(Term, Elem)> = picked
            .iter()
            .enumerate()
            .map(|(i, (e, s))| (self.var(i, *s), *e))
            .collect();
        for (c, s) in &m.voc.constants {
            terms.push((Term::constant(c, *s), m.constants[c]));
        }
        let mut lits = Vec::new();
        for (r, profile) in &m.voc.relations {
            let mut tuples: Vec<(Vec<Term>, Vec<Elem>)> = vec![(vec![], vec![])];
            for s in profile {
                let cands: Vec<&(Term, Elem)> = terms.iter().filter(|(t, _)| t.sort() == *s).collect();
                tuples = tuples
                    .into_iter()
                    .flat_map(|(ts, es)| {
                        cands.iter().map(move |(t, e)| {
                            let mut ts = ts.clone();
                            let mut es = es.clone();
                            ts.push(t.clone());
                            es.push(*e);
                            (ts, es)
                        })
                    })
                    .collect();
            }
            for (ts, es) in tuples {
                let a = Formula::atom(r, ts);
                lits.push(if m.holds(r, &es) { a } else { Formula::not(a) });
            }
        }
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                let a = Formula::eq(terms[i].0.clone(), terms[j].0.clone());
                lits.push(if terms[i].1 == terms[j].1 { a } else { Formula::not(a) });
            }
        }
        self.nodes += lits.len();
        mk_and(lits)
    }

    fn rank(&mut self, picked: &mut Vec<(Elem, Sort)>, k: usize) -> Result<Formula, SemanticsError> {
        if self.nodes > NODE_BUDGET {
            return Err(SemanticsError::BudgetExceeded(format!(
                "characteristic formula exceeds {NODE_BUDGET} nodes"
            )));
        }
        if k == 0 {
            return Ok(self.atomic(picked));
        }
        let mut conj = Vec::new();
        if self.m.voc.sorts.is_empty() {
            conj.push(self.atomic(picked));
        }
        let depth = picked.len();
        for s in self.m.voc.sorts.clone() {
            let mut children = BTreeSet::new();
            for e in self.m.domain(s).clone() {
                picked.push((e, s));
                let child = self.rank(picked, k - 1);
                picked.pop();
                children.insert(child?);
            }
            let name = format!("{}{}", self.stem, depth + 1);
            for c in &children {
                conj.push(Formula::exists(&name, s, c.clone()));
            }
            conj.push(Formula::forall(&name, s, mk_or(children.into_iter().collect())));
            self.nodes += conj.len();
        }
        Ok(mk_and(conj))
    }
}

/// The rank-`n` characteristic sentence of `m`: a structure over the same
/// vocabulary satisfies it iff Duplicator wins the `n`-round EF game
/// against `m`.
pub fn hintikka_rank_formula(m: &Structure, n: usize) -> Result<Formula, SemanticsError> {
    if !m.voc.functions.is_empty() {
        return Err(SemanticsError::FunctionsUnsupported);
    }
    let names = m.voc.symbol_names();
    let stem = ["x", "y", "z", "v", "w", "u"]
        .iter()
        .find(|s| (1..=n).all(|i| !names.contains(&format!("{s}{i}"))))
        .map(|s| s.to_string())
        .unwrap_or_else(|| "var_".into());
    let mut b = Builder { m, stem, nodes: 0 };
    b.rank(&mut Vec::new(), n)
}

/// Partitions `ms` by `n`-round EF equivalence. Classes are listed by their
/// least member, members ascending.
pub fn rank_classes(ms: &[Structure], n: usize) -> Result<Vec<Vec<usize>>, SemanticsError> {
    if let Some(first) = ms.first() {
        if ms.iter().any(|m| m.voc != first.voc) {
            return Err(SemanticsError::VocabularyMismatch("structures differ in vocabulary".into()));
        }
    }
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, m) in ms.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = &ms[class[0]];
            let r = ef_solve(rep, m, n).map_err(|e| SemanticsError::BudgetExceeded(e.to_string()))?;
            if r.winner == Player::Duplicator {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::satisfies_sentence;
    use crate::structures::pure_set;

    #[test]
    fn rank_zero_without_constants_is_top() {
        assert_eq!(hintikka_rank_formula(&pure_set(3), 0).unwrap(), Formula::Top);
    }

    #[test]
    fn pure_sets_two_and_three() {
        let h2 = hintikka_rank_formula(&pure_set(2), 2).unwrap();
        let h3 = hintikka_rank_formula(&pure_set(3), 2).unwrap();
        assert_eq!(h2, h3);
        let g2 = hintikka_rank_formula(&pure_set(2), 3).unwrap();
        let g3 = hintikka_rank_formula(&pure_set(3), 3).unwrap();
        assert_ne!(g2, g3);
        assert!(satisfies_sentence(&pure_set(2), &g2).unwrap());
        assert!(!satisfies_sentence(&pure_set(3), &g2).unwrap());
        assert!(!satisfies_sentence(&pure_set(2), &g3).unwrap());
    }

    #[test]
    fn classes_of_pure_sets() {
        let ms: Vec<Structure> = (1..=5).map(pure_set).collect();
        assert_eq!(rank_classes(&ms, 2).unwrap(), vec![vec![0], vec![1, 2, 3, 4]]);
        assert_eq!(rank_classes(&ms, 0).unwrap(), vec![vec![0, 1, 2, 3, 4]]);
    }
}
