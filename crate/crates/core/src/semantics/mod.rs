//! Satisfaction, bounded entailment, relativization and rank-n
//! characteristic formulas.

mod entail;
pub(crate) mod eval;
mod rank;

use std::collections::BTreeMap;

use crate::structures::{Elem, Structure};
use crate::syntax::{Formula, Quantifier, Sort, Term};

pub use entail::{entails_bounded, find_model, search_models, EntailOptions, EntailmentVerdict};
pub use rank::{hintikka_rank_formula, rank_classes};

/// Values of free variables.
pub type Assignment = BTreeMap<String, (Sort, Elem)>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SemanticsError {
    #[error("variable `{0}` is not assigned")]
    UnboundVariable(String),
    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),
    #[error("`Qaleph` cannot be evaluated on a finite structure")]
    SymbolicQuantifierOnFiniteStructure,
    #[error("bound needs {needed} structures, budget is {cap}")]
    BoundTooLargeForBudget { needed: f64, cap: f64 },
    #[error("guard must have exactly one free variable, it has {0}")]
    MultiFreeVariableGuard(usize),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("assigned element {elem} is not in sort {sort}")]
    IllSortedAssignment { elem: Elem, sort: Sort },
    #[error("function symbols are not supported here")]
    FunctionsUnsupported,
}

/// Truth of `f` in `m` under `asg`.
pub fn satisfies(m: &Structure, f: &Formula, asg: &Assignment) -> Result<bool, SemanticsError> {
    let table = eval::SymbolTable::new(&m.voc);
    let own = f.vocabulary();
    let mut free: Vec<(String, Sort)> = Vec::new();
    let mut env: Vec<u32> = Vec::new();
    // Element numbering is the ascending universe order used by `densify`.
    let elems: Vec<Elem> = m.universe().into_iter().collect();
    for (name, sort) in f.free_vars() {
        let (s, e) = *asg
            .get(&name)
            .ok_or_else(|| SemanticsError::UnboundVariable(name.clone()))?;
        if s != sort || !m.domain(s).contains(&e) {
            return Err(SemanticsError::IllSortedAssignment { elem: e, sort });
        }
        free.push((name, sort));
        env.push(elems.binary_search(&e).expect("element in universe") as u32);
    }
    if !own.is_subvocabulary_of(&m.voc) {
        return Err(SemanticsError::VocabularyMismatch(format!(
            "formula vocabulary {own} is not part of the structure's {}",
            m.voc
        )));
    }
    let cf = table.compile(f, &free)?;
    let (dm, _) = table.densify(m)?;
    env.resize(cf.slots.max(env.len()), 0);
    Ok(eval::eval(&dm, &cf.body, &mut env))
}

/// Truth of a sentence.
pub fn satisfies_sentence(m: &Structure, f: &Formula) -> Result<bool, SemanticsError> {
    satisfies(m, f, &Assignment::new())
}

/// Bounds every quantifier over the guard's sort by the guard.
pub fn relativize_formula(f: &Formula, guard: &Formula) -> Result<Formula, SemanticsError> {
    let free = guard.free_vars();
    if free.len() != 1 {
        return Err(SemanticsError::MultiFreeVariableGuard(free.len()));
    }
    let (gv, gs) = free.into_iter().next().unwrap();
    Ok(relativize_inner(f, guard, &gv, gs))
}

fn relativize_inner(f: &Formula, guard: &Formula, gv: &str, gs: Sort) -> Formula {
    match f {
        Formula::Not(g) => Formula::not(relativize_inner(g, guard, gv, gs)),
        Formula::And(fs) => Formula::And(fs.iter().map(|g| relativize_inner(g, guard, gv, gs)).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(|g| relativize_inner(g, guard, gv, gs)).collect()),
        Formula::Quant { q, var, sort, body } => {
            let body = relativize_inner(body, guard, gv, gs);
            if *sort != gs {
                return Formula::quant(*q, var, *sort, body);
            }
            let g = guard.substitute(gv, &Term::var(var, *sort));
            let body = match q {
                Quantifier::Forall => Formula::implies(g, body),
                _ => Formula::And(vec![g, body]),
            };
            Formula::quant(*q, var, *sort, body)
        }
        _ => f.clone(),
    }
}
