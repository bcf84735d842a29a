use std::collections::{BTreeMap, BTreeSet};

use super::formula::{Formula, Quantifier};
use super::vocab::{SortSet, SymbolKind, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenameError {
    #[error("cannot rename `{from}` ({from_kind}) to `{to}` ({to_kind})")]
    ProfileMismatch {
        from: String,
        to: String,
        from_kind: SymbolKind,
        to_kind: SymbolKind,
    },
    #[error("renaming is not injective: `{0}` is hit twice")]
    NonInjective(String),
}

/// The dual negation `f¬`: pushes one negation through the top connective.
///
/// Atoms become negated atoms, `not g` becomes `g`, conjunctions become
/// disjunctions of negations and universals become existentials over the
/// negated body (and vice versa). Generalized quantifiers have no dual in the
/// language and are simply negated.
pub fn dual_negation(f: &Formula) -> Formula {
    match f {
        Formula::Atom { .. } | Formula::Eq(..) => Formula::not(f.clone()),
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Not(g) => (**g).clone(),
        Formula::And(fs) => Formula::Or(fs.iter().cloned().map(Formula::not).collect()),
        Formula::Or(fs) => Formula::And(fs.iter().cloned().map(Formula::not).collect()),
        Formula::Quant {
            q: Quantifier::Forall,
            var,
            sort,
            body,
        } => Formula::exists(var, *sort, Formula::not((**body).clone())),
        Formula::Quant {
            q: Quantifier::Exists,
            var,
            sort,
            body,
        } => Formula::forall(var, *sort, Formula::not((**body).clone())),
        Formula::Quant { .. } => Formula::not(f.clone()),
    }
}

/// Negation normal form: negations only in front of atoms and generalized
/// quantifiers.
pub fn nnf(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => nnf_neg(g),
        Formula::And(fs) => Formula::And(fs.iter().map(nnf).collect()),
        Formula::Or(fs) => Formula::Or(fs.iter().map(nnf).collect()),
        Formula::Quant { q, var, sort, body } => Formula::quant(*q, var, *sort, nnf(body)),
        _ => f.clone(),
    }
}

fn nnf_neg(g: &Formula) -> Formula {
    match g {
        Formula::Atom { .. } | Formula::Eq(..) => Formula::not(g.clone()),
        Formula::Top => Formula::Bottom,
        Formula::Bottom => Formula::Top,
        Formula::Not(h) => nnf(h),
        Formula::And(fs) => Formula::Or(fs.iter().map(nnf_neg).collect()),
        Formula::Or(fs) => Formula::And(fs.iter().map(nnf_neg).collect()),
        Formula::Quant {
            q: Quantifier::Forall,
            var,
            sort,
            body,
        } => Formula::exists(var, *sort, nnf_neg(body)),
        Formula::Quant {
            q: Quantifier::Exists,
            var,
            sort,
            body,
        } => Formula::forall(var, *sort, nnf_neg(body)),
        Formula::Quant { q, var, sort, body } => {
            Formula::not(Formula::quant(*q, var, *sort, nnf(body)))
        }
    }
}

/// Sorts of universally and existentially quantified variables, read off
/// under negation polarity. A generalized quantifier counts for both sets.
pub fn un_ex_sorts(f: &Formula) -> (SortSet, SortSet) {
    let mut un = SortSet::new();
    let mut ex = SortSet::new();
    polarity_walk(f, true, &mut un, &mut ex);
    (un, ex)
}

fn polarity_walk(f: &Formula, positive: bool, un: &mut SortSet, ex: &mut SortSet) {
    match f {
        Formula::Not(g) => polarity_walk(g, !positive, un, ex),
        Formula::And(fs) | Formula::Or(fs) => {
            fs.iter().for_each(|g| polarity_walk(g, positive, un, ex))
        }
        Formula::Quant { q, sort, body, .. } => {
            match (q, positive) {
                (Quantifier::Forall, true) | (Quantifier::Exists, false) => {
                    un.insert(*sort);
                }
                (Quantifier::Exists, true) | (Quantifier::Forall, false) => {
                    ex.insert(*sort);
                }
                _ => {
                    un.insert(*sort);
                    ex.insert(*sort);
                }
            }
            polarity_walk(body, positive, un, ex);
        }
        _ => {}
    }
}

/// Renames non-logical symbols. `ambient` lists further symbols that targets
/// must not collide with (pass an empty vocabulary when there are none).
pub fn rename(
    f: &Formula,
    map: &BTreeMap<String, String>,
    ambient: &Vocabulary,
) -> Result<Formula, RenameError> {
    let own = f.vocabulary();
    let mut hit: BTreeSet<&str> = BTreeSet::new();
    for (from, to) in map {
        let Some(from_kind) = own.kind_of(from) else {
            continue;
        };
        if !hit.insert(to.as_str()) {
            return Err(RenameError::NonInjective(to.clone()));
        }
        if from == to {
            continue;
        }
        let existing = own.kind_of(to).or_else(|| ambient.kind_of(to));
        if let Some(to_kind) = existing {
            if to_kind != from_kind {
                return Err(RenameError::ProfileMismatch {
                    from: from.clone(),
                    to: to.clone(),
                    from_kind,
                    to_kind,
                });
            }
            // An occurring symbol that keeps its name would merge with `from`.
            if own.contains_symbol(to) && !map.contains_key(to) {
                return Err(RenameError::NonInjective(to.clone()));
            }
        }
    }
    Ok(f.rename_symbols_unchecked(map))
}
