//! Tableau proofs and Hintikka sets. `prove` either closes every branch,
//! producing a replayable proof, or returns a Hintikka set together with
//! its canonical model.

mod engine;
mod hintikka;
mod proof;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::semantics::{find_model, satisfies_sentence, EntailOptions};
use crate::structures::Structure;
use crate::syntax::{Formula, Term, Vocabulary};
use engine::{Engine, Outcome};

pub use hintikka::{check_hintikka, hintikka_from_model, parse_hintikka, term_model, HintikkaSet, Violation};
pub(crate) use proof::instance_constant;
pub use proof::{replay, rule_name, ProofEnd, ProofNode, ProofTree, Step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TableauBounds {
    /// Deepest term a branch may contain.
    pub term_depth: usize,
    /// Total number of branches opened by splits.
    pub branch_limit: usize,
    /// Elements per sort for the fallback model search.
    pub model_size_cap: usize,
    /// Longest chain of witnesses, each introduced for an existential
    /// mentioning the previous one. Searched by iterative deepening.
    pub witness_depth: usize,
}

impl Default for TableauBounds {
    fn default() -> Self {
        TableauBounds {
            term_depth: 4,
            branch_limit: 2000,
            model_size_cap: 3,
            witness_depth: 4,
        }
    }
}

impl TableauBounds {
    pub(crate) fn generous() -> Self {
        TableauBounds {
            term_depth: usize::MAX,
            branch_limit: usize::MAX,
            model_size_cap: 0,
            witness_depth: usize::MAX,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SatSource {
    /// An open saturated branch.
    Saturation,
    /// A finite model found by search, read back into a Hintikka set.
    ModelSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TableauVerdict {
    Closed(ProofTree),
    Satisfiable {
        hintikka: HintikkaSet,
        model: Structure,
        source: SatSource,
    },
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TableauError {
    #[error("unsupported connective: {0}")]
    UnsupportedConnective(String),
    #[error("not a sentence: {0}")]
    NotASentence(String),
    #[error("vocabulary clash: {0}")]
    Vocabulary(String),
    #[error("sort {0} has no element")]
    EmptySort(crate::syntax::Sort),
    #[error("Hintikka conditions fail: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    HintikkaViolation(Vec<Violation>),
    #[error("model: {0}")]
    Model(String),
}

/// Single-occurrence rewrites of `t` by `u` inside the atom `a`. Sorts must
/// agree, except for a whole side of an equation.
pub(crate) fn rewrite_positions(a: &Formula, t: &Term, u: &Term) -> Vec<Formula> {
    let mut out = Vec::new();
    match a {
        Formula::Atom { rel, args } => {
            if t.sort() != u.sort() {
                return out;
            }
            for (i, arg) in args.iter().enumerate() {
                for r in term_rewrites(arg, t, u) {
                    let mut args = args.clone();
                    args[i] = r;
                    out.push(Formula::Atom { rel: rel.clone(), args });
                }
            }
        }
        Formula::Eq(l, r) => {
            if l == t {
                out.push(Formula::eq(u.clone(), r.clone()));
            }
            if r == t {
                out.push(Formula::eq(l.clone(), u.clone()));
            }
            if t.sort() == u.sort() {
                for x in inner_rewrites(l, t, u) {
                    out.push(Formula::eq(x, r.clone()));
                }
                for x in inner_rewrites(r, t, u) {
                    out.push(Formula::eq(l.clone(), x));
                }
            }
        }
        _ => {}
    }
    out.sort();
    out.dedup();
    out
}

/// Rewrites of one occurrence of `t` in `s`, `s` itself included.
fn term_rewrites(s: &Term, t: &Term, u: &Term) -> Vec<Term> {
    let mut out = inner_rewrites(s, t, u);
    if s == t {
        out.push(u.clone());
    }
    out
}

/// Rewrites strictly below the root of `s`.
fn inner_rewrites(s: &Term, t: &Term, u: &Term) -> Vec<Term> {
    let mut out = Vec::new();
    if let Term::App { fun, args, sort } = s {
        for (i, arg) in args.iter().enumerate() {
            for r in term_rewrites(arg, t, u) {
                let mut args = args.clone();
                args[i] = r;
                out.push(Term::App {
                    fun: fun.clone(),
                    args,
                    sort: *sort,
                });
            }
        }
    }
    out
}

/// The rewrites rule 2 is applied to: those that do not deepen the term,
/// or whose result only mentions terms already present.
pub(crate) fn rewrites(a: &Formula, t: &Term, u: &Term, terms: &BTreeSet<Term>) -> Vec<Formula> {
    let shrinking = u.depth() <= t.depth();
    rewrite_positions(a, t, u)
        .into_iter()
        .filter(|r| {
            shrinking
                || hintikka::atom_args(r).iter().all(|x| {
                    let mut sub = Vec::new();
                    x.subterms(&mut sub);
                    sub.iter().all(|s| terms.contains(s))
                })
        })
        .collect()
}

pub(crate) fn check_input(gamma: &[Formula]) -> Result<Vocabulary, TableauError> {
    let mut voc = Vocabulary::new();
    for f in gamma {
        if f.has_generalized_quantifier() {
            return Err(TableauError::UnsupportedConnective(format!("generalized quantifier in {f}")));
        }
        if !f.is_sentence() {
            return Err(TableauError::NotASentence(f.to_string()));
        }
        voc = voc
            .union(&f.vocabulary())
            .map_err(|e| TableauError::Vocabulary(e.to_string()))?;
    }
    Ok(voc)
}

/// Runs the tableau on `gamma`. A closed tableau proves `gamma`
/// unsatisfiable; an open saturated branch is checked against the nine
/// conditions and its term model is checked against `gamma`. When the
/// bounds stop saturation, a bounded model search decides satisfiable
/// inputs with small models.
pub fn prove(gamma: &[Formula], bounds: TableauBounds) -> Result<TableauVerdict, TableauError> {
    let voc = check_input(gamma)?;
    let why = match refute(&voc, gamma, bounds, false) {
        Search::Closed(tree) => return Ok(TableauVerdict::Closed(tree)),
        Search::Open(h) => {
            let model = term_model(&h)?;
            check_model(gamma, &model)?;
            return Ok(TableauVerdict::Satisfiable {
                hintikka: h,
                model,
                source: SatSource::Saturation,
            });
        }
        Search::Budget(why) => why,
    };
    match find_model(&voc, gamma, bounds.model_size_cap, &EntailOptions::default()) {
        Ok(Some((m, _))) => {
            let h = hintikka_from_model(gamma, &m)?;
            let model = term_model(&h)?;
            check_model(gamma, &model)?;
            Ok(TableauVerdict::Satisfiable {
                hintikka: h,
                model,
                source: SatSource::ModelSearch,
            })
        }
        Ok(None) => Ok(TableauVerdict::Unknown(format!(
            "{why}; no model with at most {} elements per sort",
            bounds.model_size_cap
        ))),
        Err(e) => Ok(TableauVerdict::Unknown(format!("{why}; model search: {e}"))),
    }
}

pub(crate) enum Search {
    Closed(ProofTree),
    Open(HintikkaSet),
    Budget(String),
}

/// Saturation with witness generations 1, 2, ... up to the bound. Each
/// closed result is replayed before it is returned.
pub(crate) fn refute(voc: &Vocabulary, gamma: &[Formula], bounds: TableauBounds, constants_as_names: bool) -> Search {
    let mut gen = 1;
    loop {
        let mut engine = Engine::new(voc, bounds, None);
        engine.max_gen = gen;
        engine.constants_as_names = constants_as_names;
        let b = engine.start(gamma);
        match engine.run(b) {
            Outcome::Closed(node) => {
                let tree = ProofTree {
                    roots: gamma.to_vec(),
                    node,
                };
                return match replay(&tree) {
                    Ok(()) => Search::Closed(tree),
                    Err(e) => Search::Budget(format!("proof failed replay: {e}")),
                };
            }
            Outcome::Open(b) => return Search::Open(engine.hintikka(&b)),
            Outcome::Budget(why) => return Search::Budget(why),
            Outcome::Deferred if gen >= bounds.witness_depth => {
                return Search::Budget(format!("witness depth {} reached", bounds.witness_depth))
            }
            Outcome::Deferred => gen += 1,
        }
    }
}

fn check_model(gamma: &[Formula], m: &Structure) -> Result<(), TableauError> {
    for f in gamma {
        if !satisfies_sentence(m, f).map_err(|e| TableauError::Model(e.to_string()))? {
            return Err(TableauError::Model(format!("term model falsifies {f}")));
        }
    }
    Ok(())
}
