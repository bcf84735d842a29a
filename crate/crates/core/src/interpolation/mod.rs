//! Craig interpolation and its consequences: sorted interpolants, explicit
//! definitions of implicitly defined relations, joint consistency and
//! separation of projective classes.
//!
//! First-order interpolants are read off a closed tableau; propositional
//! ones are additionally shrunk to a smallest formula when at most three
//! letters are shared. Every interpolant is checked against both sides
//! before it is returned.

mod beth;
mod extract;
pub mod prop;
mod robinson;
mod separate;
mod simplify;

use serde::Serialize;

use crate::semantics::{entails_bounded, find_model, satisfies_sentence, EntailOptions, EntailmentVerdict};
use crate::structures::Structure;
use crate::syntax::{un_ex_sorts, Formula, SortSet, Vocabulary};
use crate::tableau::{check_input, refute, term_model, ProofTree, Search, TableauBounds};

pub use beth::{beth, BethResult};
pub use robinson::{craig_via_robinson, robinson_join, RobinsonInput, RobinsonResult};
pub use separate::{separate, PcClass, SeparationResult};
pub use simplify::simplify;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InterpolationBounds {
    pub tableau: TableauBounds,
    /// Elements per sort for the bounded checks used when a tableau gives up.
    pub entail_bound: usize,
}

impl Default for InterpolationBounds {
    fn default() -> Self {
        InterpolationBounds {
            tableau: TableauBounds::default(),
            entail_bound: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InterpolationError {
    #[error("unsupported connective: {0}")]
    UnsupportedConnective(String),
    #[error("not a sentence: {0}")]
    NotASentence(String),
    #[error("vocabulary clash: {0}")]
    Vocabulary(String),
    #[error("{0} proposition letters exceed the truth-table limit")]
    TooManyLetters(usize),
    #[error("{0} does not occur")]
    SymbolNotPresent(String),
    #[error("vocabulary overlap outside the shared part: {0}")]
    VocabularyOverlapViolation(String),
    #[error("the shared theory decides neither {0} nor its negation")]
    IncompleteSigma0(String),
    #[error("the premises have no model")]
    PremiseUnsatisfiable,
    #[error("visible vocabularies differ")]
    VisibleVocabularyMismatch,
}

/// The outcome of checking one entailment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Check {
    /// Checked on every valuation.
    Tautology,
    /// A closed tableau for the premises and the negated conclusion.
    Proved(ProofTree),
    /// No countermodel with at most this many elements per sort.
    HoldsUpToBound(usize),
    Fails(Structure),
    Unknown(String),
}

impl Check {
    pub fn proved(&self) -> bool {
        matches!(self, Check::Tautology | Check::Proved(_))
    }

    pub fn failed(&self) -> bool {
        matches!(self, Check::Fails(_))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SortReport {
    pub un_theta: SortSet,
    pub ex_theta: SortSet,
    pub un_left: SortSet,
    pub ex_right: SortSet,
}

impl SortReport {
    pub fn holds(&self) -> bool {
        self.un_theta.is_subset(&self.un_left) && self.ex_theta.is_subset(&self.ex_right)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InterpolantReport {
    /// `φ ⊨ θ`.
    pub left: Check,
    /// `θ ⊨ ψ`.
    pub right: Check,
    /// Symbols and sorts of `θ` missing from one of the sides.
    pub foreign: Vec<String>,
    pub sorts: SortReport,
}

impl InterpolantReport {
    /// Both entailments proved and the vocabulary shared.
    pub fn passes(&self) -> bool {
        self.left.proved() && self.right.proved() && self.foreign.is_empty()
    }

    /// Neither entailment refuted and the vocabulary shared.
    pub fn consistent(&self) -> bool {
        !self.left.failed()
            && !self.right.failed()
            && !matches!(self.left, Check::Unknown(_))
            && !matches!(self.right, Check::Unknown(_))
            && self.foreign.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum InterpolationResult {
    Interpolant {
        theta: Formula,
        /// The interpolant as read off the refutation, before shrinking.
        extracted: Formula,
        report: Box<InterpolantReport>,
    },
    /// A model of `φ ∧ ¬ψ`.
    NotEntailed(Structure),
    Unknown(String),
}

fn input_vocabulary(fs: &[&Formula]) -> Result<Vocabulary, InterpolationError> {
    let mut voc = Vocabulary::new();
    for f in fs {
        if f.has_aleph_quantifier() {
            return Err(InterpolationError::UnsupportedConnective(format!("Qaleph in {f}")));
        }
        if !f.is_sentence() {
            return Err(InterpolationError::NotASentence(f.to_string()));
        }
        voc = voc
            .union(&f.vocabulary())
            .map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    }
    Ok(voc)
}

/// Decides `premises ⊨ conclusion` by truth tables when propositional, else
/// by tableau, falling back to a bounded countermodel search.
pub fn check_entailment(premises: &[Formula], conclusion: &Formula, bounds: &InterpolationBounds) -> Check {
    let mut all: Vec<&Formula> = premises.iter().collect();
    all.push(conclusion);
    let voc = match input_vocabulary(&all) {
        Ok(v) => v,
        Err(e) => return Check::Unknown(e.to_string()),
    };
    let owned: Vec<Formula> = all.iter().map(|f| (*f).clone()).collect();
    if owned.iter().all(prop::is_propositional) && prop::letters_of(&owned).len() <= prop::MAX_LETTERS {
        return match prop::entails(premises, conclusion) {
            Ok(()) => Check::Tautology,
            Err(v) => Check::Fails(prop::valuation_model(&voc, &v)),
        };
    }
    let mut gamma: Vec<Formula> = premises.iter().map(Formula::expand_thresholds).collect();
    gamma.push(Formula::not(conclusion.expand_thresholds()));
    let why = match check_input(&gamma) {
        Err(e) => e.to_string(),
        Ok(tvoc) => match refute(&tvoc, &gamma, bounds.tableau, false) {
            Search::Closed(tree) => return Check::Proved(tree),
            Search::Open(h) => match term_model(&h) {
                Ok(m) if countermodel(&m, premises, conclusion) => return Check::Fails(m),
                Ok(_) => "term model does not refute the entailment".to_string(),
                Err(e) => e.to_string(),
            },
            Search::Budget(why) => why,
        },
    };
    match entails_bounded(premises, conclusion, bounds.entail_bound, &EntailOptions::default()) {
        Ok(EntailmentVerdict::EntailsUpToBound(n)) => Check::HoldsUpToBound(n),
        Ok(EntailmentVerdict::Countermodel(m, _)) => Check::Fails(m),
        Err(e) => Check::Unknown(format!("{why}; {e}")),
    }
}

fn countermodel(m: &Structure, premises: &[Formula], conclusion: &Formula) -> bool {
    premises.iter().all(|p| satisfies_sentence(m, p) == Ok(true)) && satisfies_sentence(m, conclusion) == Ok(false)
}

/// Checks that `θ` is an interpolant for `φ ⊨ ψ`: both entailments, the
/// shared vocabulary, and the sorts of its quantifiers.
pub fn verify_interpolant(
    phi: &Formula,
    theta: &Formula,
    psi: &Formula,
    bounds: &InterpolationBounds,
) -> InterpolantReport {
    let shared = phi.vocabulary().intersection(&psi.vocabulary());
    let tv = theta.vocabulary();
    let mut foreign: Vec<String> = tv
        .symbols()
        .into_iter()
        .filter(|(n, k)| shared.kind_of(n).as_ref() != Some(k))
        .map(|(n, _)| n)
        .collect();
    foreign.extend(tv.sorts.difference(&shared.sorts).map(|s| format!("sort {s}")));
    let (un_theta, ex_theta) = un_ex_sorts(theta);
    InterpolantReport {
        left: check_entailment(std::slice::from_ref(phi), theta, bounds),
        right: check_entailment(std::slice::from_ref(theta), psi, bounds),
        foreign,
        sorts: SortReport {
            un_theta,
            ex_theta,
            un_left: un_ex_sorts(phi).0,
            ex_right: un_ex_sorts(psi).1,
        },
    }
}

/// Largest extracted formula the propositional minimizer tries to beat.
const MINIMIZE_UP_TO: usize = 13;

/// An interpolant for `φ ⊨ ψ`, or a countermodel when the entailment fails.
pub fn craig(phi: &Formula, psi: &Formula, bounds: &InterpolationBounds) -> Result<InterpolationResult, InterpolationError> {
    interpolate(phi, psi, bounds, false)
}

fn interpolate(
    phi: &Formula,
    psi: &Formula,
    bounds: &InterpolationBounds,
    sorted: bool,
) -> Result<InterpolationResult, InterpolationError> {
    let voc = input_vocabulary(&[phi, psi])?;
    let pair = [phi.clone(), psi.clone()];
    if pair.iter().all(prop::is_propositional) {
        let n = prop::letters_of(&pair).len();
        if n > prop::MAX_LETTERS {
            return Err(InterpolationError::TooManyLetters(n));
        }
        return Ok(craig_propositional(phi, psi, &voc, bounds));
    }
    let gamma = vec![phi.expand_thresholds(), Formula::not(psi.expand_thresholds())];
    check_input(&gamma).map_err(|e| InterpolationError::UnsupportedConnective(e.to_string()))?;
    match refute(&voc, &gamma, bounds.tableau, true) {
        Search::Closed(tree) => {
            let extracted = match extract::split_interpolant(&tree, 1) {
                Ok(f) => f,
                Err(e) => return Ok(InterpolationResult::Unknown(format!("extraction failed: {e}"))),
            };
            Ok(choose(phi, psi, extracted, bounds, sorted))
        }
        Search::Open(h) => match term_model(&h) {
            Ok(m) if countermodel(&m, std::slice::from_ref(phi), psi) => Ok(InterpolationResult::NotEntailed(m)),
            Ok(_) => Ok(InterpolationResult::Unknown("term model does not refute the entailment".into())),
            Err(e) => Ok(InterpolationResult::Unknown(e.to_string())),
        },
        Search::Budget(why) => {
            let fs = [phi.clone(), Formula::not(psi.clone())];
            match find_model(&voc, &fs, bounds.entail_bound, &EntailOptions::default()) {
                Ok(Some((m, _))) => Ok(InterpolationResult::NotEntailed(m)),
                Ok(None) => Ok(InterpolationResult::Unknown(format!(
                    "{why}; no countermodel with at most {} elements per sort",
                    bounds.entail_bound
                ))),
                Err(e) => Ok(InterpolationResult::Unknown(format!("{why}; {e}"))),
            }
        }
    }
}

/// The smallest of `⊥`, `⊤`, `φ`, `ψ` and the simplified extraction that is
/// a proved interpolant (respecting sorts when `sorted`). The extraction
/// itself is accepted when its checks are only bounded.
fn choose(phi: &Formula, psi: &Formula, extracted: Formula, bounds: &InterpolationBounds, sorted: bool) -> InterpolationResult {
    let shared = phi.vocabulary().intersection(&psi.vocabulary());
    let own = simplify(&extracted);
    let mut candidates = vec![Formula::Bottom, Formula::Top, phi.clone(), psi.clone()];
    candidates.retain(|c| c.vocabulary().is_subvocabulary_of(&shared) && c.node_count() <= own.node_count());
    candidates.sort_by(|a, b| (a.node_count(), a).cmp(&(b.node_count(), b)));
    candidates.dedup();
    for c in candidates {
        let report = verify_interpolant(phi, &c, psi, bounds);
        if report.passes() && (!sorted || report.sorts.holds()) {
            return InterpolationResult::Interpolant {
                theta: c,
                extracted,
                report: Box::new(report),
            };
        }
    }
    finish(phi, psi, own, extracted, bounds)
}

fn finish(phi: &Formula, psi: &Formula, theta: Formula, extracted: Formula, bounds: &InterpolationBounds) -> InterpolationResult {
    let report = verify_interpolant(phi, &theta, psi, bounds);
    if !report.consistent() {
        return InterpolationResult::Unknown(format!("extracted formula {theta} is not an interpolant"));
    }
    InterpolationResult::Interpolant {
        theta,
        extracted,
        report: Box::new(report),
    }
}

fn craig_propositional(phi: &Formula, psi: &Formula, voc: &Vocabulary, bounds: &InterpolationBounds) -> InterpolationResult {
    if let Err(v) = prop::entails(std::slice::from_ref(phi), psi) {
        return InterpolationResult::NotEntailed(prop::valuation_model(voc, &v));
    }
    let shared: Vec<String> = prop::letters(phi).intersection(&prop::letters(psi)).cloned().collect();
    let gamma = vec![phi.clone(), Formula::not(psi.clone())];
    let mut tb = bounds.tableau;
    tb.branch_limit = tb.branch_limit.max(1 << 20);
    let extracted = match refute(voc, &gamma, tb, true) {
        Search::Closed(tree) => extract::split_interpolant(&tree, 1).ok(),
        _ => None,
    };
    let lo_hi = (shared.len() <= 6).then(|| {
        (
            prop::projection(phi, &shared),
            prop::universal_projection(psi, &shared),
        )
    });
    let extracted = match (extracted, lo_hi) {
        (Some(f), _) => f,
        (None, Some((lo, _))) => prop::dnf(lo, &shared),
        (None, None) => return InterpolationResult::Unknown("propositional refutation exceeded its bounds".into()),
    };
    let mut theta = simplify(&extracted);
    if let (true, Some((lo, hi))) = (shared.len() <= 3, lo_hi) {
        let cap = theta.node_count().min(MINIMIZE_UP_TO);
        if let Some(small) = prop::smallest_between(&shared, lo, hi, cap) {
            if small.node_count() <= theta.node_count() {
                theta = small;
            }
        }
    }
    finish(phi, psi, theta, extracted, bounds)
}

/// `craig` with the added requirement that universally quantified sorts of
/// `θ` are universal in `φ` and its existential sorts existential in `ψ`.
pub fn craig_sorted(
    phi: &Formula,
    psi: &Formula,
    bounds: &InterpolationBounds,
) -> Result<InterpolationResult, InterpolationError> {
    let r = interpolate(phi, psi, bounds, true)?;
    if let InterpolationResult::Interpolant { theta, report, .. } = &r {
        if !report.sorts.holds() {
            return Ok(InterpolationResult::Unknown(format!(
                "interpolant {theta} quantifies over sorts outside the allowed sets"
            )));
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests;
