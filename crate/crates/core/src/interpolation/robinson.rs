//! Joint consistency: two consistent extensions of a complete theory whose
//! vocabularies meet only in the theory's own vocabulary have a common
//! model. The model comes from a failed interpolation, and interpolants
//! come back from joint consistency.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{craig, prop, InterpolationBounds, InterpolationError, InterpolationResult};
use crate::semantics::satisfies_sentence;
use crate::structures::Structure;
use crate::syntax::{Formula, Vocabulary};
use crate::tableau::{prove, TableauVerdict};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RobinsonInput {
    pub sigma0: Vec<Formula>,
    pub sigma1: Vec<Formula>,
    pub sigma2: Vec<Formula>,
    pub vocab0: Vocabulary,
    pub vocab1: Vocabulary,
    pub vocab2: Vocabulary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum RobinsonResult {
    /// A model of all three theories.
    Joint(Structure),
    /// The two extensions contradict each other; `theta` follows from the
    /// first and refutes the second. Only possible when `Σ0` is not complete.
    Separated(Formula),
    Unknown(String),
}

fn satisfiable(fs: &[Formula], bounds: &InterpolationBounds) -> Result<Option<bool>, InterpolationError> {
    if fs.iter().all(prop::is_propositional) {
        let n = prop::letters_of(fs).len();
        if n > prop::MAX_LETTERS {
            return Err(InterpolationError::TooManyLetters(n));
        }
        return Ok(Some(prop::satisfiable(fs).is_some()));
    }
    let gamma: Vec<Formula> = fs.iter().map(Formula::expand_thresholds).collect();
    match prove(&gamma, bounds.tableau).map_err(|e| InterpolationError::UnsupportedConnective(e.to_string()))? {
        TableauVerdict::Closed(_) => Ok(Some(false)),
        TableauVerdict::Satisfiable { .. } => Ok(Some(true)),
        TableauVerdict::Unknown(_) => Ok(None),
    }
}

fn within(fs: &[Formula], voc: &Vocabulary, which: &str) -> Result<(), InterpolationError> {
    for f in fs {
        if !f.vocabulary().is_subvocabulary_of(voc) {
            return Err(InterpolationError::Vocabulary(format!("{f} is not over the vocabulary of {which}")));
        }
    }
    Ok(())
}

/// Builds a model of `Σ0 ∪ Σ1 ∪ Σ2`. Completeness of `Σ0` is checked on
/// its proposition letters: each must be decided.
pub fn robinson_join(input: &RobinsonInput, bounds: &InterpolationBounds) -> Result<RobinsonResult, InterpolationError> {
    let v0 = &input.vocab0;
    let v01 = v0.union(&input.vocab1).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    let v02 = v0.union(&input.vocab2).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    let n0 = v0.symbol_names();
    let both: BTreeSet<String> = v01.symbol_names().intersection(&v02.symbol_names()).cloned().collect();
    let extra: Vec<String> = both.difference(&n0).cloned().collect();
    if !extra.is_empty() {
        return Err(InterpolationError::VocabularyOverlapViolation(extra.join(", ")));
    }
    within(&input.sigma0, v0, "Σ0")?;
    within(&input.sigma1, &v01, "Σ1")?;
    within(&input.sigma2, &v02, "Σ2")?;
    for (p, profile) in &v0.relations {
        if !profile.is_empty() {
            continue;
        }
        let a = Formula::prop(p);
        let mut yes = input.sigma0.clone();
        yes.push(Formula::not(a.clone()));
        let mut no = input.sigma0.clone();
        no.push(a);
        if satisfiable(&yes, bounds)? != Some(false) && satisfiable(&no, bounds)? != Some(false) {
            return Err(InterpolationError::IncompleteSigma0(p.clone()));
        }
    }
    let t1: Vec<Formula> = input.sigma0.iter().chain(&input.sigma1).cloned().collect();
    let t2: Vec<Formula> = input.sigma0.iter().chain(&input.sigma2).cloned().collect();
    for t in [&t1, &t2] {
        match satisfiable(t, bounds)? {
            Some(false) => return Err(InterpolationError::PremiseUnsatisfiable),
            None => return Ok(RobinsonResult::Unknown("could not decide consistency of an extension".into())),
            Some(true) => {}
        }
    }
    let phi = Formula::and(t1);
    let psi = Formula::not(Formula::and(t2));
    match craig(&phi, &psi, bounds)? {
        InterpolationResult::NotEntailed(m) => {
            let m = pad(m, &v01.union(&v02).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?);
            let all = input.sigma0.iter().chain(&input.sigma1).chain(&input.sigma2);
            for f in all {
                if satisfies_sentence(&m, f) != Ok(true) {
                    return Ok(RobinsonResult::Unknown(format!("joint model falsifies {f}")));
                }
            }
            Ok(RobinsonResult::Joint(m))
        }
        InterpolationResult::Interpolant { theta, .. } => Ok(RobinsonResult::Separated(theta)),
        InterpolationResult::Unknown(why) => Ok(RobinsonResult::Unknown(why)),
    }
}

/// Declares the symbols of `voc` the model leaves out, as empty relations.
fn pad(mut m: Structure, voc: &Vocabulary) -> Structure {
    for (r, profile) in &voc.relations {
        if !m.voc.relations.contains_key(r) {
            m.set_relation(r, profile, Vec::new());
        }
    }
    m
}

/// A propositional interpolant assembled from joint consistency alone:
/// the disjunction of the complete theories over the shared letters that
/// are consistent with `φ`. Each of them refutes `¬ψ`, since otherwise
/// `robinson_join` would produce a model of `φ ∧ ¬ψ`.
pub fn craig_via_robinson(
    phi: &Formula,
    psi: &Formula,
    bounds: &InterpolationBounds,
) -> Result<InterpolationResult, InterpolationError> {
    let pair = [phi.clone(), psi.clone()];
    if !pair.iter().all(prop::is_propositional) {
        return Err(InterpolationError::UnsupportedConnective("joint-consistency route is propositional".into()));
    }
    let l1 = prop::letters(phi);
    let l2 = prop::letters(psi);
    let shared: Vec<String> = l1.intersection(&l2).cloned().collect();
    let voc_of = |ls: &BTreeSet<String>| {
        ls.iter().fold(Vocabulary::new(), |v, p| v.with_relation(p, &[]))
    };
    let shared_set: BTreeSet<String> = shared.iter().cloned().collect();
    let vocab0 = voc_of(&shared_set);
    let vocab1 = voc_of(&l1);
    let vocab2 = voc_of(&l2);
    let mut disjuncts = Vec::new();
    for w in prop::valuations(&shared) {
        let sigma0: Vec<Formula> = shared
            .iter()
            .map(|p| {
                if w.contains(p) {
                    Formula::prop(p)
                } else {
                    Formula::not(Formula::prop(p))
                }
            })
            .collect();
        let input = RobinsonInput {
            sigma0: sigma0.clone(),
            sigma1: vec![phi.clone()],
            sigma2: vec![Formula::not(psi.clone())],
            vocab0: vocab0.clone(),
            vocab1: vocab1.clone(),
            vocab2: vocab2.clone(),
        };
        match robinson_join(&input, bounds) {
            Ok(RobinsonResult::Joint(m)) => return Ok(InterpolationResult::NotEntailed(m)),
            Ok(RobinsonResult::Separated(_)) | Ok(RobinsonResult::Unknown(_)) => {
                return Ok(InterpolationResult::Unknown("joint consistency undecided".into()))
            }
            Err(InterpolationError::PremiseUnsatisfiable) => {
                let mut with_phi = sigma0.clone();
                with_phi.push(phi.clone());
                if prop::satisfiable(&with_phi).is_some() {
                    disjuncts.push(Formula::and(sigma0));
                }
            }
            Err(e) => return Err(e),
        }
    }
    let theta = Formula::or(disjuncts);
    let report = super::verify_interpolant(phi, &theta, psi, bounds);
    Ok(InterpolationResult::Interpolant {
        extracted: theta.clone(),
        theta,
        report: Box::new(report),
    })
}
