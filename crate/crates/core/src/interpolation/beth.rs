//! Explicit definitions from implicit ones: if `φ` fixes a relation `P`
//! given the rest of its vocabulary, an interpolant for
//! `φ ∧ P(c̄) ⊨ φ' → P'(c̄)` defines it.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{check_entailment, craig, Check, InterpolationBounds, InterpolationError, InterpolationResult};
use crate::structures::Structure;
use crate::syntax::{fresh_var, rename, Formula, Term, Vocabulary};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BethResult {
    Defined {
        /// `∀x̄ (P(x̄) ↔ θ(x̄))`.
        definition: Formula,
        /// The defining formula over the fresh constants.
        theta: Formula,
        constants: Vec<Term>,
        /// `φ ⊨ P(c̄) ↔ θ(c̄)`.
        check: Check,
    },
    /// A model of `φ` and its copy in which `P` and `P'` differ.
    NotImplicit(Structure),
    Unknown(String),
}

/// Looks for an explicit definition of `rel` in `φ`. `ambient` may declare
/// `rel` when `φ` does not mention it.
pub fn beth(
    phi: &Formula,
    rel: &str,
    ambient: &Vocabulary,
    bounds: &InterpolationBounds,
) -> Result<BethResult, InterpolationError> {
    let own = phi.vocabulary();
    let profile = own
        .relations
        .get(rel)
        .or_else(|| ambient.relations.get(rel))
        .cloned()
        .ok_or_else(|| InterpolationError::SymbolNotPresent(rel.to_string()))?;
    let all = own.union(ambient).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    let mut avoid = all.symbol_names();
    let copy = all.fresh_name(&format!("{rel}_"), &avoid);
    avoid.insert(copy.clone());
    let mut cs = Vec::new();
    for s in &profile {
        let c = all.fresh_name("c", &avoid);
        avoid.insert(c.clone());
        cs.push(Term::constant(&c, *s));
    }
    let map: BTreeMap<String, String> = [(rel.to_string(), copy.clone())].into();
    let phi2 = rename(phi, &map, ambient).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    let p = Formula::atom(rel, cs.clone());
    let p2 = Formula::atom(&copy, cs.clone());
    match check_entailment(&[phi.clone(), phi2.clone()], &Formula::iff(p.clone(), p2.clone()), bounds) {
        Check::Fails(m) => return Ok(BethResult::NotImplicit(m)),
        Check::Unknown(why) => return Ok(BethResult::Unknown(why)),
        _ => {}
    }
    let left = Formula::And(vec![phi.clone(), p.clone()]);
    let right = Formula::implies(phi2, p2);
    let theta = match craig(&left, &right, bounds)? {
        InterpolationResult::Interpolant { theta, .. } => theta,
        InterpolationResult::NotEntailed(m) => return Ok(BethResult::NotImplicit(m)),
        InterpolationResult::Unknown(why) => return Ok(BethResult::Unknown(why)),
    };
    let check = check_entailment(std::slice::from_ref(phi), &Formula::iff(p, theta.clone()), bounds);
    if check.failed() {
        return Ok(BethResult::Unknown(format!("{theta} does not define {rel}")));
    }
    Ok(BethResult::Defined {
        definition: definition(rel, &cs, &theta),
        theta,
        constants: cs,
        check,
    })
}

fn definition(rel: &str, cs: &[Term], theta: &Formula) -> Formula {
    let mut avoid: BTreeSet<String> = theta.var_names();
    let mut vars = Vec::new();
    let mut body = theta.clone();
    for c in cs {
        let v = fresh_var("x", &avoid);
        avoid.insert(v.clone());
        let x = Term::var(&v, c.sort());
        body = body.replace_term(c, &x);
        vars.push(x);
    }
    let mut f = Formula::iff(Formula::atom(rel, vars.clone()), body);
    for x in vars.iter().rev() {
        if let Term::Var { name, sort } = x {
            f = Formula::forall(name, *sort, f);
        }
    }
    f
}
