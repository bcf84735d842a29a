//! Separating two disjoint projective classes by a first-order sentence
//! over their common visible vocabulary.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{craig, prop, InterpolationBounds, InterpolationError, InterpolationResult};
use crate::structures::Structure;
use crate::syntax::{rename, Formula, Vocabulary};

/// The visible reducts of the models of `matrix`; symbols of `matrix`
/// outside `visible` are hidden.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PcClass {
    pub matrix: Formula,
    pub visible: Vocabulary,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SeparationResult {
    Separated {
        /// True on the first class, false on the second.
        theta: Formula,
        /// Whether the classes are complementary, so that `theta` defines
        /// the first. Decided for propositional classes only.
        defines: Option<bool>,
    },
    /// The visible reduct of a structure in both classes.
    Overlap(Structure),
    Unknown(String),
}

pub fn separate(k0: &PcClass, k1: &PcClass, bounds: &InterpolationBounds) -> Result<SeparationResult, InterpolationError> {
    if k0.visible.symbol_names() != k1.visible.symbol_names() {
        return Err(InterpolationError::VisibleVocabularyMismatch);
    }
    let visible = &k0.visible;
    let v0 = k0.matrix.vocabulary();
    let v1 = k1.matrix.vocabulary();
    let ambient = v0.union(visible).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    let mut avoid = ambient.symbol_names();
    avoid.extend(v1.symbol_names());
    let mut map = BTreeMap::new();
    for name in v1.symbol_names() {
        if !visible.contains_symbol(&name) {
            let fresh = ambient.fresh_name(&format!("{name}_"), &avoid);
            avoid.insert(fresh.clone());
            map.insert(name, fresh);
        }
    }
    let m1 = rename(&k1.matrix, &map, &ambient).map_err(|e| InterpolationError::Vocabulary(e.to_string()))?;
    match craig(&k0.matrix, &Formula::not(m1.clone()), bounds)? {
        InterpolationResult::Interpolant { theta, .. } => {
            let both = [k0.matrix.clone(), m1];
            let defines = both.iter().all(prop::is_propositional).then(|| {
                let letters: Vec<String> = visible
                    .relations
                    .iter()
                    .filter(|(_, p)| p.is_empty())
                    .map(|(r, _)| r.clone())
                    .collect();
                letters.len() <= 5 && {
                    let rows = (1u64 << (1 << letters.len())) - 1;
                    prop::projection(&both[0], &letters) ^ prop::projection(&both[1], &letters) == rows
                }
            });
            Ok(SeparationResult::Separated { theta, defines })
        }
        InterpolationResult::NotEntailed(m) => {
            let keep = visible.intersection(&m.voc);
            match m.reduct(&keep) {
                Ok(r) => Ok(SeparationResult::Overlap(r)),
                Err(e) => Ok(SeparationResult::Unknown(e.to_string())),
            }
        }
        InterpolationResult::Unknown(why) => Ok(SeparationResult::Unknown(why)),
    }
}
