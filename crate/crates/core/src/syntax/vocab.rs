use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

/// Sorts are named by nonnegative integers.
pub type Sort = u32;

/// Set of sort names.
pub type SortSet = BTreeSet<Sort>;

/// Argument sorts and result sort of a function symbol.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FnProfile {
    pub args: Vec<Sort>,
    pub result: Sort,
}

/// The kind of a non-logical symbol together with its sort profile.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Relation(Vec<Sort>),
    Function(FnProfile),
    Constant(Sort),
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Relation(p) => write!(f, "relation {p:?}"),
            SymbolKind::Function(p) => write!(f, "function {:?} -> {}", p.args, p.result),
            SymbolKind::Constant(s) => write!(f, "constant of sort {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabularyError {
    #[error("symbol `{name}` declared both as {first} and as {second}")]
    Clash {
        name: String,
        first: SymbolKind,
        second: SymbolKind,
    },
    #[error("sort {sort} used by `{name}` is not declared")]
    UndeclaredSort { name: String, sort: Sort },
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

/// Words of the formula language that can never name a symbol.
pub const RESERVED: &[&str] = &[
    "forall", "exists", "Qge", "Qaleph", "And", "Or", "not", "top", "bottom",
];

/// A many-sorted vocabulary. Relation symbols of arity zero act as
/// proposition letters.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vocabulary {
    pub sorts: BTreeSet<Sort>,
    pub relations: BTreeMap<String, Vec<Sort>>,
    pub functions: BTreeMap<String, FnProfile>,
    pub constants: BTreeMap<String, Sort>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn kind_of(&self, name: &str) -> Option<SymbolKind> {
        if let Some(p) = self.relations.get(name) {
            return Some(SymbolKind::Relation(p.clone()));
        }
        if let Some(p) = self.functions.get(name) {
            return Some(SymbolKind::Function(p.clone()));
        }
        self.constants.get(name).map(|s| SymbolKind::Constant(*s))
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        self.kind_of(name).is_some()
    }

    /// Adds a symbol; re-adding an identical declaration is a no-op.
    /// Sorts mentioned by the profile are added to `sorts`.
    pub fn declare(&mut self, name: &str, kind: SymbolKind) -> Result<(), VocabularyError> {
        if RESERVED.contains(&name) {
            return Err(VocabularyError::Reserved(name.to_string()));
        }
        if let Some(existing) = self.kind_of(name) {
            if existing == kind {
                return Ok(());
            }
            return Err(VocabularyError::Clash {
                name: name.to_string(),
                first: existing,
                second: kind,
            });
        }
        match kind {
            SymbolKind::Relation(p) => {
                self.sorts.extend(p.iter().copied());
                self.relations.insert(name.to_string(), p);
            }
            SymbolKind::Function(p) => {
                self.sorts.extend(p.args.iter().copied());
                self.sorts.insert(p.result);
                self.functions.insert(name.to_string(), p);
            }
            SymbolKind::Constant(s) => {
                self.sorts.insert(s);
                self.constants.insert(name.to_string(), s);
            }
        }
        Ok(())
    }

    pub fn with_relation(mut self, name: &str, profile: &[Sort]) -> Self {
        self.declare(name, SymbolKind::Relation(profile.to_vec()))
            .expect("conflicting relation declaration");
        self
    }

    pub fn with_function(mut self, name: &str, args: &[Sort], result: Sort) -> Self {
        self.declare(
            name,
            SymbolKind::Function(FnProfile {
                args: args.to_vec(),
                result,
            }),
        )
        .expect("conflicting function declaration");
        self
    }

    pub fn with_constant(mut self, name: &str, sort: Sort) -> Self {
        self.declare(name, SymbolKind::Constant(sort))
            .expect("conflicting constant declaration");
        self
    }

    pub fn with_sort(mut self, sort: Sort) -> Self {
        self.sorts.insert(sort);
        self
    }

    /// Union of two vocabularies; fails when a name is used with two profiles.
    pub fn union(&self, other: &Vocabulary) -> Result<Vocabulary, VocabularyError> {
        let mut out = self.clone();
        out.sorts.extend(other.sorts.iter().copied());
        for (name, kind) in other.symbols() {
            out.declare(&name, kind)?;
        }
        Ok(out)
    }

    /// Symbols (and sorts) present in both vocabularies with equal profiles.
    pub fn intersection(&self, other: &Vocabulary) -> Vocabulary {
        let mut out = Vocabulary::new();
        out.sorts = self.sorts.intersection(&other.sorts).copied().collect();
        for (name, kind) in self.symbols() {
            if other.kind_of(&name).as_ref() == Some(&kind) {
                out.declare(&name, kind).expect("intersection of consistent vocabularies");
            }
        }
        out
    }

    /// All symbols with their kinds, relations first, then functions, then constants.
    pub fn symbols(&self) -> Vec<(String, SymbolKind)> {
        let mut out = Vec::new();
        for (n, p) in &self.relations {
            out.push((n.clone(), SymbolKind::Relation(p.clone())));
        }
        for (n, p) in &self.functions {
            out.push((n.clone(), SymbolKind::Function(p.clone())));
        }
        for (n, s) in &self.constants {
            out.push((n.clone(), SymbolKind::Constant(*s)));
        }
        out
    }

    pub fn symbol_names(&self) -> BTreeSet<String> {
        self.symbols().into_iter().map(|(n, _)| n).collect()
    }

    /// True when every sort and symbol of `self` occurs in `other` with the same profile.
    pub fn is_subvocabulary_of(&self, other: &Vocabulary) -> bool {
        self.sorts.is_subset(&other.sorts)
            && self
                .symbols()
                .into_iter()
                .all(|(n, k)| other.kind_of(&n).as_ref() == Some(&k))
    }

    pub fn is_relational(&self) -> bool {
        self.functions.is_empty() && self.constants.is_empty()
    }

    /// Checks that every profile sort is declared.
    pub fn validate(&self) -> Result<(), VocabularyError> {
        for (name, kind) in self.symbols() {
            let sorts: Vec<Sort> = match kind {
                SymbolKind::Relation(p) => p,
                SymbolKind::Function(p) => {
                    let mut v = p.args;
                    v.push(p.result);
                    v
                }
                SymbolKind::Constant(s) => vec![s],
            };
            for s in sorts {
                if !self.sorts.contains(&s) {
                    return Err(VocabularyError::UndeclaredSort { name, sort: s });
                }
            }
            if RESERVED.contains(&name.as_str()) {
                return Err(VocabularyError::Reserved(name));
            }
        }
        Ok(())
    }

    /// A name not used by any symbol, derived from `base`.
    pub fn fresh_name(&self, base: &str, avoid: &BTreeSet<String>) -> String {
        if !self.contains_symbol(base) && !avoid.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|n| !self.contains_symbol(n) && !avoid.contains(n))
            .unwrap()
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (n, p) in &self.relations {
            parts.push(format!("{n}{p:?}"));
        }
        for (n, p) in &self.functions {
            parts.push(format!("{n}{:?}->{}", p.args, p.result));
        }
        for (n, s) in &self.constants {
            parts.push(format!("{n}:{s}"));
        }
        write!(f, "{{{}}}", parts.join(", "))
    }
}
