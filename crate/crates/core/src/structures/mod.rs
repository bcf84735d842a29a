//! Finite many-sorted structures and symbolic equivalence structures.

mod file;
mod iso;
mod symbolic;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::syntax::{FnProfile, Sort, SymbolKind, Vocabulary};

pub use file::{parse_structure, parse_symbolic, StructureParseError};
pub use iso::isomorphism;
pub use symbolic::{SymCard, SymbolicEqStructure};

/// Element identifier. Identifiers are global to a structure, so the domains
/// of two sorts may share elements.
pub type Elem = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("vocabulary is not contained in the structure's vocabulary")]
    NotSubvocabulary,
    #[error("name `{0}` is already used")]
    NameClash(String),
    #[error("element {elem} is not in the domain of sort {sort}")]
    OutOfDomain { elem: Elem, sort: Sort },
    #[error("subset is not closed: `{symbol}` at {tuple:?}")]
    NotClosed { symbol: String, tuple: Vec<Elem> },
    #[error("relativization to the empty set")]
    EmptyRelativization,
    #[error("structure has function or constant symbols")]
    NonRelational,
    #[error("structures have different vocabularies")]
    VocabularyMismatch,
    #[error("sort {0} has an empty domain")]
    EmptyDomain(Sort),
    #[error("ill-formed interpretation of `{symbol}`: {detail}")]
    BadInterpretation { symbol: String, detail: String },
}

/// A finite many-sorted structure.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Structure {
    pub voc: Vocabulary,
    pub domains: BTreeMap<Sort, BTreeSet<Elem>>,
    pub relations: BTreeMap<String, BTreeSet<Vec<Elem>>>,
    pub functions: BTreeMap<String, BTreeMap<Vec<Elem>, Elem>>,
    pub constants: BTreeMap<String, Elem>,
    /// Display names of elements.
    pub labels: BTreeMap<Elem, String>,
}

impl Structure {
    /// An empty shell over `voc`; domains and interpretations are filled in by the caller.
    pub fn empty(voc: Vocabulary) -> Structure {
        let mut relations = BTreeMap::new();
        for r in voc.relations.keys() {
            relations.insert(r.clone(), BTreeSet::new());
        }
        let mut functions = BTreeMap::new();
        for f in voc.functions.keys() {
            functions.insert(f.clone(), BTreeMap::new());
        }
        Structure {
            domains: voc.sorts.iter().map(|s| (*s, BTreeSet::new())).collect(),
            voc,
            relations,
            functions,
            constants: BTreeMap::new(),
            labels: BTreeMap::new(),
        }
    }

    /// Single-sorted structure on sort 0 with elements `0..n`.
    pub fn on_elements(voc: Vocabulary, n: u32) -> Structure {
        let mut voc = voc;
        voc.sorts.insert(0);
        let mut m = Structure::empty(voc);
        for e in 0..n {
            m.add_element(0, e);
        }
        m
    }

    /// Adds an element to a sort's domain, labelling it `e{id}` if unlabelled.
    pub fn add_element(&mut self, sort: Sort, e: Elem) {
        self.domains.entry(sort).or_default().insert(e);
        self.labels.entry(e).or_insert_with(|| format!("e{e}"));
    }

    pub fn domain(&self, sort: Sort) -> &BTreeSet<Elem> {
        static EMPTY: BTreeSet<Elem> = BTreeSet::new();
        self.domains.get(&sort).unwrap_or(&EMPTY)
    }

    /// All elements of all sorts.
    pub fn universe(&self) -> BTreeSet<Elem> {
        self.domains.values().flatten().copied().collect()
    }

    /// Sum of the sort domain sizes.
    pub fn size(&self) -> usize {
        self.domains.values().map(BTreeSet::len).sum()
    }

    pub fn label(&self, e: Elem) -> String {
        self.labels.get(&e).cloned().unwrap_or_else(|| format!("e{e}"))
    }

    /// Sorts whose domain contains `e`.
    pub fn sorts_of(&self, e: Elem) -> BTreeSet<Sort> {
        self.domains
            .iter()
            .filter(|(_, d)| d.contains(&e))
            .map(|(s, _)| *s)
            .collect()
    }

    pub fn holds(&self, rel: &str, tuple: &[Elem]) -> bool {
        self.relations.get(rel).is_some_and(|r| r.contains(tuple))
    }

    /// Checks the structure invariants.
    pub fn validate(&self) -> Result<(), StructureError> {
        for s in &self.voc.sorts {
            if self.domain(*s).is_empty() {
                return Err(StructureError::EmptyDomain(*s));
            }
        }
        let in_sorts = |symbol: &str, tuple: &[Elem], profile: &[Sort]| -> Result<(), StructureError> {
            if tuple.len() != profile.len() {
                return Err(StructureError::BadInterpretation {
                    symbol: symbol.to_string(),
                    detail: format!("tuple {tuple:?} has wrong arity"),
                });
            }
            for (e, s) in tuple.iter().zip(profile) {
                if !self.domain(*s).contains(e) {
                    return Err(StructureError::OutOfDomain { elem: *e, sort: *s });
                }
            }
            Ok(())
        };
        for (r, profile) in &self.voc.relations {
            let Some(tuples) = self.relations.get(r) else {
                return Err(StructureError::BadInterpretation {
                    symbol: r.clone(),
                    detail: "missing interpretation".into(),
                });
            };
            for t in tuples {
                in_sorts(r, t, profile)?;
            }
        }
        for (f, p) in &self.voc.functions {
            let Some(table) = self.functions.get(f) else {
                return Err(StructureError::BadInterpretation {
                    symbol: f.clone(),
                    detail: "missing interpretation".into(),
                });
            };
            for (args, v) in table {
                in_sorts(f, args, &p.args)?;
                in_sorts(f, &[*v], &[p.result])?;
            }
            let expected: usize = p.args.iter().map(|s| self.domain(*s).len()).product();
            if table.len() != expected {
                return Err(StructureError::BadInterpretation {
                    symbol: f.clone(),
                    detail: "function is not total".into(),
                });
            }
        }
        for (c, s) in &self.voc.constants {
            match self.constants.get(c) {
                Some(e) => in_sorts(c, &[*e], &[*s])?,
                None => {
                    return Err(StructureError::BadInterpretation {
                        symbol: c.clone(),
                        detail: "missing interpretation".into(),
                    })
                }
            }
        }
        if self.relations.len() != self.voc.relations.len()
            || self.functions.len() != self.voc.functions.len()
            || self.constants.len() != self.voc.constants.len()
        {
            return Err(StructureError::BadInterpretation {
                symbol: String::new(),
                detail: "interpretation of an undeclared symbol".into(),
            });
        }
        Ok(())
    }

    /// Forgets the symbols and sorts outside `sub`.
    pub fn reduct(&self, sub: &Vocabulary) -> Result<Structure, StructureError> {
        if !sub.is_subvocabulary_of(&self.voc) {
            return Err(StructureError::NotSubvocabulary);
        }
        let domains: BTreeMap<Sort, BTreeSet<Elem>> = self
            .domains
            .iter()
            .filter(|(s, _)| sub.sorts.contains(s))
            .map(|(s, d)| (*s, d.clone()))
            .collect();
        let kept: BTreeSet<Elem> = domains.values().flatten().copied().collect();
        Ok(Structure {
            voc: sub.clone(),
            relations: self
                .relations
                .iter()
                .filter(|(r, _)| sub.relations.contains_key(*r))
                .map(|(r, t)| (r.clone(), t.clone()))
                .collect(),
            functions: self
                .functions
                .iter()
                .filter(|(f, _)| sub.functions.contains_key(*f))
                .map(|(f, t)| (f.clone(), t.clone()))
                .collect(),
            constants: self
                .constants
                .iter()
                .filter(|(c, _)| sub.constants.contains_key(*c))
                .map(|(c, e)| (c.clone(), *e))
                .collect(),
            labels: self
                .labels
                .iter()
                .filter(|(e, _)| kept.contains(e))
                .map(|(e, l)| (*e, l.clone()))
                .collect(),
            domains,
        })
    }

    /// Names elements by new constants.
    pub fn expand_constants(&self, picks: &[(String, Sort, Elem)]) -> Result<Structure, StructureError> {
        let mut out = self.clone();
        for (name, sort, e) in picks {
            if !self.domain(*sort).contains(e) {
                return Err(StructureError::OutOfDomain { elem: *e, sort: *sort });
            }
            if out.voc.contains_symbol(name) {
                return Err(StructureError::NameClash(name.clone()));
            }
            out.voc
                .declare(name, SymbolKind::Constant(*sort))
                .map_err(|_| StructureError::NameClash(name.clone()))?;
            out.constants.insert(name.clone(), *e);
        }
        Ok(out)
    }

    /// Restricts the domain of `sort` to `subset`.
    pub fn relativize(&self, sort: Sort, subset: &BTreeSet<Elem>) -> Result<Structure, StructureError> {
        if subset.is_empty() {
            return Err(StructureError::EmptyRelativization);
        }
        for e in subset {
            if !self.domain(sort).contains(e) {
                return Err(StructureError::OutOfDomain { elem: *e, sort });
            }
        }
        let mut out = self.clone();
        out.domains.insert(sort, subset.clone());
        let inside = |tuple: &[Elem], profile: &[Sort]| {
            tuple
                .iter()
                .zip(profile)
                .all(|(e, s)| *s != sort || subset.contains(e))
        };
        for (c, s) in &self.voc.constants {
            if *s == sort && !subset.contains(&self.constants[c]) {
                return Err(StructureError::NotClosed {
                    symbol: c.clone(),
                    tuple: vec![],
                });
            }
        }
        for (f, p) in &self.voc.functions {
            let table: BTreeMap<Vec<Elem>, Elem> = self.functions[f]
                .iter()
                .filter(|(args, _)| inside(args, &p.args))
                .map(|(a, v)| (a.clone(), *v))
                .collect();
            if p.result == sort {
                if let Some((args, _)) = table.iter().find(|(_, v)| !subset.contains(v)) {
                    return Err(StructureError::NotClosed {
                        symbol: f.clone(),
                        tuple: args.clone(),
                    });
                }
            }
            out.functions.insert(f.clone(), table);
        }
        for (r, p) in &self.voc.relations {
            let kept = self.relations[r]
                .iter()
                .filter(|t| inside(t, p))
                .cloned()
                .collect();
            out.relations.insert(r.clone(), kept);
        }
        let all = out.universe();
        out.labels.retain(|e, _| all.contains(e));
        Ok(out)
    }

    /// Disjoint union of relational structures over one vocabulary.
    pub fn disjoint_union(ms: &[Structure]) -> Result<Structure, StructureError> {
        let Some(first) = ms.first() else {
            return Err(StructureError::VocabularyMismatch);
        };
        for m in ms {
            if !m.voc.is_relational() {
                return Err(StructureError::NonRelational);
            }
            if m.voc != first.voc {
                return Err(StructureError::VocabularyMismatch);
            }
        }
        let mut out = Structure::empty(first.voc.clone());
        let mut next: Elem = 0;
        for (i, m) in ms.iter().enumerate() {
            let map: BTreeMap<Elem, Elem> = m
                .universe()
                .into_iter()
                .map(|e| {
                    next += 1;
                    (e, next - 1)
                })
                .collect();
            for (s, d) in &m.domains {
                let dom = out.domains.entry(*s).or_default();
                dom.extend(d.iter().map(|e| map[e]));
            }
            for (e, ne) in &map {
                out.labels.insert(*ne, format!("{}_{}", m.label(*e), i));
            }
            for (r, ts) in &m.relations {
                let target = out.relations.entry(r.clone()).or_default();
                target.extend(ts.iter().map(|t| t.iter().map(|e| map[e]).collect::<Vec<_>>()));
            }
        }
        Ok(out)
    }

    /// Applies an element renaming (must be injective on the universe).
    pub fn map_elements(&self, f: &BTreeMap<Elem, Elem>) -> Structure {
        let m = |e: &Elem| *f.get(e).unwrap_or(e);
        Structure {
            voc: self.voc.clone(),
            domains: self
                .domains
                .iter()
                .map(|(s, d)| (*s, d.iter().map(m).collect()))
                .collect(),
            relations: self
                .relations
                .iter()
                .map(|(r, ts)| (r.clone(), ts.iter().map(|t| t.iter().map(m).collect()).collect()))
                .collect(),
            functions: self
                .functions
                .iter()
                .map(|(n, tab)| {
                    (
                        n.clone(),
                        tab.iter().map(|(a, v)| (a.iter().map(m).collect(), m(v))).collect(),
                    )
                })
                .collect(),
            constants: self.constants.iter().map(|(c, e)| (c.clone(), m(e))).collect(),
            labels: self.labels.iter().map(|(e, l)| (m(e), l.clone())).collect(),
        }
    }

    /// Renames symbols (the structure counterpart of formula renaming).
    pub fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Structure {
        let r = |n: &String| map.get(n).cloned().unwrap_or_else(|| n.clone());
        let mut voc = Vocabulary::new();
        voc.sorts = self.voc.sorts.clone();
        for (n, k) in self.voc.symbols() {
            voc.declare(&r(&n), k).expect("renaming must be injective");
        }
        Structure {
            voc,
            domains: self.domains.clone(),
            relations: self.relations.iter().map(|(n, t)| (r(n), t.clone())).collect(),
            functions: self.functions.iter().map(|(n, t)| (r(n), t.clone())).collect(),
            constants: self.constants.iter().map(|(n, e)| (r(n), *e)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// Sets the interpretation of a relation, declaring it if needed.
    pub fn set_relation(&mut self, name: &str, profile: &[Sort], tuples: impl IntoIterator<Item = Vec<Elem>>) {
        self.voc
            .declare(name, SymbolKind::Relation(profile.to_vec()))
            .expect("relation profile clash");
        self.relations.insert(name.to_string(), tuples.into_iter().collect());
    }

    pub fn set_function(&mut self, name: &str, profile: FnProfile, table: BTreeMap<Vec<Elem>, Elem>) {
        self.voc
            .declare(name, SymbolKind::Function(profile))
            .expect("function profile clash");
        self.functions.insert(name.to_string(), table);
    }

    pub fn set_constant(&mut self, name: &str, sort: Sort, e: Elem) {
        self.voc
            .declare(name, SymbolKind::Constant(sort))
            .expect("constant sort clash");
        self.constants.insert(name.to_string(), e);
    }
}

/// Pure set of `n` elements over sort 0 with no symbols.
pub fn pure_set(n: u32) -> Structure {
    Structure::on_elements(Vocabulary::new(), n)
}

/// Strict linear order `<` on `n` elements.
pub fn linear_order(n: u32) -> Structure {
    let mut m = Structure::on_elements(Vocabulary::new(), n);
    let tuples = (0..n).flat_map(|a| ((a + 1)..n).map(move |b| vec![a, b]));
    m.set_relation("lt", &[0, 0], tuples);
    m
}
