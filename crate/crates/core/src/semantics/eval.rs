//! Formulas compiled against a symbol table and evaluated over a dense,
//! index-addressed model.

use std::collections::{BTreeMap, HashSet};

use super::SemanticsError;
use crate::structures::{Elem, Structure};
use crate::syntax::{Formula, Quantifier, Sort, Term, Vocabulary};

/// Tables are stored densely up to this many cells, sparsely beyond.
const DENSE_LIMIT: usize = 1 << 22;

#[derive(Clone, Debug)]
pub(crate) enum RelTable {
    Dense(Vec<bool>),
    Sparse(HashSet<Vec<u32>>),
}

/// A model over elements `0..n` with symbols addressed by index.
#[derive(Clone, Debug)]
pub(crate) struct DenseModel {
    pub n: usize,
    /// Members of each sort (by sort slot).
    pub sort_dom: Vec<Vec<u32>>,
    pub rels: Vec<RelTable>,
    /// Function tables indexed by mixed-radix argument code (radix `n`).
    pub funs: Vec<Vec<u32>>,
    pub consts: Vec<u32>,
}

impl DenseModel {
    #[inline]
    pub fn code(&self, args: &[u32]) -> usize {
        args.iter().fold(0usize, |acc, a| acc * self.n + *a as usize)
    }

    #[inline]
    pub fn rel(&self, r: usize, args: &[u32]) -> bool {
        match &self.rels[r] {
            RelTable::Dense(bits) => bits[self.code(args)],
            RelTable::Sparse(set) => set.contains(args),
        }
    }
}

/// Symbol and sort numbering shared by compiled formulas and dense models.
#[derive(Clone, Debug)]
pub(crate) struct SymbolTable {
    pub voc: Vocabulary,
    pub sorts: Vec<Sort>,
    pub rels: Vec<String>,
    pub funs: Vec<String>,
    pub consts: Vec<String>,
}

impl SymbolTable {
    pub fn new(voc: &Vocabulary) -> SymbolTable {
        SymbolTable {
            voc: voc.clone(),
            sorts: voc.sorts.iter().copied().collect(),
            rels: voc.relations.keys().cloned().collect(),
            funs: voc.functions.keys().cloned().collect(),
            consts: voc.constants.keys().cloned().collect(),
        }
    }

    fn sort_slot(&self, s: Sort) -> Option<usize> {
        self.sorts.iter().position(|x| *x == s)
    }

    /// Converts a structure (whose vocabulary must contain the table's) into
    /// a dense model, also returning the element numbering.
    pub fn densify(&self, m: &Structure) -> Result<(DenseModel, Vec<Elem>), SemanticsError> {
        if !self.voc.is_subvocabulary_of(&m.voc) {
            return Err(SemanticsError::VocabularyMismatch(format!(
                "formula vocabulary {} is not part of the structure's {}",
                self.voc, m.voc
            )));
        }
        let elems: Vec<Elem> = m.universe().into_iter().collect();
        let index: BTreeMap<Elem, u32> = elems.iter().enumerate().map(|(i, e)| (*e, i as u32)).collect();
        let n = elems.len();
        let sort_dom = self
            .sorts
            .iter()
            .map(|s| m.domain(*s).iter().map(|e| index[e]).collect())
            .collect();
        let rels = self
            .rels
            .iter()
            .map(|r| {
                let arity = self.voc.relations[r].len();
                let tuples = m.relations[r].iter().map(|t| t.iter().map(|e| index[e]).collect::<Vec<u32>>());
                match n.checked_pow(arity as u32).filter(|c| *c <= DENSE_LIMIT) {
                    Some(cells) => {
                        let mut bits = vec![false; cells];
                        for t in tuples {
                            bits[t.iter().fold(0usize, |acc, a| acc * n + *a as usize)] = true;
                        }
                        RelTable::Dense(bits)
                    }
                    None => RelTable::Sparse(tuples.collect()),
                }
            })
            .collect();
        let mut funs = Vec::new();
        for f in &self.funs {
            let arity = self.voc.functions[f].args.len();
            let cells = n
                .checked_pow(arity as u32)
                .filter(|c| *c <= DENSE_LIMIT)
                .ok_or(SemanticsError::BudgetExceeded("function table too large".into()))?;
            let mut tab = vec![0u32; cells];
            for (args, v) in &m.functions[f] {
                let code = args.iter().fold(0usize, |acc, a| acc * n + index[a] as usize);
                tab[code] = index[v];
            }
            funs.push(tab);
        }
        let consts = self.consts.iter().map(|c| index[&m.constants[c]]).collect();
        Ok((
            DenseModel {
                n,
                sort_dom,
                rels,
                funs,
                consts,
            },
            elems,
        ))
    }

    pub fn compile(&self, f: &Formula, free: &[(String, Sort)]) -> Result<CFormula, SemanticsError> {
        let mut scope: Vec<String> = free.iter().map(|v| v.0.clone()).collect();
        let mut c = Compiler { table: self, max_slot: scope.len() };
        let body = c.formula(f, &mut scope)?;
        Ok(CFormula {
            body,
            slots: c.max_slot,
        })
    }
}

#[derive(Clone, Debug)]
pub(crate) enum CTerm {
    Var(usize),
    Const(usize),
    App(usize, Vec<CTerm>),
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum CQuant {
    Forall,
    Exists,
    AtLeast(usize),
}

#[derive(Clone, Debug)]
pub(crate) enum CF {
    Rel(usize, Vec<CTerm>),
    Eq(CTerm, CTerm),
    Top,
    Bottom,
    Not(Box<CF>),
    And(Vec<CF>),
    Or(Vec<CF>),
    Quant { q: CQuant, slot: usize, sort: usize, body: Box<CF> },
}

#[derive(Clone, Debug)]
pub(crate) struct CFormula {
    pub body: CF,
    pub slots: usize,
}

struct Compiler<'a> {
    table: &'a SymbolTable,
    max_slot: usize,
}

impl Compiler<'_> {
    fn term(&mut self, t: &Term, scope: &[String]) -> Result<CTerm, SemanticsError> {
        Ok(match t {
            Term::Var { name, .. } => match scope.iter().rposition(|v| v == name) {
                Some(i) => CTerm::Var(i),
                None => return Err(SemanticsError::UnboundVariable(name.clone())),
            },
            Term::Const { name, .. } => CTerm::Const(
                self.table
                    .consts
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| SemanticsError::VocabularyMismatch(format!("constant `{name}`")))?,
            ),
            Term::App { fun, args, .. } => {
                let i = self
                    .table
                    .funs
                    .iter()
                    .position(|c| c == fun)
                    .ok_or_else(|| SemanticsError::VocabularyMismatch(format!("function `{fun}`")))?;
                CTerm::App(i, args.iter().map(|a| self.term(a, scope)).collect::<Result<_, _>>()?)
            }
        })
    }

    fn formula(&mut self, f: &Formula, scope: &mut Vec<String>) -> Result<CF, SemanticsError> {
        Ok(match f {
            Formula::Atom { rel, args } => {
                let i = self
                    .table
                    .rels
                    .iter()
                    .position(|r| r == rel)
                    .ok_or_else(|| SemanticsError::VocabularyMismatch(format!("relation `{rel}`")))?;
                CF::Rel(i, args.iter().map(|a| self.term(a, scope)).collect::<Result<_, _>>()?)
            }
            Formula::Eq(a, b) => CF::Eq(self.term(a, scope)?, self.term(b, scope)?),
            Formula::Top => CF::Top,
            Formula::Bottom => CF::Bottom,
            Formula::Not(g) => CF::Not(Box::new(self.formula(g, scope)?)),
            Formula::And(fs) => CF::And(fs.iter().map(|g| self.formula(g, scope)).collect::<Result<_, _>>()?),
            Formula::Or(fs) => CF::Or(fs.iter().map(|g| self.formula(g, scope)).collect::<Result<_, _>>()?),
            Formula::Quant { q, var, sort, body } => {
                let q = match q {
                    Quantifier::Forall => CQuant::Forall,
                    Quantifier::Exists => CQuant::Exists,
                    Quantifier::AtLeast(k) => CQuant::AtLeast(*k as usize),
                    Quantifier::Aleph(_) => return Err(SemanticsError::SymbolicQuantifierOnFiniteStructure),
                };
                let sort = self
                    .table
                    .sort_slot(*sort)
                    .ok_or_else(|| SemanticsError::VocabularyMismatch(format!("sort {sort}")))?;
                let slot = scope.len();
                scope.push(var.clone());
                self.max_slot = self.max_slot.max(scope.len());
                let body = self.formula(body, scope);
                scope.pop();
                CF::Quant {
                    q,
                    slot,
                    sort,
                    body: Box::new(body?),
                }
            }
        })
    }
}

#[inline]
fn eval_term(m: &DenseModel, t: &CTerm, env: &[u32]) -> u32 {
    match t {
        CTerm::Var(i) => env[*i],
        CTerm::Const(c) => m.consts[*c],
        CTerm::App(f, args) => {
            let code = args
                .iter()
                .fold(0usize, |acc, a| acc * m.n + eval_term(m, a, env) as usize);
            m.funs[*f][code]
        }
    }
}

pub(crate) fn eval(m: &DenseModel, f: &CF, env: &mut [u32]) -> bool {
    match f {
        CF::Rel(r, args) => {
            let mut buf = [0u32; 8];
            if args.len() <= 8 {
                for (i, a) in args.iter().enumerate() {
                    buf[i] = eval_term(m, a, env);
                }
                m.rel(*r, &buf[..args.len()])
            } else {
                let v: Vec<u32> = args.iter().map(|a| eval_term(m, a, env)).collect();
                m.rel(*r, &v)
            }
        }
        CF::Eq(a, b) => eval_term(m, a, env) == eval_term(m, b, env),
        CF::Top => true,
        CF::Bottom => false,
        CF::Not(g) => !eval(m, g, env),
        CF::And(fs) => fs.iter().all(|g| eval(m, g, env)),
        CF::Or(fs) => fs.iter().any(|g| eval(m, g, env)),
        CF::Quant { q, slot, sort, body } => {
            let dom = &m.sort_dom[*sort];
            match q {
                CQuant::Forall => dom.iter().all(|e| {
                    env[*slot] = *e;
                    eval(m, body, env)
                }),
                CQuant::Exists => dom.iter().any(|e| {
                    env[*slot] = *e;
                    eval(m, body, env)
                }),
                CQuant::AtLeast(k) => {
                    let mut count = 0;
                    for (i, e) in dom.iter().enumerate() {
                        if count + (dom.len() - i) < *k {
                            return false;
                        }
                        env[*slot] = *e;
                        if eval(m, body, env) {
                            count += 1;
                            if count >= *k {
                                return true;
                            }
                        }
                    }
                    count >= *k
                }
            }
        }
    }
}
