use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::eval::{eval, CFormula, DenseModel, RelTable, SymbolTable};
use super::{Assignment, SemanticsError};
use crate::structures::{Elem, Structure};
use crate::syntax::{Formula, Sort, Vocabulary};

#[derive(Clone, Debug)]
pub struct EntailOptions {
    /// Maximum number of structures the enumeration may visit.
    pub budget: f64,
}

impl Default for EntailOptions {
    fn default() -> Self {
        EntailOptions {
            budget: (1u64 << 26) as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum EntailmentVerdict {
    /// No countermodel with at most `bound` elements per sort.
    EntailsUpToBound(usize),
    Countermodel(Structure, Assignment),
}

/// Checks `premises ⊨ conclusion` on every structure with at most `bound`
/// elements per sort. Free variables are read universally; a countermodel
/// comes with the falsifying assignment.
pub fn entails_bounded(
    premises: &[Formula],
    conclusion: &Formula,
    bound: usize,
    opts: &EntailOptions,
) -> Result<EntailmentVerdict, SemanticsError> {
    let mut fs: Vec<Formula> = premises.to_vec();
    fs.push(Formula::not(conclusion.clone()));
    let mut voc = Vocabulary::new();
    for f in &fs {
        voc = voc
            .union(&f.vocabulary())
            .map_err(|e| SemanticsError::VocabularyMismatch(e.to_string()))?;
    }
    match find_model(&voc, &fs, bound, opts)? {
        Some((m, asg)) => {
            for p in premises {
                debug_assert!(super::satisfies(&m, p, &asg)?);
                if !super::satisfies(&m, p, &asg)? {
                    return Err(SemanticsError::BudgetExceeded("countermodel failed re-check".into()));
                }
            }
            if super::satisfies(&m, conclusion, &asg)? {
                return Err(SemanticsError::BudgetExceeded("countermodel failed re-check".into()));
            }
            Ok(EntailmentVerdict::Countermodel(m, asg))
        }
        None => Ok(EntailmentVerdict::EntailsUpToBound(bound)),
    }
}

/// The least model (in enumeration order) over `voc` satisfying all of `fs`
/// with at most `bound` elements per sort. Free variables are existential.
pub fn find_model(
    voc: &Vocabulary,
    fs: &[Formula],
    bound: usize,
    opts: &EntailOptions,
) -> Result<Option<(Structure, Assignment)>, SemanticsError> {
    let mut found = None;
    search_models(voc, fs, bound, opts, |m, a| {
        found = Some((m, a));
        false
    })?;
    Ok(found)
}

/// Visits the models of `fs` in enumeration order until `visit` returns false.
pub fn search_models(
    voc: &Vocabulary,
    fs: &[Formula],
    bound: usize,
    opts: &EntailOptions,
    mut visit: impl FnMut(Structure, Assignment) -> bool,
) -> Result<(), SemanticsError> {
    let mut voc = voc.clone();
    for f in fs {
        voc = voc
            .union(&f.vocabulary())
            .map_err(|e| SemanticsError::VocabularyMismatch(e.to_string()))?;
    }
    if fs.iter().any(Formula::has_aleph_quantifier) {
        return Err(SemanticsError::SymbolicQuantifierOnFiniteStructure);
    }
    let free: Vec<(String, Sort)> = fs
        .iter()
        .flat_map(|f| f.free_vars())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let table = SymbolTable::new(&voc);
    let compiled: Vec<CFormula> = fs
        .iter()
        .map(|f| table.compile(f, &free))
        .collect::<Result<_, _>>()?;
    let slots = compiled.iter().map(|c| c.slots).max().unwrap_or(0).max(free.len());
    let overlap = fs.iter().any(Formula::has_cross_sort_equality);
    let layouts = layouts(table.sorts.len(), bound, overlap);

    let mut total = 0f64;
    for l in &layouts {
        total += Enumerator::new(&table, l).count();
    }
    if total > opts.budget {
        return Err(SemanticsError::BoundTooLargeForBudget {
            needed: total,
            cap: opts.budget,
        });
    }
    let free_slots: Vec<usize> = free
        .iter()
        .map(|(_, s)| table.sorts.iter().position(|x| x == s).expect("sort in table"))
        .collect();
    let mut env = vec![0u32; slots];
    for l in &layouts {
        let mut en = Enumerator::new(&table, l);
        loop {
            if let Some(asg) = satisfying_assignment(&en.model, &compiled, &free_slots, &mut env) {
                let (m, a) = en.to_structure(&free, &asg);
                if !visit(m, a) {
                    return Ok(());
                }
            }
            if !en.advance() {
                break;
            }
        }
    }
    Ok(())
}

fn satisfying_assignment(
    m: &DenseModel,
    fs: &[CFormula],
    free_sorts: &[usize],
    env: &mut [u32],
) -> Option<Vec<u32>> {
    fn rec(m: &DenseModel, fs: &[CFormula], free_sorts: &[usize], i: usize, env: &mut [u32]) -> bool {
        if i == free_sorts.len() {
            return fs.iter().all(|f| eval(m, &f.body, env));
        }
        for e in m.sort_dom[free_sorts[i]].clone() {
            env[i] = e;
            if rec(m, fs, free_sorts, i + 1, env) {
                return true;
            }
        }
        false
    }
    if rec(m, fs, free_sorts, 0, env) {
        Some(env[..free_sorts.len()].to_vec())
    } else {
        None
    }
}

/// Sort domains as subsets of `0..n`, in enumeration order.
type Layout = (usize, Vec<Vec<u32>>);

fn layouts(sorts: usize, bound: usize, overlap: bool) -> Vec<Layout> {
    if sorts == 0 {
        return vec![(0, vec![])];
    }
    let mut out = Vec::new();
    if !overlap {
        let mut sizes_list: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..sorts {
            sizes_list = sizes_list
                .into_iter()
                .flat_map(|v| (1..=bound).map(move |k| [v.clone(), vec![k]].concat()))
                .collect();
        }
        sizes_list.sort_by_key(|v| (v.iter().sum::<usize>(), v.clone()));
        for sizes in sizes_list {
            let mut next = 0u32;
            let doms = sizes
                .iter()
                .map(|k| {
                    let d: Vec<u32> = (next..next + *k as u32).collect();
                    next += *k as u32;
                    d
                })
                .collect();
            out.push((next as usize, doms));
        }
        return out;
    }
    for n in 1..=(bound * sorts) {
        let masks: Vec<u32> = (1u32..(1 << n))
            .filter(|m| m.count_ones() as usize <= bound)
            .collect();
        let mut choice = vec![0usize; sorts];
        'outer: loop {
            let union = choice.iter().fold(0u32, |acc, c| acc | masks[*c]);
            if union == (1 << n) - 1 {
                let doms = choice
                    .iter()
                    .map(|c| (0..n as u32).filter(|e| masks[*c] & (1 << e) != 0).collect())
                    .collect();
                out.push((n, doms));
            }
            for c in choice.iter_mut() {
                *c += 1;
                if *c < masks.len() {
                    continue 'outer;
                }
                *c = 0;
            }
            break;
        }
    }
    out
}

enum Digit {
    RelBit { rel: usize, cell: usize },
    Fun { fun: usize, cell: usize, choices: Vec<u32> },
    Const { idx: usize, choices: Vec<u32> },
}

struct Enumerator<'a> {
    table: &'a SymbolTable,
    model: DenseModel,
    digits: Vec<Digit>,
    state: Vec<usize>,
}

impl<'a> Enumerator<'a> {
    fn new(table: &'a SymbolTable, layout: &Layout) -> Enumerator<'a> {
        let (n, doms) = layout;
        let n = *n;
        let dom_of = |s: Sort| &doms[table.sorts.iter().position(|x| *x == s).unwrap()];
        let tuples = |profile: &[Sort]| -> Vec<Vec<u32>> {
            let mut acc: Vec<Vec<u32>> = vec![vec![]];
            for s in profile {
                acc = acc
                    .into_iter()
                    .flat_map(|t| dom_of(*s).iter().map(move |e| [t.clone(), vec![*e]].concat()))
                    .collect();
            }
            acc
        };
        let code = |t: &[u32]| t.iter().fold(0usize, |acc, a| acc * n + *a as usize);
        let mut digits = Vec::new();
        let mut rels = Vec::new();
        for (ri, r) in table.rels.iter().enumerate() {
            let profile = &table.voc.relations[r];
            rels.push(RelTable::Dense(vec![false; n.pow(profile.len() as u32)]));
            for t in tuples(profile) {
                digits.push(Digit::RelBit { rel: ri, cell: code(&t) });
            }
        }
        let mut funs = Vec::new();
        for (fi, f) in table.funs.iter().enumerate() {
            let p = &table.voc.functions[f];
            let choices = dom_of(p.result).clone();
            let mut tab = vec![0u32; n.pow(p.args.len() as u32)];
            for t in tuples(&p.args) {
                tab[code(&t)] = choices[0];
                digits.push(Digit::Fun {
                    fun: fi,
                    cell: code(&t),
                    choices: choices.clone(),
                });
            }
            funs.push(tab);
        }
        let mut consts = Vec::new();
        for (ci, c) in table.consts.iter().enumerate() {
            let choices = dom_of(table.voc.constants[c]).clone();
            consts.push(choices[0]);
            digits.push(Digit::Const { idx: ci, choices });
        }
        let state = vec![0; digits.len()];
        Enumerator {
            table,
            model: DenseModel {
                n,
                sort_dom: doms.clone(),
                rels,
                funs,
                consts,
            },
            digits,
            state,
        }
    }

    fn count(&self) -> f64 {
        self.digits
            .iter()
            .map(|d| match d {
                Digit::RelBit { .. } => 2.0,
                Digit::Fun { choices, .. } | Digit::Const { choices, .. } => choices.len() as f64,
            })
            .product()
    }

    fn set(&mut self, i: usize, v: usize) {
        self.state[i] = v;
        match &self.digits[i] {
            Digit::RelBit { rel, cell } => {
                if let RelTable::Dense(bits) = &mut self.model.rels[*rel] {
                    bits[*cell] = v == 1;
                }
            }
            Digit::Fun { fun, cell, choices } => self.model.funs[*fun][*cell] = choices[v],
            Digit::Const { idx, choices } => self.model.consts[*idx] = choices[v],
        }
    }

    fn advance(&mut self) -> bool {
        for i in 0..self.digits.len() {
            let radix = match &self.digits[i] {
                Digit::RelBit { .. } => 2,
                Digit::Fun { choices, .. } | Digit::Const { choices, .. } => choices.len(),
            };
            if self.state[i] + 1 < radix {
                self.set(i, self.state[i] + 1);
                return true;
            }
            self.set(i, 0);
        }
        false
    }

    fn to_structure(&self, free: &[(String, Sort)], asg: &[u32]) -> (Structure, Assignment) {
        dense_to_structure(self.table, &self.model, free, asg)
    }
}

/// Element labels `a`, `b`, ..., `z`, `e26`, ...
pub(crate) fn elem_label(i: u32) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("e{i}")
    }
}

pub(crate) fn dense_to_structure(
    table: &SymbolTable,
    m: &DenseModel,
    free: &[(String, Sort)],
    asg: &[u32],
) -> (Structure, Assignment) {
    let n = m.n;
    let mut s = Structure::empty(table.voc.clone());
    for (i, sort) in table.sorts.iter().enumerate() {
        for e in &m.sort_dom[i] {
            s.domains.entry(*sort).or_default().insert(*e as Elem);
        }
    }
    for e in 0..n as u32 {
        s.labels.insert(e, elem_label(e));
    }
    let decode = |mut code: usize, arity: usize| -> Vec<Elem> {
        let mut v = vec![0; arity];
        for i in (0..arity).rev() {
            v[i] = (code % n.max(1)) as Elem;
            code /= n.max(1);
        }
        v
    };
    for (ri, r) in table.rels.iter().enumerate() {
        let arity = table.voc.relations[r].len();
        let mut set = BTreeSet::new();
        if let RelTable::Dense(bits) = &m.rels[ri] {
            for (c, b) in bits.iter().enumerate() {
                if *b {
                    set.insert(decode(c, arity));
                }
            }
        }
        s.relations.insert(r.clone(), set);
    }
    for (fi, f) in table.funs.iter().enumerate() {
        let p = &table.voc.functions[f];
        let mut tab = BTreeMap::new();
        let arity = p.args.len();
        for c in 0..n.pow(arity as u32) {
            let args = decode(c, arity);
            let inside = args
                .iter()
                .zip(&p.args)
                .all(|(e, srt)| s.domain(*srt).contains(e));
            if inside {
                tab.insert(args, m.funs[fi][c] as Elem);
            }
        }
        s.functions.insert(f.clone(), tab);
    }
    for (ci, c) in table.consts.iter().enumerate() {
        s.constants.insert(c.clone(), m.consts[ci] as Elem);
    }
    let asg = free
        .iter()
        .zip(asg)
        .map(|((name, sort), e)| (name.clone(), (*sort, *e as Elem)))
        .collect();
    (s, asg)
}
