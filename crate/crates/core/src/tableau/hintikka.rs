use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::engine::{Engine, Guide, Outcome};
use super::{rewrites, TableauBounds, TableauError};
use crate::structures::{Elem, Structure};
use crate::syntax::{
    declarations, dual_negation, parse_formula_file, Formula, ParseError, Quantifier, Sort, Term, Vocabulary,
};

/// A set of sentences over the base vocabulary plus pools of witness
/// constants, one pool per sort.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HintikkaSet {
    pub voc: Vocabulary,
    pub sentences: BTreeSet<Formula>,
    pub pools: BTreeMap<Sort, BTreeSet<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// Index of the failed condition, 1 to 9.
    pub condition: u8,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "condition {}: {}", self.condition, self.witness)
    }
}

impl HintikkaSet {
    /// The base vocabulary extended by the pool constants.
    pub fn full_vocabulary(&self) -> Vocabulary {
        let mut v = self.voc.clone();
        for (s, cs) in &self.pools {
            v.sorts.insert(*s);
            for c in cs {
                v.constants.insert(c.clone(), *s);
            }
        }
        v
    }

    fn is_pool(&self, t: &Term) -> bool {
        matches!(t, Term::Const { name, sort } if self.pools.get(sort).is_some_and(|p| p.contains(name)))
    }

    /// Ground terms of the atoms and negated atoms, subterm closed.
    pub fn terms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        for f in &self.sentences {
            let a = match f {
                Formula::Not(g) if g.is_atomic() => g,
                g if g.is_atomic() => g,
                _ => continue,
            };
            for t in atom_args(a) {
                let mut v = Vec::new();
                t.subterms(&mut v);
                out.extend(v);
            }
        }
        out
    }
}

pub(crate) fn atom_args(a: &Formula) -> Vec<Term> {
    match a {
        Formula::Atom { args, .. } => args.clone(),
        Formula::Eq(l, r) => vec![l.clone(), r.clone()],
        _ => vec![],
    }
}

/// Every violation of the nine conditions. Universal conditions range over
/// the pools and the terms occurring in atoms of the set; condition 2 uses
/// the same rewrite restriction as the prover. Condition 3 is checked
/// before condition 9, which only looks at atoms.
pub fn check_hintikka(h: &HintikkaSet) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut v = |condition: u8, witness: String| out.push(Violation { condition, witness });
    let has = |f: &Formula| h.sentences.contains(f);
    let terms = h.terms();
    let mut reflexive = terms.clone();
    for (s, cs) in &h.pools {
        reflexive.extend(cs.iter().map(|c| Term::constant(c, *s)));
    }
    for t in &reflexive {
        if !has(&Formula::eq(t.clone(), t.clone())) {
            v(1, format!("{t} = {t} is missing"));
        }
    }
    let atoms: Vec<&Formula> = h.sentences.iter().filter(|f| f.is_atomic()).collect();
    let eqs: Vec<(&Term, &Term)> = h
        .sentences
        .iter()
        .filter_map(|f| match f {
            Formula::Eq(a, b) => Some((a, b)),
            _ => None,
        })
        .collect();
    for a in &atoms {
        for (t, u) in &eqs {
            for r in rewrites(a, t, u, &terms) {
                if !has(&r) {
                    v(2, format!("{r} from {a} and {t} = {u}"));
                }
            }
        }
    }
    for f in &h.sentences {
        match f {
            Formula::Not(g) if !g.is_atomic() => {
                let d = dual_negation(g);
                if !has(&d) {
                    v(3, format!("{d} for {f}"));
                }
            }
            Formula::Bottom => v(4, "bottom has no disjunct".into()),
            Formula::Or(ds) if !ds.iter().any(has) => v(4, format!("no disjunct of {f}")),
            Formula::And(cs) => {
                for c in cs.iter().filter(|c| !has(c)) {
                    v(5, format!("{c} for {f}"));
                }
            }
            Formula::Quant { q, var, sort, body } => {
                let pool = h.pools.get(sort).cloned().unwrap_or_default();
                let inst = |c: &String| body.substitute(var, &Term::constant(c, *sort));
                match q {
                    Quantifier::Exists => {
                        if !pool.iter().any(|c| has(&inst(c))) {
                            v(6, format!("no witness for {f}"));
                        }
                    }
                    Quantifier::Forall => {
                        for c in &pool {
                            let i = inst(c);
                            if !has(&i) {
                                v(7, format!("{i} for {f}"));
                            }
                        }
                    }
                    _ => v(0, format!("generalized quantifier in {f}")),
                }
            }
            _ => {}
        }
    }
    for t in &terms {
        let named = h.is_pool(t)
            || h
                .pools
                .get(&t.sort())
                .is_some_and(|p| p.iter().any(|c| has(&Formula::eq(t.clone(), Term::constant(c, t.sort())))));
        if !named {
            v(8, format!("{t} has no name"));
        }
    }
    for a in &atoms {
        if has(&Formula::not((*a).clone())) {
            v(9, format!("{a} and its negation"));
        }
    }
    out
}

struct Classes {
    parent: Vec<usize>,
}

impl Classes {
    fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        self.parent[i] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// The canonical model: pool constants modulo the equations between them.
/// Elements are labelled by the first constant of their class.
pub fn term_model(h: &HintikkaSet) -> Result<Structure, TableauError> {
    let violations = check_hintikka(h);
    if !violations.is_empty() {
        return Err(TableauError::HintikkaViolation(violations));
    }
    let consts: Vec<(Sort, String)> = h
        .pools
        .iter()
        .flat_map(|(s, cs)| cs.iter().map(move |c| (*s, c.clone())))
        .collect();
    let index: BTreeMap<String, usize> = consts.iter().enumerate().map(|(i, (_, c))| (c.clone(), i)).collect();
    let mut classes = Classes {
        parent: (0..consts.len()).collect(),
    };
    let pool_index = |t: &Term| -> Option<usize> {
        match t {
            Term::Const { name, .. } if h.is_pool(t) => index.get(name).copied(),
            _ => None,
        }
    };
    for f in &h.sentences {
        if let Formula::Eq(a, b) = f {
            if let (Some(i), Some(j)) = (pool_index(a), pool_index(b)) {
                classes.union(i, j);
            }
        }
    }
    let mut elem_of: Vec<Elem> = vec![0; consts.len()];
    let mut reps: BTreeMap<usize, Elem> = BTreeMap::new();
    for i in 0..consts.len() {
        let r = classes.find(i);
        let n = reps.len() as Elem;
        elem_of[i] = *reps.entry(r).or_insert(n);
    }
    let mut m = Structure::empty(h.full_vocabulary());
    for (i, (s, _)) in consts.iter().enumerate() {
        m.add_element(*s, elem_of[i]);
    }
    for (r, e) in &reps {
        m.labels.insert(*e, consts[*r].1.clone());
    }
    for (i, (_, c)) in consts.iter().enumerate() {
        m.constants.insert(c.clone(), elem_of[i]);
    }
    for (c, s) in &h.voc.constants {
        let named = h.pools.get(s).and_then(|p| {
            p.iter()
                .find(|d| h.sentences.contains(&Formula::eq(Term::constant(c, *s), Term::constant(d, *s))))
        });
        let e = match named {
            Some(d) => elem_of[index[d]],
            None => *m.domain(*s).iter().next().ok_or(TableauError::EmptySort(*s))?,
        };
        m.constants.insert(c.clone(), e);
    }
    for r in h.voc.relations.keys() {
        m.relations.entry(r.clone()).or_default();
    }
    for f in &h.sentences {
        if let Formula::Atom { rel, args } = f {
            let tuple: Option<Vec<Elem>> = args.iter().map(|a| pool_index(a).map(|i| elem_of[i])).collect();
            if let Some(t) = tuple {
                m.relations.entry(rel.clone()).or_default().insert(t);
            }
        }
    }
    for (fun, profile) in &h.voc.functions {
        let mut table: BTreeMap<Vec<Elem>, Elem> = BTreeMap::new();
        for f in &h.sentences {
            if let Formula::Eq(Term::App { fun: g, args, .. }, d) = f {
                if g != fun {
                    continue;
                }
                let tuple: Option<Vec<Elem>> = args.iter().map(|a| pool_index(a).map(|i| elem_of[i])).collect();
                if let (Some(t), Some(j)) = (tuple, pool_index(d)) {
                    table.entry(t).or_insert(elem_of[j]);
                }
            }
        }
        // Arguments never named in the set map to the first element.
        let default = *m
            .domain(profile.result)
            .iter()
            .next()
            .ok_or(TableauError::EmptySort(profile.result))?;
        let mut tuples: Vec<Vec<Elem>> = vec![vec![]];
        for s in &profile.args {
            let dom: Vec<Elem> = m.domain(*s).iter().copied().collect();
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    dom.iter().map(move |e| {
                        let mut t = t.clone();
                        t.push(*e);
                        t
                    })
                })
                .collect();
        }
        for t in tuples {
            table.entry(t).or_insert(default);
        }
        m.functions.insert(fun.clone(), table);
    }
    Ok(m)
}

/// The Hintikka set of true sentences read off a model of `roots`: one
/// pool constant per element and sort, witnesses and disjuncts chosen by
/// truth in the model.
pub fn hintikka_from_model(roots: &[Formula], model: &Structure) -> Result<HintikkaSet, TableauError> {
    let mut avoid = model.voc.symbol_names();
    let mut names = BTreeMap::new();
    let mut picks = Vec::new();
    for (s, dom) in &model.domains {
        for e in dom {
            let name = model.voc.fresh_name(&format!("m{s}_{}", model.label(*e)), &avoid);
            avoid.insert(name.clone());
            names.insert((*s, *e), name.clone());
            picks.push((name, *s, *e));
        }
    }
    let expanded = model
        .expand_constants(&picks)
        .map_err(|e| TableauError::Model(e.to_string()))?;
    let guide = Guide { model: expanded, names };
    let mut engine = Engine::new(&model.voc, TableauBounds::generous(), Some(guide));
    let b = engine.start(roots);
    match engine.run(b) {
        Outcome::Open(b) => Ok(engine.hintikka(&b)),
        Outcome::Closed(_) => Err(TableauError::Model("model-guided branch closed".into())),
        Outcome::Budget(why) => Err(TableauError::Model(why)),
        Outcome::Deferred => Err(TableauError::Model("unbounded engine deferred a witness".into())),
    }
}

/// Reads a Hintikka set file: formula-file declarations, `pool s: c d`
/// lines naming the witness constants of sort `s`, then sentences
/// separated by `;`.
pub fn parse_hintikka(text: &str) -> Result<HintikkaSet, ParseError> {
    let mut pools: BTreeMap<Sort, BTreeSet<String>> = BTreeMap::new();
    let mut rest = String::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let code = line.split('#').next().unwrap_or("").trim();
        if let Some(decl) = code.strip_prefix("pool ") {
            let bad = || ParseError::SyntaxError {
                pos: offset,
                msg: "expected `pool sort: constants`".into(),
            };
            let (s, cs) = decl.split_once(':').ok_or_else(bad)?;
            let s: Sort = s.trim().parse().map_err(|_| bad())?;
            let entry = pools.entry(s).or_default();
            let mut decl_line = String::new();
            for c in cs.split_whitespace() {
                entry.insert(c.to_string());
                decl_line.push_str(&format!("const {c}: {s}\n"));
            }
            // Same length as the original line keeps error positions right.
            rest.push_str(&decl_line);
        } else {
            rest.push_str(line);
        }
        offset += line.len();
    }
    let file = parse_formula_file(&rest)?;
    let mut voc = file.voc.clone();
    for (s, cs) in &pools {
        voc.sorts.insert(*s);
        for c in cs {
            voc.constants.remove(c);
        }
    }
    Ok(HintikkaSet {
        voc,
        sentences: file.formulas.into_iter().collect(),
        pools,
    })
}

impl fmt::Display for HintikkaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", declarations(&self.voc))?;
        for (s, cs) in &self.pools {
            let cs: Vec<&str> = cs.iter().map(String::as_str).collect();
            writeln!(f, "pool {s}: {}", cs.join(" "))?;
        }
        let fs: Vec<String> = self.sentences.iter().map(|s| s.to_string()).collect();
        writeln!(f, "{}", fs.join(";\n"))
    }
}
