//! Branch saturation. A branch grows by the nine closure rules; an open
//! branch with nothing left to do is a Hintikka set.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::proof::{ProofEnd, ProofNode, Step};
use super::{rewrites, HintikkaSet, TableauBounds};
use crate::semantics::satisfies_sentence;
use crate::structures::{Elem, Structure};
use crate::syntax::{dual_negation, Formula, Quantifier, Sort, Term, Vocabulary};

/// Cap on formulas added across the whole search.
const STEP_LIMIT: usize = 200_000;
/// Cap on witness and naming constants per branch.
const CONST_LIMIT: usize = 48;

/// Choices made by a model rather than by search.
pub(crate) struct Guide {
    /// Base model expanded by the pool constants.
    pub model: Structure,
    /// Pool constant of each (sort, element).
    pub names: BTreeMap<(Sort, Elem), String>,
}

impl Guide {
    fn holds(&self, f: &Formula) -> bool {
        satisfies_sentence(&self.model, f).unwrap_or(false)
    }

    fn value(&self, t: &Term) -> Option<Elem> {
        match t {
            Term::Const { name, .. } => self.model.constants.get(name).copied(),
            Term::App { fun, args, .. } => {
                let vals: Option<Vec<Elem>> = args.iter().map(|a| self.value(a)).collect();
                self.model.functions.get(fun)?.get(&vals?).copied()
            }
            Term::Var { .. } => None,
        }
    }
}

pub(crate) enum Outcome {
    Closed(ProofNode),
    Open(Box<Branch>),
    /// Saturated except for existentials beyond the witness generation.
    Deferred,
    Budget(String),
}

/// A unit split in progress: every disjunct but `live` closed at once.
struct Frame {
    steps: Vec<Step>,
    or: Formula,
    live: usize,
    closed: Vec<Option<ProofNode>>,
}

#[derive(Clone)]
pub(crate) struct Branch {
    pub set: BTreeSet<Formula>,
    queue: VecDeque<Formula>,
    atoms: Vec<Formula>,
    eqs: Vec<(Term, Term)>,
    /// Atom/equation pairs below these indices have been rewritten.
    done_atoms: usize,
    done_eqs: usize,
    terms: BTreeSet<Term>,
    pub pool: BTreeMap<Sort, Vec<String>>,
    /// Witness generation of each pool constant.
    gens: BTreeMap<String, usize>,
    deferred: usize,
    univ: Vec<Formula>,
    inst: BTreeSet<(usize, String)>,
    ors: Vec<Formula>,
    steps: Vec<Step>,
    clash: Option<Formula>,
    over: Option<String>,
    fresh_count: usize,
}

pub(crate) struct Engine<'a> {
    pub voc: &'a Vocabulary,
    pub bounds: TableauBounds,
    pub guide: Option<Guide>,
    /// Largest witness generation the existential rule may create.
    pub max_gen: usize,
    /// Vocabulary constants join the pools instead of being named.
    pub constants_as_names: bool,
    avoid: BTreeSet<String>,
    branches: usize,
    added: usize,
}

impl<'a> Engine<'a> {
    pub fn new(voc: &'a Vocabulary, bounds: TableauBounds, guide: Option<Guide>) -> Self {
        let mut avoid = voc.symbol_names();
        if let Some(g) = &guide {
            avoid.extend(g.names.values().cloned());
        }
        Engine {
            voc,
            bounds,
            guide,
            max_gen: usize::MAX,
            constants_as_names: false,
            avoid,
            branches: 1,
            added: 0,
        }
    }

    pub fn start(&mut self, roots: &[Formula]) -> Branch {
        let mut b = Branch {
            set: BTreeSet::new(),
            queue: VecDeque::new(),
            atoms: vec![],
            eqs: vec![],
            done_atoms: 0,
            done_eqs: 0,
            terms: BTreeSet::new(),
            pool: BTreeMap::new(),
            gens: BTreeMap::new(),
            deferred: 0,
            univ: vec![],
            inst: BTreeSet::new(),
            ors: vec![],
            steps: vec![],
            clash: None,
            over: None,
            fresh_count: 0,
        };
        if let Some(g) = &self.guide {
            for ((s, _), name) in &g.names {
                b.pool.entry(*s).or_default().push(name.clone());
            }
        }
        if self.constants_as_names {
            for (c, s) in &self.voc.constants {
                b.pool.entry(*s).or_default().push(c.clone());
            }
        }
        for f in roots {
            self.add(&mut b, f.clone(), None);
        }
        b
    }

    fn fresh(&self, b: &mut Branch, sort: Sort) -> String {
        loop {
            b.fresh_count += 1;
            let name = format!("w{sort}_{}", b.fresh_count);
            if !self.avoid.contains(&name) {
                return name;
            }
        }
    }

    fn new_constant(&self, b: &mut Branch, sort: Sort) -> String {
        let c = self.fresh(b, sort);
        b.pool.entry(sort).or_default().push(c.clone());
        if b.pool.values().map(Vec::len).sum::<usize>() > CONST_LIMIT {
            b.over.get_or_insert_with(|| format!("more than {CONST_LIMIT} constants"));
        }
        c
    }

    /// Adds `f` to the branch. `rule` is `None` for root formulas and split
    /// children, which are not recorded as steps.
    fn add(&mut self, b: &mut Branch, f: Formula, rule: Option<(u8, Vec<Formula>)>) {
        if b.set.contains(&f) {
            return;
        }
        self.added += 1;
        b.set.insert(f.clone());
        if let Some((rule, premises)) = rule {
            b.steps.push(Step {
                rule,
                premises,
                added: f.clone(),
            });
        }
        match &f {
            Formula::Atom { args, .. } => {
                if b.set.contains(&Formula::not(f.clone())) {
                    b.clash.get_or_insert(f.clone());
                }
                self.register_terms(b, args);
                b.atoms.push(f.clone());
            }
            Formula::Eq(l, r) => {
                if b.set.contains(&Formula::not(f.clone())) {
                    b.clash.get_or_insert(f.clone());
                }
                self.register_terms(b, &[l.clone(), r.clone()]);
                b.atoms.push(f.clone());
                b.eqs.push((l.clone(), r.clone()));
            }
            Formula::Not(g) if g.is_atomic() => {
                if b.set.contains(g) {
                    b.clash.get_or_insert((**g).clone());
                }
                self.register_terms(b, &super::hintikka::atom_args(g));
            }
            Formula::Top => {}
            Formula::Bottom | Formula::Or(_) => b.ors.push(f.clone()),
            Formula::Quant { q: Quantifier::Forall, .. } => b.univ.push(f.clone()),
            _ => b.queue.push_back(f.clone()),
        }
    }

    fn register_terms(&self, b: &mut Branch, args: &[Term]) {
        for a in args {
            let mut sub = Vec::new();
            a.subterms(&mut sub);
            for t in sub {
                if t.depth() > self.bounds.term_depth {
                    b.over.get_or_insert_with(|| format!("term depth exceeds {}", self.bounds.term_depth));
                }
                b.terms.insert(t);
            }
        }
    }

    fn expand(&mut self, b: &mut Branch, f: Formula) {
        match &f {
            Formula::Not(g) => self.add(b, dual_negation(g), Some((3, vec![f.clone()]))),
            Formula::And(fs) => {
                for g in fs {
                    self.add(b, g.clone(), Some((5, vec![f.clone()])));
                }
            }
            Formula::Quant {
                q: Quantifier::Exists,
                var,
                sort,
                body,
            } => {
                let c = match &self.guide {
                    Some(g) => {
                        let pick = g.model.domain(*sort).iter().find_map(|e| {
                            let name = &g.names[&(*sort, *e)];
                            let inst = body.substitute(var, &Term::constant(name, *sort));
                            g.holds(&inst).then(|| name.clone())
                        });
                        match pick {
                            Some(c) => c,
                            None => {
                                b.over.get_or_insert_with(|| "guide model has no witness".into());
                                return;
                            }
                        }
                    }
                    None => {
                        let gen = 1 + f.constants().iter().filter_map(|(c, _)| b.gens.get(c)).max().unwrap_or(&0);
                        if gen > self.max_gen {
                            b.deferred += 1;
                            return;
                        }
                        let c = self.new_constant(b, *sort);
                        b.gens.insert(c.clone(), gen);
                        c
                    }
                };
                let inst = body.substitute(var, &Term::constant(&c, *sort));
                self.add(b, inst, Some((6, vec![f.clone()])));
            }
            _ => {}
        }
    }

    /// Rule 1 for every term and pool constant. Returns whether anything
    /// was added.
    fn reflexivity(&mut self, b: &mut Branch) -> bool {
        let mut todo: Vec<Term> = b.terms.iter().cloned().collect();
        for (s, cs) in &b.pool {
            todo.extend(cs.iter().map(|c| Term::constant(c, *s)));
        }
        let before = b.set.len();
        for t in todo {
            let f = Formula::eq(t.clone(), t);
            if !b.set.contains(&f) {
                self.add(b, f, Some((1, vec![])));
            }
        }
        b.set.len() > before
    }

    /// One round of rule 2 over the unprocessed atom/equation pairs.
    fn congruence(&mut self, b: &mut Branch) -> bool {
        let (na, ne) = (b.atoms.len(), b.eqs.len());
        let mut out = Vec::new();
        for i in 0..na {
            let j0 = if i < b.done_atoms { b.done_eqs } else { 0 };
            for j in j0..ne {
                let (t, u) = &b.eqs[j];
                if t == u {
                    continue;
                }
                for r in rewrites(&b.atoms[i], t, u, &b.terms) {
                    if !b.set.contains(&r) {
                        out.push((r, b.atoms[i].clone(), Formula::eq(t.clone(), u.clone())));
                    }
                }
            }
        }
        b.done_atoms = na;
        b.done_eqs = ne;
        let before = b.set.len();
        for (r, a, e) in out {
            self.add(b, r, Some((2, vec![a, e])));
        }
        b.set.len() > before || b.atoms.len() > na
    }

    fn is_pool_constant(b: &Branch, t: &Term) -> bool {
        matches!(t, Term::Const { name, sort } if b.pool.get(sort).is_some_and(|cs| cs.contains(name)))
    }

    /// Rule 8 for the first unnamed term.
    fn naming(&mut self, b: &mut Branch) -> bool {
        let unnamed = b.terms.iter().find(|t| {
            !Self::is_pool_constant(b, t)
                && !b.pool.get(&t.sort()).is_some_and(|cs| {
                    cs.iter()
                        .any(|c| b.set.contains(&Formula::eq((*t).clone(), Term::constant(c, t.sort()))))
                })
        });
        let Some(t) = unnamed.cloned() else {
            return false;
        };
        let c = match &self.guide {
            Some(g) => match g.value(&t).and_then(|v| g.names.get(&(t.sort(), v))) {
                Some(c) => c.clone(),
                None => {
                    b.over.get_or_insert_with(|| format!("guide model cannot evaluate {t}"));
                    return false;
                }
            },
            None => self.new_constant(b, t.sort()),
        };
        let s = t.sort();
        self.add(b, Formula::eq(t, Term::constant(&c, s)), Some((8, vec![])));
        true
    }

    /// Rule 7: every universal at every pool constant of its sort.
    fn instantiate(&mut self, b: &mut Branch) -> bool {
        let mut out = Vec::new();
        for (i, u) in b.univ.iter().enumerate() {
            let Formula::Quant { var, sort, body, .. } = u else {
                continue;
            };
            for c in b.pool.get(sort).cloned().unwrap_or_default() {
                if !b.inst.contains(&(i, c.clone())) {
                    out.push((i, c.clone(), body.substitute(var, &Term::constant(&c, *sort)), u.clone()));
                }
            }
        }
        if out.is_empty() {
            // A universal over an empty pool needs a first constant.
            let empty = b.univ.iter().find_map(|u| match u {
                Formula::Quant { sort, .. } if b.pool.get(sort).is_none_or(Vec::is_empty) => Some(*sort),
                _ => None,
            });
            if let Some(s) = empty {
                self.seed(b, s);
                return true;
            }
            return false;
        }
        for (i, c, inst, u) in out {
            b.inst.insert((i, c));
            self.add(b, inst, Some((7, vec![u])));
        }
        true
    }

    fn seed(&mut self, b: &mut Branch, s: Sort) {
        if self.guide.is_none() {
            self.new_constant(b, s);
        }
    }

    fn disjuncts(f: &Formula) -> &[Formula] {
        match f {
            Formula::Or(fs) => fs,
            _ => &[],
        }
    }

    fn refuted(b: &Branch, d: &Formula) -> bool {
        match d {
            Formula::Bottom => true,
            Formula::Not(g) if g.is_atomic() => b.set.contains(g),
            _ if d.is_atomic() => b.set.contains(&Formula::not(d.clone())),
            _ => false,
        }
    }

    /// The closed node for a disjunct already refuted on the branch.
    fn refutation(b: &Branch, d: &Formula) -> ProofNode {
        let end = match d {
            Formula::Not(g) => ProofEnd::Clash((**g).clone()),
            Formula::Bottom => ProofEnd::Split {
                disjunction: Formula::Bottom,
                children: vec![],
            },
            _ => ProofEnd::Clash(d.clone()),
        };
        debug_assert!(Self::refuted(b, d));
        ProofNode { steps: vec![], end }
    }

    pub fn run(&mut self, b: Branch) -> Outcome {
        let mut frames = Vec::new();
        let out = self.saturate(b, &mut frames);
        let Outcome::Closed(mut node) = out else {
            return out;
        };
        while let Some(f) = frames.pop() {
            let children = f
                .closed
                .into_iter()
                .enumerate()
                .map(|(i, c)| if i == f.live { std::mem::replace(&mut node, placeholder()) } else { c.expect("closed disjunct") })
                .collect();
            node = ProofNode {
                steps: f.steps,
                end: ProofEnd::Split {
                    disjunction: f.or,
                    children,
                },
            };
        }
        Outcome::Closed(node)
    }

    fn saturate(&mut self, mut b: Branch, frames: &mut Vec<Frame>) -> Outcome {
        loop {
            if let Some(a) = b.clash.take() {
                return Outcome::Closed(ProofNode {
                    steps: std::mem::take(&mut b.steps),
                    end: ProofEnd::Clash(a),
                });
            }
            if let Some(why) = &b.over {
                return Outcome::Budget(why.clone());
            }
            if self.added > STEP_LIMIT {
                return Outcome::Budget(format!("more than {STEP_LIMIT} formulas"));
            }
            if let Some(f) = b.queue.pop_front() {
                self.expand(&mut b, f);
                continue;
            }
            if self.reflexivity(&mut b) || self.congruence(&mut b) || self.naming(&mut b) || self.instantiate(&mut b)
            {
                continue;
            }
            // Sorts of the vocabulary that still have no element.
            if let Some(s) = self.voc.sorts.iter().find(|s| b.pool.get(s).is_none_or(Vec::is_empty)) {
                if self.guide.is_some() {
                    b.over = Some(format!("guide model has empty sort {s}"));
                    continue;
                }
                self.seed(&mut b, *s);
                continue;
            }
            // Disjunctions: the open one with the fewest live disjuncts.
            let open: Vec<(usize, &Formula)> = b
                .ors
                .iter()
                .filter(|f| !Self::disjuncts(f).iter().any(|d| b.set.contains(d)))
                .map(|f| (Self::disjuncts(f).iter().filter(|d| !Self::refuted(&b, d)).count(), f))
                .collect();
            let Some((live, or)) = open.iter().min_by_key(|(n, _)| *n) else {
                if b.deferred > 0 {
                    return Outcome::Deferred;
                }
                return Outcome::Open(Box::new(b));
            };
            let (live, or) = (*live, (*or).clone());
            if let Some(g) = &self.guide {
                match Self::disjuncts(&or).iter().find(|d| g.holds(d)) {
                    Some(d) => {
                        let d = d.clone();
                        self.add(&mut b, d, Some((4, vec![or])));
                        continue;
                    }
                    None => return Outcome::Budget("guide model falsifies a disjunction".into()),
                }
            }
            if live <= 1 {
                let ds = Self::disjuncts(&or).to_vec();
                let closed: Vec<Option<ProofNode>> = ds
                    .iter()
                    .map(|d| Self::refuted(&b, d).then(|| Self::refutation(&b, d)))
                    .collect();
                let steps = std::mem::take(&mut b.steps);
                match ds.iter().position(|d| !Self::refuted(&b, d)) {
                    None => {
                        return Outcome::Closed(ProofNode {
                            steps,
                            end: ProofEnd::Split {
                                disjunction: or,
                                children: closed.into_iter().map(|c| c.expect("refuted")).collect(),
                            },
                        })
                    }
                    Some(i) => {
                        let d = ds[i].clone();
                        frames.push(Frame { steps, or, live: i, closed });
                        self.add(&mut b, d, None);
                        continue;
                    }
                }
            }
            return self.split(b, or);
        }
    }

    fn split(&mut self, mut b: Branch, or: Formula) -> Outcome {
        let steps = std::mem::take(&mut b.steps);
        let mut children = Vec::new();
        let mut pending = None;
        for d in Self::disjuncts(&or) {
            if Self::refuted(&b, d) {
                children.push(Self::refutation(&b, d));
                continue;
            }
            self.branches += 1;
            if self.branches > self.bounds.branch_limit {
                return Outcome::Budget(format!("more than {} branches", self.bounds.branch_limit));
            }
            let mut c = b.clone();
            self.add(&mut c, d.clone(), None);
            match self.run(c) {
                Outcome::Closed(node) => children.push(node),
                Outcome::Open(open) => return Outcome::Open(open),
                Outcome::Budget(why) => pending = Some(Outcome::Budget(why)),
                Outcome::Deferred => {
                    if pending.is_none() {
                        pending = Some(Outcome::Deferred);
                    }
                }
            }
        }
        if let Some(p) = pending {
            return p;
        }
        Outcome::Closed(ProofNode {
            steps,
            end: ProofEnd::Split {
                disjunction: or,
                children,
            },
        })
    }

    pub fn hintikka(&self, b: &Branch) -> HintikkaSet {
        HintikkaSet {
            voc: self.voc.clone(),
            sentences: b.set.clone(),
            pools: b
                .pool
                .iter()
                .map(|(s, cs)| (*s, cs.iter().cloned().collect()))
                .collect(),
        }
    }
}

fn placeholder() -> ProofNode {
    ProofNode {
        steps: vec![],
        end: ProofEnd::Clash(Formula::Top),
    }
}
