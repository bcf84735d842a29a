use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::vocab::{FnProfile, Sort, SymbolKind, Vocabulary};

/// A sort-annotated term. Every node records its own sort so that formulas
/// are self-describing without an ambient vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Var { name: String, sort: Sort },
    Const { name: String, sort: Sort },
    App { fun: String, args: Vec<Term>, sort: Sort },
}

impl Term {
    pub fn var(name: &str, sort: Sort) -> Term {
        Term::Var {
            name: name.to_string(),
            sort,
        }
    }

    pub fn constant(name: &str, sort: Sort) -> Term {
        Term::Const {
            name: name.to_string(),
            sort,
        }
    }

    pub fn app(fun: &str, args: Vec<Term>, sort: Sort) -> Term {
        Term::App {
            fun: fun.to_string(),
            args,
            sort,
        }
    }

    pub fn sort(&self) -> Sort {
        match self {
            Term::Var { sort, .. } | Term::Const { sort, .. } | Term::App { sort, .. } => *sort,
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var { .. } => false,
            Term::Const { .. } => true,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var { .. } | Term::Const { .. } => 0,
            Term::App { args, .. } => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<(String, Sort)>) {
        match self {
            Term::Var { name, sort } => {
                out.insert((name.clone(), *sort));
            }
            Term::Const { .. } => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    fn collect_vocab(&self, voc: &mut Vocabulary) {
        match self {
            Term::Var { sort, .. } => {
                voc.sorts.insert(*sort);
            }
            Term::Const { name, sort } => {
                let _ = voc.declare(name, SymbolKind::Constant(*sort));
            }
            Term::App { fun, args, sort } => {
                let _ = voc.declare(
                    fun,
                    SymbolKind::Function(FnProfile {
                        args: args.iter().map(Term::sort).collect(),
                        result: *sort,
                    }),
                );
                args.iter().for_each(|a| a.collect_vocab(voc));
            }
        }
    }

    /// Replaces variable `name` by `by` (terms have no binders).
    pub fn substitute(&self, name: &str, by: &Term) -> Term {
        match self {
            Term::Var { name: n, .. } if n == name => by.clone(),
            Term::Var { .. } | Term::Const { .. } => self.clone(),
            Term::App { fun, args, sort } => Term::App {
                fun: fun.clone(),
                args: args.iter().map(|a| a.substitute(name, by)).collect(),
                sort: *sort,
            },
        }
    }

    /// Replaces every occurrence of the subterm `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        match self {
            Term::App { fun, args, sort } => Term::App {
                fun: fun.clone(),
                args: args.iter().map(|a| a.replace(from, to)).collect(),
                sort: *sort,
            },
            _ => self.clone(),
        }
    }

    fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Term {
        let r = |n: &String| map.get(n).cloned().unwrap_or_else(|| n.clone());
        match self {
            Term::Var { .. } => self.clone(),
            Term::Const { name, sort } => Term::Const {
                name: r(name),
                sort: *sort,
            },
            Term::App { fun, args, sort } => Term::App {
                fun: r(fun),
                args: args.iter().map(|a| a.rename_symbols(map)).collect(),
                sort: *sort,
            },
        }
    }

    fn rename_var(&self, from: &str, to: &str) -> Term {
        match self {
            Term::Var { name, sort } if name == from => Term::var(to, *sort),
            Term::App { fun, args, sort } => Term::App {
                fun: fun.clone(),
                args: args.iter().map(|a| a.rename_var(from, to)).collect(),
                sort: *sort,
            },
            _ => self.clone(),
        }
    }

    /// Every subterm including `self`, innermost first.
    pub fn subterms(&self, out: &mut Vec<Term>) {
        if let Term::App { args, .. } = self {
            for a in args {
                a.subterms(out);
            }
        }
        out.push(self.clone());
    }

    pub fn constants(&self, out: &mut BTreeSet<(String, Sort)>) {
        match self {
            Term::Const { name, sort } => {
                out.insert((name.clone(), *sort));
            }
            Term::App { args, .. } => args.iter().for_each(|a| a.constants(out)),
            Term::Var { .. } => {}
        }
    }
}

/// Quantifier kinds, including the threshold quantifier `Qge k` ("at least k")
/// and the symbolic cardinality quantifier `Qaleph a` ("at least aleph_a").
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Quantifier {
    Forall,
    Exists,
    AtLeast(u32),
    Aleph(u32),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Formula {
    Atom { rel: String, args: Vec<Term> },
    Eq(Term, Term),
    Top,
    Bottom,
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Quant {
        q: Quantifier,
        var: String,
        sort: Sort,
        body: Box<Formula>,
    },
}

impl Formula {
    pub fn atom(rel: &str, args: Vec<Term>) -> Formula {
        Formula::Atom {
            rel: rel.to_string(),
            args,
        }
    }

    pub fn prop(name: &str) -> Formula {
        Formula::atom(name, vec![])
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; the empty list is `Top`.
    pub fn and(fs: Vec<Formula>) -> Formula {
        if fs.is_empty() {
            Formula::Top
        } else {
            Formula::And(fs)
        }
    }

    /// Disjunction; the empty list is `Bottom`.
    pub fn or(fs: Vec<Formula>) -> Formula {
        if fs.is_empty() {
            Formula::Bottom
        } else {
            Formula::Or(fs)
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Or(vec![Formula::not(a), b])
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::And(vec![
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    pub fn quant(q: Quantifier, var: &str, sort: Sort, body: Formula) -> Formula {
        Formula::Quant {
            q,
            var: var.to_string(),
            sort,
            body: Box::new(body),
        }
    }

    pub fn forall(var: &str, sort: Sort, body: Formula) -> Formula {
        Formula::quant(Quantifier::Forall, var, sort, body)
    }

    pub fn exists(var: &str, sort: Sort, body: Formula) -> Formula {
        Formula::quant(Quantifier::Exists, var, sort, body)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atom { .. } | Formula::Eq(..))
    }

    /// Atomic, negated atomic, `Top` or `Bottom`.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(g) => g.is_atomic(),
            Formula::Top | Formula::Bottom => true,
            f => f.is_atomic(),
        }
    }

    /// Number of AST nodes; terms count as part of their atom.
    pub fn node_count(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Eq(..) | Formula::Top | Formula::Bottom => 1,
            Formula::Not(g) => 1 + g.node_count(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::node_count).sum::<usize>(),
            Formula::Quant { body, .. } => 1 + body.node_count(),
        }
    }

    /// Maximal nesting of quantifiers.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::Not(g) => g.quantifier_rank(),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().map(Formula::quantifier_rank).max().unwrap_or(0)
            }
            Formula::Quant { body, .. } => 1 + body.quantifier_rank(),
            _ => 0,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<(String, Sort)>) {
        let add_term = |t: &Term, bound: &Vec<String>, out: &mut BTreeSet<(String, Sort)>| {
            let mut vs = BTreeSet::new();
            t.collect_vars(&mut vs);
            for v in vs {
                if !bound.contains(&v.0) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Atom { args, .. } => args.iter().for_each(|t| add_term(t, bound, out)),
            Formula::Eq(a, b) => {
                add_term(a, bound, out);
                add_term(b, bound, out);
            }
            Formula::Top | Formula::Bottom => {}
            Formula::Not(g) => g.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.collect_free(bound, out)),
            Formula::Quant { var, body, .. } => {
                bound.push(var.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All variable names, bound or free.
    pub fn var_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Atom { args, .. } => {
                for t in args {
                    let mut vs = BTreeSet::new();
                    t.collect_vars(&mut vs);
                    out.extend(vs.into_iter().map(|v| v.0));
                }
            }
            Formula::Eq(a, b) => {
                let mut vs = BTreeSet::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                out.extend(vs.into_iter().map(|v| v.0));
            }
            Formula::Quant { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal of all subformulas.
    pub fn walk(&self, visit: &mut impl FnMut(&Formula)) {
        visit(self);
        match self {
            Formula::Not(g) => g.walk(visit),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.walk(visit)),
            Formula::Quant { body, .. } => body.walk(visit),
            _ => {}
        }
    }

    /// Ground and non-ground constants occurring in the formula.
    pub fn constants(&self) -> BTreeSet<(String, Sort)> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Atom { args, .. } => args.iter().for_each(|t| t.constants(&mut out)),
            Formula::Eq(a, b) => {
                a.constants(&mut out);
                b.constants(&mut out);
            }
            _ => {}
        });
        out
    }

    /// True when some equality relates terms of different sorts.
    pub fn has_cross_sort_equality(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if let Formula::Eq(a, b) = f {
                found |= a.sort() != b.sort();
            }
        });
        found
    }

    pub fn has_generalized_quantifier(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if let Formula::Quant { q, .. } = f {
                found |= matches!(q, Quantifier::AtLeast(_) | Quantifier::Aleph(_));
            }
        });
        found
    }

    pub fn has_aleph_quantifier(&self) -> bool {
        let mut found = false;
        self.walk(&mut |f| {
            if let Formula::Quant {
                q: Quantifier::Aleph(_),
                ..
            } = f
            {
                found = true;
            }
        });
        found
    }

    /// The exact set of non-logical symbols of the formula, with the sorts they
    /// involve and the sorts of all quantified variables.
    pub fn vocabulary(&self) -> Vocabulary {
        let mut voc = Vocabulary::new();
        self.walk(&mut |f| match f {
            Formula::Atom { rel, args } => {
                let _ = voc.declare(rel, SymbolKind::Relation(args.iter().map(Term::sort).collect()));
                args.iter().for_each(|t| t.collect_vocab(&mut voc));
            }
            Formula::Eq(a, b) => {
                a.collect_vocab(&mut voc);
                b.collect_vocab(&mut voc);
            }
            Formula::Quant { sort, .. } => {
                voc.sorts.insert(*sort);
            }
            _ => {}
        });
        voc
    }

    /// Capture-avoiding substitution of a term for a free variable.
    pub fn substitute(&self, name: &str, by: &Term) -> Formula {
        let mut by_vars = BTreeSet::new();
        by.collect_vars(&mut by_vars);
        self.subst_inner(name, by, &by_vars)
    }

    fn subst_inner(&self, name: &str, by: &Term, by_vars: &BTreeSet<(String, Sort)>) -> Formula {
        match self {
            Formula::Atom { rel, args } => Formula::Atom {
                rel: rel.clone(),
                args: args.iter().map(|t| t.substitute(name, by)).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(a.substitute(name, by), b.substitute(name, by)),
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::not(g.subst_inner(name, by, by_vars)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.subst_inner(name, by, by_vars)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.subst_inner(name, by, by_vars)).collect()),
            Formula::Quant { q, var, sort, body } => {
                if var == name {
                    return self.clone();
                }
                if by_vars.iter().any(|(v, _)| v == var) {
                    let mut avoid = self.var_names();
                    avoid.extend(by_vars.iter().map(|v| v.0.clone()));
                    avoid.insert(name.to_string());
                    let fresh = fresh_var(var, &avoid);
                    let renamed = body.rename_free_var(var, &fresh);
                    return Formula::quant(*q, &fresh, *sort, renamed.subst_inner(name, by, by_vars));
                }
                Formula::quant(*q, var, *sort, body.subst_inner(name, by, by_vars))
            }
        }
    }

    /// Renames free occurrences of a variable (the new name must not be captured).
    fn rename_free_var(&self, from: &str, to: &str) -> Formula {
        match self {
            Formula::Atom { rel, args } => Formula::Atom {
                rel: rel.clone(),
                args: args.iter().map(|t| t.rename_var(from, to)).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(a.rename_var(from, to), b.rename_var(from, to)),
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::not(g.rename_free_var(from, to)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.rename_free_var(from, to)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.rename_free_var(from, to)).collect()),
            Formula::Quant { var, .. } if var == from => self.clone(),
            Formula::Quant { q, var, sort, body } => {
                Formula::quant(*q, var, *sort, body.rename_free_var(from, to))
            }
        }
    }

    /// Replaces every occurrence of the ground term `from` (e.g. a constant) by `to`.
    pub fn replace_term(&self, from: &Term, to: &Term) -> Formula {
        match self {
            Formula::Atom { rel, args } => Formula::Atom {
                rel: rel.clone(),
                args: args.iter().map(|t| t.replace(from, to)).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(a.replace(from, to), b.replace(from, to)),
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::not(g.replace_term(from, to)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.replace_term(from, to)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.replace_term(from, to)).collect()),
            Formula::Quant { q, var, sort, body } => {
                Formula::quant(*q, var, *sort, body.replace_term(from, to))
            }
        }
    }

    /// Renames bound variables so that no binder shadows another binder on
    /// its path, a free variable, or a symbol name. Names that are already
    /// distinct are kept.
    pub fn alpha_normalize(&self) -> Formula {
        let mut taken: BTreeSet<String> = self.var_names();
        taken.extend(self.vocabulary().symbol_names());
        let free: Vec<String> = self.free_vars().into_iter().map(|v| v.0).collect();
        let symbols = self.vocabulary().symbol_names();
        let mut scope: Vec<String> = free;
        self.alpha_inner(&mut scope, &mut taken, &symbols)
    }

    fn alpha_inner(
        &self,
        scope: &mut Vec<String>,
        taken: &mut BTreeSet<String>,
        symbols: &BTreeSet<String>,
    ) -> Formula {
        match self {
            Formula::Not(g) => Formula::not(g.alpha_inner(scope, taken, symbols)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.alpha_inner(scope, taken, symbols)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.alpha_inner(scope, taken, symbols)).collect()),
            Formula::Quant { q, var, sort, body } => {
                let (name, body) = if scope.contains(var) || symbols.contains(var) {
                    let fresh = fresh_var(var, taken);
                    taken.insert(fresh.clone());
                    (fresh.clone(), body.rename_free_var(var, &fresh))
                } else {
                    (var.clone(), (**body).clone())
                };
                scope.push(name.clone());
                let nb = body.alpha_inner(scope, taken, symbols);
                scope.pop();
                Formula::quant(*q, &name, *sort, nb)
            }
            _ => self.clone(),
        }
    }

    /// Applies an injective symbol renaming (relations, functions, constants).
    pub(crate) fn rename_symbols_unchecked(&self, map: &BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Atom { rel, args } => Formula::Atom {
                rel: map.get(rel).cloned().unwrap_or_else(|| rel.clone()),
                args: args.iter().map(|t| t.rename_symbols(map)).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(a.rename_symbols(map), b.rename_symbols(map)),
            Formula::Top | Formula::Bottom => self.clone(),
            Formula::Not(g) => Formula::not(g.rename_symbols_unchecked(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.rename_symbols_unchecked(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.rename_symbols_unchecked(map)).collect()),
            Formula::Quant { q, var, sort, body } => {
                Formula::quant(*q, var, *sort, body.rename_symbols_unchecked(map))
            }
        }
    }

    /// Collapses `not not f` to `f` everywhere.
    pub fn strip_double_negations(&self) -> Formula {
        match self {
            Formula::Not(g) => match &**g {
                Formula::Not(h) => h.strip_double_negations(),
                other => Formula::not(other.strip_double_negations()),
            },
            Formula::And(fs) => Formula::And(fs.iter().map(Formula::strip_double_negations).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(Formula::strip_double_negations).collect()),
            Formula::Quant { q, var, sort, body } => {
                Formula::quant(*q, var, *sort, body.strip_double_negations())
            }
            _ => self.clone(),
        }
    }

    /// Replaces every threshold quantifier `Qge k x. f` by its first-order
    /// expansion with `k` pairwise distinct witnesses.
    pub fn expand_thresholds(&self) -> Formula {
        match self {
            Formula::Not(g) => Formula::not(g.expand_thresholds()),
            Formula::And(fs) => Formula::And(fs.iter().map(Formula::expand_thresholds).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(Formula::expand_thresholds).collect()),
            Formula::Quant {
                q: Quantifier::AtLeast(k),
                var,
                sort,
                body,
            } => {
                let body = body.expand_thresholds();
                let k = *k as usize;
                let mut avoid = body.var_names();
                avoid.extend(body.vocabulary().symbol_names());
                let mut names = Vec::new();
                for i in 0..k {
                    let n = fresh_var(&format!("{var}{}", i + 1), &avoid);
                    avoid.insert(n.clone());
                    names.push(n);
                }
                let mut conj = Vec::new();
                for i in 0..k {
                    for j in (i + 1)..k {
                        conj.push(Formula::not(Formula::eq(
                            Term::var(&names[i], *sort),
                            Term::var(&names[j], *sort),
                        )));
                    }
                }
                for n in &names {
                    conj.push(body.substitute(var, &Term::var(n, *sort)));
                }
                let mut f = Formula::and(conj);
                for n in names.iter().rev() {
                    f = Formula::exists(n, *sort, f);
                }
                f
            }
            Formula::Quant { q, var, sort, body } => {
                Formula::quant(*q, var, *sort, body.expand_thresholds())
            }
            _ => self.clone(),
        }
    }
}

pub(crate) fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| format!("{stem}{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}
