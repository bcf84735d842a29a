//! Interpolants read off a closed tableau for `{φ, ¬ψ}`. Every formula on a
//! branch is labelled with the side it descends from; the interpolant of a
//! node mentions only symbols both sides have seen at that node.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{fresh_var, Formula, Quantifier, Sort, Term};
use crate::tableau::{instance_constant, ProofEnd, ProofNode, ProofTree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Left,
    Right,
    /// `t = t`, true on every branch.
    Both,
}

#[derive(Clone, Default)]
struct Labels {
    side: BTreeMap<Formula, Side>,
    left: BTreeSet<String>,
    right: BTreeSet<String>,
}

impl Labels {
    fn get(&self, f: &Formula) -> Result<Side, String> {
        self.side.get(f).copied().ok_or_else(|| format!("{f} has no side"))
    }

    fn lang(&self, s: Side) -> &BTreeSet<String> {
        match s {
            Side::Left => &self.left,
            _ => &self.right,
        }
    }

    fn add(&mut self, f: &Formula, s: Side) {
        if self.side.contains_key(f) {
            return;
        }
        self.side.insert(f.clone(), s);
        let names = symbols(f);
        match s {
            Side::Left => self.left.extend(names),
            Side::Right => self.right.extend(names),
            Side::Both => {}
        }
    }
}

fn symbols(f: &Formula) -> BTreeSet<String> {
    f.vocabulary().symbol_names()
}

fn term_symbols(t: &Term) -> BTreeSet<String> {
    symbols(&Formula::eq(t.clone(), t.clone()))
}

/// What a step does to the interpolant of the node below it.
enum Back {
    Keep,
    /// Bind `c` when it occurs: universally for the left side.
    Bind { c: String, sort: Sort, universal: bool },
    /// An atom from one side rewritten with an equation from the other.
    Cross { t: Term, u: Term, side: Side, u_known: bool },
    /// `t = c` introduced for the side whose symbols `t` uses. Bound
    /// existentially for the left side unless `t` itself is common.
    Name { t: Term, c: String, sort: Sort, side: Side, common: bool },
}

/// The interpolant of `tree`, whose first `left` roots are the left side.
pub(crate) fn split_interpolant(tree: &ProofTree, left: usize) -> Result<Formula, String> {
    let mut labels = Labels::default();
    for (i, r) in tree.roots.iter().enumerate() {
        labels.add(r, if i < left { Side::Left } else { Side::Right });
    }
    node(&tree.node, labels)
}

fn node(n: &ProofNode, mut labels: Labels) -> Result<Formula, String> {
    let mut backs = Vec::with_capacity(n.steps.len());
    for st in &n.steps {
        let (side, back) = match (st.rule, st.premises.as_slice()) {
            (1, []) => (Side::Both, Back::Keep),
            (2, [a, eq]) => {
                let (sa, se) = (labels.get(a)?, labels.get(eq)?);
                match (sa, se) {
                    (Side::Both, s) | (s, Side::Both) => (s, Back::Keep),
                    (x, y) if x == y => (x, Back::Keep),
                    (x, _) => {
                        let Formula::Eq(t, u) = eq else {
                            return Err(format!("rule 2 premise {eq} is not an equation"));
                        };
                        let u_known = term_symbols(u).is_subset(labels.lang(x));
                        (x, Back::Cross { t: t.clone(), u: u.clone(), side: x, u_known })
                    }
                }
            }
            (3 | 5, [p]) | (6, [p]) => (labels.get(p)?, Back::Keep),
            (7, [p @ Formula::Quant { var, sort, body, .. }]) => {
                let s = labels.get(p)?;
                let c = instance_constant(var, *sort, body, &st.added)
                    .ok_or_else(|| format!("{} is not an instance of {p}", st.added))?;
                if c.is_empty() || labels.lang(s).contains(&c) {
                    (s, Back::Keep)
                } else {
                    (s, Back::Bind { c, sort: *sort, universal: s == Side::Left })
                }
            }
            (8, []) => {
                let Formula::Eq(t, Term::Const { name, sort }) = &st.added else {
                    return Err(format!("rule 8 added {}", st.added));
                };
                let used = term_symbols(t);
                let (l, r) = (used.is_subset(&labels.left), used.is_subset(&labels.right));
                let side = if l || !r { Side::Left } else { Side::Right };
                (
                    side,
                    Back::Name {
                        t: t.clone(),
                        c: name.clone(),
                        sort: *sort,
                        side,
                        common: l && r,
                    },
                )
            }
            (rule, _) => return Err(format!("rule {rule} cannot be labelled")),
        };
        labels.add(&st.added, side);
        backs.push(back);
    }
    let mut i = match &n.end {
        ProofEnd::Clash(a) => {
            let neg = Formula::not(a.clone());
            match (labels.get(a)?, labels.get(&neg)?) {
                (Side::Left | Side::Both, Side::Left) => Formula::Bottom,
                (Side::Right | Side::Both, Side::Right) => Formula::Top,
                (Side::Left, Side::Right) => a.clone(),
                (Side::Right, Side::Left) => neg,
                (_, Side::Both) => return Err("a negation labelled as reflexivity".into()),
            }
        }
        ProofEnd::Split { disjunction, children } => {
            let side = labels.get(disjunction)?;
            let ds: Vec<Formula> = match disjunction {
                Formula::Or(ds) => ds.clone(),
                _ => vec![],
            };
            let mut parts = Vec::with_capacity(children.len());
            for (d, c) in ds.iter().zip(children) {
                let mut l = labels.clone();
                l.add(d, side);
                parts.push(node(c, l)?);
            }
            match side {
                Side::Right => Formula::and(parts),
                _ => Formula::or(parts),
            }
        }
    };
    for back in backs.into_iter().rev() {
        i = undo(i, back);
    }
    Ok(i)
}

fn mentions(f: &Formula, c: &str) -> bool {
    f.constants().iter().any(|(n, _)| n == c)
}

fn bind(f: Formula, c: &str, sort: Sort, universal: bool) -> Formula {
    let v = fresh_var(&format!("x{sort}"), &f.var_names());
    let body = f.replace_term(&Term::constant(c, sort), &Term::var(&v, sort));
    let q = if universal { Quantifier::Forall } else { Quantifier::Exists };
    Formula::quant(q, &v, sort, body)
}

fn undo(i: Formula, back: Back) -> Formula {
    match back {
        Back::Keep => i,
        Back::Bind { c, sort, universal } => {
            if mentions(&i, &c) {
                bind(i, &c, sort, universal)
            } else {
                i
            }
        }
        Back::Cross { t, u, side, u_known } => {
            if !u_known {
                return i.replace_term(&u, &t);
            }
            let e = Formula::eq(t, u);
            match side {
                Side::Right => Formula::And(vec![e, i]),
                _ => Formula::Or(vec![Formula::not(e), i]),
            }
        }
        Back::Name { t, c, sort, side, common } => {
            if !mentions(&i, &c) {
                i
            } else if common {
                i.replace_term(&Term::constant(&c, sort), &t)
            } else {
                bind(i, &c, sort, side == Side::Right)
            }
        }
    }
}
