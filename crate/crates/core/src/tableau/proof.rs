use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::rewrite_positions;
use crate::syntax::{dual_negation, Formula, Quantifier, Sort, Term};

/// One rule application: the rule index (1 to 9), the formulas it uses and
/// the formula it adds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub rule: u8,
    pub premises: Vec<Formula>,
    pub added: Formula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ProofEnd {
    /// An atom and its negation are both on the branch.
    Clash(Formula),
    /// One child per disjunct, each closing the branch extended by it.
    Split {
        disjunction: Formula,
        children: Vec<ProofNode>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofNode {
    pub steps: Vec<Step>,
    pub end: ProofEnd,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProofTree {
    pub roots: Vec<Formula>,
    pub node: ProofNode,
}

pub fn rule_name(rule: u8) -> &'static str {
    match rule {
        1 => "refl",
        2 => "subst",
        3 => "neg",
        4 => "or",
        5 => "and",
        6 => "exists",
        7 => "forall",
        8 => "name",
        9 => "clash",
        _ => "?",
    }
}

impl ProofNode {
    /// Number of nodes (steps, leaves and splits) in the tree.
    pub fn size(&self) -> usize {
        self.steps.len()
            + match &self.end {
                ProofEnd::Clash(_) => 1,
                ProofEnd::Split { children, .. } => 1 + children.iter().map(ProofNode::size).sum::<usize>(),
            }
    }
}

fn constants_of(set: &BTreeSet<Formula>) -> BTreeSet<String> {
    set.iter().flat_map(|f| f.constants()).map(|(c, _)| c).collect()
}

/// A constant `c` of sort `sort` with `body[var := c] == target`. A vacuous
/// binder gives the empty name.
pub(crate) fn instance_constant(var: &str, sort: Sort, body: &Formula, target: &Formula) -> Option<String> {
    if !body.free_vars().iter().any(|(v, _)| v == var) {
        return (body == target).then(String::new);
    }
    target
        .constants()
        .into_iter()
        .filter(|(_, s)| *s == sort)
        .map(|(c, _)| c)
        .find(|c| body.substitute(var, &Term::constant(c, sort)) == *target)
}

fn check_step(set: &BTreeSet<Formula>, st: &Step) -> Result<(), String> {
    for p in &st.premises {
        if !set.contains(p) {
            return Err(format!("premise {p} is not on the branch"));
        }
    }
    let bad = || Err(format!("rule {} does not yield {}", st.rule, st.added));
    match (st.rule, st.premises.as_slice()) {
        (1, []) => match &st.added {
            Formula::Eq(t, u) if t == u && t.is_ground() => Ok(()),
            _ => bad(),
        },
        (2, [a, Formula::Eq(t, u)]) if a.is_atomic() => {
            if rewrite_positions(a, t, u).contains(&st.added) {
                Ok(())
            } else {
                bad()
            }
        }
        (3, [Formula::Not(g)]) if dual_negation(g) == st.added => Ok(()),
        (5, [Formula::And(fs)]) if fs.contains(&st.added) => Ok(()),
        (6, [Formula::Quant { q: Quantifier::Exists, var, sort, body }]) => {
            match instance_constant(var, *sort, body, &st.added) {
                Some(c) if !constants_of(set).contains(&c) => Ok(()),
                Some(c) => Err(format!("witness {c} is not fresh")),
                None => bad(),
            }
        }
        (7, [Formula::Quant { q: Quantifier::Forall, var, sort, body }]) => {
            match instance_constant(var, *sort, body, &st.added) {
                Some(_) => Ok(()),
                None => bad(),
            }
        }
        (8, []) => match &st.added {
            Formula::Eq(t, Term::Const { name, sort }) if t.sort() == *sort && t.is_ground() => {
                if constants_of(set).contains(name) {
                    Err(format!("name {name} is not fresh"))
                } else {
                    Ok(())
                }
            }
            _ => bad(),
        },
        _ => bad(),
    }
}

/// Checks every rule instance and every leaf of a closed tableau.
pub fn replay(tree: &ProofTree) -> Result<(), String> {
    let set: BTreeSet<Formula> = tree.roots.iter().cloned().collect();
    replay_node(set, &tree.node)
}

fn replay_node(mut set: BTreeSet<Formula>, node: &ProofNode) -> Result<(), String> {
    for st in &node.steps {
        check_step(&set, st)?;
        set.insert(st.added.clone());
    }
    match &node.end {
        ProofEnd::Clash(a) => {
            if a.is_atomic() && set.contains(a) && set.contains(&Formula::not(a.clone())) {
                Ok(())
            } else {
                Err(format!("no clash on {a}"))
            }
        }
        ProofEnd::Split { disjunction, children } => {
            if !set.contains(disjunction) {
                return Err(format!("{disjunction} is not on the branch"));
            }
            let ds: &[Formula] = match disjunction {
                Formula::Or(ds) => ds,
                Formula::Bottom => &[],
                _ => return Err(format!("{disjunction} is not a disjunction")),
            };
            if ds.len() != children.len() {
                return Err(format!("{disjunction} needs {} branches", ds.len()));
            }
            for (d, c) in ds.iter().zip(children) {
                let mut s = set.clone();
                s.insert(d.clone());
                replay_node(s, c)?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for ProofTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.roots {
            writeln!(f, "root {r}")?;
        }
        write_node(f, &self.node, 0)
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, n: &ProofNode, depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    for st in &n.steps {
        write!(f, "{pad}[{} {}] {}", st.rule, rule_name(st.rule), st.added)?;
        if !st.premises.is_empty() {
            let ps: Vec<String> = st.premises.iter().map(|p| p.to_string()).collect();
            write!(f, "  from {}", ps.join(" ; "))?;
        }
        writeln!(f)?;
    }
    match &n.end {
        ProofEnd::Clash(a) => writeln!(f, "{pad}[9 clash] {a}"),
        ProofEnd::Split { disjunction, children } => {
            writeln!(f, "{pad}[4 or] {disjunction}")?;
            let ds: Vec<Formula> = match disjunction {
                Formula::Or(ds) => ds.clone(),
                _ => vec![],
            };
            for (d, c) in ds.iter().zip(children) {
                writeln!(f, "{pad}- {d}")?;
                write_node(f, c, depth + 1)?;
            }
            Ok(())
        }
    }
}
