use std::fmt;

use super::formula::{Formula, Quantifier, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { name, .. } | Term::Const { name, .. } => write!(f, "{name}"),
            Term::App { fun, args, .. } => {
                write!(f, "{fun}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Forall => write!(f, "forall"),
            Quantifier::Exists => write!(f, "exists"),
            Quantifier::AtLeast(k) => write!(f, "Qge {k}"),
            Quantifier::Aleph(a) => write!(f, "Qaleph {a}"),
        }
    }
}

/// Prints in the concrete formula language; the output re-parses to the same AST.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atom { rel, args } => {
                write!(f, "{rel}")?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
            Formula::Eq(a, b) => {
                let op = if a.sort() == b.sort() { "=" } else { "==" };
                write!(f, "{a} {op} {b}")
            }
            Formula::Top => write!(f, "top"),
            Formula::Bottom => write!(f, "bottom"),
            Formula::Not(g) => write!(f, "not {g}"),
            Formula::And(fs) | Formula::Or(fs) => {
                let head = if matches!(self, Formula::And(_)) { "And" } else { "Or" };
                write!(f, "{head}[")?;
                for (i, g) in fs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{g}")?;
                }
                write!(f, "]")
            }
            Formula::Quant { q, var, sort, body } => write!(f, "{q} {var}:{sort}. {body}"),
        }
    }
}
