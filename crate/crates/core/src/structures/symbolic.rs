use std::fmt;

use serde::{Deserialize, Serialize};

/// A symbolic cardinal: a natural number or `aleph_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymCard {
    Fin(u64),
    Aleph(u32),
}

impl SymCard {
    pub fn is_zero(self) -> bool {
        self == SymCard::Fin(0)
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, SymCard::Aleph(_))
    }

    /// Cardinal addition.
    pub fn add(self, other: SymCard) -> SymCard {
        match (self, other) {
            (SymCard::Fin(a), SymCard::Fin(b)) => SymCard::Fin(a.saturating_add(b)),
            (a, b) => a.max(b),
        }
    }

    /// Cardinal multiplication.
    pub fn mul(self, other: SymCard) -> SymCard {
        match (self, other) {
            (SymCard::Fin(0), _) | (_, SymCard::Fin(0)) => SymCard::Fin(0),
            (SymCard::Fin(a), SymCard::Fin(b)) => SymCard::Fin(a.saturating_mul(b)),
            (a, b) => a.max(b),
        }
    }

    /// Removes `n` elements; infinite cardinals are unchanged.
    pub fn minus(self, n: u64) -> SymCard {
        match self {
            SymCard::Fin(a) => SymCard::Fin(a.saturating_sub(n)),
            inf => inf,
        }
    }

    pub fn sum(cards: impl IntoIterator<Item = SymCard>) -> SymCard {
        cards.into_iter().fold(SymCard::Fin(0), SymCard::add)
    }
}

impl fmt::Display for SymCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymCard::Fin(n) => write!(f, "fin {n}"),
            SymCard::Aleph(k) => write!(f, "aleph {k}"),
        }
    }
}

/// An equivalence relation `E` presented by groups of `count` classes, each
/// of size `size`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolicEqStructure {
    pub groups: Vec<(SymCard, SymCard)>,
}

impl SymbolicEqStructure {
    pub fn new(groups: Vec<(SymCard, SymCard)>) -> Result<Self, String> {
        let s = SymbolicEqStructure { groups };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.groups.is_empty() {
            return Err("no class groups".into());
        }
        if self.total().is_zero() {
            return Err("structure is empty".into());
        }
        Ok(())
    }

    pub fn total(&self) -> SymCard {
        SymCard::sum(self.groups.iter().map(|(n, s)| n.mul(*s)))
    }
}

impl fmt::Display for SymbolicEqStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EQGROUPS: ")?;
        for (i, (n, s)) in self.groups.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "({n}, {s})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::SymCard::*;

    #[test]
    fn ordering_and_arithmetic() {
        assert!(Fin(1000) < Aleph(0));
        assert!(Aleph(0) < Aleph(1));
        assert_eq!(Fin(3).add(Aleph(0)), Aleph(0));
        assert_eq!(Aleph(2).mul(Aleph(0)), Aleph(2));
        assert_eq!(Fin(0).mul(Aleph(1)), Fin(0));
        assert_eq!(Aleph(1).minus(5), Aleph(1));
        assert_eq!(Fin(2).minus(5), Fin(0));
    }
}
