//! The `Q_alpha` game on symbolically presented equivalence structures.
//!
//! Elements are named lazily. At any position the unnamed elements of a side
//! fall into cells: the rest of a named class, and the union of the unnamed
//! classes of a group. Elements of one cell are automorphic over the named
//! ones, so moves only choose cells.

use serde::{Deserialize, Serialize};

use super::ef::Side;
use super::{verify_with, Game, GameError, GameResult, Player, Solver, Status};
use crate::structures::{SymCard, SymbolicEqStructure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymElem {
    pub group: usize,
    /// Class tag, numbered in order of first appearance on its side.
    pub class: u32,
    /// Element tag, numbered in order of first appearance on its side.
    pub elem: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cell {
    /// An already named element.
    Named(u32),
    /// Unnamed elements of a named class.
    Rest { group: usize, class: u32 },
    /// Elements of the unnamed classes of a group.
    Fresh { group: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymPhase {
    Spoiler,
    Answer { side: Side, cell: Cell },
    QAnswer { side: Side, x: Vec<Cell> },
    ChooseY { side: Side, x: Vec<Cell>, y: Vec<Cell> },
    ChooseX { side: Side, x: Vec<Cell>, y: Cell },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymPosition {
    pub left: Vec<SymElem>,
    pub right: Vec<SymElem>,
    pub rounds_left: usize,
    pub phase: SymPhase,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SymMove {
    Pick { side: Side, cell: Cell },
    Answer(Cell),
    SetX { side: Side, cells: Vec<Cell> },
    SetY(Vec<Cell>),
    PickY(Cell),
    PickX(Cell),
}

pub struct SymGame<'a> {
    pub e1: &'a SymbolicEqStructure,
    pub e2: &'a SymbolicEqStructure,
    pub rounds: usize,
    pub alpha: u32,
}

fn distinct<T: Ord + Copy>(it: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = it.collect();
    v.sort();
    v.dedup();
    v
}

impl<'a> SymGame<'a> {
    pub fn new(
        e1: &'a SymbolicEqStructure,
        e2: &'a SymbolicEqStructure,
        rounds: usize,
        alpha: u32,
    ) -> Result<Self, GameError> {
        for e in [e1, e2] {
            e.validate().map_err(GameError::NotApplicable)?;
        }
        Ok(SymGame { e1, e2, rounds, alpha })
    }

    fn structure(&self, side: Side) -> &SymbolicEqStructure {
        match side {
            Side::Left => self.e1,
            Side::Right => self.e2,
        }
    }

    fn named<'p>(&self, p: &'p SymPosition, side: Side) -> &'p [SymElem] {
        match side {
            Side::Left => &p.left,
            Side::Right => &p.right,
        }
    }

    fn large(&self, c: SymCard) -> bool {
        c >= SymCard::Aleph(self.alpha)
    }

    /// The nonempty cells of one side with their capacities.
    pub fn cells(&self, p: &SymPosition, side: Side) -> Vec<(Cell, SymCard)> {
        let st = self.structure(side);
        let named = self.named(p, side);
        let mut out: Vec<(Cell, SymCard)> = distinct(named.iter().map(|e| e.elem))
            .into_iter()
            .map(|e| (Cell::Named(e), SymCard::Fin(1)))
            .collect();
        for (group, class) in distinct(named.iter().map(|e| (e.group, e.class))) {
            let used = distinct(named.iter().filter(|e| e.class == class).map(|e| e.elem)).len();
            let cap = st.groups[group].1.minus(used as u64);
            if !cap.is_zero() {
                out.push((Cell::Rest { group, class }, cap));
            }
        }
        for (group, (count, size)) in st.groups.iter().enumerate() {
            let used = distinct(named.iter().filter(|e| e.group == group).map(|e| e.class)).len();
            let cap = count.minus(used as u64).mul(*size);
            if !cap.is_zero() {
                out.push((Cell::Fresh { group }, cap));
            }
        }
        out
    }

    fn capacity(&self, p: &SymPosition, side: Side, set: &[Cell]) -> Option<SymCard> {
        let cells = self.cells(p, side);
        let mut caps = Vec::new();
        for c in set {
            caps.push(cells.iter().find(|(d, _)| d == c)?.1);
        }
        Some(SymCard::sum(caps))
    }

    fn is_set_move(&self, p: &SymPosition, side: Side, set: &[Cell]) -> bool {
        set.windows(2).all(|w| w[0] < w[1]) && self.capacity(p, side, set).is_some_and(|c| self.large(c))
    }

    fn all_set_moves(&self, p: &SymPosition, side: Side) -> Vec<Vec<Cell>> {
        let cells: Vec<Cell> = self.cells(p, side).into_iter().map(|(c, _)| c).collect();
        let n = cells.len();
        (1u32..(1 << n))
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).map(|i| cells[i]).collect::<Vec<_>>())
            .filter(|s| self.is_set_move(p, side, s))
            .collect()
    }

    fn realize(&self, p: &SymPosition, side: Side, cell: Cell) -> SymElem {
        let named = self.named(p, side);
        let next_elem = distinct(named.iter().map(|e| e.elem)).len() as u32;
        let next_class = distinct(named.iter().map(|e| e.class)).len() as u32;
        match cell {
            Cell::Named(e) => *named.iter().find(|n| n.elem == e).expect("named element"),
            Cell::Rest { group, class } => SymElem { group, class, elem: next_elem },
            Cell::Fresh { group } => SymElem {
                group,
                class: next_class,
                elem: next_elem,
            },
        }
    }

    /// Adds the pair (`cx` on `side`, `cy` on the other side).
    fn finish(&self, p: &SymPosition, side: Side, cx: Cell, cy: Cell) -> SymPosition {
        let ex = self.realize(p, side, cx);
        let ey = self.realize(p, side.other(), cy);
        let (l, r) = match side {
            Side::Left => (ex, ey),
            Side::Right => (ey, ex),
        };
        let mut q = p.clone();
        q.left.push(l);
        q.right.push(r);
        q.rounds_left -= 1;
        q.phase = SymPhase::Spoiler;
        q
    }

    fn is_partial_iso(p: &SymPosition) -> bool {
        let n = p.left.len();
        for i in 0..n {
            for j in 0..i {
                let (a, b) = (p.left[i], p.left[j]);
                let (c, d) = (p.right[i], p.right[j]);
                if (a.elem == b.elem) != (c.elem == d.elem) || (a.class == b.class) != (c.class == d.class) {
                    return false;
                }
            }
        }
        true
    }
}

impl Game for SymGame<'_> {
    type State = SymPosition;
    type Move = SymMove;

    fn initial(&self) -> SymPosition {
        SymPosition {
            left: vec![],
            right: vec![],
            rounds_left: self.rounds,
            phase: SymPhase::Spoiler,
        }
    }

    fn status(&self, p: &SymPosition) -> Status {
        if !Self::is_partial_iso(p) {
            return Status::Won(Player::Spoiler);
        }
        match p.phase {
            SymPhase::Spoiler if p.rounds_left == 0 => Status::Won(Player::Duplicator),
            SymPhase::Spoiler | SymPhase::ChooseY { .. } => Status::ToMove(Player::Spoiler),
            _ => Status::ToMove(Player::Duplicator),
        }
    }

    fn legal_moves(&self, p: &SymPosition) -> Vec<SymMove> {
        match &p.phase {
            SymPhase::Spoiler => {
                let mut out = Vec::new();
                for side in [Side::Left, Side::Right] {
                    for (cell, _) in self.cells(p, side) {
                        out.push(SymMove::Pick { side, cell });
                    }
                    for cells in self.all_set_moves(p, side) {
                        out.push(SymMove::SetX { side, cells });
                    }
                }
                out
            }
            SymPhase::Answer { side, .. } => self
                .cells(p, side.other())
                .into_iter()
                .map(|(c, _)| SymMove::Answer(c))
                .collect(),
            SymPhase::QAnswer { side, .. } => self
                .all_set_moves(p, side.other())
                .into_iter()
                .map(SymMove::SetY)
                .collect(),
            SymPhase::ChooseY { y, .. } => y.iter().map(|c| SymMove::PickY(*c)).collect(),
            SymPhase::ChooseX { x, .. } => x.iter().map(|c| SymMove::PickX(*c)).collect(),
        }
    }

    fn candidates(&self, p: &SymPosition, value: &mut dyn FnMut(&SymPosition) -> Player) -> Vec<SymMove> {
        match &p.phase {
            // A single large cell is the smallest set move; finite cells
            // never sum to a large one.
            SymPhase::Spoiler => {
                let mut out = Vec::new();
                for side in [Side::Left, Side::Right] {
                    for (cell, cap) in self.cells(p, side) {
                        out.push(SymMove::Pick { side, cell });
                        if self.large(cap) {
                            out.push(SymMove::SetX { side, cells: vec![cell] });
                        }
                    }
                }
                out
            }
            SymPhase::QAnswer { side, x } => {
                let cells = self.cells(p, side.other());
                let good: Vec<(Cell, SymCard)> = cells
                    .iter()
                    .copied()
                    .filter(|(cy, _)| x.iter().any(|cx| value(&self.finish(p, *side, *cx, *cy)) == Player::Duplicator))
                    .collect();
                // Least legal set within the good cells: its prefix up to
                // the first large cell.
                let pick = |pool: &[(Cell, SymCard)]| -> Option<Vec<Cell>> {
                    let end = pool.iter().position(|(_, c)| self.large(*c))?;
                    let mut v: Vec<Cell> = pool[..=end].iter().map(|(c, _)| *c).collect();
                    v.sort();
                    Some(v)
                };
                let mut sorted = good.clone();
                sorted.sort();
                match pick(&sorted) {
                    Some(y) => vec![SymMove::SetY(y)],
                    None => {
                        let mut all = cells;
                        all.sort();
                        pick(&all).map(SymMove::SetY).into_iter().collect()
                    }
                }
            }
            _ => self.legal_moves(p),
        }
    }

    fn is_legal(&self, p: &SymPosition, m: &SymMove) -> bool {
        match (&p.phase, m) {
            (SymPhase::Spoiler, SymMove::SetX { side, cells }) => self.is_set_move(p, *side, cells),
            (SymPhase::QAnswer { side, .. }, SymMove::SetY(y)) => self.is_set_move(p, side.other(), y),
            _ => self.legal_moves(p).contains(m),
        }
    }

    fn apply(&self, p: &SymPosition, m: &SymMove) -> SymPosition {
        let with = |phase| {
            let mut q = p.clone();
            q.phase = phase;
            q
        };
        match (&p.phase, m) {
            (SymPhase::Spoiler, SymMove::Pick { side, cell }) => with(SymPhase::Answer { side: *side, cell: *cell }),
            (SymPhase::Spoiler, SymMove::SetX { side, cells }) => with(SymPhase::QAnswer {
                side: *side,
                x: cells.clone(),
            }),
            (SymPhase::Answer { side, cell }, SymMove::Answer(c)) => self.finish(p, *side, *cell, *c),
            (SymPhase::QAnswer { side, x }, SymMove::SetY(y)) => with(SymPhase::ChooseY {
                side: *side,
                x: x.clone(),
                y: y.clone(),
            }),
            (SymPhase::ChooseY { side, x, .. }, SymMove::PickY(c)) => with(SymPhase::ChooseX {
                side: *side,
                x: x.clone(),
                y: *c,
            }),
            (SymPhase::ChooseX { side, y, .. }, SymMove::PickX(c)) => self.finish(p, *side, *c, *y),
            _ => p.clone(),
        }
    }
}

/// Exact winner of the `rounds`-move `Q_alpha` game over the cell
/// abstraction, with a strategy re-verified against every abstract line.
pub fn efq_symbolic(
    e1: &SymbolicEqStructure,
    e2: &SymbolicEqStructure,
    rounds: usize,
    alpha: u32,
) -> Result<GameResult<SymPosition, SymMove>, GameError> {
    let g = SymGame::new(e1, e2, rounds, alpha)?;
    Solver::new(&g).solve(Some(rounds))
}

/// Duplicator's move under the class-matching strategy: a set move meeting
/// unnamed classes is answered by the unnamed classes of the other side,
/// otherwise by the rest of the class matched to a named class that the set
/// meets in many elements. Element moves copy the class pattern.
fn keisler_move(g: &SymGame, p: &SymPosition) -> Option<SymMove> {
    // Image of a cell on `side` on the other side.
    let image = |side: Side, cell: Cell| -> Option<Cell> {
        let (from, to) = match side {
            Side::Left => (&p.left, &p.right),
            Side::Right => (&p.right, &p.left),
        };
        match cell {
            Cell::Named(e) => {
                let i = from.iter().position(|x| x.elem == e)?;
                Some(Cell::Named(to[i].elem))
            }
            Cell::Rest { class, .. } => {
                let i = from.iter().position(|x| x.class == class)?;
                let t = to[i];
                Some(Cell::Rest { group: t.group, class: t.class })
            }
            Cell::Fresh { .. } => Some(Cell::Fresh { group: 0 }),
        }
    };
    match &p.phase {
        SymPhase::Answer { side, cell } => image(*side, *cell).map(SymMove::Answer),
        SymPhase::QAnswer { side, x } => {
            if x.iter().any(|c| matches!(c, Cell::Fresh { .. })) {
                return Some(SymMove::SetY(vec![Cell::Fresh { group: 0 }]));
            }
            let cells = g.cells(p, *side);
            let big = x
                .iter()
                .find(|c| matches!(c, Cell::Rest { .. }) && cells.iter().any(|(d, cap)| d == *c && g.large(*cap)))?;
            image(*side, *big).map(|c| SymMove::SetY(vec![c]))
        }
        SymPhase::ChooseX { side, x, y } => {
            // Pull the type of y back to the chosen side.
            let back = image(side.other(), *y)?;
            x.contains(&back).then_some(SymMove::PickX(back))
        }
        _ => None,
    }
}

/// Replays the class-matching Duplicator strategy against every abstract
/// Spoiler line. Applies to single-group structures whose classes have size
/// at least `aleph_alpha` and whose class count is infinite.
pub fn keisler_strategy_verify(
    e1: &SymbolicEqStructure,
    e2: &SymbolicEqStructure,
    rounds: usize,
    alpha: u32,
) -> Result<(), GameError> {
    for e in [e1, e2] {
        let ok = e.groups.len() == 1 && e.groups[0].0.is_infinite() && e.groups[0].1 >= SymCard::Aleph(alpha);
        if !ok {
            return Err(GameError::NotApplicable(format!("{e}")));
        }
    }
    let g = SymGame { e1, e2, rounds, alpha };
    verify_with(&g, Player::Duplicator, |p| keisler_move(&g, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use SymCard::{Aleph, Fin};

    fn eq(groups: &[(SymCard, SymCard)]) -> SymbolicEqStructure {
        SymbolicEqStructure::new(groups.to_vec()).unwrap()
    }

    #[test]
    fn control_pair() {
        let a = eq(&[(Fin(1), Aleph(1))]);
        let b = eq(&[(Aleph(1), Fin(1))]);
        assert_eq!(efq_symbolic(&a, &b, 2, 1).unwrap().winner, Player::Spoiler);
        assert_eq!(efq_symbolic(&a, &b, 1, 1).unwrap().winner, Player::Duplicator);
    }

    #[test]
    fn many_against_countably_many_classes() {
        let m = eq(&[(Aleph(1), Aleph(1))]);
        let n = eq(&[(Aleph(0), Aleph(1))]);
        for r in 1..=4 {
            assert_eq!(efq_symbolic(&m, &n, r, 1).unwrap().winner, Player::Duplicator);
            keisler_strategy_verify(&m, &n, r, 1).unwrap();
        }
        // Q_0 does not separate them either.
        assert_eq!(efq_symbolic(&m, &n, 2, 0).unwrap().winner, Player::Duplicator);
    }

    #[test]
    fn identical_and_finite_mismatch() {
        let m = eq(&[(Fin(2), Aleph(0)), (Aleph(0), Fin(3))]);
        assert_eq!(efq_symbolic(&m, &m, 2, 0).unwrap().winner, Player::Duplicator);
        let a = eq(&[(Fin(2), Fin(2))]);
        let b = eq(&[(Fin(3), Fin(2))]);
        assert_eq!(efq_symbolic(&a, &b, 3, 0).unwrap().winner, Player::Spoiler);
        assert!(keisler_strategy_verify(&a, &b, 1, 0).is_err());
    }
}
