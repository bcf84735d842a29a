//! Shelah's clocked game `G^beta_theta`. Spoiler lowers the clock and
//! challenges up to `theta` elements, alternating between the structures;
//! Duplicator colors each challenge and must have answered an element of
//! color `c` from round `j` by round `j + c`.

use serde::{Deserialize, Serialize};

use super::ef::{check_inputs, insert_pair, is_partial_iso, Pair, Side};
use super::{Game, GameError, GameResult, Player, Solver, Status};
use crate::structures::{Elem, Structure};

/// Range of colors Duplicator may use in round `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColorRange {
    /// `0..=beta`. Larger colors never come due, so this is the full game.
    #[default]
    Full,
    /// `0..=beta_i`, the clock value Spoiler just played.
    Clock,
}

/// An unanswered challenge: the round by which it must be covered, and the
/// side the element lives on.
pub type Obligation = (usize, Side, Elem);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ShelahState {
    pub round: usize,
    /// Last clock value played.
    pub clock: Option<usize>,
    /// Current partial isomorphism, sorted.
    pub g: Vec<Pair>,
    pub pending: Vec<Obligation>,
    /// Spoiler's current challenge awaiting Duplicator.
    pub challenge: Option<Vec<Elem>>,
    pub finished: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ShelahMove {
    Challenge { clock: usize, elems: Vec<Elem> },
    /// One color per challenged element, and the new partial isomorphism.
    Respond { coloring: Vec<usize>, g: Vec<Pair> },
}

pub struct ShelahGame<'a> {
    pub a: &'a Structure,
    pub b: &'a Structure,
    pub beta: usize,
    pub theta: usize,
    pub colors: ColorRange,
}

fn subsets_up_to(dom: &[Elem], max: usize) -> Vec<Vec<Elem>> {
    let n = dom.len();
    let mut out: Vec<Vec<Elem>> = (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize <= max)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| dom[i]).collect())
        .collect();
    out.sort();
    out
}

impl<'a> ShelahGame<'a> {
    pub fn new(
        a: &'a Structure,
        b: &'a Structure,
        beta: usize,
        theta: usize,
        colors: ColorRange,
    ) -> Result<Self, GameError> {
        check_inputs(a, b)?;
        if a.universe().len() > 8 || b.universe().len() > 8 || theta > 4 || beta > 6 {
            return Err(GameError::BudgetExceeded("Shelah game outside desk scale".into()));
        }
        Ok(ShelahGame {
            a,
            b,
            beta,
            theta,
            colors,
        })
    }

    fn side(&self, round: usize) -> Side {
        if round.is_multiple_of(2) {
            Side::Left
        } else {
            Side::Right
        }
    }

    fn structure(&self, side: Side) -> &Structure {
        match side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    fn covered(g: &[Pair], side: Side, e: Elem) -> bool {
        g.iter().any(|(_, x, y)| if side == Side::Left { *x == e } else { *y == e })
    }

    /// All partial isomorphisms extending `g`.
    fn extensions(&self, g: &[Pair]) -> Vec<Vec<Pair>> {
        let mut pairs = Vec::new();
        for (s, da) in &self.a.domains {
            for x in da {
                for y in self.b.domain(*s) {
                    if !g.contains(&(*s, *x, *y)) {
                        pairs.push((*s, *x, *y));
                    }
                }
            }
        }
        let mut out = Vec::new();
        let mut stack = vec![(g.to_vec(), 0usize)];
        while let Some((cur, start)) = stack.pop() {
            out.push(cur.clone());
            for (i, p) in pairs.iter().enumerate().skip(start) {
                let next = insert_pair(&cur, *p);
                if is_partial_iso(self.a, self.b, &next) {
                    stack.push((next, i + 1));
                }
            }
        }
        out.sort();
        out
    }

    fn max_color(&self, clock: usize) -> usize {
        match self.colors {
            ColorRange::Full => self.beta,
            ColorRange::Clock => clock,
        }
    }

    fn colorings(&self, len: usize, max: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..=max).map(move |v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        out
    }

    /// Obligations after coloring the current challenge, before coverage.
    fn obligations(&self, s: &ShelahState, coloring: &[usize]) -> Vec<Obligation> {
        let side = self.side(s.round);
        let mut ob = s.pending.clone();
        if let Some(ch) = &s.challenge {
            for (e, c) in ch.iter().zip(coloring) {
                ob.push((s.round + c, side, *e));
            }
        }
        ob
    }
}

impl Game for ShelahGame<'_> {
    type State = ShelahState;
    type Move = ShelahMove;

    fn initial(&self) -> ShelahState {
        ShelahState {
            round: 0,
            clock: None,
            g: vec![],
            pending: vec![],
            challenge: None,
            finished: false,
        }
    }

    fn status(&self, s: &ShelahState) -> Status {
        if s.finished || (s.clock.is_none() && self.beta == 0) {
            return Status::Won(Player::Duplicator);
        }
        if s.challenge.is_some() {
            Status::ToMove(Player::Duplicator)
        } else {
            Status::ToMove(Player::Spoiler)
        }
    }

    fn legal_moves(&self, s: &ShelahState) -> Vec<ShelahMove> {
        match &s.challenge {
            None => {
                let top = s.clock.unwrap_or(self.beta);
                let dom: Vec<Elem> = self.structure(self.side(s.round)).universe().into_iter().collect();
                let sets = subsets_up_to(&dom, self.theta);
                (0..top)
                    .flat_map(|clock| {
                        sets.iter().map(move |e| ShelahMove::Challenge {
                            clock,
                            elems: e.clone(),
                        })
                    })
                    .collect()
            }
            Some(ch) => {
                let max = self.max_color(s.clock.unwrap_or(0));
                let exts = self.extensions(&s.g);
                let mut out = Vec::new();
                for coloring in self.colorings(ch.len(), max) {
                    let ob = self.obligations(s, &coloring);
                    for g in &exts {
                        let ok = ob
                            .iter()
                            .all(|(due, side, e)| *due > s.round || Self::covered(g, *side, *e));
                        if ok {
                            out.push(ShelahMove::Respond {
                                coloring: coloring.clone(),
                                g: g.clone(),
                            });
                        }
                    }
                }
                out
            }
        }
    }

    fn apply(&self, s: &ShelahState, m: &ShelahMove) -> ShelahState {
        match m {
            ShelahMove::Challenge { clock, elems } => ShelahState {
                clock: Some(*clock),
                challenge: Some(elems.clone()),
                ..s.clone()
            },
            ShelahMove::Respond { coloring, g } => {
                let mut pending: Vec<Obligation> = self
                    .obligations(s, coloring)
                    .into_iter()
                    .filter(|(_, side, e)| !Self::covered(g, *side, *e))
                    .collect();
                pending.sort();
                pending.dedup();
                ShelahState {
                    round: s.round + 1,
                    clock: s.clock,
                    g: g.clone(),
                    pending,
                    challenge: None,
                    finished: s.clock == Some(0),
                }
            }
        }
    }
}

pub fn shelah_solve(
    a: &Structure,
    b: &Structure,
    beta: usize,
    theta: usize,
) -> Result<GameResult<ShelahState, ShelahMove>, GameError> {
    shelah_solve_with(a, b, beta, theta, ColorRange::Full)
}

pub fn shelah_solve_with(
    a: &Structure,
    b: &Structure,
    beta: usize,
    theta: usize,
    colors: ColorRange,
) -> Result<GameResult<ShelahState, ShelahMove>, GameError> {
    let g = ShelahGame::new(a, b, beta, theta, colors)?;
    Solver::new(&g).solve(Some(beta))
}
