use serde::{Deserialize, Serialize};

use super::ef::{check_inputs, insert_pair, is_partial_iso, Pair, Side};
use super::{Game, GameError, GameResult, Player, Solver, Status};
use crate::structures::{Elem, Structure};
use crate::syntax::Sort;

/// Largest domain for which all set moves are enumerated.
const MAX_SET_DOMAIN: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EfqPhase {
    Spoiler,
    /// Duplicator answers an element pick.
    Answer { side: Side, sort: Sort, elem: Elem },
    /// Duplicator answers the set `x`, chosen on `side`.
    QAnswer { side: Side, sort: Sort, x: Vec<Elem> },
    /// Spoiler picks an element of `y`.
    ChooseY { side: Side, sort: Sort, x: Vec<Elem>, y: Vec<Elem> },
    /// Duplicator picks an element of `x` against Spoiler's `y`.
    ChooseX { side: Side, sort: Sort, x: Vec<Elem>, y: Elem },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EfqState {
    pub pairs: Vec<Pair>,
    pub rounds_left: usize,
    pub phase: EfqPhase,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EfqMove {
    Pick { side: Side, sort: Sort, elem: Elem },
    Answer(Elem),
    SetX { side: Side, sort: Sort, elems: Vec<Elem> },
    SetY(Vec<Elem>),
    PickY(Elem),
    PickX(Elem),
}

/// The EF game extended by threshold set moves: Spoiler may play `X` with
/// `|X| >= k` in one structure, Duplicator answers `Y` with `|Y| >= k` in
/// the other, Spoiler picks `y` in `Y` and Duplicator `x` in `X`.
pub struct EfqGame<'a> {
    pub m: &'a Structure,
    pub n: &'a Structure,
    pub rounds: usize,
    pub k: usize,
}

fn subsets_at_least(dom: &[Elem], k: usize) -> Vec<Vec<Elem>> {
    let n = dom.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize >= k {
            out.push((0..n).filter(|i| mask >> i & 1 == 1).map(|i| dom[i]).collect());
        }
    }
    out
}

fn subsets_exactly(dom: &[Elem], k: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(dom: &[Elem], k: usize, start: usize, cur: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dom.len() {
            if dom.len() - i < k - cur.len() {
                break;
            }
            cur.push(dom[i]);
            rec(dom, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(dom, k, 0, &mut cur, &mut out);
    out
}

impl<'a> EfqGame<'a> {
    pub fn new(m: &'a Structure, n: &'a Structure, rounds: usize, k: usize) -> Result<Self, GameError> {
        check_inputs(m, n)?;
        if k == 0 {
            return Err(GameError::NotApplicable("threshold must be positive".into()));
        }
        for st in [m, n] {
            if st.domains.values().any(|d| d.len() > MAX_SET_DOMAIN) {
                return Err(GameError::BudgetExceeded(format!(
                    "set moves over domains larger than {MAX_SET_DOMAIN}"
                )));
            }
        }
        Ok(EfqGame { m, n, rounds, k })
    }

    fn structure(&self, side: Side) -> &Structure {
        match side {
            Side::Left => self.m,
            Side::Right => self.n,
        }
    }

    fn dom(&self, side: Side, sort: Sort) -> Vec<Elem> {
        self.structure(side).domain(sort).iter().copied().collect()
    }

    fn finish(&self, s: &EfqState, side: Side, sort: Sort, x: Elem, y: Elem) -> EfqState {
        let pair = match side {
            Side::Left => (sort, x, y),
            Side::Right => (sort, y, x),
        };
        EfqState {
            pairs: insert_pair(&s.pairs, pair),
            rounds_left: s.rounds_left - 1,
            phase: EfqPhase::Spoiler,
        }
    }

    fn is_set_in(&self, side: Side, sort: Sort, v: &[Elem]) -> bool {
        let d = self.structure(side).domain(sort);
        v.len() >= self.k && v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|e| d.contains(e))
    }
}

impl Game for EfqGame<'_> {
    type State = EfqState;
    type Move = EfqMove;

    fn initial(&self) -> EfqState {
        EfqState {
            pairs: vec![],
            rounds_left: self.rounds,
            phase: EfqPhase::Spoiler,
        }
    }

    fn status(&self, s: &EfqState) -> Status {
        if !is_partial_iso(self.m, self.n, &s.pairs) {
            return Status::Won(Player::Spoiler);
        }
        match s.phase {
            EfqPhase::Spoiler if s.rounds_left == 0 => Status::Won(Player::Duplicator),
            EfqPhase::Spoiler | EfqPhase::ChooseY { .. } => Status::ToMove(Player::Spoiler),
            _ => Status::ToMove(Player::Duplicator),
        }
    }

    fn legal_moves(&self, s: &EfqState) -> Vec<EfqMove> {
        match &s.phase {
            EfqPhase::Spoiler => {
                let mut out = Vec::new();
                for side in [Side::Left, Side::Right] {
                    for (sort, d) in &self.structure(side).domains {
                        for e in d {
                            out.push(EfqMove::Pick { side, sort: *sort, elem: *e });
                        }
                        let dv: Vec<Elem> = d.iter().copied().collect();
                        for x in subsets_at_least(&dv, self.k) {
                            out.push(EfqMove::SetX { side, sort: *sort, elems: x });
                        }
                    }
                }
                out
            }
            EfqPhase::Answer { side, sort, .. } => {
                self.dom(side.other(), *sort).into_iter().map(EfqMove::Answer).collect()
            }
            EfqPhase::QAnswer { side, sort, .. } => subsets_at_least(&self.dom(side.other(), *sort), self.k)
                .into_iter()
                .map(EfqMove::SetY)
                .collect(),
            EfqPhase::ChooseY { y, .. } => y.iter().map(|e| EfqMove::PickY(*e)).collect(),
            EfqPhase::ChooseX { x, .. } => x.iter().map(|e| EfqMove::PickX(*e)).collect(),
        }
    }

    fn candidates(&self, s: &EfqState, value: &mut dyn FnMut(&EfqState) -> Player) -> Vec<EfqMove> {
        match &s.phase {
            // Shrinking X only removes options for Duplicator.
            EfqPhase::Spoiler => {
                let mut out = Vec::new();
                for side in [Side::Left, Side::Right] {
                    for (sort, d) in &self.structure(side).domains {
                        for e in d {
                            out.push(EfqMove::Pick { side, sort: *sort, elem: *e });
                        }
                        let dv: Vec<Elem> = d.iter().copied().collect();
                        for x in subsets_exactly(&dv, self.k) {
                            out.push(EfqMove::SetX { side, sort: *sort, elems: x });
                        }
                    }
                }
                out
            }
            // Y must avoid every y that Spoiler could exploit; the good
            // elements form the largest safe answer.
            EfqPhase::QAnswer { side, sort, x } => {
                let other = self.dom(side.other(), *sort);
                let good: Vec<Elem> = other
                    .iter()
                    .copied()
                    .filter(|y| x.iter().any(|xe| value(&self.finish(s, *side, *sort, *xe, *y)) == Player::Duplicator))
                    .collect();
                let pool = if good.len() >= self.k { good } else { other };
                if pool.len() < self.k {
                    return vec![];
                }
                vec![EfqMove::SetY(pool[..self.k].to_vec())]
            }
            _ => self.legal_moves(s),
        }
    }

    fn is_legal(&self, s: &EfqState, m: &EfqMove) -> bool {
        match (&s.phase, m) {
            (EfqPhase::Spoiler, EfqMove::SetX { side, sort, elems }) => self.is_set_in(*side, *sort, elems),
            (EfqPhase::QAnswer { side, sort, .. }, EfqMove::SetY(y)) => self.is_set_in(side.other(), *sort, y),
            _ => self.legal_moves(s).contains(m),
        }
    }

    fn apply(&self, s: &EfqState, mv: &EfqMove) -> EfqState {
        let next = |phase| EfqState {
            pairs: s.pairs.clone(),
            rounds_left: s.rounds_left,
            phase,
        };
        match (&s.phase, mv) {
            (EfqPhase::Spoiler, EfqMove::Pick { side, sort, elem }) => next(EfqPhase::Answer {
                side: *side,
                sort: *sort,
                elem: *elem,
            }),
            (EfqPhase::Spoiler, EfqMove::SetX { side, sort, elems }) => next(EfqPhase::QAnswer {
                side: *side,
                sort: *sort,
                x: elems.clone(),
            }),
            (EfqPhase::Answer { side, sort, elem }, EfqMove::Answer(b)) => self.finish(s, *side, *sort, *elem, *b),
            (EfqPhase::QAnswer { side, sort, x }, EfqMove::SetY(y)) => next(EfqPhase::ChooseY {
                side: *side,
                sort: *sort,
                x: x.clone(),
                y: y.clone(),
            }),
            (EfqPhase::ChooseY { side, sort, x, .. }, EfqMove::PickY(y)) => next(EfqPhase::ChooseX {
                side: *side,
                sort: *sort,
                x: x.clone(),
                y: *y,
            }),
            (EfqPhase::ChooseX { side, sort, y, .. }, EfqMove::PickX(x)) => self.finish(s, *side, *sort, *x, *y),
            _ => s.clone(),
        }
    }
}

/// Exact winner of the threshold-`k` Q-game with a verified strategy.
pub fn efq_solve(
    m: &Structure,
    n: &Structure,
    rounds: usize,
    k: usize,
) -> Result<GameResult<EfqState, EfqMove>, GameError> {
    let g = EfqGame::new(m, n, rounds, k)?;
    Solver::new(&g).solve(Some(rounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::ef_solve;
    use crate::semantics::satisfies_sentence;
    use crate::structures::pure_set;
    use crate::syntax::parse_formula;

    #[test]
    fn threshold_five() {
        let (a, b) = (pure_set(5), pure_set(9));
        assert_eq!(efq_solve(&a, &b, 1, 5).unwrap().winner, Player::Duplicator);
        assert_eq!(efq_solve(&a, &b, 2, 5).unwrap().winner, Player::Spoiler);
        // The rank-2 sentence behind Spoiler's win.
        let f = parse_formula("exists x:0. Qge 5 y:0. not y = x", &a.voc).unwrap();
        assert!(!satisfies_sentence(&a, &f).unwrap());
        assert!(satisfies_sentence(&b, &f).unwrap());
        assert_eq!(efq_solve(&pure_set(3), &b, 1, 5).unwrap().winner, Player::Spoiler);
        assert_eq!(efq_solve(&b, &b, 2, 5).unwrap().winner, Player::Duplicator);
    }

    #[test]
    fn threshold_one_is_plain_ef() {
        for a in 1..=4 {
            for b in 1..=4 {
                for r in 0..=3 {
                    let (m, n) = (pure_set(a), pure_set(b));
                    assert_eq!(
                        efq_solve(&m, &n, r, 1).unwrap().winner,
                        ef_solve(&m, &n, r).unwrap().winner,
                        "{a} {b} {r}"
                    );
                }
            }
        }
    }

    #[test]
    fn small_set_rejected() {
        let (m, n) = (pure_set(5), pure_set(9));
        let g = EfqGame::new(&m, &n, 1, 5).unwrap();
        let s = g.initial();
        assert!(!g.is_legal(&s, &EfqMove::SetX { side: Side::Left, sort: 0, elems: vec![0, 1] }));
        assert!(g.is_legal(&s, &EfqMove::SetX { side: Side::Left, sort: 0, elems: vec![0, 1, 2, 3, 4] }));
    }
}
