//! Ehrenfeucht–Fraïssé games and their variants, solved exactly by memoized
//! game-tree search.

mod ef;
mod efq;
mod shelah;
mod symbolic;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use serde::{Deserialize, Serialize};

pub use ef::{
    back_and_forth, ef_solve, ef_unbounded, is_partial_iso, verify_back_and_forth, BackAndForthSequence,
    EfGame, EfMove, EfState, Pair, Side, UnboundedMove,
};
pub use efq::{efq_solve, EfqGame, EfqMove, EfqPhase, EfqState};
pub use shelah::{shelah_solve, shelah_solve_with, ColorRange, Obligation, ShelahGame, ShelahMove, ShelahState};
pub use symbolic::{
    efq_symbolic, keisler_strategy_verify, Cell, SymElem, SymGame, SymMove, SymPhase, SymPosition,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Player {
    Spoiler,
    Duplicator,
}

impl Player {
    pub fn other(self) -> Player {
        match self {
            Player::Spoiler => Player::Duplicator,
            Player::Duplicator => Player::Spoiler,
        }
    }
}

impl std::fmt::Display for Player {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Player::Spoiler => write!(f, "Spoiler"),
            Player::Duplicator => write!(f, "Duplicator"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    ToMove(Player),
    Won(Player),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GameError {
    #[error("structures have different vocabularies")]
    VocabularyMismatch,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("function symbols are not supported in games")]
    FunctionsUnsupported,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("strategy verification failed: {0}")]
    VerificationFailed(String),
}

/// A finite two-player game of perfect information.
pub trait Game {
    type State: Clone + Ord + Debug;
    type Move: Clone + Ord + Debug;

    fn initial(&self) -> Self::State;
    fn status(&self, s: &Self::State) -> Status;
    /// Every legal move of the player to move.
    fn legal_moves(&self, s: &Self::State) -> Vec<Self::Move>;
    /// A subset of the legal moves that contains a winning move whenever one
    /// exists. `value` gives the exact winner of any state.
    fn candidates(
        &self,
        s: &Self::State,
        _value: &mut dyn FnMut(&Self::State) -> Player,
    ) -> Vec<Self::Move> {
        self.legal_moves(s)
    }
    fn is_legal(&self, s: &Self::State, m: &Self::Move) -> bool {
        self.legal_moves(s).contains(m)
    }
    fn apply(&self, s: &Self::State, m: &Self::Move) -> Self::State;
}

/// Default cap on the number of states a solver may store.
pub const STATE_BUDGET: usize = 20_000_000;

/// Memoized minimax over a [`Game`].
pub struct Solver<'g, G: Game> {
    pub game: &'g G,
    memo: RefCell<BTreeMap<G::State, Player>>,
    budget: usize,
    exceeded: RefCell<bool>,
}

impl<'g, G: Game> Solver<'g, G> {
    pub fn new(game: &'g G) -> Self {
        Solver {
            game,
            memo: RefCell::new(BTreeMap::new()),
            budget: STATE_BUDGET,
            exceeded: RefCell::new(false),
        }
    }

    /// The winner under optimal play from `s`.
    pub fn value(&self, s: &G::State) -> Player {
        if let Some(p) = self.memo.borrow().get(s) {
            return *p;
        }
        let v = match self.game.status(s) {
            Status::Won(p) => p,
            Status::ToMove(p) => {
                let cands = self.game.candidates(s, &mut |t| self.value(t));
                let wins = cands.iter().any(|m| self.value(&self.game.apply(s, m)) == p);
                if wins {
                    p
                } else {
                    p.other()
                }
            }
        };
        let mut memo = self.memo.borrow_mut();
        if memo.len() >= self.budget {
            *self.exceeded.borrow_mut() = true;
        } else {
            memo.insert(s.clone(), v);
        }
        v
    }

    pub fn exceeded(&self) -> bool {
        *self.exceeded.borrow()
    }

    /// The least winning candidate for the player to move, if any.
    pub fn winning_move(&self, s: &G::State) -> Option<G::Move> {
        let Status::ToMove(p) = self.game.status(s) else {
            return None;
        };
        let mut cands = self.game.candidates(s, &mut |t| self.value(t));
        cands.sort();
        cands
            .into_iter()
            .find(|m| self.value(&self.game.apply(s, m)) == p)
    }

    /// The engine's move: the least winning move, else the least legal one.
    pub fn best_move(&self, s: &G::State) -> Option<G::Move> {
        self.winning_move(s).or_else(|| {
            let mut moves = self.game.legal_moves(s);
            moves.sort();
            moves.into_iter().next()
        })
    }

    /// Solves from the initial state, extracts the winner's strategy on every
    /// state reachable against arbitrary legal opposition, and re-verifies it.
    pub fn solve(&self, rounds: Option<usize>) -> Result<GameResult<G::State, G::Move>, GameError> {
        let init = self.game.initial();
        let winner = self.value(&init);
        if self.exceeded() {
            return Err(GameError::BudgetExceeded(format!("more than {} states", self.budget)));
        }
        let mut strategy = BTreeMap::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![init];
        while let Some(s) = stack.pop() {
            if !seen.insert(s.clone()) {
                continue;
            }
            if seen.len() > self.budget {
                return Err(GameError::BudgetExceeded("strategy extraction".into()));
            }
            match self.game.status(&s) {
                Status::Won(_) => {}
                Status::ToMove(p) if p == winner => {
                    let m = self
                        .winning_move(&s)
                        .ok_or_else(|| GameError::VerificationFailed(format!("no winning move at {s:?}")))?;
                    stack.push(self.game.apply(&s, &m));
                    strategy.insert(s, m);
                }
                Status::ToMove(_) => {
                    for m in self.game.legal_moves(&s) {
                        stack.push(self.game.apply(&s, &m));
                    }
                }
            }
        }
        let result = GameResult {
            winner,
            strategy,
            rounds,
        };
        verify_strategy(self.game, &result)?;
        Ok(result)
    }
}

/// Winner of a game together with a positional winning strategy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameResult<S: Ord, M> {
    pub winner: Player,
    /// The winner's move at every reachable decision point.
    pub strategy: BTreeMap<S, M>,
    /// Number of rounds, `None` for the unbounded game.
    pub rounds: Option<usize>,
}

/// Replays `result.strategy` against every legal opposing move.
pub fn verify_strategy<G: Game>(game: &G, result: &GameResult<G::State, G::Move>) -> Result<(), GameError> {
    let winner = result.winner;
    verify_with(game, winner, |s| result.strategy.get(s).cloned())
}

/// Replays a strategy function for `winner` against every legal opposing move.
pub fn verify_with<G: Game>(
    game: &G,
    winner: Player,
    mut strategy: impl FnMut(&G::State) -> Option<G::Move>,
) -> Result<(), GameError> {
    let mut seen = BTreeSet::new();
    let mut stack = vec![game.initial()];
    while let Some(s) = stack.pop() {
        if !seen.insert(s.clone()) {
            continue;
        }
        if seen.len() > STATE_BUDGET {
            return Err(GameError::BudgetExceeded("strategy verification".into()));
        }
        match game.status(&s) {
            Status::Won(p) if p == winner => {}
            Status::Won(p) => return Err(GameError::VerificationFailed(format!("{p} wins at {s:?}"))),
            Status::ToMove(p) if p == winner => {
                let m = strategy(&s)
                    .ok_or_else(|| GameError::VerificationFailed(format!("no strategy move at {s:?}")))?;
                if !game.is_legal(&s, &m) {
                    return Err(GameError::VerificationFailed(format!("illegal move {m:?} at {s:?}")));
                }
                stack.push(game.apply(&s, &m));
            }
            Status::ToMove(_) => {
                for m in game.legal_moves(&s) {
                    stack.push(game.apply(&s, &m));
                }
            }
        }
    }
    Ok(())
}
