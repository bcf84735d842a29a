use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Game, GameError, GameResult, Player, Solver, Status};
use crate::structures::{Elem, Structure};
use crate::syntax::Sort;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A pebbled pair: the sort it was played in, the left and the right element.
pub type Pair = (Sort, Elem, Elem);

/// Whether the pairs, together with the interpretations of the constants,
/// define a partial isomorphism from `m` to `n`.
pub fn is_partial_iso(m: &Structure, n: &Structure, pairs: &[Pair]) -> bool {
    let mut all: Vec<Pair> = m
        .voc
        .constants
        .iter()
        .map(|(c, s)| (*s, m.constants[c], n.constants[c]))
        .collect();
    all.extend_from_slice(pairs);
    partial_iso_check(m, n, &all)
}

fn partial_iso_check(m: &Structure, n: &Structure, all: &[Pair]) -> bool {
    for (i, (s, a, b)) in all.iter().enumerate() {
        if !m.domain(*s).contains(a) || !n.domain(*s).contains(b) {
            return false;
        }
        for (_, c, d) in &all[..i] {
            if (a == c) != (b == d) {
                return false;
            }
        }
    }
    for (r, profile) in &m.voc.relations {
        let k = profile.len();
        if k == 0 {
            if m.holds(r, &[]) != n.holds(r, &[]) {
                return false;
            }
            continue;
        }
        let total = all.len();
        if total == 0 {
            continue;
        }
        let mut idx = vec![0usize; k];
        'tuples: loop {
            let fits = idx.iter().zip(profile).all(|(i, s)| all[*i].0 == *s);
            if fits {
                let ta: Vec<Elem> = idx.iter().map(|i| all[*i].1).collect();
                let tb: Vec<Elem> = idx.iter().map(|i| all[*i].2).collect();
                if m.holds(r, &ta) != n.holds(r, &tb) {
                    return false;
                }
            }
            for d in idx.iter_mut() {
                *d += 1;
                if *d < total {
                    continue 'tuples;
                }
                *d = 0;
            }
            break;
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EfState {
    /// Pebbled pairs, sorted and without repetitions.
    pub pairs: Vec<Pair>,
    pub rounds_left: usize,
    /// Spoiler's pick awaiting an answer.
    pub pending: Option<(Side, Sort, Elem)>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EfMove {
    Pick { side: Side, sort: Sort, elem: Elem },
    Answer(Elem),
}

/// The `rounds`-move Ehrenfeucht–Fraïssé game on `(m, n)`.
pub struct EfGame<'a> {
    pub m: &'a Structure,
    pub n: &'a Structure,
    pub rounds: usize,
}

impl<'a> EfGame<'a> {
    pub fn new(m: &'a Structure, n: &'a Structure, rounds: usize) -> Result<Self, GameError> {
        check_inputs(m, n)?;
        Ok(EfGame { m, n, rounds })
    }

    fn structure(&self, side: Side) -> &Structure {
        match side {
            Side::Left => self.m,
            Side::Right => self.n,
        }
    }
}

pub(crate) fn check_inputs(m: &Structure, n: &Structure) -> Result<(), GameError> {
    if m.voc != n.voc {
        return Err(GameError::VocabularyMismatch);
    }
    if !m.voc.functions.is_empty() {
        return Err(GameError::FunctionsUnsupported);
    }
    Ok(())
}

pub(crate) fn insert_pair(pairs: &[Pair], p: Pair) -> Vec<Pair> {
    let mut v = pairs.to_vec();
    if let Err(i) = v.binary_search(&p) {
        v.insert(i, p);
    }
    v
}

impl Game for EfGame<'_> {
    type State = EfState;
    type Move = EfMove;

    fn initial(&self) -> EfState {
        EfState {
            pairs: vec![],
            rounds_left: self.rounds,
            pending: None,
        }
    }

    fn status(&self, s: &EfState) -> Status {
        if !is_partial_iso(self.m, self.n, &s.pairs) {
            return Status::Won(Player::Spoiler);
        }
        if s.pending.is_some() {
            return Status::ToMove(Player::Duplicator);
        }
        if s.rounds_left == 0 {
            return Status::Won(Player::Duplicator);
        }
        Status::ToMove(Player::Spoiler)
    }

    fn legal_moves(&self, s: &EfState) -> Vec<EfMove> {
        match s.pending {
            Some((side, sort, _)) => self
                .structure(side.other())
                .domain(sort)
                .iter()
                .map(|e| EfMove::Answer(*e))
                .collect(),
            None => {
                let mut out = Vec::new();
                for side in [Side::Left, Side::Right] {
                    let st = self.structure(side);
                    for (sort, dom) in &st.domains {
                        for e in dom {
                            out.push(EfMove::Pick {
                                side,
                                sort: *sort,
                                elem: *e,
                            });
                        }
                    }
                }
                out
            }
        }
    }

    fn apply(&self, s: &EfState, mv: &EfMove) -> EfState {
        match (mv, s.pending) {
            (EfMove::Pick { side, sort, elem }, None) => EfState {
                pairs: s.pairs.clone(),
                rounds_left: s.rounds_left,
                pending: Some((*side, *sort, *elem)),
            },
            (EfMove::Answer(b), Some((side, sort, a))) => {
                let pair = match side {
                    Side::Left => (sort, a, *b),
                    Side::Right => (sort, *b, a),
                };
                EfState {
                    pairs: insert_pair(&s.pairs, pair),
                    rounds_left: s.rounds_left - 1,
                    pending: None,
                }
            }
            _ => s.clone(),
        }
    }
}

/// Exact winner of the `rounds`-move EF game with a verified strategy.
pub fn ef_solve(m: &Structure, n: &Structure, rounds: usize) -> Result<GameResult<EfState, EfMove>, GameError> {
    let g = EfGame::new(m, n, rounds)?;
    Solver::new(&g).solve(Some(rounds))
}

/// Levels `I_0 ⊇ I_1 ⊇ ... ⊇ I_r` of positions (sets of pairs).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BackAndForthSequence {
    pub levels: Vec<BTreeSet<Vec<Pair>>>,
}

fn all_pairs(m: &Structure, n: &Structure) -> Vec<Pair> {
    let mut out = Vec::new();
    for (s, dm) in &m.domains {
        for a in dm {
            for b in n.domain(*s) {
                out.push((*s, *a, *b));
            }
        }
    }
    out
}

fn extends_into(m: &Structure, n: &Structure, p: &[Pair], level: &BTreeSet<Vec<Pair>>) -> bool {
    for (s, dm) in &m.domains {
        for a in dm {
            let ok = n.domain(*s).iter().any(|b| level.contains(&insert_pair(p, (*s, *a, *b))));
            if !ok {
                return false;
            }
        }
    }
    for (s, dn) in &n.domains {
        for b in dn {
            let ok = m.domain(*s).iter().any(|a| level.contains(&insert_pair(p, (*s, *a, *b))));
            if !ok {
                return false;
            }
        }
    }
    true
}

const POSITION_BUDGET: usize = 2_000_000;

/// Partial isomorphisms (as sorted pair sets) with at most `max` pairs.
fn partial_isos_up_to(m: &Structure, n: &Structure, max: usize) -> Result<BTreeSet<Vec<Pair>>, GameError> {
    let pairs = all_pairs(m, n);
    let mut out: BTreeSet<Vec<Pair>> = BTreeSet::new();
    let mut frontier: Vec<Vec<Pair>> = vec![vec![]];
    if is_partial_iso(m, n, &[]) {
        out.insert(vec![]);
    } else {
        return Ok(out);
    }
    for _ in 0..max {
        let mut next = Vec::new();
        for p in &frontier {
            let start = p.last().map(|l| pairs.iter().position(|x| x == l).unwrap() + 1).unwrap_or(0);
            for q in &pairs[start..] {
                let mut v = p.clone();
                v.push(*q);
                if is_partial_iso(m, n, &v) {
                    out.insert(v.clone());
                    next.push(v);
                }
            }
            if out.len() > POSITION_BUDGET {
                return Err(GameError::BudgetExceeded("too many partial isomorphisms".into()));
            }
        }
        frontier = next;
    }
    Ok(out)
}

/// The back-and-forth sequence witnessing Duplicator's win in the
/// `rounds`-move game: `I_i` holds the partial isomorphisms with at most
/// `rounds - i` pairs from which Duplicator survives `i` more rounds.
pub fn back_and_forth(
    m: &Structure,
    n: &Structure,
    rounds: usize,
) -> Result<Option<BackAndForthSequence>, GameError> {
    check_inputs(m, n)?;
    let base = partial_isos_up_to(m, n, rounds)?;
    let mut levels = vec![base];
    for i in 0..rounds {
        let prev = &levels[i];
        let next: BTreeSet<Vec<Pair>> = prev
            .iter()
            .filter(|p| p.len() < rounds - i && extends_into(m, n, p, prev))
            .cloned()
            .collect();
        levels.push(next);
    }
    if levels[rounds].contains(&Vec::new()) {
        Ok(Some(BackAndForthSequence { levels }))
    } else {
        Ok(None)
    }
}

/// Level-wise checks: nesting, partial isomorphism, and the extension
/// property of each level into the previous one.
pub fn verify_back_and_forth(m: &Structure, n: &Structure, seq: &BackAndForthSequence) -> Result<(), String> {
    for (i, level) in seq.levels.iter().enumerate() {
        for p in level {
            if !is_partial_iso(m, n, p) {
                return Err(format!("level {i}: {p:?} is not a partial isomorphism"));
            }
        }
        if i > 0 {
            let prev = &seq.levels[i - 1];
            if !level.is_subset(prev) {
                return Err(format!("level {i} is not contained in level {}", i - 1));
            }
            for p in level {
                if !extends_into(m, n, p, prev) {
                    return Err(format!("level {i}: {p:?} lacks an extension in level {}", i - 1));
                }
            }
        }
    }
    if !seq.levels.last().is_some_and(|l| l.contains(&Vec::new())) {
        return Err("last level does not contain the empty position".into());
    }
    Ok(())
}

/// Duplicator's and Spoiler's moves in the game of unbounded length.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum UnboundedMove {
    Pick { side: Side, sort: Sort, elem: Elem },
    /// Duplicator's reply to a pick, keyed by that pick.
    Answer { side: Side, sort: Sort, elem: Elem, reply: Elem },
}

/// The EF game of length ω, solved as a greatest fixpoint over partial
/// isomorphisms. `rounds` of the result is `None`.
///
/// For Duplicator the strategy maps each position to her replies (one
/// entry per possible pick); for Spoiler it maps positions to the pick that
/// makes progress towards a position outside the fixpoint.
pub fn ef_unbounded(
    m: &Structure,
    n: &Structure,
) -> Result<GameResult<Vec<Pair>, Vec<UnboundedMove>>, GameError> {
    check_inputs(m, n)?;
    let size = m.universe().len().max(n.universe().len());
    let mut family = partial_isos_up_to(m, n, size + 1)?;
    // stage[p] = iteration at which p left the family.
    let mut stage: BTreeMap<Vec<Pair>, usize> = BTreeMap::new();
    let mut it = 0;
    loop {
        it += 1;
        let removed: Vec<Vec<Pair>> = family
            .iter()
            .filter(|p| !extends_into(m, n, p, &family))
            .cloned()
            .collect();
        if removed.is_empty() {
            break;
        }
        for p in removed {
            family.remove(&p);
            stage.insert(p, it);
        }
    }
    let picks = |side: Side| -> Vec<(Sort, Elem)> {
        let st = if side == Side::Left { m } else { n };
        st.domains
            .iter()
            .flat_map(|(s, d)| d.iter().map(move |e| (*s, *e)))
            .collect()
    };
    let extend = |p: &[Pair], side: Side, s: Sort, a: Elem, b: Elem| {
        insert_pair(p, if side == Side::Left { (s, a, b) } else { (s, b, a) })
    };
    let other_dom = |side: Side, s: Sort| -> Vec<Elem> {
        let st = if side == Side::Left { n } else { m };
        st.domain(s).iter().copied().collect()
    };
    let mut strategy = BTreeMap::new();
    if family.contains(&Vec::new()) {
        for p in &family {
            let mut replies = Vec::new();
            for side in [Side::Left, Side::Right] {
                for (s, a) in picks(side) {
                    let reply = other_dom(side, s)
                        .into_iter()
                        .find(|b| family.contains(&extend(p, side, s, a, *b)))
                        .expect("fixpoint has the extension property");
                    replies.push(UnboundedMove::Answer { side, sort: s, elem: a, reply });
                }
            }
            strategy.insert(p.clone(), replies);
        }
        return Ok(GameResult {
            winner: Player::Duplicator,
            strategy,
            rounds: None,
        });
    }
    // Spoiler: pick so that every reply leaves the family strictly earlier
    // (or breaks partial isomorphism).
    let rank = |p: &Vec<Pair>| -> usize {
        if is_partial_iso(m, n, p) {
            stage.get(p).copied().unwrap_or(usize::MAX)
        } else {
            0
        }
    };
    for (p, st) in &stage {
        'pick: for side in [Side::Left, Side::Right] {
            for (s, a) in picks(side) {
                let all_lower = other_dom(side, s).into_iter().all(|b| {
                    let q = extend(p, side, s, a, b);
                    q.len() > size + 1 || rank(&q) < *st
                });
                if all_lower {
                    strategy.insert(p.clone(), vec![UnboundedMove::Pick { side, sort: s, elem: a }]);
                    break 'pick;
                }
            }
        }
    }
    Ok(GameResult {
        winner: Player::Spoiler,
        strategy,
        rounds: None,
    })
}
