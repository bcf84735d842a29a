//! Game sessions: one game between a human and the engine, with the
//! position and moves kept as JSON values in the games' serde encoding.

use mtw_core::games::{
    ColorRange, EfGame, EfqGame, Game, GameError, Player, ShelahGame, Solver, Status, SymGame,
};
use mtw_core::structures::{parse_structure, parse_symbolic, Structure, SymbolicEqStructure};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Ef,
    Efq,
    EfqSym,
    Shelah,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    #[serde(alias = "spoiler")]
    Spoiler,
    #[serde(alias = "duplicator")]
    Duplicator,
}

impl From<Role> for Player {
    fn from(r: Role) -> Player {
        match r {
            Role::Spoiler => Player::Spoiler,
            Role::Duplicator => Player::Duplicator,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<ColorRange>,
}

/// Body of `POST /api/game/new`. Structures are inline in the structure
/// file format (the `EQGROUPS` format for `efq-sym`).
#[derive(Clone, Debug, Deserialize)]
pub struct NewGame {
    pub kind: Kind,
    pub left: String,
    pub right: String,
    #[serde(default)]
    pub params: Params,
    #[serde(rename = "humanRole")]
    pub human_role: Role,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistoryEntry {
    pub player: Player,
    #[serde(rename = "move")]
    pub mv: Value,
}

#[derive(Debug, PartialEq)]
pub enum SessionError {
    /// Bad configuration or structure text.
    Config(String),
    /// A move the current position does not allow.
    Illegal(String),
}

impl std::fmt::Display for SessionError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionError::Config(m) | SessionError::Illegal(m) => write!(f, "{m}"),
        }
    }
}

enum Board {
    Explicit(Structure, Structure),
    Symbolic(SymbolicEqStructure, SymbolicEqStructure),
}

/// Object-safe view of a [`Game`] over JSON positions and moves.
trait Driver {
    fn initial(&self) -> Value;
    fn status(&self, s: &Value) -> Result<Status, String>;
    fn legal(&self, s: &Value) -> Result<Vec<Value>, String>;
    fn apply(&self, s: &Value, m: &Value) -> Result<Value, SessionError>;
    fn engine(&self, s: &Value) -> Result<Option<Value>, String>;
}

struct Json<G>(G);

fn decode<T: DeserializeOwned>(v: &Value) -> Result<T, String> {
    serde_json::from_value(v.clone()).map_err(|e| e.to_string())
}

fn encode<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("game values serialize")
}

impl<G> Driver for Json<G>
where
    G: Game,
    G::State: Serialize + DeserializeOwned,
    G::Move: Serialize + DeserializeOwned,
{
    fn initial(&self) -> Value {
        encode(&self.0.initial())
    }

    fn status(&self, s: &Value) -> Result<Status, String> {
        Ok(self.0.status(&decode(s)?))
    }

    fn legal(&self, s: &Value) -> Result<Vec<Value>, String> {
        let s: G::State = decode(s)?;
        let mut moves = self.0.legal_moves(&s);
        moves.sort();
        Ok(moves.iter().map(encode).collect())
    }

    fn apply(&self, s: &Value, m: &Value) -> Result<Value, SessionError> {
        let s: G::State = decode(s).map_err(SessionError::Config)?;
        let m: G::Move = decode(m).map_err(|e| SessionError::Illegal(format!("not a move of this game: {e}")))?;
        if !matches!(self.0.status(&s), Status::ToMove(_)) {
            return Err(SessionError::Illegal("the game is over".into()));
        }
        if !self.0.is_legal(&s, &m) {
            return Err(SessionError::Illegal(format!("{m:?} is not legal here")));
        }
        Ok(encode(&self.0.apply(&s, &m)))
    }

    fn engine(&self, s: &Value) -> Result<Option<Value>, String> {
        let s: G::State = decode(s)?;
        let solver = Solver::new(&self.0);
        let m = solver.best_move(&s);
        if solver.exceeded() {
            return Err("state budget exceeded".into());
        }
        Ok(m.as_ref().map(encode))
    }
}

pub struct Session {
    pub id: String,
    pub kind: Kind,
    pub human: Player,
    pub params: Params,
    pub left: String,
    pub right: String,
    board: Board,
    pub position: Value,
    pub history: Vec<HistoryEntry>,
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, SessionError> {
    v.ok_or_else(|| SessionError::Config(format!("missing parameter `{name}`")))
}

fn game_error(e: GameError) -> SessionError {
    SessionError::Config(e.to_string())
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::ToMove(_) => "ongoing",
        Status::Won(Player::Duplicator) => "duplicator-wins",
        Status::Won(Player::Spoiler) => "spoiler-wins",
    }
}

impl Session {
    /// Sets up the game and lets the engine open if it moves first.
    pub fn new(id: &str, cfg: NewGame) -> Result<(Session, Option<Value>), SessionError> {
        let board = match cfg.kind {
            Kind::EfqSym => {
                let parse = |t: &str| parse_symbolic(t).map_err(|e| SessionError::Config(e.to_string()));
                Board::Symbolic(parse(&cfg.left)?, parse(&cfg.right)?)
            }
            _ => {
                let parse = |t: &str| parse_structure(t).map_err(|e| SessionError::Config(e.to_string()));
                Board::Explicit(parse(&cfg.left)?, parse(&cfg.right)?)
            }
        };
        let mut s = Session {
            id: id.to_string(),
            kind: cfg.kind,
            human: cfg.human_role.into(),
            params: cfg.params,
            left: cfg.left,
            right: cfg.right,
            board,
            position: Value::Null,
            history: Vec::new(),
        };
        s.position = s.with_driver(|d| Ok(d.initial()))?;
        let reply = s.engine_turns()?;
        Ok((s, reply))
    }

    fn with_driver<R>(&self, f: impl FnOnce(&dyn Driver) -> Result<R, SessionError>) -> Result<R, SessionError> {
        let p = &self.params;
        match (&self.board, self.kind) {
            (Board::Explicit(m, n), Kind::Ef) => {
                f(&Json(EfGame::new(m, n, need(p.rounds, "rounds")?).map_err(game_error)?))
            }
            (Board::Explicit(m, n), Kind::Efq) => f(&Json(
                EfqGame::new(m, n, need(p.rounds, "rounds")?, need(p.k, "k")?).map_err(game_error)?,
            )),
            (Board::Explicit(a, b), Kind::Shelah) => f(&Json(
                ShelahGame::new(
                    a,
                    b,
                    need(p.beta, "beta")?,
                    need(p.theta, "theta")?,
                    p.colors.unwrap_or_default(),
                )
                .map_err(game_error)?,
            )),
            (Board::Symbolic(e1, e2), Kind::EfqSym) => f(&Json(
                SymGame::new(e1, e2, need(p.rounds, "rounds")?, need(p.alpha, "alpha")?).map_err(game_error)?,
            )),
            _ => unreachable!("board kind fixed at creation"),
        }
    }

    pub fn status(&self) -> Result<Status, SessionError> {
        self.with_driver(|d| d.status(&self.position).map_err(SessionError::Config))
    }

    /// The moves open to the human, empty when it is not their turn.
    pub fn legal_moves(&self) -> Result<Vec<Value>, SessionError> {
        match self.status()? {
            Status::ToMove(p) if p == self.human => {
                self.with_driver(|d| d.legal(&self.position).map_err(SessionError::Config))
            }
            _ => Ok(Vec::new()),
        }
    }

    /// Plays the engine while it is the engine's turn; returns its last move.
    fn engine_turns(&mut self) -> Result<Option<Value>, SessionError> {
        let engine = self.human.other();
        let mut last = None;
        while self.status()? == Status::ToMove(engine) {
            let Some(m) = self.with_driver(|d| d.engine(&self.position).map_err(SessionError::Config))? else {
                break;
            };
            self.position = self.with_driver(|d| d.apply(&self.position, &m))?;
            self.history.push(HistoryEntry {
                player: engine,
                mv: m.clone(),
            });
            last = Some(m);
        }
        Ok(last)
    }

    /// Applies the human's move and the engine's answer.
    pub fn play(&mut self, mv: Value) -> Result<Option<Value>, SessionError> {
        if self.status()? != Status::ToMove(self.human) {
            return Err(SessionError::Illegal("not the human's turn".into()));
        }
        self.position = self.with_driver(|d| d.apply(&self.position, &mv))?;
        self.history.push(HistoryEntry {
            player: self.human,
            mv,
        });
        self.engine_turns()
    }

    /// Replays the history from the initial position.
    pub fn replay(&self) -> Result<Value, SessionError> {
        self.with_driver(|d| {
            let mut s = d.initial();
            for h in &self.history {
                s = d.apply(&s, &h.mv)?;
            }
            Ok(s)
        })
    }

    /// The full session state served by `GET /api/game/{id}`.
    pub fn view(&self) -> Result<Value, SessionError> {
        Ok(json!({
            "sessionId": self.id,
            "kind": self.kind,
            "humanRole": self.human,
            "params": self.params,
            "left": self.left,
            "right": self.right,
            "position": self.position,
            "status": status_name(self.status()?),
            "legalMoves": self.legal_moves()?,
            "history": self.history,
        }))
    }
}
