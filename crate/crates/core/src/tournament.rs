//! Head-to-head matches between two search engines.
//!
//! Games come in mirrored pairs. Both games of a pair start from the same
//! position and use the same per-move seeds; only the side each engine plays
//! changes. Engine `seed` fields are ignored: the search seed of every move
//! is derived from the match seed, the pair index and the ply, so results do
//! not depend on scheduling and swapping the engines maps the win rate `p`
//! to exactly `1 - p`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backup::{BackupError, BackupStrategy};
use crate::games::{
    generate_synthetic_tree, Action, AnyGame, GameError, GameState, PlayerRole, SyntheticTreeSpec, TicTacToe,
};
use crate::mcts::{run_search, SearchConfig, SearchError};
use crate::seed::derive;

const POOL_TAG: u64 = 0x504F_4F4C;
const MOVE_TAG: u64 = 0x4D4F_5645;
/// Tree seeds tried per pair before a synthetic pool is declared exhausted.
pub const MAX_POOL_ATTEMPTS: u64 = 256;
/// Two-sided 95% standard-normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TournamentError {
    #[error("invalid match configuration: {0}")]
    InvalidConfig(String),
    #[error("no usable synthetic tree after {attempts} seeds for pair {pair}")]
    PoolExhausted { pair: usize, attempts: u64 },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Backup(#[from] BackupError),
}

/// Where match games start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameDescriptor {
    /// Tic-tac-toe from `board` (nine characters over `X`, `O`, `.`), or
    /// from the empty board.
    #[serde(rename = "tictactoe")]
    TicTacToe {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        board: Option<String>,
    },
    /// A pool of synthetic trees: every pair draws a fresh tree seed, and
    /// seeds rejected by the generator are skipped deterministically.
    Synthetic(SyntheticTreeSpec),
}

impl GameDescriptor {
    /// The single position described: the board, or the synthetic tree
    /// generated from the spec's own seed.
    pub fn root(&self) -> Result<AnyGame, TournamentError> {
        match self {
            Self::TicTacToe { board } => Ok(tictactoe_board(board.as_deref())?.into()),
            Self::Synthetic(spec) => Ok(generate_synthetic_tree(spec)?.into()),
        }
    }

    /// Starting position of pair `pair` of a match seeded with `match_seed`,
    /// together with the tree seed used (0 for tic-tac-toe).
    pub fn position(&self, match_seed: u64, pair: usize) -> Result<(AnyGame, u64), TournamentError> {
        match self {
            Self::TicTacToe { board } => Ok((tictactoe_board(board.as_deref())?.into(), 0)),
            Self::Synthetic(spec) => {
                for attempt in 0..MAX_POOL_ATTEMPTS {
                    let seed = derive(match_seed, &[POOL_TAG, spec.seed, pair as u64, attempt]);
                    let mut drawn = spec.clone();
                    drawn.seed = seed;
                    match generate_synthetic_tree(&drawn) {
                        Ok(root) => return Ok((root.into(), seed)),
                        Err(GameError::Degenerate(_)) => continue,
                        Err(e) => return Err(e.into()),
                    }
                }
                Err(TournamentError::PoolExhausted {
                    pair,
                    attempts: MAX_POOL_ATTEMPTS,
                })
            }
        }
    }

    pub fn validate(&self) -> Result<(), TournamentError> {
        match self {
            Self::TicTacToe { board } => {
                if tictactoe_board(board.as_deref())?.is_terminal() {
                    return Err(TournamentError::InvalidConfig("the tic-tac-toe board is already decided".into()));
                }
            }
            Self::Synthetic(spec) => spec.validate()?,
        }
        Ok(())
    }
}

fn tictactoe_board(board: Option<&str>) -> Result<TicTacToe, TournamentError> {
    match board {
        None => Ok(TicTacToe::new()),
        Some(b) => TicTacToe::from_board(b)
            .ok_or_else(|| TournamentError::InvalidConfig(format!("malformed tic-tac-toe board {b:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchConfig {
    pub game: GameDescriptor,
    pub engine_a: SearchConfig,
    pub engine_b: SearchConfig,
    /// Number of games; must be even so each engine moves first equally often.
    pub games: usize,
    pub sims_per_move: u32,
    #[serde(default)]
    pub seed: u64,
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), TournamentError> {
        if self.games == 0 || self.games % 2 != 0 {
            return Err(TournamentError::InvalidConfig(format!(
                "games must be a positive even number, got {}",
                self.games
            )));
        }
        if self.sims_per_move == 0 {
            return Err(TournamentError::InvalidConfig("sims_per_move must be positive".into()));
        }
        for (name, engine) in [("engine_a", &self.engine_a), ("engine_b", &self.engine_b)] {
            if !(engine.exploration >= 0.0 && engine.exploration.is_finite()) {
                return Err(TournamentError::InvalidConfig(format!(
                    "{name}.exploration must be finite and non-negative"
                )));
            }
        }
        self.game.validate()
    }

    /// The same match with the two engines exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            engine_a: self.engine_b.clone(),
            engine_b: self.engine_a.clone(),
            ..self.clone()
        }
    }

    fn engines(&self) -> (SearchConfig, SearchConfig) {
        (
            self.engine_a.clone().with_simulations(self.sims_per_move),
            self.engine_b.clone().with_simulations(self.sims_per_move),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    A,
    B,
    Draw,
}

impl Outcome {
    /// Score of engine A: 1 for a win, 0.5 for a draw.
    pub fn score_a(self) -> f64 {
        match self {
            Self::A => 1.0,
            Self::B => 0.0,
            Self::Draw => 0.5,
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Self::A => Self::B,
            Self::B => Self::A,
            Self::Draw => Self::Draw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayedGame {
    pub outcome: Outcome,
    pub moves: Vec<Action>,
}

/// Plays one game. The engine to move runs a search seeded with
/// `derive(seed, [ply])` and plays its best action. Engine seeds are ignored.
pub fn play_game<G: GameState>(
    engine_a: &SearchConfig,
    engine_b: &SearchConfig,
    start: &G,
    seed: u64,
    a_moves_first: bool,
) -> Result<PlayedGame, SearchError> {
    if start.is_terminal() {
        return Err(SearchError::TerminalRoot);
    }
    let first = start.to_move();
    let role_a = if a_moves_first { first } else { first.opponent() };
    let mut state = start.clone();
    let mut moves = Vec::new();
    while !state.is_terminal() {
        let engine = if state.to_move() == role_a { engine_a } else { engine_b };
        let config = engine.clone().with_seed(derive(MOVE_TAG, &[seed, moves.len() as u64]));
        let action = run_search(&state, &config)?.best_action;
        state = state.apply(action);
        moves.push(action);
    }
    let r = state.terminal_return().expect("terminal");
    let score_a = match role_a {
        PlayerRole::Max => r,
        PlayerRole::Min => 1.0 - r,
    };
    let outcome = if score_a > 0.5 {
        Outcome::A
    } else if score_a < 0.5 {
        Outcome::B
    } else {
        Outcome::Draw
    };
    Ok(PlayedGame { outcome, moves })
}

/// One row of the per-game log.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameRecord {
    pub game: usize,
    /// Seed of the starting position (tree seed; 0 for tic-tac-toe).
    pub position_seed: u64,
    /// Seed from which the per-move search seeds are derived.
    pub seed: u64,
    pub first_mover: String,
    pub outcome: Outcome,
    pub moves: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub games: usize,
    pub wins_a: usize,
    pub wins_b: usize,
    pub draws: usize,
    pub win_rate_a: f64,
    pub ci95: [f64; 2],
}

impl MatchResult {
    pub fn from_outcomes(outcomes: impl IntoIterator<Item = Outcome>) -> Self {
        let (mut wins_a, mut wins_b, mut draws) = (0, 0, 0);
        for o in outcomes {
            match o {
                Outcome::A => wins_a += 1,
                Outcome::B => wins_b += 1,
                Outcome::Draw => draws += 1,
            }
        }
        let games = wins_a + wins_b + draws;
        let win_rate_a = if games == 0 {
            0.5
        } else {
            (wins_a as f64 + 0.5 * draws as f64) / games as f64
        };
        Self {
            games,
            wins_a,
            wins_b,
            draws,
            win_rate_a,
            ci95: wilson_interval(win_rate_a, games, Z95),
        }
    }

    pub fn draw_rate(&self) -> f64 {
        self.draws as f64 / self.games.max(1) as f64
    }
}

/// Wilson score interval for a proportion `p` observed over `n` trials.
pub fn wilson_interval(p: f64, n: usize, z: f64) -> [f64; 2] {
    if n == 0 {
        return [0.0, 1.0];
    }
    let n = n as f64;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    [(center - half).max(0.0), (center + half).min(1.0)]
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatchReport {
    pub result: MatchResult,
    pub records: Vec<GameRecord>,
}

/// Plays the match on the current rayon pool.
pub fn run_match(config: &MatchConfig) -> Result<MatchResult, TournamentError> {
    run_match_detailed(config).map(|r| r.result)
}

/// Like [`run_match`] but also returns the per-game log, ordered by game.
pub fn run_match_detailed(config: &MatchConfig) -> Result<MatchReport, TournamentError> {
    config.validate()?;
    let (engine_a, engine_b) = config.engines();
    let pairs: Vec<Result<[GameRecord; 2], TournamentError>> = (0..config.games / 2)
        .into_par_iter()
        .map(|pair| {
            let (start, position_seed) = config.game.position(config.seed, pair)?;
            let seed = derive(config.seed, &[MOVE_TAG, pair as u64]);
            let mut out = Vec::with_capacity(2);
            for (offset, a_first) in [(0, true), (1, false)] {
                let played = play_game(&engine_a, &engine_b, &start, seed, a_first)?;
                out.push(GameRecord {
                    game: 2 * pair + offset,
                    position_seed,
                    seed,
                    first_mover: if a_first { "a" } else { "b" }.to_string(),
                    outcome: played.outcome,
                    moves: played.moves.len(),
                });
            }
            let [g0, g1]: [GameRecord; 2] = out.try_into().expect("two games");
            Ok([g0, g1])
        })
        .collect();
    let mut records = Vec::with_capacity(config.games);
    for pair in pairs {
        records.extend(pair?);
    }
    let result = MatchResult::from_outcomes(records.iter().map(|r| r.outcome));
    Ok(MatchReport { result, records })
}

/// Which weight-profile backup a candidate engine uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Monotone,
    Softmax,
}

impl ProfileKind {
    /// Backup strategy for `knots` over a horizon of `horizon` visits.
    pub fn strategy(self, knots: &[f64], horizon: usize) -> Result<BackupStrategy, BackupError> {
        match self {
            Self::Monotone => BackupStrategy::monotone(knots, horizon),
            Self::Softmax => BackupStrategy::softmax(knots, horizon),
        }
    }
}

/// Win rate of an engine using the `kind` profile given by `knots` against
/// standard backup. Engine A of `base` supplies the candidate's search
/// settings and engine B the opponent's; both backups are overridden. The
/// profile horizon is `sims_per_move`, the most visits any node can receive.
pub fn winrate_objective(knots: &[f64], kind: ProfileKind, base: &MatchConfig) -> Result<f64, TournamentError> {
    let strategy = kind.strategy(knots, base.sims_per_move as usize)?;
    let mut config = base.clone();
    config.engine_a.backup = strategy;
    config.engine_b.backup = BackupStrategy::Standard;
    Ok(run_match(&config)?.win_rate_a)
}
