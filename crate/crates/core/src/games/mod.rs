//! Game environments with exact ground truth.
//!
//! Returns are always expressed from MAX's perspective in `[0, 1]`; draws are
//! worth `0.5`.

mod evaluator;
mod minimax;
mod synthetic;
mod tictactoe;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use evaluator::{evaluate, random_rollout, Evaluator, NoisyOracle};
pub use minimax::{minimax_value, minimax_value_with_limit, NODE_CEILING};
pub use synthetic::{generate_synthetic_tree, inject_trap, SyntheticState, SyntheticTreeSpec};
pub use tictactoe::TicTacToe;

/// Identifier of a legal action. Actions are listed in increasing order, so
/// "lowest action index" and "lowest identifier" coincide.
pub type Action = usize;

/// Which side is to move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlayerRole {
    Max,
    Min,
}

impl PlayerRole {
    pub fn opponent(self) -> Self {
        match self {
            PlayerRole::Max => PlayerRole::Min,
            PlayerRole::Min => PlayerRole::Max,
        }
    }

    /// Converts a MAX-perspective value into this player's perspective.
    #[inline]
    pub fn perspective(self, value: f64) -> f64 {
        match self {
            PlayerRole::Max => value,
            PlayerRole::Min => 1.0 - value,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("invalid game specification: {0}")]
    InvalidSpec(String),
    #[error("trap level {level} needs depth of at least {needed}, tree has {depth}")]
    TooShallowForTrap { level: u32, depth: u32, needed: u32 },
    #[error("trap injection needs the root of a synthetic tree")]
    NotRoot,
    #[error("degenerate tree: {0}")]
    Degenerate(String),
    #[error("exact search exceeded the node ceiling of {limit}")]
    CeilingExceeded { limit: u64 },
}

/// A game position.
///
/// Implementations are immutable values: [`GameState::apply`] returns a new
/// state and never mutates `self`, which lets many searches share a root.
pub trait GameState: Clone + Send + Sync {
    fn to_move(&self) -> PlayerRole;

    /// Legal actions in increasing order. Empty iff the state is terminal.
    fn actions(&self) -> Vec<Action>;

    fn apply(&self, action: Action) -> Self;

    /// MAX-perspective return, defined exactly when the state is terminal.
    fn terminal_return(&self) -> Option<f64>;

    fn is_terminal(&self) -> bool {
        self.terminal_return().is_some()
    }

    /// Move priors aligned with [`GameState::actions`]; uniform by default.
    fn priors(&self) -> Vec<f64> {
        let n = self.actions().len();
        vec![1.0 / n as f64; n]
    }

    /// A hash identifying the position, used to key evaluator noise streams.
    fn state_key(&self) -> u64;
}

/// Type-erased game used by configuration-driven front ends.
#[derive(Debug, Clone)]
pub enum AnyGame {
    TicTacToe(TicTacToe),
    Synthetic(SyntheticState),
}

impl GameState for AnyGame {
    fn to_move(&self) -> PlayerRole {
        match self {
            AnyGame::TicTacToe(g) => g.to_move(),
            AnyGame::Synthetic(g) => g.to_move(),
        }
    }

    fn actions(&self) -> Vec<Action> {
        match self {
            AnyGame::TicTacToe(g) => g.actions(),
            AnyGame::Synthetic(g) => g.actions(),
        }
    }

    fn apply(&self, action: Action) -> Self {
        match self {
            AnyGame::TicTacToe(g) => AnyGame::TicTacToe(g.apply(action)),
            AnyGame::Synthetic(g) => AnyGame::Synthetic(g.apply(action)),
        }
    }

    fn terminal_return(&self) -> Option<f64> {
        match self {
            AnyGame::TicTacToe(g) => g.terminal_return(),
            AnyGame::Synthetic(g) => g.terminal_return(),
        }
    }

    fn priors(&self) -> Vec<f64> {
        match self {
            AnyGame::TicTacToe(g) => g.priors(),
            AnyGame::Synthetic(g) => g.priors(),
        }
    }

    fn state_key(&self) -> u64 {
        match self {
            AnyGame::TicTacToe(g) => g.state_key(),
            AnyGame::Synthetic(g) => g.state_key(),
        }
    }
}

impl From<TicTacToe> for AnyGame {
    fn from(g: TicTacToe) -> Self {
        AnyGame::TicTacToe(g)
    }
}

impl From<SyntheticState> for AnyGame {
    fn from(g: SyntheticState) -> Self {
        AnyGame::Synthetic(g)
    }
}
