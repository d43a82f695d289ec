//! Monte-Carlo tree search with pluggable backpropagation strategies.
//!
//! The crate is organized bottom-up:
//!
//! - [`games`]: desk-scale game environments with exact minimax ground truth
//!   (synthetic b-ary trees with injectable search traps, tic-tac-toe) and
//!   leaf evaluators.
//! - [`backup`]: the backup strategies (standard averaging, ERWA, Coulom
//!   interpolation, feedback-adjustment profiles, monotone weight profiles and
//!   softmax parent backups) plus the monotone weight-function machinery.
//! - [`mcts`]: the four-phase search loop with UCB1/PUCT tree policies.
//! - [`gp`]: Gaussian-process Bayesian optimization with a Matérn 5/2 kernel.
//! - [`tournament`]: seeded head-to-head matches and the win-rate objective
//!   used to tune weight profiles.

pub mod backup;
pub mod games;
pub mod gp;
pub mod mcts;
pub mod seed;
pub mod tournament;

pub use backup::{BackupStrategy, WeightProfile};
pub use games::{Action, GameState, PlayerRole};
pub use mcts::{run_search, SearchConfig, SearchResult};
