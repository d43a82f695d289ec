use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{minimax_value, GameError, GameState};
use crate::seed::derive;

/// Exact minimax value perturbed by reproducible Gaussian noise, clamped to
/// `[0, 1]`. Stands in for a learned value function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisyOracle {
    pub noise_sd: f64,
    #[serde(default)]
    pub seed: u64,
}

impl NoisyOracle {
    pub fn evaluate<G: GameState>(&self, state: &G) -> Result<f64, GameError> {
        let exact = minimax_value(state)?;
        if self.noise_sd == 0.0 {
            return Ok(exact);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive(self.seed, &[state.state_key()]));
        let z: f64 = rng.sample(StandardNormal);
        Ok((exact + self.noise_sd * z).clamp(0.0, 1.0))
    }
}

/// How leaves are valued during search.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Evaluator {
    /// Uniformly random playout to a terminal state.
    #[default]
    RandomRollout,
    NoisyOracle(NoisyOracle),
}

/// Plays uniformly random legal actions until the game ends.
pub fn random_rollout<G: GameState, R: Rng + ?Sized>(state: &G, rng: &mut R) -> f64 {
    let mut current = state.clone();
    loop {
        if let Some(r) = current.terminal_return() {
            return r;
        }
        let actions = current.actions();
        let a = actions[rng.random_range(0..actions.len())];
        current = current.apply(a);
    }
}

pub fn evaluate<G: GameState, R: Rng + ?Sized>(
    state: &G,
    evaluator: &Evaluator,
    rng: &mut R,
) -> Result<f64, GameError> {
    match evaluator {
        Evaluator::RandomRollout => Ok(random_rollout(state, rng)),
        Evaluator::NoisyOracle(oracle) => oracle.evaluate(state),
    }
}
