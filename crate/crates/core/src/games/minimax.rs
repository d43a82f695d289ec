use super::{GameError, GameState, PlayerRole};

/// Default node budget for exact search.
pub const NODE_CEILING: u64 = 10_000_000;

/// Exact game-theoretic value of `state` (MAX perspective), refusing with
/// [`GameError::CeilingExceeded`] rather than returning a truncated value.
pub fn minimax_value<G: GameState>(state: &G) -> Result<f64, GameError> {
    minimax_value_with_limit(state, NODE_CEILING)
}

pub fn minimax_value_with_limit<G: GameState>(state: &G, limit: u64) -> Result<f64, GameError> {
    let mut visited = 0u64;
    search(state, &mut visited, limit)
}

fn search<G: GameState>(state: &G, visited: &mut u64, limit: u64) -> Result<f64, GameError> {
    *visited += 1;
    if *visited > limit {
        return Err(GameError::CeilingExceeded { limit });
    }
    if let Some(r) = state.terminal_return() {
        return Ok(r);
    }
    let maximizing = state.to_move() == PlayerRole::Max;
    let mut best = if maximizing { f64::NEG_INFINITY } else { f64::INFINITY };
    for a in state.actions() {
        let v = search(&state.apply(a), visited, limit)?;
        best = if maximizing { best.max(v) } else { best.min(v) };
    }
    Ok(best)
}
