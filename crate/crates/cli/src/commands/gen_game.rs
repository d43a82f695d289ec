use serde::{Deserialize, Serialize};

use backprop_mcts::games::{generate_synthetic_tree, minimax_value, GameError, GameState};
use backprop_mcts::tournament::GameDescriptor;

use crate::config::GameFile;
use crate::{CliError, Context};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenGameConfig {
    pub game: GameDescriptor,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let mut config: GenGameConfig = ctx.source.parse()?;
    if let (Some(seed), GameDescriptor::Synthetic(spec)) = (ctx.seed, &mut config.game) {
        spec.seed = seed;
    }
    config.game.validate().map_err(|e| ctx.source.invalid(e))?;

    let trap_actions = match &config.game {
        GameDescriptor::Synthetic(spec) => match generate_synthetic_tree(spec) {
            Ok(root) => root.trap_actions(),
            Err(e @ GameError::Degenerate(_)) => {
                return Err(ctx.source.invalid(format!("seed: {e}; choose another seed")));
            }
            Err(e) => return Err(e.into()),
        },
        GameDescriptor::TicTacToe { .. } => Vec::new(),
    };
    let root = config.game.root()?;
    let root_values = root
        .actions()
        .into_iter()
        .map(|a| minimax_value(&root.apply(a)))
        .collect::<Result<Vec<f64>, _>>()?;

    let file = GameFile {
        trap_actions,
        root_values,
        game: config.game.clone(),
    };
    let path = ctx.out.write_toml("game.toml", &file)?;
    println!("wrote {}", path.display());
    println!("trap actions: {:?}", file.trap_actions);
    println!("root action values: {:?}", file.root_values);
    ctx.finish(&config)
}
