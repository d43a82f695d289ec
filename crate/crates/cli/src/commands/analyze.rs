use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use backprop_mcts::mcts::{run_search, SearchConfig, SearchResult};
use backprop_mcts::tournament::GameDescriptor;

use super::num;
use crate::config::resolve_game;
use crate::{CliError, Context};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_file: Option<PathBuf>,
    #[serde(default)]
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameDescriptor>,
}

#[derive(Debug, Serialize)]
struct Report<'a> {
    game: &'a GameDescriptor,
    result: &'a SearchResult,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let config: AnalyzeConfig = ctx.source.parse()?;
    let game = resolve_game(&ctx.source, config.game, config.game_file.as_deref())?;
    game.validate().map_err(|e| ctx.source.invalid(e))?;
    let mut search = config.search;
    if let Some(seed) = ctx.seed {
        search.seed = seed;
    }
    if search.simulations == 0 {
        return Err(ctx.source.invalid("search.simulations must be positive"));
    }
    let root = game.root()?;
    let result = run_search(&root, &search)?;

    ctx.out.write_json("search.json", &Report { game: &game, result: &result })?;
    let header = ["action", "visits", "value", "prior"];
    let rows: Vec<Vec<String>> = result
        .children
        .iter()
        .map(|c| vec![c.action.to_string(), c.visits.to_string(), num(c.value), num(c.prior)])
        .collect();
    ctx.out.write_csv("children.csv", &header, rows.clone())?;

    println!(
        "best action {} | root value {:.6} | root visits {} | principal variation {:?}",
        result.best_action, result.root_value, result.root_visits, result.principal_variation
    );
    println!("{}", header.join(","));
    for row in rows {
        println!("{}", row.join(","));
    }
    ctx.finish(&AnalyzeConfig {
        game_file: None,
        search,
        game: Some(game),
    })
}
