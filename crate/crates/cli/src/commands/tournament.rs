use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use backprop_mcts::mcts::SearchConfig;
use backprop_mcts::tournament::{run_match_detailed, GameDescriptor, GameRecord, MatchConfig, MatchResult, Outcome};

use crate::config::{resolve_game, Source};
use crate::output::OutputDir;
use crate::{timestamp, CliError, Context};

/// A match config whose game may come from a `gen-game` descriptor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchSection {
    pub games: usize,
    pub sims_per_move: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_file: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameDescriptor>,
    #[serde(default)]
    pub engine_a: SearchConfig,
    #[serde(default)]
    pub engine_b: SearchConfig,
}

impl MatchSection {
    /// Inlines the game and validates the match.
    pub fn resolve(self, source: &Source) -> Result<MatchConfig, CliError> {
        let game = resolve_game(source, self.game, self.game_file.as_deref())?;
        let config = MatchConfig {
            game,
            engine_a: self.engine_a,
            engine_b: self.engine_b,
            games: self.games,
            sims_per_move: self.sims_per_move,
            seed: self.seed,
        };
        config.validate().map_err(|e| source.invalid(e))?;
        Ok(config)
    }
}

#[derive(Debug, Serialize)]
struct ResultFile<'a> {
    #[serde(flatten)]
    result: &'a MatchResult,
    timestamp: String,
}

fn outcome_label(o: Outcome) -> &'static str {
    match o {
        Outcome::A => "a",
        Outcome::B => "b",
        Outcome::Draw => "draw",
    }
}

/// Writes `<stem>.json` and the per-game log `<log>`.
pub(crate) fn write_match(
    out: &mut OutputDir,
    stem: &str,
    log: &str,
    result: &MatchResult,
    records: &[GameRecord],
) -> Result<(), CliError> {
    out.write_json(
        &format!("{stem}.json"),
        &ResultFile {
            result,
            timestamp: timestamp(),
        },
    )?;
    out.write_csv(
        log,
        &["game", "position_seed", "seed", "first_mover", "outcome", "moves"],
        records.iter().map(|r| {
            vec![
                r.game.to_string(),
                r.position_seed.to_string(),
                r.seed.to_string(),
                r.first_mover.clone(),
                outcome_label(r.outcome).to_string(),
                r.moves.to_string(),
            ]
        }),
    )?;
    Ok(())
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let mut section: MatchSection = ctx.source.parse()?;
    if let Some(seed) = ctx.seed {
        section.seed = seed;
    }
    let config = section.resolve(&ctx.source)?;
    let report = run_match_detailed(&config)?;
    write_match(&mut ctx.out, "result", "games.csv", &report.result, &report.records)?;
    let r = &report.result;
    println!(
        "games {} | A wins {} | B wins {} | draws {} | win rate A {:.4} | ci95 [{:.4}, {:.4}]",
        r.games, r.wins_a, r.wins_b, r.draws, r.win_rate_a, r.ci95[0], r.ci95[1]
    );
    ctx.finish(&config)
}
