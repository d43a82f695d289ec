//! The `bpmcts` command-line tool.
//!
//! Every subcommand reads one TOML config, writes its outputs atomically
//! under `--out`, and finishes with `resolved.toml` (the effective config,
//! which reproduces the run when fed back) and `manifest.json`.

mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use thiserror::Error;

use backprop_mcts::backup::BackupError;
use backprop_mcts::games::GameError;
use backprop_mcts::gp::GpError;
use backprop_mcts::mcts::SearchError;
use backprop_mcts::tournament::TournamentError;

use config::Source;
use output::{Manifest, OutputDir};

pub use commands::optimize::{quadratic_objective, OptimizeRunConfig};

/// Exit status for configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures while running.
pub const EXIT_RUNTIME: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}:{line}:{column}: {message}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Tournament(#[from] TournamentError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Backup(#[from] BackupError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("toml: {0}")]
    Toml(#[from] toml::ser::Error),
    #[error("worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "bpmcts", version, about = "MCTS backpropagation experiments: games, searches, matches and profile optimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML config file for the subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory receiving all outputs.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Overrides the config's seed (see each subcommand for which one).
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Generate a synthetic game and write its descriptor file.
    #[command(after_help = "Outputs: game.toml (descriptor: trap_actions, root_values, [game]).\n--seed overrides game.seed.")]
    GenGame,
    /// Run one search and report the root statistics.
    #[command(after_help = "Outputs: search.json; children.csv with columns action,visits,value,prior.\n--seed overrides search.seed.")]
    Analyze,
    /// Play a match between two engines.
    #[command(
        after_help = "Outputs: result.json; games.csv with columns game,position_seed,seed,first_mover,outcome,moves.\n--seed overrides the match seed."
    )]
    Tournament,
    /// Tune a weight profile by Bayesian optimization.
    #[command(
        after_help = "Outputs: history.csv with columns index,round,k0..k{m-1},value,games,failed,timestamp; best.json;\nconfirm.json and confirm_games.csv when confirm_games > 0.\n--seed overrides both optimizer.seed and match.seed."
    )]
    Optimize,
    /// Tabulate a weight profile.
    #[command(after_help = "Outputs: profile.csv with columns t,p,w for t = 0..horizon.\n--seed is ignored.")]
    DumpProfile,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::GenGame => "gen-game",
            Self::Analyze => "analyze",
            Self::Tournament => "tournament",
            Self::Optimize => "optimize",
            Self::DumpProfile => "dump-profile",
        }
    }
}

/// State shared by a subcommand run.
pub struct Context {
    pub command: Command,
    pub source: Source,
    pub out: OutputDir,
    pub seed: Option<u64>,
    pub workers: usize,
    started_at: String,
}

impl Context {
    /// Writes `resolved.toml` and `manifest.json`.
    pub fn finish<C: Serialize>(&mut self, resolved: &C) -> Result<(), CliError> {
        self.out.write_toml("resolved.toml", resolved)?;
        let mut outputs = self.out.written().to_vec();
        outputs.push("manifest.json".into());
        let manifest = Manifest {
            tool: "bpmcts",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: self.command.name(),
            config_path: &self.source.path,
            seed_override: self.seed,
            workers: self.workers,
            resolved_config: resolved,
            outputs,
            started_at: self.started_at.clone(),
            finished_at: timestamp(),
        };
        self.out.write_json("manifest.json", &manifest)?;
        Ok(())
    }
}

pub(crate) fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let Some(config) = cli.config.as_deref() else {
        return Err(CliError::Config {
            path: PathBuf::from("<command line>"),
            line: 1,
            column: 1,
            message: format!("{} needs --config PATH", cli.command.name()),
        });
    };
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Config {
            path: PathBuf::from("<command line>"),
            line: 1,
            column: 1,
            message: "--workers must be positive".into(),
        });
    }
    let source = Source::read(config)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build()?;
    let mut ctx = Context {
        command: cli.command,
        source,
        out: OutputDir::create(&cli.out)?,
        seed: cli.seed,
        workers,
        started_at: timestamp(),
    };
    pool.install(|| match cli.command {
        Command::GenGame => commands::gen_game::run(&mut ctx),
        Command::Analyze => commands::analyze::run(&mut ctx),
        Command::Tournament => commands::tournament::run(&mut ctx),
        Command::Optimize => commands::optimize::run(&mut ctx),
        Command::DumpProfile => commands::dump_profile::run(&mut ctx),
    })
}

/// Convenience wrapper used by tests: runs `bpmcts <command> --config
/// <config> --out <out>` plus `extra` flags.
pub fn dispatch_with(command: &str, config: &Path, out: &Path, extra: &[&str]) -> i32 {
    let mut argv: Vec<OsString> = vec!["bpmcts".into(), command.into(), "--config".into()];
    argv.push(config.into());
    argv.push("--out".into());
    argv.push(out.into());
    argv.extend(extra.iter().map(OsString::from));
    dispatch(argv)
}
