//! Loading TOML configs with line-anchored error messages.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use backprop_mcts::tournament::GameDescriptor;

use crate::CliError;

/// A config file kept in memory so errors can point at its lines.
#[derive(Debug, Clone)]
pub struct Source {
    pub path: PathBuf,
    pub text: String,
}

impl Source {
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(Self {
            path: path.to_path_buf(),
            text,
        })
    }

    pub fn parse<T: DeserializeOwned>(&self) -> Result<T, CliError> {
        toml::from_str(&self.text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(&self.text, s.start))
                .unwrap_or((1, 1));
            self.error(line, column, e.message().trim().to_string())
        })
    }

    pub fn error(&self, line: usize, column: usize, message: impl Into<String>) -> CliError {
        CliError::Config {
            path: self.path.clone(),
            line,
            column,
            message: message.into(),
        }
    }

    /// A validation error anchored at the first `key = ...` line whose key
    /// is mentioned in `message`, or at line 1 when none is.
    pub fn invalid(&self, message: impl std::fmt::Display) -> CliError {
        let message = message.to_string();
        let line = message
            .split(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.'))
            .filter(|w| !w.is_empty())
            .find_map(|word| self.key_line(word))
            .unwrap_or(1);
        self.error(line, 1, message)
    }

    /// Line of `key = ...`, where `key` may be dotted as `section.key`.
    fn key_line(&self, dotted: &str) -> Option<usize> {
        let (section, key) = match dotted.rsplit_once('.') {
            Some((s, k)) => (Some(s), k),
            None => (None, dotted),
        };
        let mut in_section = section.is_none();
        for (i, raw) in self.text.lines().enumerate() {
            let line = raw.trim();
            if let Some(header) = line.strip_prefix('[') {
                let name = header.trim_end_matches(']').trim();
                in_section = section.is_none_or(|s| s == name);
                continue;
            }
            if in_section {
                if let Some((lhs, _)) = line.split_once('=') {
                    if lhs.trim() == key {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    /// Resolves a path written in the config relative to the config's folder.
    pub fn relative(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            return path.to_path_buf();
        }
        self.path.parent().unwrap_or(Path::new(".")).join(path)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

/// The descriptor file written by `gen-game`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameFile {
    /// Root actions leading into injected traps.
    #[serde(default)]
    pub trap_actions: Vec<usize>,
    /// Minimax value of every root action.
    #[serde(default)]
    pub root_values: Vec<f64>,
    pub game: GameDescriptor,
}

/// A game given inline or through a `gen-game` descriptor file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameRef {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<GameDescriptor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_file: Option<PathBuf>,
}

/// Resolves `game` / `game_file` into one descriptor.
pub fn resolve_game(
    source: &Source,
    game: Option<GameDescriptor>,
    game_file: Option<&Path>,
) -> Result<GameDescriptor, CliError> {
    match (game, game_file) {
        (Some(g), None) => Ok(g),
        (None, Some(file)) => {
            let descriptor = Source::read(&source.relative(file)).map_err(|e| match e {
                CliError::Io { .. } => source.invalid(format!("game_file: cannot read {}", file.display())),
                other => other,
            })?;
            Ok(descriptor.parse::<GameFile>()?.game)
        }
        (Some(_), Some(_)) => Err(source.invalid("give either a [game] table or game_file, not both")),
        (None, None) => Err(source.error(1, 1, "missing [game] table or game_file")),
    }
}
