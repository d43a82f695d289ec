use std::collections::HashMap;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use backprop_mcts::backup::Knots;
use backprop_mcts::gp::{bayesopt_loop, BayesOptOutcome, OptimizeConfig};
use backprop_mcts::seed::derive;
use backprop_mcts::tournament::{run_match_detailed, winrate_objective, MatchConfig, MatchResult, ProfileKind};

use super::num;
use super::tournament::{write_match, MatchSection};
use crate::{timestamp, CliError, Context};

const CONFIRM_TAG: u64 = 0x434F_4E46;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Win rate of the profiled engine against standard backup.
    #[default]
    Winrate,
    /// A noisy concave quadratic with a known maximum of 0, for smoke tests.
    Quadratic,
}

fn default_kind() -> ProfileKind {
    ProfileKind::Softmax
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticConfig {
    /// Maximizer; the centre of the box when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimum: Option<Vec<f64>>,
    #[serde(default)]
    pub noise_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeRunConfig {
    #[serde(default)]
    pub objective: Objective,
    #[serde(default = "default_kind")]
    pub kind: ProfileKind,
    /// Games of the confirmation match of the best profile; 0 skips it.
    #[serde(default)]
    pub confirm_games: usize,
    pub optimizer: OptimizeConfig,
    #[serde(rename = "match", default, skip_serializing_if = "Option::is_none")]
    pub match_: Option<MatchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadratic: Option<QuadraticConfig>,
}

/// `-Σ (x_i - m_i)² + noise_sd · z`, where the noise draw `z` is a function of
/// the point and `seed` so evaluation order cannot change it.
pub fn quadratic_objective(x: &[f64], optimum: &[f64], noise_sd: f64, seed: u64) -> f64 {
    let value = -x.iter().zip(optimum).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    if noise_sd == 0.0 {
        return value;
    }
    let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, &key));
    let z: f64 = rng.sample(StandardNormal);
    value + noise_sd * z
}

#[derive(Debug, Serialize)]
struct BestFile<'a> {
    objective: Objective,
    kind: ProfileKind,
    best_knots: &'a [f64],
    best_tuple: String,
    best_value: f64,
    evaluations: usize,
    failed_evaluations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    confirmation: Option<&'a MatchResult>,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let raw: toml::Table = ctx.source.parse()?;
    let mut config: OptimizeRunConfig = ctx.source.parse()?;
    if let Some(seed) = ctx.seed {
        config.optimizer.seed = seed;
        if let Some(m) = config.match_.as_mut() {
            m.seed = seed;
        }
    }
    let noise_given = raw
        .get("optimizer")
        .and_then(|o| o.as_table())
        .is_some_and(|o| o.contains_key("noise_variance"));

    let src = &ctx.source;
    let match_config: Option<MatchConfig> = match (config.objective, config.match_.clone()) {
        (Objective::Winrate, Some(section)) => Some(section.resolve(src)?),
        (Objective::Winrate, None) => return Err(src.invalid("objective = \"winrate\" needs a [match] table")),
        (Objective::Quadratic, _) => None,
    };
    if config.confirm_games > 0 && match_config.is_none() {
        return Err(src.invalid("confirm_games needs objective = \"winrate\""));
    }
    if !noise_given {
        // Binomial variance of a win rate near 0.5 over one evaluation's games.
        config.optimizer.noise_variance = match (&match_config, &config.quadratic) {
            (Some(m), _) => 0.25 / m.games as f64,
            (None, Some(q)) => (q.noise_sd * q.noise_sd).max(1e-6),
            (None, None) => 1e-6,
        };
    }
    config.optimizer.validate().map_err(|e| src.invalid(e))?;
    let optimum = match config.objective {
        Objective::Quadratic => {
            let q = config.quadratic.get_or_insert(QuadraticConfig {
                optimum: None,
                noise_sd: 0.0,
            });
            let centre: Vec<f64> = config.optimizer.bounds.iter().map(|[lo, hi]| 0.5 * (lo + hi)).collect();
            let m = q.optimum.get_or_insert(centre).clone();
            if m.len() != config.optimizer.dims() {
                return Err(src.invalid(format!(
                    "quadratic.optimum has {} entries for {} dimensions",
                    m.len(),
                    config.optimizer.dims()
                )));
            }
            if !(q.noise_sd >= 0.0 && q.noise_sd.is_finite()) {
                return Err(src.invalid("quadratic.noise_sd must be finite and non-negative"));
            }
            m
        }
        Objective::Winrate => Vec::new(),
    };

    let stamps: Mutex<HashMap<Vec<u64>, String>> = Mutex::new(HashMap::new());
    let games_per_eval = match_config.as_ref().map_or(0, |m| m.games);
    let noise_sd = config.quadratic.as_ref().map_or(0.0, |q| q.noise_sd);
    let seed = config.optimizer.seed;
    let kind = config.kind;
    let objective = |x: &[f64]| {
        let value = match &match_config {
            Some(m) => winrate_objective(x, kind, m).unwrap_or(f64::NAN),
            None => quadratic_objective(x, &optimum, noise_sd, seed),
        };
        let key = x.iter().map(|v| v.to_bits()).collect();
        stamps.lock().expect("timestamp lock").insert(key, timestamp());
        value
    };
    let outcome: BayesOptOutcome = bayesopt_loop(objective, &config.optimizer)?;
    let stamps = stamps.into_inner().expect("timestamp lock");

    let dims = config.optimizer.dims();
    let mut header: Vec<String> = vec!["index".into(), "round".into()];
    header.extend((0..dims).map(|i| format!("k{i}")));
    header.extend(["value", "games", "failed", "timestamp"].map(String::from));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = outcome.history.iter().map(|e| {
        let mut row = vec![e.index.to_string(), e.round.to_string()];
        row.extend(e.point.iter().map(|&v| num(v)));
        let key: Vec<u64> = e.point.iter().map(|v| v.to_bits()).collect();
        row.extend([
            num(e.value),
            games_per_eval.to_string(),
            e.failed.to_string(),
            stamps.get(&key).cloned().unwrap_or_default(),
        ]);
        row
    });
    ctx.out.write_csv("history.csv", &header, rows)?;

    let mut confirmation = None;
    if let (Some(m), true) = (&match_config, config.confirm_games > 0) {
        let mut confirm = m.clone();
        confirm.games = config.confirm_games;
        confirm.seed = derive(m.seed, &[CONFIRM_TAG]);
        confirm.engine_a.backup = kind.strategy(&outcome.best_point, confirm.sims_per_move as usize)?;
        confirm.engine_b.backup = Default::default();
        let report = run_match_detailed(&confirm)?;
        write_match(&mut ctx.out, "confirm", "confirm_games.csv", &report.result, &report.records)?;
        confirmation = Some(report.result);
    }

    let tuple = Knots(outcome.best_point.clone()).to_string();
    ctx.out.write_json(
        "best.json",
        &BestFile {
            objective: config.objective,
            kind,
            best_knots: &outcome.best_point,
            best_tuple: tuple.clone(),
            best_value: outcome.best_value,
            evaluations: outcome.history.len(),
            failed_evaluations: outcome.history.iter().filter(|e| e.failed).count(),
            confirmation: confirmation.as_ref(),
        },
    )?;
    println!("best profile: {tuple}");
    println!("best value: {}", outcome.best_value);
    if let Some(c) = &confirmation {
        println!(
            "confirmation over {} games: win rate {:.4}, ci95 [{:.4}, {:.4}]",
            c.games, c.win_rate_a, c.ci95[0], c.ci95[1]
        );
    }
    if let Some(m) = config.match_.as_mut() {
        if let Some(resolved) = &match_config {
            m.game = Some(resolved.game.clone());
            m.game_file = None;
        }
    }
    ctx.finish(&config)
}
