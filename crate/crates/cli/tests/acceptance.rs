//! Acceptance suite. Every criterion runs to completion and prints one
//! PASS/FAIL line; the process fails if any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use backprop_mcts::backup::{
    erwa_knots, erwa_update, monotone_update, softmax_mean, visit_weighted_mean, BackupAccumulator, ChildStat,
    FeedbackProfile,
};
use backprop_mcts::games::{generate_synthetic_tree, minimax_value, SyntheticState, SyntheticTreeSpec, TicTacToe};
use backprop_mcts::gp::{bayesopt_loop, expected_improvement, random_search, GpModel, Matern52, OptimizeConfig};
use backprop_mcts::mcts::TreePolicy;
use backprop_mcts::seed::{derive, unit_f64};
use backprop_mcts::{run_search, BackupStrategy, GameState, PlayerRole, SearchConfig, WeightProfile};
use bpmcts_cli::quadratic_objective;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use tempfile::TempDir;

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

// Criterion 1 -------------------------------------------------------------

fn erwa_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = Vec::new();
    let mut corrected_worst: f64 = 0.0;
    for alpha in [0.5, 0.25, 0.1, 0.01] {
        let profile = erwa_knots(alpha, 6, 100).map_err(|e| e.to_string())?;
        let mut max_rel: f64 = 0.0;
        for _ in 0..200 {
            let returns: Vec<f64> = (0..100).map(|_| rng.random::<f64>()).collect();
            let mut acc = BackupAccumulator::default();
            let (mut monotone, mut erwa) = (0.0, 0.0);
            let (mut corrected, mut o) = (0.0, 0.0);
            for (n, &r) in returns.iter().enumerate() {
                monotone = monotone_update(&mut acc, r, n as u32, &profile);
                erwa = erwa_update(erwa, r, n as u32, alpha);
                o += alpha * (1.0 - o);
                corrected += alpha / o * (r - corrected);
            }
            max_rel = max_rel.max((monotone - erwa).abs() / erwa.abs());
            corrected_worst = corrected_worst.max((monotone - corrected).abs() / corrected.abs());
        }
        worst.push((alpha, max_rel));
    }
    let detail = format!(
        "max relative gap to ERWA per alpha {:?} (tolerance 1e-6); gap to bias-corrected ERWA {:.1e}",
        worst.iter().map(|(a, g)| format!("{a}: {g:.1e}")).collect::<Vec<_>>(),
        corrected_worst
    );
    check(worst.iter().all(|&(_, g)| g <= 1e-6), detail)
}

// Criterion 2 -------------------------------------------------------------

fn interp(knots: &[f64], horizon: f64, s: f64) -> f64 {
    let delta = horizon / (knots.len() - 1) as f64;
    let j = ((s / delta).floor() as usize).min(knots.len() - 2);
    knots[j] + (s - j as f64 * delta) / delta * (knots[j + 1] - knots[j])
}

fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, ends: [f64; 3], whole: f64, tol: f64, depth: u32) -> f64 {
        let [fa, fm, fb] = ends;
        let m = 0.5 * (a + b);
        let (flm, frm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        rec(f, a, m, [fa, flm, fm], left, tol / 2.0, depth - 1) + rec(f, m, b, [fm, frm, fb], right, tol / 2.0, depth - 1)
    }
    let ends = [f(a), f(0.5 * (a + b)), f(b)];
    let whole = (b - a) / 6.0 * (ends[0] + 4.0 * ends[1] + ends[2]);
    rec(f, a, b, ends, whole, tol, 40)
}

fn quadrature_weight(knots: &[f64], horizon: usize, w0: f64, t: usize) -> f64 {
    let h = horizon as f64;
    let delta = h / (knots.len() - 1) as f64;
    let f = |s: f64| interp(knots, h, s).exp();
    let mut total = w0;
    let mut a = 0.0;
    while a < t as f64 {
        let b = (a + delta).min(t as f64);
        total += simpson(&f, a, b, 1e-14 * f(a).max(f(b)) * (b - a).max(1.0));
        a = b;
    }
    total
}

fn weight_tables() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst_rel: f64 = 0.0;
    let mut increasing = true;
    for case in 0..100 {
        let m = rng.random_range(2..=8);
        let horizon = rng.random_range(1..=5000);
        let knots: Vec<f64> = (0..m).map(|_| rng.random_range(-15.0..3.0)).collect();
        let w0 = if case % 2 == 0 { 1.0 } else { 0.0 };
        let profile = WeightProfile::build(&knots, horizon, w0).map_err(|e| format!("{knots:?}: {e}"))?;
        increasing &= (0..horizon).all(|t| profile.weight(t + 1) > profile.weight(t));
        for i in 0..=10 {
            let t = horizon * i / 10;
            if t == 0 {
                continue;
            }
            let q = quadrature_weight(&knots, horizon, w0, t);
            worst_rel = worst_rel.max((profile.weight(t) - q).abs() / q);
        }
    }
    let mut exact = true;
    for c in [-30.0, -20.0, -10.0, -4.0, -1.0, 0.0, 0.5, 2.0] {
        let profile = WeightProfile::build(&[c; 6], 5000, 1.0).map_err(|e| e.to_string())?;
        exact &= (0..=5000).all(|t| profile.weight(t) == 1.0 + f64::exp(c) * t as f64);
    }
    check(
        increasing && exact && worst_rel <= 1e-8,
        format!("strictly increasing {increasing}, constant knots exact {exact}, quadrature max relative error {worst_rel:.1e} (tolerance 1e-8)"),
    )
}

// Criterion 3 -------------------------------------------------------------

fn softmax_limits() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut mean_err: f64 = 0.0;
    let mut limit_err: f64 = 0.0;
    let mut shift_err: f64 = 0.0;
    let err = |e: backprop_mcts::backup::BackupError| e.to_string();
    let example = [ChildStat::new(0.8, 3), ChildStat::new(0.2, 1)];
    limit_err = limit_err.max((softmax_mean(&example, PlayerRole::Max, 50.0).map_err(err)? - 0.8).abs());
    limit_err = limit_err.max((softmax_mean(&example, PlayerRole::Min, 50.0).map_err(err)? - 0.2).abs());
    for _ in 0..1000 {
        let k = rng.random_range(1..=8);
        let kids: Vec<ChildStat> = (0..k)
            .map(|_| ChildStat::new(rng.random::<f64>(), rng.random_range(1..500)))
            .collect();
        for role in [PlayerRole::Max, PlayerRole::Min] {
            let q0 = softmax_mean(&kids, role, 0.0).map_err(err)?;
            mean_err = mean_err.max((q0 - visit_weighted_mean(&kids).map_err(err)?).abs());
            let c = rng.random_range(-3.0..3.0);
            let w = rng.random_range(0.0..100.0);
            let shifted: Vec<ChildStat> = kids.iter().map(|s| ChildStat::new(s.value + c, s.visits)).collect();
            let diff = softmax_mean(&shifted, role, w).map_err(err)? - softmax_mean(&kids, role, w).map_err(err)?;
            shift_err = shift_err.max((diff - c).abs());
        }
        // Two equally visited children at least 0.1 apart.
        let n = rng.random_range(1..500);
        let low = rng.random_range(0.0..0.9);
        let high = rng.random_range(low + 0.1..=1.0);
        let pair = [ChildStat::new(low, n), ChildStat::new(high, n)];
        limit_err = limit_err.max((softmax_mean(&pair, PlayerRole::Max, 50.0).map_err(err)? - high).abs());
        limit_err = limit_err.max((softmax_mean(&pair, PlayerRole::Min, 50.0).map_err(err)? - low).abs());
    }
    check(
        mean_err <= 4.0 * f64::EPSILON && limit_err <= 1e-3 && shift_err <= 1e-10,
        format!("w=0 vs visit-weighted mean {mean_err:.1e}; w=50 limit error {limit_err:.1e} (tolerance 1e-3); shift error {shift_err:.1e} (tolerance 1e-10)"),
    )
}

// Criterion 4 -------------------------------------------------------------

fn matern(k: &Matern52, x: &[f64], y: &[f64]) -> f64 {
    let r = x
        .iter()
        .zip(y)
        .zip(&k.lengthscales)
        .map(|((a, b), l)| ((a - b) / l).powi(2))
        .sum::<f64>()
        .sqrt();
    let s = 5f64.sqrt() * r;
    k.amplitude * (1.0 + s + 5.0 * r * r / 3.0) * (-s).exp()
}

fn random_gp(rng: &mut ChaCha8Rng, noise: f64) -> (Matern52, Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(1..=20);
    let d = rng.random_range(1..=6);
    let lengthscales: Vec<f64> = (0..d).map(|_| rng.random_range(0.15..1.5)).collect();
    let kernel = Matern52::new(rng.random_range(0.2..3.0), lengthscales, noise).unwrap();
    let inputs = (0..n).map(|_| (0..d).map(|_| rng.random::<f64>()).collect()).collect();
    let targets = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    (kernel, inputs, targets)
}

fn gram(k: &Matern52, inputs: &[Vec<f64>]) -> DMatrix<f64> {
    let n = inputs.len();
    DMatrix::from_fn(n, n, |i, j| matern(k, &inputs[i], &inputs[j]) + if i == j { k.noise } else { 0.0 })
}

fn gp_correctness() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut post_err: f64 = 0.0;
    for _ in 0..100 {
        let noise = 10f64.powf(rng.random_range(-4.0..-1.0));
        let (kernel, inputs, targets) = random_gp(&mut rng, noise);
        let model = GpModel::fit_centered(&inputs, &targets, &kernel).map_err(|e| e.to_string())?;
        let inv = gram(&kernel, &inputs).try_inverse().ok_or("singular Gram matrix")?;
        let t = DVector::from_fn(inputs.len(), |i, _| targets[i] - model.offset());
        for _ in 0..20 {
            let x: Vec<f64> = (0..kernel.dims()).map(|_| rng.random_range(-0.2..1.2)).collect();
            let r = DVector::from_fn(inputs.len(), |i, _| matern(&kernel, &inputs[i], &x));
            let mean = model.offset() + (r.transpose() * &inv * &t)[(0, 0)];
            let var = (kernel.amplitude + kernel.noise - (r.transpose() * &inv * &r)[(0, 0)]).max(0.0);
            let p = model.posterior(&x).map_err(|e| e.to_string())?;
            post_err = post_err.max((p.mean - mean).abs()).max((p.variance - var).abs());
        }
    }
    // Interpolation on noise-free instances the oracle can resolve.
    let mut interp_err: f64 = 0.0;
    let mut accepted = 0;
    while accepted < 100 {
        let (kernel, inputs, targets) = random_gp(&mut rng, 0.0);
        let eig = gram(&kernel, &inputs).symmetric_eigen().eigenvalues;
        if !(eig.min() > 0.0 && eig.max() / eig.min() <= 1e8) {
            continue;
        }
        accepted += 1;
        let model = GpModel::fit(&inputs, &targets, &kernel).map_err(|e| e.to_string())?;
        for (x, t) in inputs.iter().zip(&targets) {
            let p = model.posterior(x).map_err(|e| e.to_string())?;
            interp_err = interp_err.max((p.mean - t).abs()).max(p.variance);
        }
    }
    let mut worst_z: f64 = 0.0;
    for _ in 0..20 {
        let mean: f64 = rng.random_range(-1.0..1.0);
        let sd: f64 = rng.random_range(0.05..2.0);
        let best: f64 = mean + rng.random_range(-2.0..2.0) * sd;
        let normal = Normal::new(mean, sd).unwrap();
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        const SAMPLES: f64 = 1e6;
        for _ in 0..SAMPLES as usize {
            let gain = (normal.sample(&mut rng) - best).max(0.0);
            sum += gain;
            sum_sq += gain * gain;
        }
        let mc = sum / SAMPLES;
        let se = ((sum_sq / SAMPLES - mc * mc) / SAMPLES).sqrt();
        worst_z = worst_z.max((expected_improvement(mean, sd, best) - mc).abs() / se);
    }
    check(
        post_err <= 1e-8 && interp_err <= 1e-8 && worst_z <= 3.0,
        format!("posterior vs dense inverse {post_err:.1e}; interpolation {interp_err:.1e} (tolerance 1e-8); EI vs Monte-Carlo worst {worst_z:.2} SE (limit 3)"),
    )
}

// Criterion 5 -------------------------------------------------------------

fn bayesopt_efficacy() -> Verdict {
    let mut hits = 0;
    let (mut bo_sum, mut rs_sum) = (0.0, 0.0);
    let mut values = Vec::new();
    for seed in 0..10u64 {
        let optimum: Vec<f64> = (0..6).map(|i| -9.0 + 4.0 * unit_f64(derive(seed, &[i]))).collect();
        let noisy = |x: &[f64]| quadratic_objective(x, &optimum, 0.02, seed);
        let truth = |x: &[f64]| quadratic_objective(x, &optimum, 0.0, seed);
        let mut config = OptimizeConfig::new(6, -10.0, -4.0, 10, 80, seed);
        config.noise_variance = 0.02 * 0.02;
        let bo = bayesopt_loop(noisy, &config).map_err(|e| e.to_string())?;
        let rs = random_search(noisy, &config.bounds, 80, seed);
        let (bo_true, rs_true) = (truth(&bo.best_point), truth(&rs.best_point));
        if bo.history.len() <= 80 && bo_true >= -0.05 {
            hits += 1;
        }
        bo_sum += bo_true;
        rs_sum += rs_true;
        values.push(format!("{bo_true:.3}"));
    }
    check(
        hits >= 8 && bo_sum > rs_sum,
        format!(
            "{hits}/10 seeds within 0.05 of the optimum (need 8); mean best {:.4} vs random search {:.3}; per seed {values:?}",
            bo_sum / 10.0,
            rs_sum / 10.0
        ),
    )
}

// Criterion 6 -------------------------------------------------------------

const SIMS: u32 = 1000;

fn trap_trees(tag: u64, count: usize) -> Vec<SyntheticState> {
    let mut trees = Vec::with_capacity(count);
    let mut i = 0;
    while trees.len() < count {
        let spec = SyntheticTreeSpec::new(4, 8, 0.75, derive(tag, &[i]))
            .with_traps(3, 1)
            .with_trap_prior(0.8);
        if let Ok(tree) = generate_synthetic_tree(&spec) {
            trees.push(tree);
        }
        i += 1;
    }
    trees
}

fn trap_count(trees: &[SyntheticState], engine: &SearchConfig, seed: u64) -> usize {
    trees
        .iter()
        .enumerate()
        .filter(|(i, tree)| {
            let config = engine.clone().with_seed(derive(seed, &[*i as u64]));
            let action = run_search(*tree, &config).expect("search").best_action;
            tree.trap_actions().contains(&action)
        })
        .count()
}

fn trap_avoidance() -> Verdict {
    let engine = SearchConfig::default()
        .with_policy(TreePolicy::Puct, 4.0)
        .with_simulations(SIMS);
    let training = trap_trees(0x7EA1, 60);
    let held_out = trap_trees(0x7E57, 200);
    let objective = |knots: &[f64]| match BackupStrategy::softmax(knots, SIMS as usize) {
        Ok(strategy) => 1.0 - trap_count(&training, &engine.clone().with_backup(strategy), 61) as f64 / 60.0,
        Err(_) => f64::NAN,
    };
    let config = OptimizeConfig::new(6, -10.0, -4.0, 6, 24, 66);
    let tuned = bayesopt_loop(objective, &config).map_err(|e| e.to_string())?;
    let softmax = BackupStrategy::softmax(&tuned.best_point, SIMS as usize).map_err(|e| e.to_string())?;
    let standard_traps = trap_count(&held_out, &engine, 67);
    let softmax_traps = trap_count(&held_out, &engine.clone().with_backup(softmax), 67);
    let n = held_out.len() as f64;
    let (p1, p2) = (standard_traps as f64 / n, softmax_traps as f64 / n);
    let pooled = (p1 + p2) / 2.0;
    let z = if pooled > 0.0 && pooled < 1.0 {
        (p1 - p2) / (pooled * (1.0 - pooled) * 2.0 / n).sqrt()
    } else {
        0.0
    };
    check(
        softmax_traps < standard_traps && z > 1.959_963_984_540_054,
        format!(
            "trap chosen on {standard_traps}/200 trees by standard, {softmax_traps}/200 by softmax tuned to {:?}; z = {z:.2} (need > 1.96)",
            tuned.best_point.iter().map(|k| (k * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    )
}

// Criterion 7 -------------------------------------------------------------

fn optimization_pipeline() -> Verdict {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let out = dir.path().join("optimize");
    let code = bpmcts_cli::dispatch_with("optimize", &configs_dir().join("optimize-softmax.toml"), &out, &[]);
    if code != 0 {
        return Err(format!("optimize exited with {code}"));
    }
    let best: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("best.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let history = fs::read_to_string(out.join("history.csv")).map_err(|e| e.to_string())?;
    let evaluations = history.lines().count() - 1;
    let confirmation = &best["confirmation"];
    let games = confirmation["games"].as_u64().unwrap_or(0);
    let lower = confirmation["ci95"][0].as_f64().unwrap_or(0.0);
    check(
        evaluations == 40 && games == 1000 && lower > 0.5,
        format!(
            "{evaluations} evaluations; best {}; confirmation over {games} games win rate {} ci95 lower {lower:.4} (need > 0.5)",
            best["best_tuple"].as_str().unwrap_or("?"),
            confirmation["win_rate_a"]
        ),
    )
}

// Criterion 8 -------------------------------------------------------------

fn normalized(path: &Path) -> Result<String, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    Ok(match ext {
        "json" => text
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n"),
        "csv" => {
            let header: Vec<&str> = text.lines().next().unwrap_or("").split(',').collect();
            match header.iter().position(|c| *c == "timestamp") {
                Some(ts) => text
                    .lines()
                    .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != ts).map(|(_, f)| f).collect::<Vec<_>>().join(","))
                    .collect::<Vec<_>>()
                    .join("\n"),
                None => text,
            }
        }
        _ => text,
    })
}

fn determinism() -> Verdict {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let write = |name: &str, text: &str| {
        let path = dir.path().join(name);
        fs::write(&path, text).map(|_| path).map_err(|e| e.to_string())
    };
    let tournament = write(
        "tournament.toml",
        "games = 20\nsims_per_move = 200\nseed = 9\n\n[game]\nkind = \"synthetic\"\nbranching = 4\ndepth = 8\nleaf_win_prob = 0.75\ntrap_level = 3\ntrap_count = 1\ntrap_prior = 0.8\n\n[engine_a]\nexploration = 4.0\n\n[engine_a.backup]\nkind = \"softmax\"\nknots = [-5.0, -5.0, -5.0, -5.0, -5.0, -5.0]\nhorizon = 200\n\n[engine_b]\nexploration = 4.0\n",
    )?;
    let winrate = write(
        "optimize-winrate.toml",
        "kind = \"monotone\"\nconfirm_games = 10\n\n[optimizer]\nn_init = 3\nn_iter = 6\nbatch = 2\nseed = 4\n\n[match]\ngames = 10\nsims_per_move = 60\nseed = 2\n\n[match.game]\nkind = \"synthetic\"\nbranching = 3\ndepth = 6\nleaf_win_prob = 0.8\ntrap_level = 3\ntrap_count = 1\n",
    )?;
    let runs: Vec<(&str, PathBuf)> = vec![
        ("gen-game", configs_dir().join("gen-game.toml")),
        ("analyze", configs_dir().join("analyze-tictactoe.toml")),
        ("tournament", tournament),
        ("optimize", configs_dir().join("optimize-quadratic.toml")),
        ("optimize", winrate),
        ("dump-profile", configs_dir().join("dump-profile.toml")),
    ];
    let mut compared = 0;
    let mut mismatches = Vec::new();
    for (i, (command, config)) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for workers in ["1", "3"] {
            let out = dir.path().join(format!("run{i}-{workers}"));
            let code = bpmcts_cli::dispatch_with(command, config, &out, &["--workers", workers]);
            if code != 0 {
                return Err(format!("{command} with {workers} workers exited with {code}"));
            }
            outputs.push(out);
        }
        let names: BTreeSet<String> = fs::read_dir(&outputs[0])
            .map_err(|e| e.to_string())?
            .filter_map(|e| e.ok().map(|e| e.file_name().to_string_lossy().into_owned()))
            .filter(|n| n != "manifest.json")
            .collect();
        for name in names {
            compared += 1;
            let a = outputs[0].join(&name);
            let b = outputs[1].join(&name);
            let same = match name.rsplit('.').next() {
                Some("csv") if name != "history.csv" => fs::read(&a).ok() == fs::read(&b).ok(),
                _ => normalized(&a)? == normalized(&b)?,
            };
            if !same {
                mismatches.push(format!("{command}/{name}"));
            }
        }
    }
    check(
        mismatches.is_empty(),
        format!("{compared} output files compared across 1 and 3 workers; mismatches {mismatches:?}"),
    )
}

// Criterion 9 -------------------------------------------------------------

fn unique_optimum_positions() -> Vec<(TicTacToe, usize)> {
    fn collect(s: &TicTacToe, seen: &mut BTreeSet<String>, out: &mut Vec<(TicTacToe, usize)>) {
        if s.is_terminal() || !seen.insert(s.board_string()) {
            return;
        }
        let values: Vec<(usize, f64)> = s
            .actions()
            .into_iter()
            .map(|a| (a, minimax_value(&s.apply(a)).expect("solvable")))
            .collect();
        let best = match s.to_move() {
            PlayerRole::Max => values.iter().map(|v| v.1).fold(f64::MIN, f64::max),
            PlayerRole::Min => values.iter().map(|v| v.1).fold(f64::MAX, f64::min),
        };
        let optimal: Vec<usize> = values.iter().filter(|v| v.1 == best).map(|v| v.0).collect();
        if optimal.len() == 1 && values.len() > 1 {
            out.push((s.clone(), optimal[0]));
        }
        for a in s.actions() {
            collect(&s.apply(a), seen, out);
        }
    }
    let mut all = Vec::new();
    collect(&TicTacToe::new(), &mut BTreeSet::new(), &mut all);
    let step = all.len() / 50;
    (0..50).map(|i| all[i * step].clone()).collect()
}

fn minimax_convergence() -> Verdict {
    let positions = unique_optimum_positions();
    let h = 2000;
    let mut strategies = vec![
        ("standard".to_string(), BackupStrategy::Standard),
        ("erwa".into(), BackupStrategy::erwa(0.1).map_err(|e| e.to_string())?),
        ("coulom".into(), BackupStrategy::coulom(2.0, 16).map_err(|e| e.to_string())?),
        ("monotone".into(), BackupStrategy::monotone(&[-4.0; 6], h).map_err(|e| e.to_string())?),
        ("softmax".into(), BackupStrategy::softmax(&[-4.0; 6], h).map_err(|e| e.to_string())?),
    ];
    for p in FeedbackProfile::ALL {
        strategies.push((format!("feedback {p:?}"), BackupStrategy::feedback(p, None, h).map_err(|e| e.to_string())?));
    }
    let mut rates = Vec::new();
    let mut ok = true;
    for (label, strategy) in strategies {
        let mut correct = 0;
        for (state, best) in &positions {
            for seed in 0..10 {
                let config = SearchConfig::default()
                    .with_simulations(h as u32)
                    .with_backup(strategy.clone())
                    .with_seed(seed);
                if run_search(state, &config).map_err(|e| e.to_string())?.best_action == *best {
                    correct += 1;
                }
            }
        }
        ok &= correct * 100 >= 95 * 500;
        rates.push(format!("{label} {correct}/500"));
    }
    check(ok, format!("optimal move rate per strategy (need 95%): {}", rates.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("ERWA equivalence of erwa_knots profiles", erwa_equivalence),
        ("weight tables", weight_tables),
        ("softmax limits", softmax_limits),
        ("GP correctness", gp_correctness),
        ("bayesopt efficacy", bayesopt_efficacy),
        ("trap avoidance", trap_avoidance),
        ("optimization pipeline", optimization_pipeline),
        ("determinism across worker counts", determinism),
        ("minimax convergence", minimax_convergence),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed().as_secs_f64();
        let (tag, detail) = match verdict {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {} ({name}, {elapsed:.1}s): {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
