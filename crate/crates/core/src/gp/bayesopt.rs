//! Batched Bayesian optimization over a box.
//!
//! Each round fits a centered GP to every observation so far, scores a fresh
//! set of scrambled-Sobol candidates with the acquisition function and picks
//! the best. Batches are filled with the constant-liar rule: the chosen point
//! is imputed with its posterior mean, the GP is refit and the next point is
//! picked from the remaining candidates.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Acquisition, GpError, GpModel, Matern52};
use crate::seed::derive;

const INIT_STREAM: u64 = 0x494E_4954;
const CANDIDATE_STREAM: u64 = 0x4341_4E44;
const LOCAL_STREAM: u64 = 0x4C4F_4341;
/// Standard deviations, as fractions of the box width, of the local
/// candidate clouds. Local candidates cycle through them.
pub const LOCAL_SCALES: [f64; 4] = [0.1, 0.03, 0.01, 0.003];
/// Lengthscale multipliers (of the box width) tried by marginal likelihood.
pub const LENGTHSCALE_GRID: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

/// Default search box: six knots, each in `[-10, -4]`.
pub fn default_bounds() -> Vec<[f64; 2]> {
    vec![[-10.0, -4.0]; 6]
}

fn default_batch() -> usize {
    1
}

fn default_candidates() -> usize {
    4096
}

fn default_local() -> usize {
    1024
}

fn default_noise() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Per-dimension `[lo, hi]`; six dimensions of `[-10, -4]` by default.
    #[serde(default = "default_bounds")]
    pub bounds: Vec<[f64; 2]>,
    pub n_init: usize,
    pub n_iter: usize,
    #[serde(default = "default_batch")]
    pub batch: usize,
    #[serde(default)]
    pub acquisition: Acquisition,
    #[serde(default = "default_candidates")]
    pub candidate_count: usize,
    /// Extra candidates drawn from Gaussian clouds around the best
    /// observation, so the acquisition can be maximized more finely than the
    /// quasi-random grid spacing.
    #[serde(default = "default_local")]
    pub local_candidates: usize,
    #[serde(default)]
    pub seed: u64,
    /// Observation noise `τ²` of the objective.
    #[serde(default = "default_noise")]
    pub noise_variance: f64,
    /// Kernel amplitude; the sample variance of the observations when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    /// Lengthscales; the box widths when unset.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengthscales: Option<Vec<f64>>,
    /// Pick the lengthscale multiplier from [`LENGTHSCALE_GRID`] by maximum
    /// marginal likelihood each round.
    #[serde(default)]
    pub select_lengthscale: bool,
}

impl OptimizeConfig {
    /// A box `[lo, hi]^dims` with the remaining settings at their defaults.
    pub fn new(dims: usize, lo: f64, hi: f64, n_init: usize, n_iter: usize, seed: u64) -> Self {
        Self {
            bounds: vec![[lo, hi]; dims],
            n_init,
            n_iter,
            batch: default_batch(),
            acquisition: Acquisition::Ei,
            candidate_count: default_candidates(),
            local_candidates: default_local(),
            seed,
            noise_variance: default_noise(),
            amplitude: None,
            lengthscales: None,
            select_lengthscale: false,
        }
    }

    pub fn dims(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |m: String| Err(GpError::InvalidConfig(m));
        if self.bounds.is_empty() {
            return bad("bounds must have at least one dimension".into());
        }
        for (i, [lo, hi]) in self.bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return bad(format!("bounds[{i}] = [{lo}, {hi}] is degenerate"));
            }
        }
        if self.n_init < 2 {
            return bad(format!("n_init must be at least 2, got {}", self.n_init));
        }
        if self.n_iter < self.n_init {
            return bad(format!("n_iter {} is below n_init {}", self.n_iter, self.n_init));
        }
        if self.batch < 1 {
            return bad("batch must be positive".into());
        }
        if self.candidate_count < self.batch || self.candidate_count > 1 << 16 {
            return bad(format!(
                "candidate_count must lie in [batch, 65536], got {}",
                self.candidate_count
            ));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return bad(format!("noise_variance {}", self.noise_variance));
        }
        if let Some(ls) = &self.lengthscales {
            if ls.len() != self.dims() {
                return bad(format!("{} lengthscales for {} dimensions", ls.len(), self.dims()));
            }
        }
        if let Acquisition::Ucb { kappa } = self.acquisition {
            if !(kappa >= 0.0) {
                return bad(format!("UCB kappa must be non-negative, got {kappa}"));
            }
        }
        Ok(())
    }

    fn widths(&self) -> Vec<f64> {
        self.bounds.iter().map(|[lo, hi]| hi - lo).collect()
    }

    /// `count` scrambled-Sobol points in the box, keyed by `stream`.
    pub fn quasi_random_points(&self, count: usize, stream: u64) -> Vec<Vec<f64>> {
        let scramble = (derive(self.seed, &[stream]) >> 32) as u32;
        (0..count as u32)
            .map(|i| {
                self.bounds
                    .iter()
                    .enumerate()
                    .map(|(d, [lo, hi])| {
                        let u = sobol_burley::sample(i, d as u32, scramble) as f64;
                        lo + u * (hi - lo)
                    })
                    .collect()
            })
            .collect()
    }

    /// Gaussian perturbations of `center`, clamped to the box.
    pub fn local_points(&self, center: &[f64], count: usize, stream: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive(self.seed, &[LOCAL_STREAM, stream]));
        (0..count)
            .map(|i| {
                let scale = LOCAL_SCALES[i % LOCAL_SCALES.len()];
                center
                    .iter()
                    .zip(&self.bounds)
                    .map(|(c, [lo, hi])| {
                        let z: f64 = rng.sample(StandardNormal);
                        (c + z * scale * (hi - lo)).clamp(*lo, *hi)
                    })
                    .collect()
            })
            .collect()
    }

    /// Candidate set of round `round`: the quasi-random points followed by
    /// the local cloud around `incumbent`.
    pub fn candidates(&self, incumbent: Option<&[f64]>, round: u64) -> Vec<Vec<f64>> {
        let mut points = self.quasi_random_points(self.candidate_count, derive(CANDIDATE_STREAM, &[round]));
        if let Some(center) = incumbent {
            // Clamping can map several local draws onto the same boundary point.
            let mut seen: HashSet<Vec<u64>> = points.iter().map(|p| bits(p)).collect();
            for p in self.local_points(center, self.local_candidates, round) {
                if seen.insert(bits(&p)) {
                    points.push(p);
                }
            }
        }
        points
    }

    /// Kernel used for the given observations.
    pub fn kernel_for(&self, targets: &[f64], lengthscale_factor: f64) -> Result<Matern52, GpError> {
        let amplitude = self.amplitude.unwrap_or_else(|| {
            let n = targets.len() as f64;
            let mean = targets.iter().sum::<f64>() / n;
            let var = targets.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / n;
            var.max(self.noise_variance).max(1e-12)
        });
        let lengthscales = self
            .lengthscales
            .clone()
            .unwrap_or_else(|| self.widths())
            .into_iter()
            .map(|l| l * lengthscale_factor)
            .collect();
        Matern52::new(amplitude, lengthscales, self.noise_variance)
    }

    /// Fits the surrogate, choosing the lengthscale multiplier by marginal
    /// likelihood when configured.
    pub fn fit_surrogate(&self, inputs: &[Vec<f64>], targets: &[f64]) -> Result<GpModel, GpError> {
        if !self.select_lengthscale {
            return GpModel::fit_centered(inputs, targets, &self.kernel_for(targets, 1.0)?);
        }
        let mut best: Option<(f64, GpModel)> = None;
        for factor in LENGTHSCALE_GRID {
            let Ok(model) = GpModel::fit_centered(inputs, targets, &self.kernel_for(targets, factor)?) else {
                continue;
            };
            let lml = model.log_marginal_likelihood();
            if best.as_ref().is_none_or(|(b, _)| lml > *b) {
                best = Some((lml, model));
            }
        }
        best.map(|(_, m)| m).ok_or(GpError::IllConditioned { max_jitter: 1e-6 })
    }
}

fn bits(point: &[f64]) -> Vec<u64> {
    point.iter().map(|v| v.to_bits()).collect()
}

/// Index of the candidate maximizing the acquisition, skipping `excluded`.
/// The lowest index wins ties.
pub fn argmax_acquisition(
    model: &GpModel,
    candidates: &[Vec<f64>],
    acquisition: &Acquisition,
    best_observed: f64,
    excluded: &[usize],
) -> Result<Option<usize>, GpError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in candidates.iter().enumerate() {
        if excluded.contains(&i) {
            continue;
        }
        let p = model.posterior(x)?;
        let score = acquisition.score(p.mean, p.sd(), best_observed);
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((i, score));
        }
    }
    Ok(best.map(|(i, _)| i))
}

/// Proposes `config.batch` points (fewer if `limit` is smaller) from the
/// candidates of round `round`. The local cloud is centred on the best
/// target of `model`.
pub fn propose_next(
    model: &GpModel,
    config: &OptimizeConfig,
    best_observed: f64,
    round: u64,
    limit: usize,
) -> Result<Vec<Vec<f64>>, GpError> {
    let incumbent = model
        .targets()
        .iter()
        .enumerate()
        .fold(None, |best: Option<(usize, f64)>, (i, &t)| match best {
            Some((_, b)) if b >= t => best,
            _ => Some((i, t)),
        })
        .map(|(i, _)| model.inputs()[i].as_slice());
    let candidates = config.candidates(incumbent, round);
    let want = config.batch.min(limit);
    let mut chosen: Vec<usize> = Vec::with_capacity(want);
    let mut current = model.clone();
    let mut inputs = model.inputs().to_vec();
    let mut targets = model.targets().to_vec();
    while chosen.len() < want {
        let Some(i) = argmax_acquisition(&current, &candidates, &config.acquisition, best_observed, &chosen)?
        else {
            break;
        };
        chosen.push(i);
        if chosen.len() < want {
            let liar = current.posterior(&candidates[i])?.mean;
            inputs.push(candidates[i].clone());
            targets.push(liar);
            current = current.refit(&inputs, &targets)?;
        }
    }
    Ok(chosen.into_iter().map(|i| candidates[i].clone()).collect())
}

/// One objective evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub index: usize,
    pub round: usize,
    pub point: Vec<f64>,
    /// Value used by the surrogate; failed evaluations carry a penalty.
    pub value: f64,
    pub failed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BayesOptOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub history: Vec<Evaluation>,
}

/// Maximizes `objective` over the box. Evaluations of one batch run in
/// parallel; results do not depend on the worker count.
pub fn bayesopt_loop<F>(objective: F, config: &OptimizeConfig) -> Result<BayesOptOutcome, GpError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    let mut history: Vec<Evaluation> = Vec::with_capacity(config.n_iter);
    let initial = config.quasi_random_points(config.n_init, INIT_STREAM);
    record(&mut history, evaluate_all(&objective, &initial), initial, 0);

    let mut round = 1;
    while history.len() < config.n_iter {
        let inputs: Vec<Vec<f64>> = history.iter().map(|e| e.point.clone()).collect();
        let targets: Vec<f64> = history.iter().map(|e| e.value).collect();
        let model = config.fit_surrogate(&inputs, &targets)?;
        let incumbent = best_of(&history).map_or(f64::NEG_INFINITY, |e| e.value);
        let batch = propose_next(&model, config, incumbent, round as u64, config.n_iter - history.len())?;
        if batch.is_empty() {
            break;
        }
        record(&mut history, evaluate_all(&objective, &batch), batch, round);
        round += 1;
    }

    let best = best_of(&history).ok_or(GpError::AllEvaluationsFailed)?;
    Ok(BayesOptOutcome {
        best_point: best.point.clone(),
        best_value: best.value,
        history,
    })
}

fn evaluate_all<F>(objective: &F, points: &[Vec<f64>]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    points.par_iter().map(|p| objective(p)).collect()
}

/// Appends evaluations, replacing non-finite values by the worst finite value
/// observed so far (0 when there is none).
fn record(history: &mut Vec<Evaluation>, values: Vec<f64>, points: Vec<Vec<f64>>, round: usize) {
    let worst = history
        .iter()
        .filter(|e| !e.failed)
        .map(|e| e.value)
        .chain(values.iter().copied().filter(|v| v.is_finite()))
        .fold(f64::INFINITY, f64::min);
    let penalty = if worst.is_finite() { worst } else { 0.0 };
    for (point, value) in points.into_iter().zip(values) {
        let failed = !value.is_finite();
        history.push(Evaluation {
            index: history.len(),
            round,
            point,
            value: if failed { penalty } else { value },
            failed,
        });
    }
}

fn best_of(history: &[Evaluation]) -> Option<&Evaluation> {
    history
        .iter()
        .filter(|e| !e.failed)
        .fold(None, |best: Option<&Evaluation>, e| match best {
            Some(b) if b.value >= e.value => Some(b),
            _ => Some(e),
        })
}

/// Uniform random search with the same budget, as a baseline.
pub fn random_search<F>(objective: F, bounds: &[[f64; 2]], evaluations: usize, seed: u64) -> BayesOptOutcome
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut history = Vec::with_capacity(evaluations);
    for index in 0..evaluations {
        let point: Vec<f64> = bounds.iter().map(|[lo, hi]| rng.random_range(*lo..*hi)).collect();
        let value = objective(&point);
        history.push(Evaluation {
            index,
            round: index,
            point,
            value,
            failed: !value.is_finite(),
        });
    }
    let best = best_of(&history).cloned().unwrap_or_else(|| history[0].clone());
    BayesOptOutcome {
        best_point: best.point,
        best_value: best.value,
        history,
    }
}
