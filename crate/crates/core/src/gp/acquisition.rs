use serde::{Deserialize, Serialize};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// `E[max(f - f*, 0)]` for `f ~ N(μ, σ²)`.
pub fn expected_improvement(mean: f64, sd: f64, best: f64) -> f64 {
    if sd <= 0.0 {
        return (mean - best).max(0.0);
    }
    let gamma = (mean - best) / sd;
    (sd * (gamma * normal_cdf(gamma) + normal_pdf(gamma))).max(0.0)
}

/// `μ + κσ`.
#[inline]
pub fn ucb_acquisition(mean: f64, sd: f64, kappa: f64) -> f64 {
    mean + kappa * sd
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Acquisition {
    #[default]
    Ei,
    Ucb {
        kappa: f64,
    },
}

impl Acquisition {
    pub fn score(&self, mean: f64, sd: f64, best: f64) -> f64 {
        match self {
            Acquisition::Ei => expected_improvement(mean, sd, best),
            Acquisition::Ucb { kappa } => ucb_acquisition(mean, sd, *kappa),
        }
    }
}
