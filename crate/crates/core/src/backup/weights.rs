//! Monotone weight functions `w(t) = w0 + ∫₀ᵗ exp(p(s)) ds` where `p` is the
//! piecewise-linear interpolant of `m` equally spaced knots on `[0, N]`.
//!
//! Any continuously differentiable, strictly increasing function can be
//! written this way with a continuous `p`; restricting `p` to `m` knots gives
//! an `m`-dimensional family that contains every increasing line
//! (constant knots) and every shifted exponential (collinear knots).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BackupError;

/// Largest knot accepted; `exp(700)` is still comfortably finite.
pub const MAX_KNOT: f64 = 700.0;
const FLAT_SLOPE: f64 = 1e-12;

/// A knot vector. Parses and prints the tuple form used when reporting tuned
/// profiles, e.g. `(-10.0, -10.0, -4.0, -4.0, -4.0, -10.0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KnotRepr", into = "Vec<f64>")]
pub struct Knots(pub Vec<f64>);

#[derive(Deserialize)]
#[serde(untagged)]
enum KnotRepr {
    List(Vec<f64>),
    Tuple(String),
}

impl TryFrom<KnotRepr> for Knots {
    type Error = BackupError;

    fn try_from(repr: KnotRepr) -> Result<Self, Self::Error> {
        match repr {
            KnotRepr::List(v) => Ok(Knots(v)),
            KnotRepr::Tuple(s) => s.parse(),
        }
    }
}

impl From<Knots> for Vec<f64> {
    fn from(k: Knots) -> Self {
        k.0
    }
}

impl FromStr for Knots {
    type Err = BackupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s.trim();
        let inner = inner
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .or_else(|| inner.strip_prefix('[').and_then(|t| t.strip_suffix(']')))
            .unwrap_or(inner);
        inner
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| BackupError::KnotSyntax(format!("cannot parse {t:?} as a number")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Knots)
    }
}

impl fmt::Display for Knots {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, k) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{k:?}")?;
        }
        write!(f, ")")
    }
}

/// A materialized weight function on the integers `0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightProfile {
    knots: Vec<f64>,
    horizon: usize,
    w0: f64,
    table: Vec<f64>,
}

impl WeightProfile {
    /// Builds the table `w(0..=horizon)`, integrating `exp(p)` exactly on each
    /// linear piece of `p`.
    pub fn build(knots: &[f64], horizon: usize, w0: f64) -> Result<Self, BackupError> {
        let m = knots.len();
        if m < 2 {
            return Err(BackupError::TooFewKnots(m));
        }
        if horizon < 1 {
            return Err(BackupError::InvalidParameter("horizon must be at least 1".into()));
        }
        if !(w0.is_finite() && w0 >= 0.0) {
            return Err(BackupError::InvalidParameter(format!(
                "w0 must be finite and non-negative, got {w0}"
            )));
        }
        for (i, &k) in knots.iter().enumerate() {
            if !k.is_finite() {
                return Err(BackupError::NonFiniteKnot(i));
            }
            if k > MAX_KNOT {
                return Err(BackupError::KnotOverflow { index: i, value: k });
            }
        }

        let spacing = horizon as f64 / (m - 1) as f64;
        let segment = |i: usize, from: f64, to: f64| {
            let slope = (knots[i + 1] - knots[i]) / spacing;
            let start = knots[i] + slope * (from - i as f64 * spacing);
            let len = to - from;
            if slope.abs() > FLAT_SLOPE {
                start.exp() * (slope * len).exp_m1() / slope
            } else {
                len * start.exp()
            }
        };
        // Integral over each complete piece, accumulated from the left.
        let mut before = Vec::with_capacity(m - 1);
        let mut acc = 0.0;
        for i in 0..m - 1 {
            before.push(acc);
            acc += segment(i, i as f64 * spacing, (i + 1) as f64 * spacing);
        }

        let constant = knots.iter().all(|&k| k == knots[0]);
        let mut table = Vec::with_capacity(horizon + 1);
        for t in 0..=horizon {
            let s = t as f64;
            let i = ((s / spacing).floor() as usize).min(m - 2);
            let w = if constant {
                w0 + knots[0].exp() * s
            } else {
                w0 + before[i] + segment(i, i as f64 * spacing, s)
            };
            if !w.is_finite() {
                return Err(BackupError::NonFiniteWeight(t));
            }
            if let Some(&prev) = table.last() {
                if w <= prev {
                    return Err(BackupError::NotIncreasing(t));
                }
            }
            table.push(w);
        }
        Ok(Self {
            knots: knots.to_vec(),
            horizon,
            w0,
            table,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    /// Distance between consecutive knots, `N / (m - 1)`.
    pub fn knot_spacing(&self) -> f64 {
        self.horizon as f64 / (self.knots.len() - 1) as f64
    }

    /// The interpolated log-density `p(s)`, held constant outside `[0, N]`.
    pub fn log_density(&self, s: f64) -> f64 {
        let spacing = self.knot_spacing();
        let m = self.knots.len();
        let x = (s / spacing).clamp(0.0, (m - 1) as f64);
        let i = (x.floor() as usize).min(m - 2);
        let frac = x - i as f64;
        self.knots[i] + frac * (self.knots[i + 1] - self.knots[i])
    }

    /// `w(t)`, clamped to `w(N)` beyond the horizon.
    #[inline]
    pub fn weight(&self, t: usize) -> f64 {
        self.table[t.min(self.horizon)]
    }
}

/// Knots and `w0` reproducing exponential recency weighting with step `alpha`:
/// `p(s) = s·ln λ + ln(α ln λ)` with `λ = 1/(1-α)` and `w0 = α`, so that
/// `w(t) = α(1-α)^(-t)`.
pub fn erwa_knots(alpha: f64, m: usize, horizon: usize) -> Result<WeightProfile, BackupError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(BackupError::InvalidParameter(format!(
            "ERWA knots need alpha in (0, 1), got {alpha}"
        )));
    }
    if m < 2 {
        return Err(BackupError::TooFewKnots(m));
    }
    let log_lambda = -(-alpha).ln_1p();
    let intercept = (alpha * log_lambda).ln();
    let spacing = horizon as f64 / (m - 1) as f64;
    let knots: Vec<f64> = (0..m)
        .map(|i| log_lambda * (i as f64 * spacing) + intercept)
        .collect();
    WeightProfile::build(&knots, horizon, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_knots_give_lines() {
        let p = WeightProfile::build(&[0.0; 6], 5000, 1.0).unwrap();
        for t in 0..=5000 {
            assert_eq!(p.weight(t), 1.0 + t as f64);
        }
        let c = -2.5f64;
        let p = WeightProfile::build(&[c; 4], 300, 1.0).unwrap();
        for t in 0..=300 {
            let expected = 1.0 + c.exp() * t as f64;
            assert!((p.weight(t) - expected).abs() <= 1e-14 * expected, "t={t}");
        }
    }

    #[test]
    fn collinear_knots_give_shifted_exponentials() {
        // p(s) = ln(r a) + r s  =>  w(t) = (1 - a) + a e^{r t}.
        let (r, a) = (0.01f64, 0.3f64);
        let horizon = 400;
        let m = 6;
        let spacing = horizon as f64 / (m - 1) as f64;
        let knots: Vec<f64> = (0..m).map(|i| (r * a).ln() + r * i as f64 * spacing).collect();
        let p = WeightProfile::build(&knots, horizon, 1.0).unwrap();
        for t in 0..=horizon {
            let expected = (1.0 - a) + a * (r * t as f64).exp();
            assert!((p.weight(t) - expected).abs() <= 1e-12 * expected, "t={t}");
        }
    }

    #[test]
    fn erwa_weights() {
        let p = erwa_knots(0.5, 6, 60).unwrap();
        for t in 0..=60 {
            let expected = 0.5 * 2f64.powi(t as i32);
            assert!((p.weight(t) - expected).abs() <= 1e-9 * expected, "t={t}");
        }
        assert_eq!(erwa_knots(0.1, 6, 100).unwrap().table()[0], 0.1);
        assert!(erwa_knots(1.0, 6, 100).is_err());
        assert!(erwa_knots(0.0, 6, 100).is_err());
    }

    #[test]
    fn validation() {
        assert!(matches!(WeightProfile::build(&[0.0], 10, 1.0), Err(BackupError::TooFewKnots(1))));
        assert!(matches!(
            WeightProfile::build(&[0.0, f64::NAN], 10, 1.0),
            Err(BackupError::NonFiniteKnot(1))
        ));
        assert!(matches!(
            WeightProfile::build(&[0.0, 701.0], 10, 1.0),
            Err(BackupError::KnotOverflow { index: 1, .. })
        ));
        assert!(matches!(
            WeightProfile::build(&[700.0, 700.0], 100_000, 1.0),
            Err(BackupError::NonFiniteWeight(_))
        ));
        // Increments of e^-40 vanish next to w0 = 1.
        assert!(matches!(
            WeightProfile::build(&[-40.0, -40.0], 10, 1.0),
            Err(BackupError::NotIncreasing(1))
        ));
        assert!(WeightProfile::build(&[0.0, 0.0], 0, 1.0).is_err());
    }

    #[test]
    fn tiny_weights_from_zero_stay_increasing() {
        let p = WeightProfile::build(&[-700.0; 6], 2000, 0.0).unwrap();
        assert_eq!(p.weight(0), 0.0);
        assert!(p.weight(2000) < 1e-300);
    }

    #[test]
    fn clamps_beyond_horizon() {
        let p = WeightProfile::build(&[-1.0, 0.0, 1.0], 10, 1.0).unwrap();
        assert_eq!(p.weight(10), p.weight(11));
        assert_eq!(p.weight(10), p.weight(1000));
    }

    #[test]
    fn log_density_interpolates() {
        let p = WeightProfile::build(&[-4.0, -10.0, -4.0], 100, 0.0).unwrap();
        assert_eq!(p.log_density(0.0), -4.0);
        assert_eq!(p.log_density(50.0), -10.0);
        assert!((p.log_density(25.0) + 7.0).abs() < 1e-12);
        assert_eq!(p.log_density(100.0), -4.0);
    }

    #[test]
    fn knot_tuple_format() {
        let k: Knots = "(-10.0, -10.0, -4.0, -4.0, -4.0, -10.0)".parse().unwrap();
        assert_eq!(k.0, vec![-10.0, -10.0, -4.0, -4.0, -4.0, -10.0]);
        assert_eq!(k.to_string(), "(-10.0, -10.0, -4.0, -4.0, -4.0, -10.0)");
        let k: Knots = "[-7.9, 1e-3]".parse().unwrap();
        assert_eq!(k.0, vec![-7.9, 1e-3]);
        assert!("(-1.0, abc)".parse::<Knots>().is_err());
    }
}
