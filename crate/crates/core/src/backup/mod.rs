//! Backpropagation strategies.
//!
//! Two families exist. Per-node strategies (standard, ERWA, feedback,
//! monotone) fold each return into every node on the simulated path, indexed
//! by that node's own visit count. Parent strategies (Coulom, softmax) give
//! the evaluated leaf a standard update and then recompute every ancestor's
//! value from its children's current `(Q, N)`.

mod feedback;
mod update;
mod weights;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::games::PlayerRole;

pub use feedback::{feedback_weight, FeedbackProfile, FeedbackSchedule, FEEDBACK_SEGMENTS};
pub use update::{
    coulom_interpolate, coulom_mean_weight, coulom_parent_update, erwa_update, monotone_update,
    softmax_mean, softmax_parent_update, standard_update, visit_weighted_mean, BackupAccumulator,
    ChildStat,
};
pub use weights::{erwa_knots, Knots, WeightProfile, MAX_KNOT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackupError {
    #[error("a weight profile needs at least 2 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knot {0} is not finite")]
    NonFiniteKnot(usize),
    #[error("knot {index} = {value} exceeds the exponent limit of 700")]
    KnotOverflow { index: usize, value: f64 },
    #[error("weight w({0}) is not finite")]
    NonFiniteWeight(usize),
    #[error("weight table is not strictly increasing at t = {0} (increments lost to rounding)")]
    NotIncreasing(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed knot vector: {0}")]
    KnotSyntax(String),
    #[error("parent update needs at least one visited child")]
    NoVisitedChildren,
}

/// `w(0)` of monotone-backup profiles.
pub const MONOTONE_W0: f64 = 1.0;
/// `w(0)` of softmax-backup profiles.
pub const SOFTMAX_W0: f64 = 0.0;

/// A backpropagation strategy with its parameters. Weight tables are built
/// once and shared read-only between searches.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "BackupConfig", into = "BackupConfig")]
pub enum BackupStrategy {
    #[default]
    Standard,
    Erwa {
        alpha: f64,
    },
    Coulom {
        x: f64,
        y: u32,
    },
    Feedback(FeedbackSchedule),
    Monotone(Arc<WeightProfile>),
    Softmax(Arc<WeightProfile>),
}

impl BackupStrategy {
    pub fn erwa(alpha: f64) -> Result<Self, BackupError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(BackupError::InvalidParameter(format!(
                "ERWA alpha must lie in (0, 1], got {alpha}"
            )));
        }
        Ok(Self::Erwa { alpha })
    }

    pub fn coulom(x: f64, y: u32) -> Result<Self, BackupError> {
        if !(x > 0.0 && x.is_finite()) || y < 1 {
            return Err(BackupError::InvalidParameter(format!(
                "Coulom needs x > 0 and y >= 1, got x = {x}, y = {y}"
            )));
        }
        Ok(Self::Coulom { x, y })
    }

    pub fn feedback(
        profile: FeedbackProfile,
        final_ratio: Option<f64>,
        horizon: usize,
    ) -> Result<Self, BackupError> {
        let k = final_ratio.unwrap_or_else(|| profile.default_final_ratio());
        if !(k > 1.0 && k.is_finite()) || horizon < 1 {
            return Err(BackupError::InvalidParameter(format!(
                "feedback profile needs K > 1 and horizon >= 1, got K = {k}, horizon = {horizon}"
            )));
        }
        Ok(Self::Feedback(FeedbackSchedule::new(profile, k, horizon)))
    }

    pub fn monotone(knots: &[f64], horizon: usize) -> Result<Self, BackupError> {
        WeightProfile::build(knots, horizon, MONOTONE_W0).map(|p| Self::Monotone(Arc::new(p)))
    }

    pub fn softmax(knots: &[f64], horizon: usize) -> Result<Self, BackupError> {
        WeightProfile::build(knots, horizon, SOFTMAX_W0).map(|p| Self::Softmax(Arc::new(p)))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Erwa { .. } => "erwa",
            Self::Coulom { .. } => "coulom",
            Self::Feedback(_) => "feedback",
            Self::Monotone(_) => "monotone",
            Self::Softmax(_) => "softmax",
        }
    }

    /// True for strategies that recompute ancestors from their children.
    pub fn recomputes_parents(&self) -> bool {
        matches!(self, Self::Coulom { .. } | Self::Softmax(_))
    }

    /// Folds return `r` into a node that has been visited `n` times and
    /// returns its new value. Parent strategies use the standard rule here,
    /// which is what their leaves receive.
    #[inline]
    pub fn update_node(&self, acc: &mut BackupAccumulator, q: f64, r: f64, n: u32) -> f64 {
        match self {
            Self::Standard | Self::Coulom { .. } | Self::Softmax(_) => standard_update(q, r, n),
            Self::Erwa { alpha } => erwa_update(q, r, n, *alpha),
            Self::Feedback(schedule) => acc.push(schedule.weight(n as usize), r),
            Self::Monotone(profile) => monotone_update(acc, r, n, profile),
        }
    }

    /// New value of a parent with the given children, or `None` for
    /// per-node strategies.
    pub fn recompute_parent(
        &self,
        children: &[ChildStat],
        role: PlayerRole,
        n_parent: u32,
    ) -> Option<Result<f64, BackupError>> {
        match self {
            Self::Coulom { x, y } => Some(coulom_parent_update(children, role, *x, *y, n_parent)),
            Self::Softmax(profile) => Some(softmax_parent_update(children, role, profile, n_parent)),
            _ => None,
        }
    }
}

/// Serialized form of [`BackupStrategy`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackupConfig {
    Standard,
    Erwa {
        alpha: f64,
    },
    Coulom {
        x: f64,
        y: u32,
    },
    Feedback {
        profile: FeedbackProfile,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        final_ratio: Option<f64>,
        horizon: usize,
    },
    Monotone {
        knots: Knots,
        horizon: usize,
    },
    Softmax {
        knots: Knots,
        horizon: usize,
    },
}

impl TryFrom<BackupConfig> for BackupStrategy {
    type Error = BackupError;

    fn try_from(c: BackupConfig) -> Result<Self, Self::Error> {
        match c {
            BackupConfig::Standard => Ok(Self::Standard),
            BackupConfig::Erwa { alpha } => Self::erwa(alpha),
            BackupConfig::Coulom { x, y } => Self::coulom(x, y),
            BackupConfig::Feedback {
                profile,
                final_ratio,
                horizon,
            } => Self::feedback(profile, final_ratio, horizon),
            BackupConfig::Monotone { knots, horizon } => Self::monotone(&knots.0, horizon),
            BackupConfig::Softmax { knots, horizon } => Self::softmax(&knots.0, horizon),
        }
    }
}

impl From<BackupStrategy> for BackupConfig {
    fn from(s: BackupStrategy) -> Self {
        match s {
            BackupStrategy::Standard => Self::Standard,
            BackupStrategy::Erwa { alpha } => Self::Erwa { alpha },
            BackupStrategy::Coulom { x, y } => Self::Coulom { x, y },
            BackupStrategy::Feedback(f) => Self::Feedback {
                profile: f.profile(),
                final_ratio: Some(f.final_ratio()),
                horizon: f.horizon(),
            },
            BackupStrategy::Monotone(p) => Self::Monotone {
                knots: Knots(p.knots().to_vec()),
                horizon: p.horizon(),
            },
            BackupStrategy::Softmax(p) => Self::Softmax {
                knots: Knots(p.knots().to_vec()),
                horizon: p.horizon(),
            },
        }
    }
}
