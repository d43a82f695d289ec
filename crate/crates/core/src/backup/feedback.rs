//! Feedback-adjustment weight profiles: weights that step up from 1 to a
//! final ratio `K` over 8 segments of `[0, N]`.
//!
//! | profile | partition                     | increase     |
//! |---------|-------------------------------|--------------|
//! | GAX     | uniform widths                | linear       |
//! | GAY     | uniform widths                | geometric    |
//! | GBX     | widths doubling per segment   | linear       |
//! | GBY     | widths doubling per segment   | geometric    |

use serde::{Deserialize, Serialize};

pub const FEEDBACK_SEGMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FeedbackProfile {
    Gax,
    Gay,
    Gbx,
    Gby,
}

impl FeedbackProfile {
    pub const ALL: [FeedbackProfile; 4] = [Self::Gax, Self::Gay, Self::Gbx, Self::Gby];

    fn doubling_widths(self) -> bool {
        matches!(self, Self::Gbx | Self::Gby)
    }

    fn geometric(self) -> bool {
        matches!(self, Self::Gay | Self::Gby)
    }

    /// Final weight ratio used when none is configured.
    pub fn default_final_ratio(self) -> f64 {
        if self.geometric() {
            64.0
        } else {
            8.0
        }
    }

    /// Left edge of segment `j` on `[0, horizon]`.
    pub fn segment_start(self, j: usize, horizon: f64) -> f64 {
        if self.doubling_widths() {
            let total = ((1u64 << FEEDBACK_SEGMENTS) - 1) as f64;
            horizon * ((1u64 << j) - 1) as f64 / total
        } else {
            horizon * j as f64 / FEEDBACK_SEGMENTS as f64
        }
    }

    pub fn segment_weight(self, j: usize, final_ratio: f64) -> f64 {
        let frac = j as f64 / (FEEDBACK_SEGMENTS - 1) as f64;
        if self.geometric() {
            final_ratio.powf(frac)
        } else {
            1.0 + frac * (final_ratio - 1.0)
        }
    }

    pub fn segment_of(self, t: f64, horizon: f64) -> usize {
        let t = t.clamp(0.0, horizon);
        (1..FEEDBACK_SEGMENTS)
            .rev()
            .find(|&j| self.segment_start(j, horizon) <= t)
            .unwrap_or(0)
    }
}

/// Weight at simulation index `t` of a `horizon`-long budget.
pub fn feedback_weight(profile: FeedbackProfile, t: usize, horizon: usize, final_ratio: f64) -> f64 {
    profile.segment_weight(profile.segment_of(t as f64, horizon as f64), final_ratio)
}

/// A feedback profile with its per-index weights precomputed.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackSchedule {
    profile: FeedbackProfile,
    final_ratio: f64,
    horizon: usize,
    table: Vec<f64>,
}

impl FeedbackSchedule {
    pub fn new(profile: FeedbackProfile, final_ratio: f64, horizon: usize) -> Self {
        let table = (0..=horizon)
            .map(|t| feedback_weight(profile, t, horizon, final_ratio))
            .collect();
        Self {
            profile,
            final_ratio,
            horizon,
            table,
        }
    }

    pub fn profile(&self) -> FeedbackProfile {
        self.profile
    }

    pub fn final_ratio(&self) -> f64 {
        self.final_ratio
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    #[inline]
    pub fn weight(&self, t: usize) -> f64 {
        self.table[t.min(self.horizon)]
    }
}
