//! Value-update rules. Per-node rules fold one return into a node's own
//! statistics; parent rules recompute a node's value from its children.

use super::{BackupError, WeightProfile};
use crate::games::PlayerRole;

/// Strategy-owned scratch space of a node: `Q = weighted_sum / weight_sum`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BackupAccumulator {
    pub weighted_sum: f64,
    pub weight_sum: f64,
}

impl BackupAccumulator {
    /// Adds `weight · r` and returns the new weighted mean.
    #[inline]
    pub fn push(&mut self, weight: f64, r: f64) -> f64 {
        self.weighted_sum += weight * r;
        self.weight_sum += weight;
        self.mean()
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.weighted_sum / self.weight_sum
    }
}

/// `(Q, N)` of one child as seen by a parent update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChildStat {
    pub value: f64,
    pub visits: u32,
}

impl ChildStat {
    pub fn new(value: f64, visits: u32) -> Self {
        Self { value, visits }
    }
}

/// Running arithmetic mean; `n` is the number of returns already folded in.
#[inline]
pub fn standard_update(q: f64, r: f64, n: u32) -> f64 {
    q + (r - q) / (n as f64 + 1.0)
}

/// Exponential recency-weighted average. The first return initializes `Q`.
#[inline]
pub fn erwa_update(q: f64, r: f64, n: u32, alpha: f64) -> f64 {
    if n == 0 || alpha == 1.0 {
        r
    } else {
        q + alpha * (r - q)
    }
}

/// Weighted average of a node's return history with weight `w(n)` on the
/// return observed at its `n`-th visit.
#[inline]
pub fn monotone_update(acc: &mut BackupAccumulator, r: f64, n: u32, profile: &WeightProfile) -> f64 {
    acc.push(profile.weight(n as usize), r)
}

/// Index of the best visited child for `role` (lowest index on ties).
fn best_child(children: &[ChildStat], role: PlayerRole) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, c) in children.iter().enumerate().filter(|(_, c)| c.visits > 0) {
        let better = match best {
            None => true,
            Some(b) => match role {
                PlayerRole::Max => c.value > children[b].value,
                PlayerRole::Min => c.value < children[b].value,
            },
        };
        if better {
            best = Some(i);
        }
    }
    best
}

/// Visit-weighted mean of the children's values.
pub fn visit_weighted_mean(children: &[ChildStat]) -> Result<f64, BackupError> {
    let (num, den) = children.iter().fold((0.0, 0.0), |(num, den), c| {
        (num + c.visits as f64 * c.value, den + c.visits as f64)
    });
    if den == 0.0 {
        return Err(BackupError::NoVisitedChildren);
    }
    Ok(num / den)
}

/// Mean-weight parameter `M`: constant `x` below `y` parent visits, then
/// growing with `log2(N_parent / y)`.
pub fn coulom_mean_weight(x: f64, y: u32, n_parent: u32) -> f64 {
    if n_parent < y {
        x
    } else {
        x * (1.0 + (n_parent as f64 / y as f64).log2())
    }
}

/// Interpolates between the best child's value and the visit-weighted mean,
/// trusting the best child more as its visit count grows relative to `M`.
pub fn coulom_parent_update(
    children: &[ChildStat],
    role: PlayerRole,
    x: f64,
    y: u32,
    n_parent: u32,
) -> Result<f64, BackupError> {
    let best = best_child(children, role).ok_or(BackupError::NoVisitedChildren)?;
    let mean = visit_weighted_mean(children)?;
    Ok(coulom_interpolate(
        children[best].value,
        children[best].visits as f64,
        mean,
        coulom_mean_weight(x, y, n_parent),
    ))
}

#[inline]
pub fn coulom_interpolate(q_best: f64, n_best: f64, q_mean: f64, mean_weight: f64) -> f64 {
    let beta = n_best / (n_best + mean_weight);
    beta * q_best + (1.0 - beta) * q_mean
}

/// Softmax-weighted mean of the children with weights `N_j exp(±Q_j w)`
/// (`+` at MAX nodes, `-` at MIN nodes). `w = 0` is the visit-weighted mean;
/// large `w` concentrates on the best child for the mover.
pub fn softmax_mean(children: &[ChildStat], role: PlayerRole, w: f64) -> Result<f64, BackupError> {
    let sign = match role {
        PlayerRole::Max => 1.0,
        PlayerRole::Min => -1.0,
    };
    let shift = children
        .iter()
        .filter(|c| c.visits > 0)
        .map(|c| sign * c.value * w)
        .fold(f64::NEG_INFINITY, f64::max);
    if shift == f64::NEG_INFINITY {
        return Err(BackupError::NoVisitedChildren);
    }
    let (num, den) = children
        .iter()
        .filter(|c| c.visits > 0)
        .fold((0.0, 0.0), |(num, den), c| {
            let a = c.visits as f64 * (sign * c.value * w - shift).exp();
            (num + a * c.value, den + a)
        });
    Ok(num / den)
}

/// Softmax parent update with `w = w(N_parent)` read from the profile.
pub fn softmax_parent_update(
    children: &[ChildStat],
    role: PlayerRole,
    profile: &WeightProfile,
    n_parent: u32,
) -> Result<f64, BackupError> {
    softmax_mean(children, role, profile.weight(n_parent as usize))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_standard(returns: &[f64]) -> f64 {
        returns
            .iter()
            .enumerate()
            .fold(0.0, |q, (n, &r)| standard_update(q, r, n as u32))
    }

    fn run_erwa(returns: &[f64], alpha: f64) -> f64 {
        returns
            .iter()
            .enumerate()
            .fold(0.0, |q, (n, &r)| erwa_update(q, r, n as u32, alpha))
    }

    #[test]
    fn standard_is_the_mean() {
        assert_eq!(run_standard(&[1.0]), 1.0);
        assert_eq!(run_standard(&[1.0, 0.0]), 0.5);
        assert_eq!(run_standard(&[1.0, 1.0, 1.0]), 1.0);
        assert_eq!(run_standard(&[1.0, 0.0, 0.0, 1.0]), 0.5);
    }

    #[test]
    fn erwa_examples() {
        assert_eq!(run_erwa(&[0.3, 0.9, 0.1], 1.0), 0.1);
        assert_eq!(run_erwa(&[0.0, 1.0], 0.5), 0.5);
        assert_eq!(run_erwa(&[0.0, 1.0, 1.0], 0.5), 0.75);
    }

    #[test]
    fn monotone_arithmetic() {
        // Table [1, 2, 3] with returns 1, 0, 1.
        let profile = WeightProfile::build(&[0.0, 0.0], 2, 1.0).unwrap();
        assert_eq!(profile.table(), &[1.0, 2.0, 3.0]);
        let mut acc = BackupAccumulator::default();
        let mut q = 0.0;
        for (n, r) in [1.0, 0.0, 1.0].into_iter().enumerate() {
            q = monotone_update(&mut acc, r, n as u32, &profile);
        }
        assert!((q - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn coulom_examples() {
        // N_best = M = 4: equal weights.
        let kids = [ChildStat::new(0.9, 4), ChildStat::new(0.1, 4)];
        let q = coulom_parent_update(&kids, PlayerRole::Max, 4.0, 100, 8).unwrap();
        assert!((q - (0.9 + 0.5) / 2.0).abs() < 1e-15);
        assert!((coulom_interpolate(1.0, 99.0, 0.0, 1.0) - 0.99).abs() < 1e-15);
        let single = [ChildStat::new(0.37, 5)];
        assert!((coulom_parent_update(&single, PlayerRole::Min, 2.0, 16, 6).unwrap() - 0.37).abs() < 1e-15);
        let none = [ChildStat::new(0.5, 0)];
        assert!(matches!(
            coulom_parent_update(&none, PlayerRole::Max, 2.0, 16, 1),
            Err(BackupError::NoVisitedChildren)
        ));
    }

    #[test]
    fn coulom_min_uses_worst_child() {
        let kids = [ChildStat::new(0.9, 10), ChildStat::new(0.1, 10)];
        let q = coulom_parent_update(&kids, PlayerRole::Min, 1.0, 1000, 21).unwrap();
        // best for MIN is 0.1; beta = 10/11; mean = 0.5.
        let expected = (10.0 / 11.0) * 0.1 + (1.0 / 11.0) * 0.5;
        assert!((q - expected).abs() < 1e-15);
    }

    #[test]
    fn coulom_mean_weight_schedule() {
        assert_eq!(coulom_mean_weight(2.0, 16, 15), 2.0);
        assert_eq!(coulom_mean_weight(2.0, 16, 16), 2.0);
        assert_eq!(coulom_mean_weight(2.0, 16, 64), 6.0);
    }

    #[test]
    fn softmax_examples() {
        let kids = [ChildStat::new(0.8, 3), ChildStat::new(0.2, 1)];
        assert!((softmax_mean(&kids, PlayerRole::Max, 0.0).unwrap() - 0.65).abs() < 1e-15);
        assert!((softmax_mean(&kids, PlayerRole::Max, 1e6).unwrap() - 0.8).abs() < 1e-6);
        assert!((softmax_mean(&kids, PlayerRole::Min, 1e6).unwrap() - 0.2).abs() < 1e-6);
        for w in [0.0, 1.0, 50.0, 1e9] {
            let one = [ChildStat::new(0.42, 7)];
            assert_eq!(softmax_mean(&one, PlayerRole::Max, w).unwrap(), 0.42);
        }
        assert!(softmax_mean(&[ChildStat::new(0.5, 0)], PlayerRole::Max, 1.0).is_err());
    }

    #[test]
    fn softmax_ignores_unvisited() {
        let kids = [ChildStat::new(0.8, 3), ChildStat::new(1.0, 0)];
        assert!((softmax_mean(&kids, PlayerRole::Max, 100.0).unwrap() - 0.8).abs() < 1e-15);
    }
}
