use serde::{Deserialize, Serialize};

use crate::games::PlayerRole;

/// Tree policy used during selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreePolicy {
    /// `Q_a + C·sqrt(ln N_parent / (N_a + 1))`
    Ucb1,
    /// `Q_a + C·π_a·sqrt(N_parent) / (N_a + 1)`
    #[default]
    Puct,
}

/// Value assumed for a child that has never been visited.
pub const UNVISITED_VALUE: f64 = 0.5;

/// Statistics of one child as seen by the tree policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub value: f64,
    pub visits: u32,
    pub prior: f64,
}

/// Selection score of a child. At MIN nodes the exploitation term is
/// `1 - Q` so that both sides maximize their own winning chance.
#[inline]
pub fn selection_score(
    policy: TreePolicy,
    exploration: f64,
    child: &Candidate,
    parent_visits: f64,
    role: PlayerRole,
) -> f64 {
    let q = if child.visits == 0 { UNVISITED_VALUE } else { child.value };
    let exploit = role.perspective(q);
    let denom = child.visits as f64 + 1.0;
    let explore = match policy {
        TreePolicy::Ucb1 => (parent_visits.max(1.0).ln() / denom).sqrt(),
        TreePolicy::Puct => child.prior * parent_visits.sqrt() / denom,
    };
    exploit + exploration * explore
}

/// Index of the child maximizing the selection score; the lowest index wins
/// ties. `None` when there are no children.
pub fn select_child<I>(
    children: I,
    parent_visits: f64,
    role: PlayerRole,
    policy: TreePolicy,
    exploration: f64,
) -> Option<usize>
where
    I: IntoIterator<Item = Candidate>,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in children.into_iter().enumerate() {
        let s = selection_score(policy, exploration, &c, parent_visits, role);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}
