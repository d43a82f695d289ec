use super::select::{select_child, Candidate, TreePolicy};
use crate::backup::BackupAccumulator;
use crate::games::{Action, PlayerRole};

pub type NodeId = usize;

/// One node of the search tree. Children of a node are stored contiguously.
#[derive(Debug, Clone)]
pub struct SearchNode {
    action: Option<Action>,
    pub role: PlayerRole,
    pub visits: u32,
    pub value: f64,
    pub prior: f64,
    pub accum: BackupAccumulator,
    first_child: u32,
    child_count: u32,
}

impl SearchNode {
    fn new(action: Option<Action>, role: PlayerRole, prior: f64) -> Self {
        Self {
            action,
            role,
            visits: 0,
            value: super::UNVISITED_VALUE,
            prior,
            accum: BackupAccumulator::default(),
            first_child: 0,
            child_count: 0,
        }
    }

    /// The action leading here from the parent (`None` at the root).
    pub fn action(&self) -> Option<Action> {
        self.action
    }

    pub fn is_expanded(&self) -> bool {
        self.child_count > 0
    }

    pub fn child_ids(&self) -> std::ops::Range<NodeId> {
        let first = self.first_child as usize;
        first..first + self.child_count as usize
    }
}

/// Arena-allocated search tree, inspectable after a search.
#[derive(Debug, Clone)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    returns: Option<Vec<Vec<f64>>>,
}

impl SearchTree {
    pub(super) fn new(root_role: PlayerRole, record_returns: bool) -> Self {
        Self {
            nodes: vec![SearchNode::new(None, root_role, 1.0)],
            returns: record_returns.then(|| vec![Vec::new()]),
        }
    }

    pub fn root_id(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id]
    }

    pub(super) fn node_mut(&mut self, id: NodeId) -> &mut SearchNode {
        &mut self.nodes[id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &SearchNode)> {
        self.nodes.iter().enumerate()
    }

    pub fn children(&self, id: NodeId) -> impl Iterator<Item = &SearchNode> {
        self.nodes[self.nodes[id].child_ids()].iter()
    }

    /// Returns backpropagated through `id`, when recording was requested.
    pub fn returns(&self, id: NodeId) -> Option<&[f64]> {
        self.returns.as_ref().map(|r| r[id].as_slice())
    }

    pub(super) fn log_return(&mut self, id: NodeId, r: f64) {
        if let Some(log) = self.returns.as_mut() {
            log[id].push(r);
        }
    }

    pub(super) fn expand(&mut self, id: NodeId, actions: &[Action], priors: &[f64]) {
        debug_assert!(!self.nodes[id].is_expanded());
        debug_assert_eq!(actions.len(), priors.len());
        let role = self.nodes[id].role.opponent();
        let first = self.nodes.len();
        self.nodes.extend(
            actions
                .iter()
                .zip(priors)
                .map(|(&a, &p)| SearchNode::new(Some(a), role, p)),
        );
        if let Some(log) = self.returns.as_mut() {
            log.resize(self.nodes.len(), Vec::new());
        }
        let node = &mut self.nodes[id];
        node.first_child = first as u32;
        node.child_count = actions.len() as u32;
    }

    pub(super) fn select(&self, id: NodeId, policy: TreePolicy, exploration: f64) -> NodeId {
        let node = &self.nodes[id];
        let pick = select_child(
            self.children(id).map(|c| Candidate {
                value: c.value,
                visits: c.visits,
                prior: c.prior,
            }),
            node.visits as f64,
            node.role,
            policy,
            exploration,
        )
        .expect("selection on an expanded node");
        node.first_child as usize + pick
    }

    /// Child with the most visits; ties go to the higher prior, then to the
    /// lowest action.
    pub fn most_visited_child(&self, id: NodeId) -> Option<NodeId> {
        let mut best: Option<NodeId> = None;
        for cid in self.nodes[id].child_ids() {
            let c = &self.nodes[cid];
            let better = match best {
                None => true,
                Some(b) => {
                    let b = &self.nodes[b];
                    c.visits > b.visits || (c.visits == b.visits && c.prior > b.prior)
                }
            };
            if better {
                best = Some(cid);
            }
        }
        best
    }
}
