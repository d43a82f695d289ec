//! The four-phase search loop: selection, expansion, evaluation and
//! backpropagation.
//!
//! A node is evaluated directly the first time a simulation reaches it. On
//! the next visit it is expanded with all its children, one child is chosen
//! by the tree policy and that child is evaluated. Every internal node
//! therefore satisfies `N = 1 + Σ N_child`, and the root's children share
//! `simulations - 1` visits.

mod select;
mod tree;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::backup::{BackupError, BackupStrategy, ChildStat};
use crate::games::{evaluate, Action, Evaluator, GameError, GameState};

pub use select::{select_child, selection_score, Candidate, TreePolicy, UNVISITED_VALUE};
pub use tree::{NodeId, SearchNode, SearchTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("cannot search from a terminal position")]
    TerminalRoot,
    #[error("simulation budget must be positive")]
    ZeroBudget,
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Backup(#[from] BackupError),
}

fn default_simulations() -> u32 {
    1000
}

fn default_exploration() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    #[serde(default = "default_simulations")]
    pub simulations: u32,
    #[serde(default)]
    pub policy: TreePolicy,
    #[serde(default = "default_exploration")]
    pub exploration: f64,
    #[serde(default)]
    pub backup: BackupStrategy,
    #[serde(default)]
    pub evaluator: Evaluator,
    #[serde(default)]
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            simulations: default_simulations(),
            policy: TreePolicy::default(),
            exploration: default_exploration(),
            backup: BackupStrategy::Standard,
            evaluator: Evaluator::RandomRollout,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn with_backup(mut self, backup: BackupStrategy) -> Self {
        self.backup = backup;
        self
    }

    pub fn with_simulations(mut self, simulations: u32) -> Self {
        self.simulations = simulations;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_policy(mut self, policy: TreePolicy, exploration: f64) -> Self {
        self.policy = policy;
        self.exploration = exploration;
        self
    }

    pub fn with_evaluator(mut self, evaluator: Evaluator) -> Self {
        self.evaluator = evaluator;
        self
    }
}

/// Root-child statistics reported after a search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChildSummary {
    pub action: Action,
    pub visits: u32,
    pub value: f64,
    pub prior: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// Root child with the most visits (prior, then lowest action, on ties).
    pub best_action: Action,
    pub root_value: f64,
    pub root_visits: u32,
    pub children: Vec<ChildSummary>,
    pub principal_variation: Vec<Action>,
}

impl SearchResult {
    pub fn visit_distribution(&self) -> Vec<(Action, u32)> {
        self.children.iter().map(|c| (c.action, c.visits)).collect()
    }
}

/// Runs `config.simulations` iterations from `root`.
pub fn run_search<G: GameState>(root: &G, config: &SearchConfig) -> Result<SearchResult, SearchError> {
    search(root, config, false).map(|(result, _)| result)
}

/// Like [`run_search`] but also returns the tree. With `record_returns`, every
/// node keeps the sequence of returns backpropagated through it.
pub fn search<G: GameState>(
    root: &G,
    config: &SearchConfig,
    record_returns: bool,
) -> Result<(SearchResult, SearchTree), SearchError> {
    if root.is_terminal() {
        return Err(SearchError::TerminalRoot);
    }
    if config.simulations == 0 {
        return Err(SearchError::ZeroBudget);
    }
    let mut tree = SearchTree::new(root.to_move(), record_returns);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut path: Vec<NodeId> = Vec::new();
    let mut scratch: Vec<ChildStat> = Vec::new();

    for _ in 0..config.simulations {
        path.clear();
        path.push(tree.root_id());
        let mut state = root.clone();

        while tree.node(*path.last().unwrap()).is_expanded() {
            let id = *path.last().unwrap();
            let child = tree.select(id, config.policy, config.exploration);
            state = state.apply(tree.node(child).action().expect("non-root"));
            path.push(child);
        }

        let leaf = *path.last().unwrap();
        let r = match state.terminal_return() {
            Some(r) => r,
            None if tree.node(leaf).visits == 0 => evaluate(&state, &config.evaluator, &mut rng)?,
            None => {
                tree.expand(leaf, &state.actions(), &state.priors());
                let child = tree.select(leaf, config.policy, config.exploration);
                state = state.apply(tree.node(child).action().expect("non-root"));
                path.push(child);
                match state.terminal_return() {
                    Some(r) => r,
                    None => evaluate(&state, &config.evaluator, &mut rng)?,
                }
            }
        };
        backpropagate(&mut tree, &path, r, &config.backup, &mut scratch)?;
    }

    if !tree.node(tree.root_id()).is_expanded() {
        // A single-simulation budget only evaluates the root; expand it so a
        // move can still be chosen from the priors.
        tree.expand(tree.root_id(), &root.actions(), &root.priors());
    }
    Ok((summarize(&tree), tree))
}

/// Propagates return `r` from the last node of `path` up to the first.
///
/// Per-node strategies update every node with its own visit index. Parent
/// strategies give the leaf a standard update and recompute each ancestor
/// from its children after incrementing its visit count.
pub fn backpropagate(
    tree: &mut SearchTree,
    path: &[NodeId],
    r: f64,
    strategy: &BackupStrategy,
    scratch: &mut Vec<ChildStat>,
) -> Result<(), SearchError> {
    let last = path.len() - 1;
    for (i, &id) in path.iter().enumerate().rev() {
        if i == last || !strategy.recomputes_parents() {
            let node = tree.node_mut(id);
            let n = node.visits;
            node.value = strategy.update_node(&mut node.accum, node.value, r, n);
            node.visits += 1;
        } else {
            scratch.clear();
            scratch.extend(tree.children(id).map(|c| ChildStat::new(c.value, c.visits)));
            let node = tree.node_mut(id);
            node.visits += 1;
            let role = node.role;
            let visits = node.visits;
            let value = strategy
                .recompute_parent(scratch, role, visits)
                .expect("parent strategy")?;
            // Parents also keep the plain average of their returns.
            let node = tree.node_mut(id);
            node.accum.push(1.0, r);
            node.value = value;
        }
        tree.log_return(id, r);
    }
    Ok(())
}

fn summarize(tree: &SearchTree) -> SearchResult {
    let root = tree.node(tree.root_id());
    let children = tree
        .children(tree.root_id())
        .map(|c| ChildSummary {
            action: c.action().expect("child"),
            visits: c.visits,
            value: c.value,
            prior: c.prior,
        })
        .collect();
    let best = tree.most_visited_child(tree.root_id()).expect("root expanded");
    let mut principal_variation = Vec::new();
    let mut id = tree.root_id();
    while let Some(child) = tree.most_visited_child(id) {
        if tree.node(child).visits == 0 {
            break;
        }
        principal_variation.push(tree.node(child).action().expect("child"));
        id = child;
    }
    SearchResult {
        best_action: tree.node(best).action().expect("child"),
        root_value: root.value,
        root_visits: root.visits,
        children,
        principal_variation,
    }
}
