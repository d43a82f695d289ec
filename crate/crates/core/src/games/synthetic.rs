//! Synthetic b-ary min-max trees with injectable level-k search traps.
//!
//! Leaves are never stored. A leaf's return is a pure function of the tree
//! seed and the leaf's index, and trap subtrees are described by a handful of
//! parameters, so generating even a very large tree is O(1) and every search
//! sees bitwise-identical values.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{minimax_value, Action, GameError, GameState, PlayerRole};
use crate::seed::{derive, unit_f64};

const LEAF_TAG: u64 = 0x4C45_4146;
const TRAP_TAG: u64 = 0x5452_4150;
const KEY_TAG: u64 = 0x4B45_5953;

fn default_leaf_win_prob() -> f64 {
    0.5
}

/// Parameters of a synthetic tree. Identical specs generate identical trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticTreeSpec {
    pub branching: u32,
    pub depth: u32,
    #[serde(default = "default_leaf_win_prob")]
    pub leaf_win_prob: f64,
    /// Level of the injected traps (plies of the opponent's forced win).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap_level: Option<u32>,
    #[serde(default)]
    pub trap_count: u32,
    /// Total root prior mass shared by the trap actions. `None` keeps the
    /// root priors uniform.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trap_prior: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl SyntheticTreeSpec {
    pub fn new(branching: u32, depth: u32, leaf_win_prob: f64, seed: u64) -> Self {
        Self {
            branching,
            depth,
            leaf_win_prob,
            trap_level: None,
            trap_count: 0,
            trap_prior: None,
            seed,
        }
    }

    pub fn with_traps(mut self, level: u32, count: u32) -> Self {
        self.trap_level = Some(level);
        self.trap_count = count;
        self
    }

    pub fn with_trap_prior(mut self, prior: f64) -> Self {
        self.trap_prior = Some(prior);
        self
    }

    pub fn validate(&self) -> Result<(), GameError> {
        let invalid = |m: String| Err(GameError::InvalidSpec(m));
        if self.branching < 2 {
            return invalid(format!("branching must be at least 2, got {}", self.branching));
        }
        if self.depth < 1 {
            return invalid("depth must be at least 1".into());
        }
        if (self.branching as u64)
            .checked_pow(self.depth)
            .is_none_or(|n| n > 1 << 62)
        {
            return invalid(format!(
                "{}^{} leaves do not fit a 62-bit index",
                self.branching, self.depth
            ));
        }
        if !(0.0..=1.0).contains(&self.leaf_win_prob) {
            return invalid(format!("leaf_win_prob {} outside [0, 1]", self.leaf_win_prob));
        }
        if let Some(k) = self.trap_level {
            if k < 1 {
                return invalid("trap_level must be positive".into());
            }
            if k + 1 > self.depth {
                return Err(GameError::TooShallowForTrap {
                    level: k,
                    depth: self.depth,
                    needed: k + 1,
                });
            }
        }
        if self.trap_count > 0 && self.trap_level.is_none() {
            return invalid("trap_count > 0 requires trap_level".into());
        }
        if self.trap_count >= self.branching {
            return invalid(format!(
                "trap_count {} leaves no non-trap root action (branching {})",
                self.trap_count, self.branching
            ));
        }
        if let Some(q) = self.trap_prior {
            if !(q > 0.0 && q < 1.0) {
                return invalid(format!("trap_prior {q} outside (0, 1)"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Trap {
    action: Action,
    level: u32,
    seed: u64,
}

#[derive(Debug)]
struct SyntheticTree {
    spec: SyntheticTreeSpec,
    traps: Vec<Trap>,
    /// `powers[i] = b^i` for `i` in `0..=depth`.
    powers: Vec<u64>,
    key_seed: u64,
}

impl SyntheticTree {
    fn new(spec: SyntheticTreeSpec, traps: Vec<Trap>) -> Self {
        let b = spec.branching as u64;
        let powers = (0..=spec.depth).map(|i| b.pow(i)).collect();
        let key_seed = traps.iter().fold(derive(spec.seed, &[KEY_TAG]), |acc, t| {
            derive(acc, &[t.action as u64, t.level as u64, t.seed])
        });
        Self {
            spec,
            traps,
            powers,
            key_seed,
        }
    }

    fn b(&self) -> u64 {
        self.spec.branching as u64
    }

    /// Digit chosen at ply `ply` (0-based) on the path to leaf `index`.
    fn digit(&self, index: u64, ply: u32) -> u64 {
        (index / self.powers[(self.spec.depth - 1 - ply) as usize]) % self.b()
    }

    fn leaf_value(&self, index: u64) -> f64 {
        let first = self.digit(index, 0) as Action;
        if let Some(trap) = self.traps.iter().find(|t| t.action == first) {
            return self.trap_leaf_value(trap, index);
        }
        let u = unit_f64(derive(self.spec.seed, &[LEAF_TAG, index]));
        if u < self.spec.leaf_win_prob {
            1.0
        } else {
            0.0
        }
    }

    /// Inside a trap subtree the opponent has one designated move at each of
    /// its plies; following them for `level` plies reaches positions whose
    /// leaves are all lost for the root player. Every deviation by the
    /// opponent leads to leaves that are all won, which is what makes the
    /// trap look attractive to averaging searches.
    fn trap_leaf_value(&self, trap: &Trap, index: u64) -> f64 {
        let d = self.spec.depth;
        for ply in 1..=trap.level {
            // Opponent of the root (MAX) moves at odd depths.
            if ply % 2 == 1 {
                let node = index / self.powers[(d - ply) as usize];
                let designated = derive(trap.seed, &[ply as u64, node]) % self.b();
                if self.digit(index, ply) != designated {
                    return 1.0;
                }
            }
        }
        0.0
    }
}

/// A node of a synthetic tree: the level (`depth`) and the base-b path index.
#[derive(Debug, Clone)]
pub struct SyntheticState {
    tree: Arc<SyntheticTree>,
    depth: u32,
    index: u64,
}

impl SyntheticState {
    pub fn spec(&self) -> &SyntheticTreeSpec {
        &self.tree.spec
    }

    /// Root actions that lead into an injected trap, in injection order.
    pub fn trap_actions(&self) -> Vec<Action> {
        self.tree.traps.iter().map(|t| t.action).collect()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn is_root(&self) -> bool {
        self.depth == 0
    }

    /// Returns the root of the tree this node belongs to.
    pub fn root(&self) -> SyntheticState {
        SyntheticState {
            tree: Arc::clone(&self.tree),
            depth: 0,
            index: 0,
        }
    }
}

impl GameState for SyntheticState {
    fn to_move(&self) -> PlayerRole {
        if self.depth % 2 == 0 {
            PlayerRole::Max
        } else {
            PlayerRole::Min
        }
    }

    fn actions(&self) -> Vec<Action> {
        if self.depth >= self.tree.spec.depth {
            Vec::new()
        } else {
            (0..self.tree.spec.branching as Action).collect()
        }
    }

    fn apply(&self, action: Action) -> Self {
        debug_assert!(self.depth < self.tree.spec.depth);
        debug_assert!((action as u64) < self.tree.b());
        SyntheticState {
            tree: Arc::clone(&self.tree),
            depth: self.depth + 1,
            index: self.index * self.tree.b() + action as u64,
        }
    }

    fn terminal_return(&self) -> Option<f64> {
        (self.depth == self.tree.spec.depth).then(|| self.tree.leaf_value(self.index))
    }

    fn priors(&self) -> Vec<f64> {
        let b = self.tree.spec.branching as usize;
        if self.depth >= self.tree.spec.depth {
            return Vec::new();
        }
        match self.tree.spec.trap_prior {
            Some(mass) if self.depth == 0 && !self.tree.traps.is_empty() => {
                let traps = self.tree.traps.len();
                let trap_share = mass / traps as f64;
                let other_share = (1.0 - mass) / (b - traps) as f64;
                (0..b)
                    .map(|a| {
                        if self.tree.traps.iter().any(|t| t.action == a) {
                            trap_share
                        } else {
                            other_share
                        }
                    })
                    .collect()
            }
            _ => vec![1.0 / b as f64; b],
        }
    }

    fn state_key(&self) -> u64 {
        derive(self.tree.key_seed, &[self.depth as u64, self.index])
    }
}

/// Generates the root of a synthetic tree, injecting `trap_count` traps of
/// level `trap_level` when requested.
///
/// Trap trees are generated so that exactly the trap actions lose for the
/// root player; a seed whose natural subtrees contain another losing root
/// action is rejected with [`GameError::Degenerate`].
pub fn generate_synthetic_tree(spec: &SyntheticTreeSpec) -> Result<SyntheticState, GameError> {
    spec.validate()?;
    let mut root = SyntheticState {
        tree: Arc::new(SyntheticTree::new(spec.clone(), Vec::new())),
        depth: 0,
        index: 0,
    };
    if spec.trap_count == 0 {
        return Ok(root);
    }
    let level = spec.trap_level.expect("validated");
    for i in 0..spec.trap_count {
        root = inject_trap(&root, level, derive(spec.seed, &[TRAP_TAG, i as u64]))?;
    }
    let traps = root.trap_actions();
    for a in root.actions() {
        if !traps.contains(&a) && minimax_value(&root.apply(a))? < 0.5 {
            return Err(GameError::Degenerate(format!(
                "non-trap root action {a} is lost under natural play"
            )));
        }
    }
    Ok(root)
}

/// Rewrites the subtree behind one seeded root action so that the opponent
/// of the root player has a forced win within `level` plies.
pub fn inject_trap(root: &SyntheticState, level: u32, seed: u64) -> Result<SyntheticState, GameError> {
    if !root.is_root() {
        return Err(GameError::NotRoot);
    }
    if level < 1 {
        return Err(GameError::InvalidSpec("trap level must be positive".into()));
    }
    let spec = &root.tree.spec;
    if level + 1 > spec.depth {
        return Err(GameError::TooShallowForTrap {
            level,
            depth: spec.depth,
            needed: level + 1,
        });
    }
    let existing = root.trap_actions();
    let free: Vec<Action> = root.actions().into_iter().filter(|a| !existing.contains(a)).collect();
    if free.len() < 2 {
        return Err(GameError::Degenerate(
            "no root action would remain outside the traps".into(),
        ));
    }
    let action = free[(derive(seed, &[0]) % free.len() as u64) as usize];
    let mut traps = root.tree.traps.clone();
    traps.push(Trap {
        action,
        level,
        seed: derive(seed, &[1]),
    });
    let trapped = SyntheticState {
        tree: Arc::new(SyntheticTree::new(spec.clone(), traps)),
        depth: 0,
        index: 0,
    };
    let mut survivor = false;
    for a in free.iter().copied().filter(|&a| a != action) {
        if minimax_value(&trapped.apply(a))? >= 0.5 {
            survivor = true;
            break;
        }
    }
    if !survivor {
        return Err(GameError::Degenerate(
            "every sibling of the trap action is lost".into(),
        ));
    }
    Ok(trapped)
}
