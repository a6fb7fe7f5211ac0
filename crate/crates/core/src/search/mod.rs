//! Bounded-suboptimal multi-heuristic best-first search over the scene tree.
//!
//! The anchor queue orders states by `g` (the admissible heuristic is zero).
//! FOCAL holds the open states whose `g` is within `w` times the anchor
//! minimum. Each round expands, for every inadmissible heuristic in turn, the
//! FOCAL state that heuristic ranks best, then the anchor minimum. The search
//! stops once the best goal found costs at most `w` times the anchor minimum,
//! which bounds it by `w` times the optimum.

mod heuristics;
mod oracle;

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use heuristics::{h_depth, h_overlap, Heuristic};
pub use oracle::{brute_force_oracle, OracleResult, ORACLE_GUARD};

use crate::cost::CostBreakdown;
use crate::error::{Error, Result};
use crate::msgt::{is_goal, successors, CanonicalKey, ObjectPoseHypothesis, SceneState, SceneTask};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Suboptimality factor, at least 1.
    pub w: f64,
    /// Wall-clock budget; `None` searches until the bound is certified.
    pub time_limit: Option<Duration>,
    /// Inadmissible heuristics, expanded round-robin before the anchor.
    pub heuristics: Vec<Heuristic>,
    /// Threads used for successor generation.
    pub workers: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            w: 3.0,
            time_limit: None,
            heuristics: vec![Heuristic::Depth, Heuristic::Overlap],
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

impl SearchConfig {
    /// Optimal search: `w = 1` with no inadmissible heuristics.
    pub fn optimal() -> Self {
        Self {
            w: 1.0,
            heuristics: Vec::new(),
            ..Self::default()
        }
    }

    /// Settings for crowded scenes such as a chessboard (`w = 15`); pair
    /// with a 7.5 mm `delta` on the task.
    pub fn crowded() -> Self {
        Self {
            w: 15.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.w >= 1.0) || !self.w.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "w must be >= 1, got {}",
                self.w
            )));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers must be >= 1".into()));
        }
        Ok(())
    }
}

/// Counters reported while searching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    pub expansions: u64,
    pub generated: u64,
    pub best_cost: Option<u64>,
    pub min_key: Option<u64>,
    pub open: usize,
    pub elapsed_secs: f64,
}

/// Hooks into the search loop. Called from the orchestrating thread only,
/// in a deterministic order.
pub trait SearchObserver {
    fn on_expand(&mut self, _state: &SceneState) {}
    /// A newly generated (non-duplicate) child.
    fn on_edge(&mut self, _parent: &SceneState, _child: &SceneState, _cost: &CostBreakdown) {}
    fn on_progress(&mut self, _stats: &SearchStats) {}
}

impl SearchObserver for () {}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub goal: Option<SceneState>,
    /// Cost of `goal`, when present.
    pub cost: Option<u64>,
    /// `w` times the anchor minimum key at termination.
    pub bound_certificate: f64,
    pub expansions: u64,
    pub generated: u64,
    pub wall_time: Duration,
    pub timed_out: bool,
}

impl SearchResult {
    pub fn assignments(&self) -> &[ObjectPoseHypothesis] {
        self.goal.as_ref().map_or(&[], |g| g.assignments())
    }

    /// Whether the returned cost is certified to be within the bound.
    pub fn certified(&self) -> bool {
        match self.cost {
            Some(c) => !self.timed_out && c as f64 <= self.bound_certificate,
            None => false,
        }
    }
}

type AnchorEntry = (u64, u64, Arc<CanonicalKey>, usize);
type FocalEntry = (u64, u64, u64, Arc<CanonicalKey>, usize);

struct Node {
    state: SceneState,
    key: Arc<CanonicalKey>,
    h: Vec<u64>,
    depth_h: u64,
}

impl Node {
    fn anchor_entry(&self, id: usize) -> AnchorEntry {
        (self.state.g(), self.depth_h, self.key.clone(), id)
    }

    fn focal_entry(&self, i: usize, id: usize) -> FocalEntry {
        (
            self.h[i],
            self.depth_h,
            self.state.g(),
            self.key.clone(),
            id,
        )
    }
}

/// OPEN with one anchor ordering and one ordering per inadmissible heuristic.
/// Goal states sit in the anchor queue only, so they bound `min_key` but are
/// never expanded.
struct Open {
    nodes: Vec<Option<Node>>,
    anchor: BTreeSet<AnchorEntry>,
    focal: Vec<BTreeSet<FocalEntry>>,
}

impl Open {
    fn new(heuristics: usize) -> Self {
        Self {
            nodes: Vec::new(),
            anchor: BTreeSet::new(),
            focal: vec![BTreeSet::new(); heuristics],
        }
    }

    fn insert(&mut self, node: Node, goal: bool) {
        let id = self.nodes.len();
        self.anchor.insert(node.anchor_entry(id));
        if !goal {
            for (i, q) in self.focal.iter_mut().enumerate() {
                q.insert(node.focal_entry(i, id));
            }
        }
        self.nodes.push(Some(node));
    }

    fn min_key(&self) -> Option<u64> {
        self.anchor.first().map(|e| e.0)
    }

    fn take(&mut self, id: usize) -> Node {
        let node = self.nodes[id].take().expect("node already expanded");
        self.anchor.remove(&node.anchor_entry(id));
        for (i, q) in self.focal.iter_mut().enumerate() {
            q.remove(&node.focal_entry(i, id));
        }
        node
    }

    /// Best state under heuristic `i` among those with `g <= bound`.
    fn focal_pick(&self, i: usize, bound: f64) -> Option<usize> {
        self.focal[i]
            .iter()
            .find(|e| e.2 as f64 <= bound)
            .map(|e| e.4)
    }

    fn anchor_pick(&self) -> Option<usize> {
        self.anchor.first().map(|e| e.3)
    }
}

/// Runs the search with no observer.
pub fn solve(task: &SceneTask, cfg: &SearchConfig) -> Result<SearchResult> {
    solve_with_observer(task, cfg, &mut ())
}

pub fn solve_with_observer(
    task: &SceneTask,
    cfg: &SearchConfig,
    observer: &mut dyn SearchObserver,
) -> Result<SearchResult> {
    task.validate()?;
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot start worker pool: {e}")))?;

    let start = Instant::now();
    let k = task.k();
    let make_node = |state: SceneState| {
        let h = cfg.heuristics.iter().map(|h| h.eval(&state, k)).collect();
        Node {
            key: Arc::new(state.canonical_key().clone()),
            depth_h: h_depth(&state, k),
            h,
            state,
        }
    };

    let mut open = Open::new(cfg.heuristics.len());
    let mut seen: HashSet<CanonicalKey> = HashSet::new();
    let root = SceneState::root(task);
    seen.insert(root.canonical_key().clone());
    let root_is_goal = is_goal(&root, task);
    open.insert(make_node(root), root_is_goal);

    let mut best_goal: Option<SceneState> = None;
    let mut expansions = 0u64;
    let mut generated = 0u64;
    let mut timed_out = false;
    let slots = cfg.heuristics.len() + 1;
    let mut slot = 0usize;

    let min_key_at_end = loop {
        let Some(min_key) = open.min_key() else {
            // tree exhausted: the best goal, if any, is optimal
            break best_goal.as_ref().map(|g| g.g());
        };
        let bound = cfg.w * min_key as f64;
        if let Some(goal) = &best_goal {
            if goal.g() as f64 <= bound {
                break Some(min_key);
            }
        }
        if cfg.time_limit.is_some_and(|limit| start.elapsed() >= limit) {
            timed_out = true;
            break Some(min_key);
        }

        let pick = if slot < cfg.heuristics.len() {
            open.focal_pick(slot, bound)
        } else {
            open.anchor_pick()
        };
        slot = (slot + 1) % slots;
        let Some(id) = pick else { continue };

        let node = open.take(id);
        expansions += 1;
        observer.on_expand(&node.state);
        let children = pool.install(|| successors(&node.state, task));
        for (child, cost) in children {
            if !seen.insert(child.canonical_key().clone()) {
                continue;
            }
            generated += 1;
            observer.on_edge(&node.state, &child, &cost);
            let goal = is_goal(&child, task);
            if goal && best_goal.as_ref().is_none_or(|b| child.g() < b.g()) {
                best_goal = Some(child.clone());
            }
            open.insert(make_node(child), goal);
        }
        observer.on_progress(&SearchStats {
            expansions,
            generated,
            best_cost: best_goal.as_ref().map(|g| g.g()),
            min_key: open.min_key(),
            open: open.anchor.len(),
            elapsed_secs: start.elapsed().as_secs_f64(),
        });
    };

    let cost = best_goal.as_ref().map(|g| g.g());
    Ok(SearchResult {
        goal: best_goal,
        cost,
        bound_certificate: min_key_at_end.map_or(f64::INFINITY, |m| cfg.w * m as f64),
        expansions,
        generated,
        wall_time: start.elapsed(),
        timed_out,
    })
}
