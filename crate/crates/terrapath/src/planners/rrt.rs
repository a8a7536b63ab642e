//! Sampling-based planners: RRT, bidirectional RRT-Connect, and a
//! replanning-capable Dynamic RRT.
//!
//! Targets are sampled in continuous coordinates over the rectangle of cell
//! centers and extensions step at most `epsilon` from the nearest tree node
//! toward the sample. Each extension endpoint snaps to its nearest cell
//! center before validation, so trees and returned paths are cell
//! sequences whose consecutive waypoints always pass the grid
//! line-of-sight check. A node within the goal tolerance that can see the
//! goal finishes the plan with an exact goal snap.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Cell, GridPath, OccupancyGrid};
use crate::tasks::PlanningTask;

use super::{Deadline, PlanResult, PlanStatus, PlannerConfig, instrumented, preflight};

/// Probability that Dynamic RRT samples a cached waypoint instead of a
/// uniform point (after the goal-bias draw).
pub const WAYPOINT_BIAS: f64 = 0.1;

/// Rooted tree over grid cells with parent links. Supports the trimming
/// needed by Dynamic RRT: invalidating a node removes it and its whole
/// subtree while keeping every surviving parent link intact.
#[derive(Clone, Debug, Default)]
pub struct WaypointTree {
    cells: Vec<Cell>,
    parents: Vec<Option<u32>>,
}

impl WaypointTree {
    pub fn rooted_at(root: Cell) -> Self {
        WaypointTree {
            cells: vec![root],
            parents: vec![None],
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cell(&self, idx: usize) -> Cell {
        self.cells[idx]
    }

    pub fn parent(&self, idx: usize) -> Option<usize> {
        self.parents[idx].map(|p| p as usize)
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells.contains(&cell)
    }

    pub fn add(&mut self, cell: Cell, parent: usize) -> usize {
        debug_assert!(parent < self.len());
        self.cells.push(cell);
        self.parents.push(Some(parent as u32));
        self.cells.len() - 1
    }

    /// Index of the node nearest to a continuous point; ties go to the
    /// earliest-added node.
    pub fn nearest_to_point(&self, x: f64, y: f64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in self.cells.iter().enumerate() {
            let (dx, dy) = (c.col as f64 - x, c.row as f64 - y);
            let d = dx * dx + dy * dy;
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Node nearest to a cell center.
    pub fn nearest_to_cell(&self, cell: Cell) -> usize {
        self.nearest_to_point(cell.col as f64, cell.row as f64)
    }

    /// Waypoints from the root to `idx`, inclusive.
    pub fn branch(&self, idx: usize) -> Vec<Cell> {
        let mut out = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            out.push(self.cells[i]);
            cur = self.parent(i);
        }
        out.reverse();
        out
    }

    /// Remove `idx` and every descendant, compacting indices. The root
    /// cannot be removed. Returns the number of removed nodes.
    pub fn invalidate(&mut self, idx: usize) -> usize {
        assert!(idx < self.len(), "node index out of range");
        assert!(idx != 0, "cannot invalidate the root");
        let mut doomed = vec![false; self.len()];
        doomed[idx] = true;
        // Children always follow their parents, so one forward pass marks
        // the whole subtree.
        for i in idx + 1..self.len() {
            if let Some(p) = self.parent(i)
                && doomed[p]
            {
                doomed[i] = true;
            }
        }
        let mut remap = vec![u32::MAX; self.len()];
        let mut cells = Vec::with_capacity(self.len());
        let mut parents = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            if doomed[i] {
                continue;
            }
            remap[i] = cells.len() as u32;
            cells.push(self.cells[i]);
            parents.push(self.parents[i].map(|p| remap[p as usize]));
        }
        let removed = self.len() - cells.len();
        self.cells = cells;
        self.parents = parents;
        removed
    }

    /// Every non-root node's parent exists and precedes it.
    pub fn is_consistent(&self) -> bool {
        self.parents.iter().enumerate().all(|(i, p)| match p {
            None => i == 0,
            Some(p) => (*p as usize) < i,
        })
    }
}

/// Clamp a continuous point into the rectangle of cell centers and snap it
/// to the nearest cell.
fn snap(grid: &OccupancyGrid, x: f64, y: f64) -> Cell {
    let max_c = (grid.width() - 1) as f64;
    let max_r = (grid.height() - 1) as f64;
    Cell::new(
        y.clamp(0.0, max_r).round() as usize,
        x.clamp(0.0, max_c).round() as usize,
    )
}

/// One steering step: at most `epsilon` from `from` toward `target`.
fn steer(from: Cell, target: (f64, f64), epsilon: f64) -> (f64, f64) {
    let (fx, fy) = (from.col as f64, from.row as f64);
    let (dx, dy) = (target.0 - fx, target.1 - fy);
    let d = (dx * dx + dy * dy).sqrt();
    if d <= epsilon || d == 0.0 {
        target
    } else {
        (fx + epsilon * dx / d, fy + epsilon * dy / d)
    }
}

/// Try to grow `tree` one step toward `target`; returns the new node index
/// when the extension is collision-free and lands on a new free cell.
fn extend(
    grid: &OccupancyGrid,
    tree: &mut WaypointTree,
    target: (f64, f64),
    epsilon: f64,
) -> Option<usize> {
    let ni = tree.nearest_to_point(target.0, target.1);
    let from = tree.cell(ni);
    let p = steer(from, target, epsilon);
    let cell = snap(grid, p.0, p.1);
    if cell == from || !grid.is_free(cell) || tree.contains(cell) {
        return None;
    }
    if !grid.line_of_sight(from, cell) {
        return None;
    }
    Some(tree.add(cell, ni))
}

/// Branch to the tree node nearest the goal; the failure-path convention
/// shared by all sampling planners.
fn partial_toward_goal(tree: &WaypointTree, goal: Cell) -> GridPath {
    GridPath::new(tree.branch(tree.nearest_to_cell(goal)))
}

fn finish(
    status: PlanStatus,
    path: GridPath,
    cost_on_success: bool,
    iterations: u64,
    expansions: u64,
    cfg: &PlannerConfig,
) -> PlanResult {
    let mut r = PlanResult::new(status, path, cfg);
    if cost_on_success {
        r.cost = Some(r.path.length().expect("plan paths are non-empty"));
    }
    r.iterations = iterations;
    r.expansions = expansions;
    r
}

/// Single-tree RRT with goal biasing.
pub fn plan_rrt(grid: &OccupancyGrid, task: &PlanningTask, cfg: &PlannerConfig) -> PlanResult {
    instrumented(cfg, || {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        grow_single_tree(grid, task, cfg, &mut rng, None)
    })
}

/// Shared single-tree growth loop. `waypoint_cache` enables the Dynamic
/// RRT sampling variant that revisits waypoints of a previous solution.
fn grow_single_tree(
    grid: &OccupancyGrid,
    task: &PlanningTask,
    cfg: &PlannerConfig,
    rng: &mut ChaCha8Rng,
    waypoint_cache: Option<&[Cell]>,
) -> PlanResult {
    if let Err(early) = preflight(grid, task, cfg) {
        return early;
    }
    let deadline = Deadline::starting_now(task.budget_s);
    let goal = task.goal;
    let tolerance = cfg.effective_goal_tolerance();
    let mut tree = WaypointTree::rooted_at(task.start);
    let mut iterations = 0u64;
    let mut expansions = 0u64;

    while iterations < cfg.max_iterations {
        iterations += 1;
        if deadline.exceeded() {
            return finish(
                PlanStatus::Timeout,
                partial_toward_goal(&tree, goal),
                false,
                iterations,
                expansions,
                cfg,
            );
        }
        let target = sample_target(grid, goal, cfg, rng, waypoint_cache);
        let Some(new_idx) = extend(grid, &mut tree, target, cfg.epsilon) else {
            continue;
        };
        expansions += 1;
        let new_cell = tree.cell(new_idx);
        if new_cell.distance(goal) <= tolerance && grid.line_of_sight(new_cell, goal) {
            let mut waypoints = tree.branch(new_idx);
            if new_cell != goal {
                waypoints.push(goal);
            }
            return finish(
                PlanStatus::Success,
                GridPath::new(waypoints),
                true,
                iterations,
                expansions,
                cfg,
            );
        }
    }
    finish(
        PlanStatus::Exhausted,
        partial_toward_goal(&tree, goal),
        false,
        iterations,
        expansions,
        cfg,
    )
}

fn sample_target(
    grid: &OccupancyGrid,
    goal: Cell,
    cfg: &PlannerConfig,
    rng: &mut ChaCha8Rng,
    waypoint_cache: Option<&[Cell]>,
) -> (f64, f64) {
    let r: f64 = rng.random();
    if r < cfg.goal_bias {
        return (goal.col as f64, goal.row as f64);
    }
    if let Some(cache) = waypoint_cache
        && !cache.is_empty()
        && r < cfg.goal_bias + WAYPOINT_BIAS
    {
        let w = cache[rng.random_range(0..cache.len())];
        return (w.col as f64, w.row as f64);
    }
    (
        rng.random_range(0.0..=(grid.width() - 1) as f64),
        rng.random_range(0.0..=(grid.height() - 1) as f64),
    )
}

/// Bidirectional RRT-Connect: trees grow alternately from start and goal;
/// after every successful extension the other tree greedily connects
/// toward the new node in `epsilon` steps until blocked or joined.
pub fn plan_rrt_connect(
    grid: &OccupancyGrid,
    task: &PlanningTask,
    cfg: &PlannerConfig,
) -> PlanResult {
    instrumented(cfg, || connect_search(grid, task, cfg))
}

fn connect_search(grid: &OccupancyGrid, task: &PlanningTask, cfg: &PlannerConfig) -> PlanResult {
    if let Err(early) = preflight(grid, task, cfg) {
        return early;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let deadline = Deadline::starting_now(task.budget_s);
    let mut start_tree = WaypointTree::rooted_at(task.start);
    let mut goal_tree = WaypointTree::rooted_at(task.goal);
    // `from_start` tracks which tree is being extended this round.
    let mut from_start = true;
    let mut iterations = 0u64;
    let mut expansions = 0u64;

    while iterations < cfg.max_iterations {
        iterations += 1;
        if deadline.exceeded() {
            return finish(
                PlanStatus::Timeout,
                partial_toward_goal(&start_tree, task.goal),
                false,
                iterations,
                expansions,
                cfg,
            );
        }
        let (tree_a, tree_b) = if from_start {
            (&mut start_tree, &mut goal_tree)
        } else {
            (&mut goal_tree, &mut start_tree)
        };
        // The "goal" of tree A is tree B's root; bias draws aim there.
        let other_root = tree_b.cell(0);
        let target = {
            let r: f64 = rng.random();
            if r < cfg.goal_bias {
                (other_root.col as f64, other_root.row as f64)
            } else {
                (
                    rng.random_range(0.0..=(grid.width() - 1) as f64),
                    rng.random_range(0.0..=(grid.height() - 1) as f64),
                )
            }
        };
        if let Some(new_idx) = extend(grid, tree_a, target, cfg.epsilon) {
            expansions += 1;
            let bridge = tree_a.cell(new_idx);
            if let Some((b_idx, added)) = connect(grid, tree_b, bridge, cfg.epsilon, &deadline) {
                expansions += added;
                let (start_branch, goal_branch) = if from_start {
                    (start_tree.branch(new_idx), goal_tree.branch(b_idx))
                } else {
                    (start_tree.branch(b_idx), goal_tree.branch(new_idx))
                };
                let mut waypoints = start_branch;
                let mut tail = goal_branch;
                tail.reverse();
                if waypoints.last() == tail.first() {
                    tail.remove(0);
                }
                waypoints.extend(tail);
                return finish(
                    PlanStatus::Success,
                    GridPath::new(waypoints),
                    true,
                    iterations,
                    expansions,
                    cfg,
                );
            }
        }
        from_start = !from_start;
    }
    finish(
        PlanStatus::Exhausted,
        partial_toward_goal(&start_tree, task.goal),
        false,
        iterations,
        expansions,
        cfg,
    )
}

/// Greedily extend `tree` toward `target` until blocked or joined. On a
/// join, returns the index of the tree node that sees `target` plus the
/// number of nodes added along the way.
fn connect(
    grid: &OccupancyGrid,
    tree: &mut WaypointTree,
    target: Cell,
    epsilon: f64,
    deadline: &Deadline,
) -> Option<(usize, u64)> {
    let mut cur = tree.nearest_to_cell(target);
    let mut added = 0u64;
    let mut last_dist = f64::INFINITY;
    loop {
        if deadline.exceeded() {
            return None;
        }
        let cur_cell = tree.cell(cur);
        let dist = cur_cell.distance(target);
        if dist >= last_dist {
            return None; // no progress; treat as blocked
        }
        last_dist = dist;
        if dist <= epsilon && grid.line_of_sight(cur_cell, target) {
            return Some((cur, added));
        }
        let p = steer(cur_cell, (target.col as f64, target.row as f64), epsilon);
        let cell = snap(grid, p.0, p.1);
        if cell == cur_cell || !grid.is_free(cell) || !grid.line_of_sight(cur_cell, cell) {
            return None;
        }
        if let Some(existing) = tree.cells.iter().position(|&c| c == cell) {
            // Already in the tree: continue from the existing node, whose
            // own parent edge was validated when it was added.
            cur = existing;
        } else {
            cur = tree.add(cell, cur);
            added += 1;
        }
    }
}

/// Replanning-capable RRT: keeps its tree and the waypoints of the last
/// solution. Obstacle changes are handled by trimming invalidated subtrees
/// and regrowing, with sampling biased toward cached waypoints. On a
/// static map a fresh planner behaves like RRT with the caching overhead.
pub struct DynamicRrt {
    cfg: PlannerConfig,
    tree: WaypointTree,
    waypoint_cache: Vec<Cell>,
    planned_root: Option<Cell>,
    calls: u64,
}

impl DynamicRrt {
    pub fn new(cfg: PlannerConfig) -> Self {
        DynamicRrt {
            cfg,
            tree: WaypointTree::default(),
            waypoint_cache: Vec::new(),
            planned_root: None,
            calls: 0,
        }
    }

    pub fn tree(&self) -> &WaypointTree {
        &self.tree
    }

    pub fn waypoint_cache(&self) -> &[Cell] {
        &self.waypoint_cache
    }

    /// Drop the subtree under the first tree node occupying `cell`, e.g.
    /// after that cell was discovered to be blocked. Returns the number of
    /// removed nodes.
    pub fn invalidate_cell(&mut self, cell: Cell) -> usize {
        match self.tree.cells.iter().position(|&c| c == cell) {
            Some(0) | None => 0,
            Some(idx) => self.tree.invalidate(idx),
        }
    }

    pub fn plan(&mut self, grid: &OccupancyGrid, task: &PlanningTask) -> PlanResult {
        let cfg = self.cfg.clone();
        instrumented(&cfg, || self.plan_inner(grid, task))
    }

    fn plan_inner(&mut self, grid: &OccupancyGrid, task: &PlanningTask) -> PlanResult {
        if let Err(early) = preflight(grid, task, &self.cfg) {
            return early;
        }
        // Reuse the trimmed tree only when it is still rooted at this
        // task's start; otherwise regrow from scratch.
        if self.planned_root != Some(task.start) || self.tree.is_empty() {
            self.tree = WaypointTree::rooted_at(task.start);
            self.planned_root = Some(task.start);
        }
        // Successive replan calls advance the stream so regrowth does not
        // replay the exact sample sequence of the first attempt.
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed.wrapping_add(self.calls));
        self.calls += 1;

        let deadline = Deadline::starting_now(task.budget_s);
        let goal = task.goal;
        let tolerance = self.cfg.effective_goal_tolerance();
        let mut iterations = 0u64;
        let mut expansions = 0u64;

        while iterations < self.cfg.max_iterations {
            iterations += 1;
            if deadline.exceeded() {
                return finish(
                    PlanStatus::Timeout,
                    partial_toward_goal(&self.tree, goal),
                    false,
                    iterations,
                    expansions,
                    &self.cfg,
                );
            }
            let cache = (!self.waypoint_cache.is_empty()).then_some(self.waypoint_cache.as_slice());
            let target = sample_target(grid, goal, &self.cfg, &mut rng, cache);
            let Some(new_idx) = extend(grid, &mut self.tree, target, self.cfg.epsilon) else {
                continue;
            };
            expansions += 1;
            let new_cell = self.tree.cell(new_idx);
            if new_cell.distance(goal) <= tolerance && grid.line_of_sight(new_cell, goal) {
                let mut waypoints = self.tree.branch(new_idx);
                if new_cell != goal {
                    waypoints.push(goal);
                }
                self.waypoint_cache = waypoints.clone();
                return finish(
                    PlanStatus::Success,
                    GridPath::new(waypoints),
                    true,
                    iterations,
                    expansions,
                    &self.cfg,
                );
            }
        }
        finish(
            PlanStatus::Exhausted,
            partial_toward_goal(&self.tree, goal),
            false,
            iterations,
            expansions,
            &self.cfg,
        )
    }
}

/// One-shot Dynamic RRT invocation (fresh planner state per call), the form
/// used by the benchmark harness on static maps.
pub fn plan_dynamic_rrt(
    grid: &OccupancyGrid,
    task: &PlanningTask,
    cfg: &PlannerConfig,
) -> PlanResult {
    DynamicRrt::new(cfg.clone()).plan(grid, task)
}
