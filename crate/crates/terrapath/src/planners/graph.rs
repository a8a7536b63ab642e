//! Dijkstra and A* on the 8-connected grid.
//!
//! Move costs are 1 and sqrt(2), so every path cost has the form
//! `a + b*sqrt(2)` with integer move counts. Costs are carried as those
//! integer pairs and compared exactly (sqrt(2) is irrational, so distinct
//! pairs never collide), which makes tie-breaking, heuristic consistency
//! and the Dijkstra/A* cost equality hold bit-exactly on every platform.
//! The octile heuristic is itself of that form, so A* priorities stay
//! exact as well.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::{Cell, GridPath, OccupancyGrid};
use crate::tasks::PlanningTask;

use super::{
    Deadline, PlanResult, PlanStatus, PlannerConfig, closer_to_goal, instrumented, preflight,
};

/// Exact grid path cost: `straight + diagonal * sqrt(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct OctileCost {
    straight: u64,
    diagonal: u64,
}

impl OctileCost {
    pub const ZERO: OctileCost = OctileCost {
        straight: 0,
        diagonal: 0,
    };

    pub fn step(self, diagonal: bool) -> OctileCost {
        OctileCost {
            straight: self.straight + (!diagonal) as u64,
            diagonal: self.diagonal + diagonal as u64,
        }
    }

    pub fn plus(self, other: OctileCost) -> OctileCost {
        OctileCost {
            straight: self.straight + other.straight,
            diagonal: self.diagonal + other.diagonal,
        }
    }

    /// Octile distance between two cells as an exact cost.
    pub fn octile(a: Cell, b: Cell) -> OctileCost {
        let dr = a.row.abs_diff(b.row) as u64;
        let dc = a.col.abs_diff(b.col) as u64;
        OctileCost {
            straight: dr.max(dc) - dr.min(dc),
            diagonal: dr.min(dc),
        }
    }

    /// Canonical float value; one expression, so equal costs yield
    /// bit-identical floats.
    pub fn value(self) -> f64 {
        self.straight as f64 + self.diagonal as f64 * std::f64::consts::SQRT_2
    }
}

impl Ord for OctileCost {
    fn cmp(&self, other: &Self) -> Ordering {
        // self < other  iff  (s1 - s2) < (d2 - d1) * sqrt(2).
        let p = self.straight as i128 - other.straight as i128;
        let q = other.diagonal as i128 - self.diagonal as i128;
        if q == 0 {
            return p.cmp(&0);
        }
        if p <= 0 && q > 0 {
            return Ordering::Less;
        }
        if p >= 0 && q < 0 {
            return Ordering::Greater;
        }
        // Same strict sign: square both sides. Equality cannot occur for
        // nonzero p, q because sqrt(2) is irrational.
        if p > 0 {
            (p * p).cmp(&(2 * q * q))
        } else {
            (2 * q * q).cmp(&(p * p))
        }
    }
}

impl PartialOrd for OctileCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Open-list entry ordered by (priority, row-major index); wrapped in
/// `Reverse` for min-heap behavior.
#[derive(PartialEq, Eq)]
struct OpenEntry {
    priority: OctileCost,
    index: u32,
}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.priority
            .cmp(&other.priority)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

enum Heuristic {
    Zero,
    Octile,
}

impl Heuristic {
    fn estimate(&self, from: Cell, goal: Cell) -> OctileCost {
        match self {
            Heuristic::Zero => OctileCost::ZERO,
            Heuristic::Octile => OctileCost::octile(from, goal),
        }
    }
}

/// Shortest grid path by uniform-cost search (Dijkstra). Pop-order ties
/// break on the smaller row-major index.
pub fn plan_dijkstra(grid: &OccupancyGrid, task: &PlanningTask, cfg: &PlannerConfig) -> PlanResult {
    instrumented(cfg, || search(grid, task, cfg, Heuristic::Zero))
}

/// A* with the octile-distance heuristic, which is consistent under the
/// unit/sqrt(2) move costs: returned costs equal Dijkstra's exactly.
pub fn plan_astar(grid: &OccupancyGrid, task: &PlanningTask, cfg: &PlannerConfig) -> PlanResult {
    instrumented(cfg, || search(grid, task, cfg, Heuristic::Octile))
}

fn search(
    grid: &OccupancyGrid,
    task: &PlanningTask,
    cfg: &PlannerConfig,
    heuristic: Heuristic,
) -> PlanResult {
    if let Err(early) = preflight(grid, task, cfg) {
        return early;
    }
    let deadline = Deadline::starting_now(task.budget_s);
    let (start, goal) = (task.start, task.goal);
    let width = grid.width();

    let mut g: Vec<Option<OctileCost>> = vec![None; grid.len()];
    let mut parent: Vec<u32> = vec![u32::MAX; grid.len()];
    let mut closed = vec![false; grid.len()];
    let mut open = BinaryHeap::new();

    let start_idx = start.index(width);
    g[start_idx] = Some(OctileCost::ZERO);
    open.push(std::cmp::Reverse(OpenEntry {
        priority: heuristic.estimate(start, goal),
        index: start_idx as u32,
    }));

    let mut iterations: u64 = 0;
    let mut expansions: u64 = 0;
    let mut nearest = start;
    let mut timed_out = false;

    while let Some(std::cmp::Reverse(entry)) = open.pop() {
        iterations += 1;
        if deadline.exceeded() {
            timed_out = true;
            break;
        }
        let idx = entry.index as usize;
        if closed[idx] {
            continue; // stale queue entry
        }
        closed[idx] = true;
        expansions += 1;
        let cell = Cell::new(idx / width, idx % width);
        if closer_to_goal(goal, cell, nearest) {
            nearest = cell;
        }
        if cell == goal {
            let cost = g[idx].expect("expanded cells have costs");
            let path = reconstruct(&parent, width, start, goal);
            let mut result = PlanResult::new(PlanStatus::Success, path, cfg);
            result.cost = Some(cost.value());
            result.iterations = iterations;
            result.expansions = expansions;
            return result;
        }
        let g_here = g[idx].expect("expanded cells have costs");
        for (n, move_cost) in grid.neighbors(cell) {
            let ni = n.index(width);
            if closed[ni] {
                continue;
            }
            let tentative = g_here.step(move_cost > 1.0);
            if g[ni].is_none_or(|old| tentative < old) {
                g[ni] = Some(tentative);
                parent[ni] = idx as u32;
                open.push(std::cmp::Reverse(OpenEntry {
                    priority: tentative.plus(heuristic.estimate(n, goal)),
                    index: ni as u32,
                }));
            }
        }
    }

    // Timeout or exhausted component: best partial path toward the goal.
    let status = if timed_out {
        PlanStatus::Timeout
    } else {
        PlanStatus::NoPath
    };
    let path = reconstruct(&parent, width, start, nearest);
    let mut result = PlanResult::new(status, path, cfg);
    result.iterations = iterations;
    result.expansions = expansions;
    result
}

fn reconstruct(parent: &[u32], width: usize, start: Cell, end: Cell) -> GridPath {
    let mut cells = vec![end];
    let mut idx = end.index(width);
    let start_idx = start.index(width);
    while idx != start_idx {
        let p = parent[idx];
        debug_assert_ne!(p, u32::MAX, "path endpoint must be reached");
        idx = p as usize;
        cells.push(Cell::new(idx / width, idx % width));
    }
    cells.reverse();
    GridPath::new(cells)
}
