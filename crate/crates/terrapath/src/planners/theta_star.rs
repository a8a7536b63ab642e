//! Any-angle planning with Lazy Theta*.
//!
//! Successors are optimistically connected straight to their grandparent
//! (path-2 relaxation, Euclidean edge weights); the line-of-sight check is
//! deferred until a node is popped, and a failed check falls back to the
//! best already-expanded grid neighbor. Every edge on a returned path has
//! therefore passed a line-of-sight check, so consecutive waypoints are
//! mutually visible rather than grid-adjacent.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::grid::{Cell, GridPath, OccupancyGrid};
use crate::tasks::PlanningTask;

use super::{
    Deadline, PlanResult, PlanStatus, PlannerConfig, closer_to_goal, instrumented, preflight,
};

#[derive(PartialEq)]
struct OpenEntry {
    f: f64,
    index: u32,
}

impl Eq for OpenEntry {}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Costs are finite sums of distances, never NaN.
        self.f
            .partial_cmp(&other.f)
            .unwrap()
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn plan_thetastar(
    grid: &OccupancyGrid,
    task: &PlanningTask,
    cfg: &PlannerConfig,
) -> PlanResult {
    instrumented(cfg, || search(grid, task, cfg))
}

fn search(grid: &OccupancyGrid, task: &PlanningTask, cfg: &PlannerConfig) -> PlanResult {
    if let Err(early) = preflight(grid, task, cfg) {
        return early;
    }
    let deadline = Deadline::starting_now(task.budget_s);
    let (start, goal) = (task.start, task.goal);
    let width = grid.width();

    let mut g = vec![f64::INFINITY; grid.len()];
    let mut parent: Vec<u32> = vec![u32::MAX; grid.len()];
    let mut closed = vec![false; grid.len()];
    let mut open = BinaryHeap::new();

    let start_idx = start.index(width);
    g[start_idx] = 0.0;
    parent[start_idx] = start_idx as u32;
    open.push(std::cmp::Reverse(OpenEntry {
        f: start.distance(goal),
        index: start_idx as u32,
    }));

    let cell_of = |idx: usize| Cell::new(idx / width, idx % width);
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
            continue;
        }
        let cell = cell_of(idx);

        // Deferred visibility check: if the optimistic grandparent link is
        // blocked, reconnect through the cheapest expanded grid neighbor.
        if idx != start_idx {
            let p = cell_of(parent[idx] as usize);
            if !grid.line_of_sight(p, cell) {
                let mut best: Option<(f64, usize)> = None;
                for (n, move_cost) in grid.neighbors(cell) {
                    let ni = n.index(width);
                    if !closed[ni] {
                        continue;
                    }
                    let candidate = g[ni] + move_cost;
                    if best.is_none_or(|(bc, bi)| candidate < bc || (candidate == bc && ni < bi)) {
                        best = Some((candidate, ni));
                    }
                }
                let (cost, pi) = best.expect("a reached node has an expanded neighbor");
                g[idx] = cost;
                parent[idx] = pi as u32;
            }
        }
        closed[idx] = true;
        expansions += 1;
        if closer_to_goal(goal, cell, nearest) {
            nearest = cell;
        }
        if cell == goal {
            let path = reconstruct(&parent, width, start_idx, idx);
            let mut result = PlanResult::new(PlanStatus::Success, path, cfg);
            result.cost = Some(g[idx]);
            result.iterations = iterations;
            result.expansions = expansions;
            return result;
        }

        let anchor_idx = parent[idx] as usize;
        let anchor = cell_of(anchor_idx);
        let g_anchor = g[anchor_idx];
        for (n, _) in grid.neighbors(cell) {
            let ni = n.index(width);
            if closed[ni] {
                continue;
            }
            // Path-2: assume visibility from the anchor; verified at pop.
            let tentative = g_anchor + anchor.distance(n);
            if tentative < g[ni] {
                g[ni] = tentative;
                parent[ni] = anchor_idx as u32;
                open.push(std::cmp::Reverse(OpenEntry {
                    f: tentative + n.distance(goal),
                    index: ni as u32,
                }));
            }
        }
    }

    let status = if timed_out {
        PlanStatus::Timeout
    } else {
        PlanStatus::NoPath
    };
    let path = reconstruct(&parent, width, start_idx, nearest.index(width));
    let mut result = PlanResult::new(status, path, cfg);
    result.iterations = iterations;
    result.expansions = expansions;
    result
}

fn reconstruct(parent: &[u32], width: usize, start_idx: usize, end_idx: usize) -> GridPath {
    let mut cells = Vec::new();
    let mut idx = end_idx;
    loop {
        cells.push(Cell::new(idx / width, idx % width));
        if idx == start_idx {
            break;
        }
        idx = parent[idx] as usize;
    }
    cells.reverse();
    GridPath::new(cells)
}
