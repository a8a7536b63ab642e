//! Start/goal task generation and the task CSV format.
//!
//! One task per map: both endpoints lie in the largest free connected
//! component (movement connectivity, i.e. 8-connected with the corner
//! rule), and are pushed as far apart as a double BFS sweep reaches. The
//! double sweep is the standard linear-time pseudo-diameter approximation;
//! every tie is broken by smallest row-major index, so sampling is
//! reproducible bit-exactly for a fixed `(grid, seed)`.

use std::collections::VecDeque;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Cell, OccupancyGrid};

pub const DEFAULT_BUDGET_S: f64 = 60.0;

/// One planning trial: where to go on which map, and how long a planner
/// may spend.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanningTask {
    pub grid_name: String,
    pub start: Cell,
    pub goal: Cell,
    pub budget_s: f64,
    pub seed: u64,
}

impl PlanningTask {
    pub fn new(grid_name: impl Into<String>, start: Cell, goal: Cell) -> Self {
        PlanningTask {
            grid_name: grid_name.into(),
            start,
            goal,
            budget_s: DEFAULT_BUDGET_S,
            seed: 0,
        }
    }

    /// Degenerate tasks arise only when the free space is a single cell.
    pub fn is_degenerate(&self) -> bool {
        self.start == self.goal
    }
}

/// The maximum-cardinality free connected component under movement
/// connectivity, as row-major-sorted cells. Ties between equal-size
/// components go to the one containing the smallest row-major cell.
pub fn largest_free_component(grid: &OccupancyGrid) -> Result<Vec<Cell>> {
    let mut seen = vec![false; grid.len()];
    let mut best: Option<Vec<Cell>> = None;
    for cell in grid.iter_cells() {
        let idx = cell.index(grid.width());
        if seen[idx] || !grid.is_free(cell) {
            continue;
        }
        let mut component = vec![cell];
        let mut queue = VecDeque::from([cell]);
        seen[idx] = true;
        while let Some(cur) = queue.pop_front() {
            for (n, _) in grid.neighbors(cur) {
                let ni = n.index(grid.width());
                if !seen[ni] {
                    seen[ni] = true;
                    component.push(n);
                    queue.push_back(n);
                }
            }
        }
        // Scan order is row-major, so the first component of a given size
        // found is the tie-break winner.
        if best.as_ref().is_none_or(|b| component.len() > b.len()) {
            best = Some(component);
        }
    }
    let mut component = best.ok_or(Error::NoFreeSpace)?;
    component.sort_unstable();
    Ok(component)
}

/// BFS hop distances (unit cost per move, diagonal included) from `from`,
/// restricted to free cells. Unreachable cells are `usize::MAX`.
pub fn hop_distances(grid: &OccupancyGrid, from: Cell) -> Vec<usize> {
    let mut dist = vec![usize::MAX; grid.len()];
    if !grid.is_free(from) {
        return dist;
    }
    dist[from.index(grid.width())] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(cur) = queue.pop_front() {
        let d = dist[cur.index(grid.width())];
        for (n, _) in grid.neighbors(cur) {
            let ni = n.index(grid.width());
            if dist[ni] == usize::MAX {
                dist[ni] = d + 1;
                queue.push_back(n);
            }
        }
    }
    dist
}

/// Farthest reachable cell by hop count, ties broken by smallest row-major
/// index. Returns `(cell, hops)`.
fn farthest_cell(grid: &OccupancyGrid, from: Cell) -> (Cell, usize) {
    let dist = hop_distances(grid, from);
    let mut best = (from, 0usize);
    for (i, &d) in dist.iter().enumerate() {
        if d != usize::MAX && d > best.1 {
            best = (Cell::new(i / grid.width(), i % grid.width()), d);
        }
    }
    best
}

/// Deterministically sample a far-apart start/goal pair inside the largest
/// free component: pick a seed-selected component cell, sweep BFS to the
/// farthest cell `u`, sweep again from `u` to the farthest cell `v`;
/// `start = u`, `goal = v`.
pub fn sample_task(grid: &OccupancyGrid, seed: u64) -> Result<PlanningTask> {
    let component = largest_free_component(grid)?;
    if component.len() == 1 {
        let c = component[0];
        let mut task = PlanningTask::new(grid.name(), c, c);
        task.seed = seed;
        return Ok(task);
    }
    let origin = component[(seed % component.len() as u64) as usize];
    let (start, _) = farthest_cell(grid, origin);
    let (goal, _) = farthest_cell(grid, start);
    let mut task = PlanningTask::new(grid.name(), start, goal);
    task.seed = seed;
    Ok(task)
}

const TASK_HEADER: &str = "grid_name,start_row,start_col,goal_row,goal_col,budget_s,seed";

/// Write tasks as CSV (stable column order, header included).
pub fn save_tasks(tasks: &[PlanningTask], path: &Path) -> Result<()> {
    let mut out = String::from(TASK_HEADER);
    out.push('\n');
    for t in tasks {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            t.grid_name, t.start.row, t.start.col, t.goal.row, t.goal.col, t.budget_s, t.seed
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a task CSV written by [`save_tasks`]. An empty file is an empty
/// task list; malformed rows are reported with their line number.
pub fn load_tasks(path: &Path) -> Result<Vec<PlanningTask>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_tasks(&text, &path.display().to_string())
}

pub fn parse_tasks(text: &str, source: &str) -> Result<Vec<PlanningTask>> {
    let mut tasks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line == TASK_HEADER {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(Error::parse(
                source,
                i + 1,
                format!("expected 7 fields, got {}", fields.len()),
            ));
        }
        let parse_usize = |s: &str, what: &str| -> Result<usize> {
            s.trim()
                .parse()
                .map_err(|_| Error::parse(source, i + 1, format!("bad {what} {s:?}")))
        };
        let task = PlanningTask {
            grid_name: fields[0].trim().to_string(),
            start: Cell::new(
                parse_usize(fields[1], "start_row")?,
                parse_usize(fields[2], "start_col")?,
            ),
            goal: Cell::new(
                parse_usize(fields[3], "goal_row")?,
                parse_usize(fields[4], "goal_col")?,
            ),
            budget_s: fields[5].trim().parse().map_err(|_| {
                Error::parse(source, i + 1, format!("bad budget_s {:?}", fields[5]))
            })?,
            seed: fields[6]
                .trim()
                .parse()
                .map_err(|_| Error::parse(source, i + 1, format!("bad seed {:?}", fields[6])))?,
        };
        tasks.push(task);
    }
    Ok(tasks)
}
