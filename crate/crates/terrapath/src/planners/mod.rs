//! The six benchmarked global planners behind one interface.
//!
//! Every planner is a deterministic function of `(grid, task, config)`,
//! including the sampling planners through their seeded RNG. Planners poll
//! their deadline at least once per iteration and return a `timeout` result
//! with the best partial path instead of overrunning the budget.

mod graph;
mod rrt;
mod theta_star;

pub use graph::{plan_astar, plan_dijkstra};
pub use rrt::{DynamicRrt, WaypointTree, plan_dynamic_rrt, plan_rrt, plan_rrt_connect};
pub use theta_star::plan_thetastar;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::grid::{Cell, GridPath, OccupancyGrid};
use crate::tasks::PlanningTask;

/// Planner selector, in canonical report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlannerKind {
    Dijkstra,
    Astar,
    Thetastar,
    Rrt,
    RrtConnect,
    DynamicRrt,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 6] = [
        PlannerKind::Dijkstra,
        PlannerKind::Astar,
        PlannerKind::Thetastar,
        PlannerKind::Rrt,
        PlannerKind::RrtConnect,
        PlannerKind::DynamicRrt,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PlannerKind::Dijkstra => "dijkstra",
            PlannerKind::Astar => "astar",
            PlannerKind::Thetastar => "thetastar",
            PlannerKind::Rrt => "rrt",
            PlannerKind::RrtConnect => "rrt_connect",
            PlannerKind::DynamicRrt => "dynamic_rrt",
        }
    }

    pub fn is_sampling(&self) -> bool {
        matches!(
            self,
            PlannerKind::Rrt | PlannerKind::RrtConnect | PlannerKind::DynamicRrt
        )
    }
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> crate::error::Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "dijkstra" => Ok(PlannerKind::Dijkstra),
            "astar" | "a_star" => Ok(PlannerKind::Astar),
            "thetastar" | "theta_star" => Ok(PlannerKind::Thetastar),
            "rrt" => Ok(PlannerKind::Rrt),
            "rrt_connect" => Ok(PlannerKind::RrtConnect),
            "dynamic_rrt" => Ok(PlannerKind::DynamicRrt),
            other => Err(crate::error::Error::Format(format!(
                "unknown planner {other:?}"
            ))),
        }
    }
}

/// Planner parameters. `epsilon` is the sampling-planner step size in cell
/// units; `goal_tolerance` defaults to 0 for graph planners and to
/// `epsilon` for sampling planners (which still snap onto the exact goal
/// cell through a line-of-sight check).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub planner_kind: PlannerKind,
    pub epsilon: f64,
    pub max_iterations: u64,
    pub goal_tolerance: Option<f64>,
    pub goal_bias: f64,
    pub seed: u64,
}

impl PlannerConfig {
    pub fn new(planner_kind: PlannerKind) -> Self {
        PlannerConfig {
            planner_kind,
            epsilon: 5.0,
            max_iterations: 100_000,
            goal_tolerance: None,
            goal_bias: 0.05,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Effective goal tolerance for this planner kind.
    pub fn effective_goal_tolerance(&self) -> f64 {
        self.goal_tolerance
            .unwrap_or(if self.planner_kind.is_sampling() {
                self.epsilon
            } else {
                0.0
            })
    }

    pub fn validate(&self) -> crate::error::Result<()> {
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(crate::error::Error::InvalidConfig(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(crate::error::Error::InvalidConfig(format!(
                "goal_bias must be in [0, 1], got {}",
                self.goal_bias
            )));
        }
        if self.max_iterations == 0 {
            return Err(crate::error::Error::InvalidConfig(
                "max_iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome classification of one planner invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Success,
    Timeout,
    Exhausted,
    NoPath,
}

impl PlanStatus {
    pub fn is_success(&self) -> bool {
        matches!(self, PlanStatus::Success)
    }
}

/// Result of one planner invocation. On success the path runs start to
/// goal; on failure it is the best partial path toward the goal (at least
/// `[start]`). `cost` is the planner's own accounting of the successful
/// path cost; graph planners compute it exactly so that equal-cost
/// planners report bit-identical values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub status: PlanStatus,
    #[serde(rename = "waypoints")]
    pub path: GridPath,
    pub cost: Option<f64>,
    pub planning_time_s: f64,
    pub peak_memory_kib: u64,
    pub iterations: u64,
    pub expansions: u64,
    pub config: PlannerConfig,
}

impl PlanResult {
    fn new(status: PlanStatus, path: GridPath, config: &PlannerConfig) -> Self {
        debug_assert!(!path.is_empty(), "plan results always carry a path");
        PlanResult {
            status,
            path,
            cost: None,
            planning_time_s: 0.0,
            peak_memory_kib: 0,
            iterations: 0,
            expansions: 0,
            config: config.clone(),
        }
    }
}

/// Cooperative deadline handed to every planner loop.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Deadline {
    end: Instant,
}

impl Deadline {
    pub fn starting_now(budget_s: f64) -> Self {
        let budget = Duration::from_secs_f64(budget_s.max(0.0));
        Deadline {
            end: Instant::now() + budget,
        }
    }

    pub fn exceeded(&self) -> bool {
        Instant::now() >= self.end
    }
}

/// Run the planner selected by `cfg.planner_kind`.
pub fn plan(grid: &OccupancyGrid, task: &PlanningTask, cfg: &PlannerConfig) -> PlanResult {
    match cfg.planner_kind {
        PlannerKind::Dijkstra => plan_dijkstra(grid, task, cfg),
        PlannerKind::Astar => plan_astar(grid, task, cfg),
        PlannerKind::Thetastar => plan_thetastar(grid, task, cfg),
        PlannerKind::Rrt => plan_rrt(grid, task, cfg),
        PlannerKind::RrtConnect => plan_rrt_connect(grid, task, cfg),
        PlannerKind::DynamicRrt => plan_dynamic_rrt(grid, task, cfg),
    }
}

/// Shared entry validation: trivial and hopeless tasks short-circuit before
/// any search. Returns `Err(result)` when the search should not run.
#[allow(clippy::result_large_err)]
pub(crate) fn preflight(
    grid: &OccupancyGrid,
    task: &PlanningTask,
    cfg: &PlannerConfig,
) -> Result<(), PlanResult> {
    if !grid.is_free(task.start) || !grid.is_free(task.goal) {
        return Err(PlanResult::new(
            PlanStatus::NoPath,
            GridPath::single(task.start),
            cfg,
        ));
    }
    if task.start == task.goal {
        let mut r = PlanResult::new(PlanStatus::Success, GridPath::single(task.start), cfg);
        r.cost = Some(0.0);
        return Err(r);
    }
    Ok(())
}

/// Finalize timing/memory instrumentation around a planner body.
pub(crate) fn instrumented(cfg: &PlannerConfig, body: impl FnOnce() -> PlanResult) -> PlanResult {
    let start = Instant::now();
    let (mut result, peak_kib) = crate::memtrack::measure_peak(body);
    result.planning_time_s = start.elapsed().as_secs_f64();
    result.peak_memory_kib = peak_kib;
    debug_assert_eq!(result.config, *cfg);
    result
}

/// Distance-to-goal used to pick the best partial path endpoint, with a
/// row-major tie-break so failures are reproducible.
pub(crate) fn closer_to_goal(goal: Cell, candidate: Cell, incumbent: Cell) -> bool {
    let (dc, di) = (candidate.distance(goal), incumbent.distance(goal));
    dc < di || (dc == di && candidate < incumbent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_parsing_and_order() {
        assert_eq!("astar".parse::<PlannerKind>().unwrap(), PlannerKind::Astar);
        assert_eq!(
            "rrt-connect".parse::<PlannerKind>().unwrap(),
            PlannerKind::RrtConnect
        );
        assert!("prm".parse::<PlannerKind>().is_err());
        assert!(PlannerKind::Dijkstra < PlannerKind::DynamicRrt);
    }

    #[test]
    fn goal_tolerance_defaults() {
        let graph = PlannerConfig::new(PlannerKind::Astar);
        assert_eq!(graph.effective_goal_tolerance(), 0.0);
        let sampling = PlannerConfig::new(PlannerKind::Rrt);
        assert_eq!(sampling.effective_goal_tolerance(), sampling.epsilon);
        let pinned = PlannerConfig {
            goal_tolerance: Some(1.5),
            ..PlannerConfig::new(PlannerKind::Rrt)
        };
        assert_eq!(pinned.effective_goal_tolerance(), 1.5);
    }

    #[test]
    fn config_validation() {
        let mut cfg = PlannerConfig::new(PlannerKind::Rrt);
        assert!(cfg.validate().is_ok());
        cfg.goal_bias = 1.5;
        assert!(cfg.validate().is_err());
        cfg.goal_bias = 0.5;
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn status_serializes_snake_case() {
        assert_eq!(
            serde_json::to_string(&PlanStatus::NoPath).unwrap(),
            "\"no_path\""
        );
        assert_eq!(
            serde_json::to_string(&PlannerKind::RrtConnect).unwrap(),
            "\"rrt_connect\""
        );
    }
}
