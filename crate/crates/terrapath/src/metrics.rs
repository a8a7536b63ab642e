//! Per-trial and aggregate evaluation metrics.
//!
//! Per trial: path length, distance left to the goal, deviation from the
//! A* reference length, trajectory smoothness (mean absolute heading
//! change per segment transition) and obstacle clearance (mean exact
//! Euclidean distance from waypoints to the nearest obstacle, grid
//! boundary included).
//!
//! Aggregation populations: success rate, planning time, distance left and
//! peak memory average over all trials; path length, deviation, smoothness
//! and clearance average over successful trials only, reporting 0 when a
//! planner never succeeded.

use serde::{Deserialize, Serialize};

use crate::edt::DistanceField;
use crate::error::{Error, Result};
use crate::grid::{Cell, GridPath, OccupancyGrid};
use crate::planners::{PlanResult, PlannerKind};
use crate::tasks::PlanningTask;

/// One planner invocation with its derived metrics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub dataset: String,
    pub task: PlanningTask,
    pub planner: PlannerKind,
    pub result: PlanResult,
    pub derived: DerivedMetrics,
}

/// Metrics computed from a [`PlanResult`] after the fact. Success-only
/// metrics are `None` on failed trials; `path_deviation` additionally
/// requires a successful A* reference on the same task.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedMetrics {
    pub path_length: f64,
    pub distance_left: f64,
    pub path_deviation: Option<f64>,
    pub smoothness_rad_per_move: Option<f64>,
    pub clearance_cells: Option<f64>,
}

/// One planner's averaged row for one dataset; the row shape of the
/// benchmark report tables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub planner: PlannerKind,
    pub dataset: String,
    pub success_rate_pct: f64,
    pub mean_path_length: f64,
    pub mean_planning_time_s: f64,
    pub mean_distance_left: f64,
    pub mean_path_deviation: f64,
    pub mean_smoothness: f64,
    pub mean_clearance: f64,
    pub mean_peak_memory_kib: f64,
    pub n_trials: usize,
}

/// Success rate in percent over a non-empty single-dataset record slice.
/// Full precision; table rendering rounds to integer percent.
pub fn success_rate(records: &[TrialRecord]) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::Format(
            "success_rate over an empty record set".into(),
        ));
    }
    let successes = records
        .iter()
        .filter(|r| r.result.status.is_success())
        .count();
    Ok(successes as f64 / records.len() as f64 * 100.0)
}

/// Euclidean distance from the (possibly partial) path endpoint to the
/// goal; 0 on success by the goal-snap contract.
pub fn distance_left(result: &PlanResult, goal: Cell) -> f64 {
    match result.path.last() {
        Some(end) => end.distance(goal),
        None => f64::NAN,
    }
}

/// Signed length difference against the A* reference on the same task
/// (negative for shorter-than-A* any-angle paths).
pub fn path_deviation(record: &TrialRecord, astar_reference: &TrialRecord) -> Result<f64> {
    if !record.result.status.is_success() || !astar_reference.result.status.is_success() {
        return Err(Error::Format(
            "path deviation requires both trials to have succeeded".into(),
        ));
    }
    Ok(record.result.path.length()? - astar_reference.result.path.length()?)
}

/// Mean absolute heading change between successive segments, in radians
/// per move, in [0, pi]. Paths with fewer than three waypoints turn
/// nowhere and score 0; zero-length segments are skipped.
pub fn smoothness(path: &GridPath) -> f64 {
    let mut headings = Vec::new();
    for (a, b) in path.segments() {
        if a == b {
            continue;
        }
        let dy = b.row as f64 - a.row as f64;
        let dx = b.col as f64 - a.col as f64;
        headings.push(dy.atan2(dx));
    }
    if headings.len() < 2 {
        return 0.0;
    }
    let turns: f64 = headings
        .windows(2)
        .map(|w| {
            let mut delta = (w[1] - w[0]).abs();
            if delta > std::f64::consts::PI {
                delta = 2.0 * std::f64::consts::PI - delta;
            }
            delta
        })
        .sum();
    turns / (headings.len() - 1) as f64
}

/// Mean exact-EDT clearance of the path's waypoints, in cell units. The
/// boundary ring outside the grid counts as obstacle.
pub fn obstacle_clearance(grid: &OccupancyGrid, path: &GridPath) -> Result<f64> {
    let field = DistanceField::from_grid(grid);
    clearance_with_field(&field, path)
}

/// Clearance against a precomputed distance field (the harness reuses one
/// field per map across planners).
pub fn clearance_with_field(field: &DistanceField, path: &GridPath) -> Result<f64> {
    if path.is_empty() {
        return Err(Error::EmptyPath);
    }
    let total: f64 = path.iter().map(|w| field.at(w)).sum();
    Ok(total / path.len() as f64)
}

/// Assemble a [`TrialRecord`], computing the derived metrics. Pass the
/// successful A* reference result for the same task to populate the
/// deviation; success-only metrics stay `None` on failures.
pub fn make_record(
    dataset: impl Into<String>,
    task: &PlanningTask,
    planner: PlannerKind,
    result: PlanResult,
    field: &DistanceField,
    astar_reference_length: Option<f64>,
) -> TrialRecord {
    let succeeded = result.status.is_success();
    let path_length = result.path.length().unwrap_or(0.0);
    let derived = DerivedMetrics {
        path_length,
        distance_left: distance_left(&result, task.goal),
        path_deviation: match (succeeded, astar_reference_length) {
            (true, Some(reference)) => Some(path_length - reference),
            _ => None,
        },
        smoothness_rad_per_move: succeeded.then(|| smoothness(&result.path)),
        clearance_cells: succeeded
            .then(|| clearance_with_field(field, &result.path).unwrap_or(0.0)),
    };
    TrialRecord {
        dataset: dataset.into(),
        task: task.clone(),
        planner,
        result,
        derived,
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 { 0.0 } else { sum / n as f64 }
}

/// Aggregate records into one row per (dataset, planner). Datasets keep
/// their first-appearance order; planners within a dataset follow the
/// canonical order.
pub fn aggregate(records: &[TrialRecord]) -> Result<Vec<AggregateRow>> {
    if records.is_empty() {
        return Err(Error::Format("aggregate over an empty record set".into()));
    }
    let mut datasets: Vec<&str> = Vec::new();
    for r in records {
        if !datasets.contains(&r.dataset.as_str()) {
            datasets.push(&r.dataset);
        }
    }
    let mut rows = Vec::new();
    for dataset in datasets {
        for kind in PlannerKind::ALL {
            let subset: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.planner == kind && r.dataset == dataset)
                .collect();
            if subset.is_empty() {
                continue;
            }
            let successes: Vec<&&TrialRecord> = subset
                .iter()
                .filter(|r| r.result.status.is_success())
                .collect();
            rows.push(AggregateRow {
                planner: kind,
                dataset: dataset.to_string(),
                success_rate_pct: successes.len() as f64 / subset.len() as f64 * 100.0,
                mean_path_length: mean(successes.iter().map(|r| r.derived.path_length)),
                mean_planning_time_s: mean(subset.iter().map(|r| r.result.planning_time_s)),
                mean_distance_left: mean(subset.iter().map(|r| r.derived.distance_left)),
                mean_path_deviation: mean(
                    successes.iter().filter_map(|r| r.derived.path_deviation),
                ),
                mean_smoothness: mean(
                    successes
                        .iter()
                        .filter_map(|r| r.derived.smoothness_rad_per_move),
                ),
                mean_clearance: mean(successes.iter().filter_map(|r| r.derived.clearance_cells)),
                mean_peak_memory_kib: mean(subset.iter().map(|r| r.result.peak_memory_kib as f64)),
                n_trials: subset.len(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FREE;
    use crate::planners::{PlanStatus, PlannerConfig};

    fn dummy_result(status: PlanStatus, waypoints: Vec<Cell>, time_s: f64) -> PlanResult {
        PlanResult {
            status,
            path: GridPath::new(waypoints),
            cost: None,
            planning_time_s: time_s,
            peak_memory_kib: 0,
            iterations: 1,
            expansions: 1,
            config: PlannerConfig::new(PlannerKind::Dijkstra),
        }
    }

    fn record(planner: PlannerKind, status: PlanStatus, waypoints: Vec<Cell>) -> TrialRecord {
        let grid = OccupancyGrid::filled(10, 10, FREE).unwrap();
        let field = DistanceField::from_grid(&grid);
        let goal = *waypoints.last().unwrap();
        let task = PlanningTask::new("g", waypoints[0], goal);
        make_record(
            "d",
            &task,
            planner,
            dummy_result(status, waypoints, 1.0),
            &field,
            None,
        )
    }

    #[test]
    fn success_rate_ratios() {
        let ok = record(
            PlannerKind::Dijkstra,
            PlanStatus::Success,
            vec![Cell::new(0, 0)],
        );
        let bad = record(
            PlannerKind::Dijkstra,
            PlanStatus::NoPath,
            vec![Cell::new(0, 0)],
        );
        let mut records = vec![ok.clone(); 36];
        assert_eq!(success_rate(&records).unwrap(), 100.0);
        records = vec![bad.clone(); 36];
        records[0] = ok.clone();
        records[1] = ok.clone();
        records[2] = ok;
        let sr = success_rate(&records).unwrap();
        assert!((sr - 100.0 * 3.0 / 36.0).abs() < 1e-12);
        assert_eq!(success_rate(&vec![bad; 4]).unwrap(), 0.0);
        assert!(success_rate(&[]).is_err());
    }

    #[test]
    fn distance_left_345() {
        let r = dummy_result(PlanStatus::NoPath, vec![Cell::new(0, 0)], 0.0);
        assert_eq!(distance_left(&r, Cell::new(3, 4)), 5.0);
        let ok = dummy_result(
            PlanStatus::Success,
            vec![Cell::new(0, 0), Cell::new(3, 4)],
            0.0,
        );
        assert_eq!(distance_left(&ok, Cell::new(3, 4)), 0.0);
    }

    #[test]
    fn deviation_signs() {
        let astar = record(
            PlannerKind::Astar,
            PlanStatus::Success,
            vec![Cell::new(0, 0), Cell::new(0, 8)],
        );
        assert_eq!(path_deviation(&astar, &astar).unwrap(), 0.0);
        let longer = record(
            PlannerKind::Rrt,
            PlanStatus::Success,
            vec![
                Cell::new(0, 0),
                Cell::new(0, 5),
                Cell::new(0, 8),
                Cell::new(5, 8),
            ],
        );
        assert_eq!(path_deviation(&longer, &astar).unwrap(), 5.0);
        let failed = record(PlannerKind::Rrt, PlanStatus::Timeout, vec![Cell::new(0, 0)]);
        assert!(path_deviation(&failed, &astar).is_err());
    }

    #[test]
    fn smoothness_cases() {
        let straight = GridPath::new(vec![Cell::new(0, 0), Cell::new(0, 1), Cell::new(0, 2)]);
        assert_eq!(smoothness(&straight), 0.0);

        let right_angle = GridPath::new(vec![Cell::new(0, 0), Cell::new(0, 1), Cell::new(1, 1)]);
        assert!((smoothness(&right_angle) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let staircase = GridPath::new(vec![
            Cell::new(0, 0),
            Cell::new(0, 1),
            Cell::new(1, 1),
            Cell::new(1, 2),
        ]);
        assert!((smoothness(&staircase) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let two_points = GridPath::new(vec![Cell::new(0, 0), Cell::new(5, 5)]);
        assert_eq!(smoothness(&two_points), 0.0);
    }

    #[test]
    fn smoothness_wraps_heading_discontinuity() {
        // Headings of 3/4 pi and -3/4 pi differ by pi/2 around the wrap,
        // not 3/2 pi.
        let p = GridPath::new(vec![Cell::new(2, 2), Cell::new(3, 1), Cell::new(2, 0)]);
        assert!((smoothness(&p) - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn smoothness_and_clearance_reversal_invariance() {
        let g = crate::synthetic::random_grid(12, 12, 0.2, 3);
        let field = DistanceField::from_grid(&g);
        let path = GridPath::new(vec![
            Cell::new(0, 0),
            Cell::new(2, 3),
            Cell::new(5, 3),
            Cell::new(7, 9),
        ]);
        let mut reversed = path.clone();
        reversed.waypoints.reverse();
        assert!((smoothness(&path) - smoothness(&reversed)).abs() < 1e-12);
        let a = clearance_with_field(&field, &path).unwrap();
        let b = clearance_with_field(&field, &reversed).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn clearance_next_to_wall() {
        let g = OccupancyGrid::from_ascii(
            "
            .....
            .....
            ..#..
            .....
            .....
            ",
        )
        .unwrap();
        let path = GridPath::single(Cell::new(2, 1));
        assert_eq!(obstacle_clearance(&g, &path).unwrap(), 1.0);
        let diag = GridPath::single(Cell::new(1, 1));
        assert_eq!(
            obstacle_clearance(&g, &diag).unwrap(),
            std::f64::consts::SQRT_2
        );
    }

    #[test]
    fn clearance_open_grid_center() {
        let g = OccupancyGrid::filled(5, 5, FREE).unwrap();
        let path = GridPath::single(Cell::new(2, 2));
        assert_eq!(obstacle_clearance(&g, &path).unwrap(), 3.0);
    }

    #[test]
    fn aggregate_single_record_reproduces_values() {
        let r = record(
            PlannerKind::Thetastar,
            PlanStatus::Success,
            vec![Cell::new(1, 1), Cell::new(1, 4)],
        );
        let rows = aggregate(std::slice::from_ref(&r)).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert_eq!(row.success_rate_pct, 100.0);
        assert_eq!(row.mean_path_length, 3.0);
        assert_eq!(row.mean_planning_time_s, 1.0);
        assert_eq!(row.mean_distance_left, 0.0);
        assert_eq!(row.n_trials, 1);
    }

    #[test]
    fn aggregate_zero_success_convention() {
        let fail_a = record(
            PlannerKind::RrtConnect,
            PlanStatus::Exhausted,
            vec![Cell::new(0, 0)],
        );
        let fail_b = record(
            PlannerKind::RrtConnect,
            PlanStatus::Timeout,
            vec![Cell::new(0, 0)],
        );
        let mut a = fail_a;
        let mut b = fail_b;
        a.task.goal = Cell::new(0, 4);
        a.derived.distance_left = 4.0;
        b.task.goal = Cell::new(3, 4);
        b.derived.distance_left = 5.0;
        let rows = aggregate(&[a, b]).unwrap();
        let row = &rows[0];
        assert_eq!(row.success_rate_pct, 0.0);
        assert_eq!(row.mean_path_length, 0.0, "no successes, length reports 0");
        assert_eq!(row.mean_smoothness, 0.0);
        assert_eq!(
            row.mean_distance_left, 4.5,
            "distance left averages all trials"
        );
    }
}
