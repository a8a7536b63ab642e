//! Dataset-scale benchmark orchestration.
//!
//! Loads every map of a dataset manifest, runs each configured planner on
//! each map's task under its time budget, derives the per-trial metrics
//! and aggregates them into a report. Trials run sequentially (matching a
//! single-machine protocol; the report records the concurrency level), and
//! each one executes on a worker thread guarded by a hard watchdog: a
//! planner that overruns its cooperative deadline by more than the
//! watchdog slack is recorded as a timeout and abandoned, and a panicking
//! planner is recorded as a failed trial without taking the run down.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::sync::mpsc;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::edt::DistanceField;
use crate::error::{Error, Result};
use crate::grid::{GridPath, OccupancyGrid};
use crate::grid_io::read_grid;
use crate::metrics::{AggregateRow, TrialRecord, aggregate, make_record};
use crate::planners::{PlanResult, PlanStatus, PlannerConfig, PlannerKind, plan};
use crate::tasks::PlanningTask;

/// Default hard-watchdog slack beyond the cooperative deadline, seconds.
pub const WATCHDOG_SLACK_S: f64 = 5.0;

/// A named dataset: a list of grid files plus provenance notes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub dataset_name: String,
    pub maps: Vec<PathBuf>,
    #[serde(default)]
    pub provenance: Option<String>,
    #[serde(default)]
    pub notes: Option<String>,
}

impl DatasetManifest {
    pub fn load(path: &Path) -> Result<DatasetManifest> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let manifest: DatasetManifest = serde_json::from_str(&text)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    /// Load and validate every referenced grid. Relative paths resolve
    /// against `base_dir` (typically the manifest's directory). Grid names
    /// must be unique within the dataset.
    pub fn load_grids(&self, base_dir: &Path) -> Result<Vec<OccupancyGrid>> {
        let mut grids = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for entry in &self.maps {
            let path = if entry.is_absolute() {
                entry.clone()
            } else {
                base_dir.join(entry)
            };
            let grid = read_grid(&path)?;
            if !seen.insert(grid.name().to_string()) {
                return Err(Error::Manifest(format!(
                    "duplicate grid name {:?} in dataset {:?}",
                    grid.name(),
                    self.dataset_name
                )));
            }
            grids.push(grid);
        }
        if grids.is_empty() {
            return Err(Error::Manifest(format!(
                "dataset {:?} lists no maps",
                self.dataset_name
            )));
        }
        Ok(grids)
    }
}

/// Machine and build context captured alongside results.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnvFingerprint {
    pub os: String,
    pub arch: String,
    pub hostname: Option<String>,
    pub crate_version: String,
    pub timestamp_unix_s: u64,
}

impl EnvFingerprint {
    pub fn capture() -> Self {
        EnvFingerprint {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            hostname: std::env::var("HOSTNAME").ok(),
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Snapshot of everything needed to reproduce a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunSnapshot {
    pub dataset_name: String,
    pub planner_configs: Vec<PlannerConfig>,
    pub base_seed: u64,
    pub budget_override_s: Option<f64>,
    pub watchdog_slack_s: f64,
    /// Trials per worker at a time; this implementation runs sequentially.
    pub concurrency: usize,
}

/// Full benchmark output: configuration, environment, per-trial records
/// and per-planner aggregates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: RunSnapshot,
    pub environment: EnvFingerprint,
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
}

impl BenchmarkReport {
    /// Aggregates must be recomputable from the records; called on load.
    pub fn verify_self_consistency(&self) -> Result<()> {
        let recomputed = aggregate(&self.records)?;
        if recomputed != self.aggregates {
            return Err(Error::Format(
                "report aggregates do not match its records".into(),
            ));
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<BenchmarkReport> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let report: BenchmarkReport = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        report.verify_self_consistency()?;
        Ok(report)
    }
}

/// Options for a benchmark run.
#[derive(Clone, Debug)]
pub struct BenchOptions {
    /// Override every task's budget, seconds.
    pub budget_override_s: Option<f64>,
    pub watchdog_slack_s: f64,
    pub base_seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            budget_override_s: None,
            watchdog_slack_s: WATCHDOG_SLACK_S,
            base_seed: 0,
        }
    }
}

/// splitmix64; used to derive decorrelated per-planner seeds.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-planner seed: constant across maps so that the config snapshot
/// lists exactly the configs the trials ran with, while different planner
/// kinds draw decorrelated sample streams.
pub fn planner_seed(base_seed: u64, kind: PlannerKind) -> u64 {
    mix64(base_seed ^ mix64(kind as u64 + 1))
}

/// Build the per-planner configs for a run from a template.
pub fn planner_configs(
    kinds: &[PlannerKind],
    template: &PlannerConfig,
    base_seed: u64,
) -> Vec<PlannerConfig> {
    kinds
        .iter()
        .map(|&kind| {
            let mut cfg = template.clone();
            cfg.planner_kind = kind;
            cfg.seed = planner_seed(base_seed, kind);
            cfg
        })
        .collect()
}

/// Run every (map, planner) pair exactly once, sequentially, in map order
/// then planner order; records come back canonically sorted by
/// (dataset, grid, planner). Individual trial failures (including planner
/// panics and watchdog overruns) become failure records and never abort
/// the run.
pub fn run_benchmark_on_grids(
    dataset_name: &str,
    grids: &[OccupancyGrid],
    planner_configs: &[PlannerConfig],
    tasks: &[PlanningTask],
    options: &BenchOptions,
) -> Result<BenchmarkReport> {
    if grids.is_empty() || planner_configs.is_empty() {
        return Err(Error::Manifest("nothing to benchmark".into()));
    }
    let task_by_name: BTreeMap<&str, &PlanningTask> =
        tasks.iter().map(|t| (t.grid_name.as_str(), t)).collect();

    let mut records = Vec::with_capacity(grids.len() * planner_configs.len());
    for grid in grids {
        let task = *task_by_name
            .get(grid.name())
            .ok_or_else(|| Error::Manifest(format!("no task for map {:?}", grid.name())))?;
        let mut task = task.clone();
        if let Some(budget) = options.budget_override_s {
            task.budget_s = budget;
        }
        let field = DistanceField::from_grid(grid);
        let shared = Arc::new(grid.clone());

        // A* reference length for the deviation metric; reused from the
        // trial result when A* is among the planners.
        let mut reference: Option<f64> = None;
        let mut pending: Vec<(PlannerKind, PlanResult)> = Vec::new();
        for cfg in planner_configs {
            let result = run_trial(shared.clone(), &task, cfg, options.watchdog_slack_s);
            if cfg.planner_kind == PlannerKind::Astar && result.status.is_success() {
                reference = Some(result.path.length().unwrap_or(0.0));
            }
            pending.push((cfg.planner_kind, result));
        }
        if reference.is_none() {
            // A* not configured: run a silent reference plan.
            let mut cfg = PlannerConfig::new(PlannerKind::Astar);
            cfg.seed = planner_seed(options.base_seed, PlannerKind::Astar);
            let r = plan(&shared, &task, &cfg);
            if r.status.is_success() {
                reference = Some(r.path.length().unwrap_or(0.0));
            }
        }
        for (kind, result) in pending {
            records.push(make_record(
                dataset_name,
                &task,
                kind,
                result,
                &field,
                reference,
            ));
        }
    }
    records.sort_by(|a, b| {
        (&a.dataset, &a.task.grid_name, a.planner).cmp(&(&b.dataset, &b.task.grid_name, b.planner))
    });
    let aggregates = aggregate(&records)?;
    Ok(BenchmarkReport {
        config: RunSnapshot {
            dataset_name: dataset_name.to_string(),
            planner_configs: planner_configs.to_vec(),
            base_seed: options.base_seed,
            budget_override_s: options.budget_override_s,
            watchdog_slack_s: options.watchdog_slack_s,
            concurrency: 1,
        },
        environment: EnvFingerprint::capture(),
        records,
        aggregates,
    })
}

/// Manifest-level entry point: load grids, then run.
pub fn run_benchmark(
    manifest: &DatasetManifest,
    base_dir: &Path,
    planner_configs: &[PlannerConfig],
    tasks: &[PlanningTask],
    options: &BenchOptions,
) -> Result<BenchmarkReport> {
    let grids = manifest.load_grids(base_dir)?;
    run_benchmark_on_grids(
        &manifest.dataset_name,
        &grids,
        planner_configs,
        tasks,
        options,
    )
}

/// Execute one trial on a worker thread under the hard watchdog. Overruns
/// are recorded as timeouts with a start-only path; panics become no-path
/// failures. The abandoned worker exits on its own once its cooperative
/// deadline fires.
fn run_trial(
    grid: Arc<OccupancyGrid>,
    task: &PlanningTask,
    cfg: &PlannerConfig,
    watchdog_slack_s: f64,
) -> PlanResult {
    let budget = task.budget_s;
    let t = task.clone();
    let c = cfg.clone();
    run_with_watchdog(budget, watchdog_slack_s, cfg, task, move || {
        plan(&grid, &t, &c)
    })
}

/// Watchdog wrapper around an arbitrary planner body; exposed for tests.
pub(crate) fn run_with_watchdog(
    budget_s: f64,
    slack_s: f64,
    cfg: &PlannerConfig,
    task: &PlanningTask,
    body: impl FnOnce() -> PlanResult + Send + 'static,
) -> PlanResult {
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
        let _ = tx.send(outcome);
    });
    let wait = Duration::from_secs_f64((budget_s + slack_s).max(0.0));
    match rx.recv_timeout(wait) {
        Ok(Ok(result)) => result,
        Ok(Err(_panic)) => fallback_result(PlanStatus::NoPath, cfg, task, budget_s),
        Err(_) => fallback_result(PlanStatus::Timeout, cfg, task, budget_s),
    }
}

fn fallback_result(
    status: PlanStatus,
    cfg: &PlannerConfig,
    task: &PlanningTask,
    budget_s: f64,
) -> PlanResult {
    PlanResult {
        status,
        path: GridPath::single(task.start),
        cost: None,
        planning_time_s: if status == PlanStatus::Timeout {
            budget_s
        } else {
            0.0
        },
        peak_memory_kib: 0,
        iterations: 0,
        expansions: 0,
        config: cfg.clone(),
    }
}
