//! Command-line interface: `ingest`, `sample-tasks`, `plan`, `bench` and
//! `report` subcommands over the library.
//!
//! Parameter precedence is flag > config file > built-in default. The
//! optional config file (TOML or JSON, `--config`) holds one table per
//! subcommand with kebab-case keys matching the long flag names. The
//! `TERRAPATH_OUT_DIR` environment variable supplies the output directory
//! when `--out-dir` is omitted.
//!
//! Exit codes: 0 on success (including `--help`/`--version`), 1 on usage
//! errors, 2 on runtime failures.

use std::path::{Path, PathBuf};

use clap::{ArgAction, Parser, Subcommand};
use serde::Deserialize;
use serde::de::DeserializeOwned;

use crate::bench::{
    BenchOptions, BenchmarkReport, DatasetManifest, EnvFingerprint, RunSnapshot, WATCHDOG_SLACK_S,
    planner_configs, run_benchmark_on_grids,
};
use crate::error::{Error, Result};
use crate::grid::Cell;
use crate::grid_io::{GridFormat, read_grid, write_grid};
use crate::metrics::aggregate;
use crate::overlay::write_overlay;
use crate::planners::{PlannerConfig, PlannerKind, plan};
use crate::report::{ReportFormat, emit_report, load_records_jsonl, write_records_jsonl};
use crate::tasks::{PlanningTask, load_tasks, sample_task, save_tasks};
use crate::terrain::{IngestConfig, NodataPolicy, threshold_to_grid};
use crate::terrain_io::read_raster;

pub const OUT_DIR_ENV: &str = "TERRAPATH_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "terrapath",
    version,
    about = "Terrain path-planning benchmark toolkit",
    disable_help_subcommand = true
)]
struct Cli {
    /// TOML or JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Increase diagnostic chatter on stderr.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an elevation raster (.asc or .csv) into an occupancy grid.
    Ingest {
        /// Input raster file.
        #[arg(long, value_name = "RASTER")]
        input: Option<PathBuf>,
        /// Slope threshold in degrees (inclusive: cells at the threshold
        /// are occupied).
        #[arg(long, value_name = "DEG")]
        slope_deg: Option<f64>,
        /// Block-mean downsampling factor.
        #[arg(long, value_name = "N")]
        downsample: Option<usize>,
        /// Optional roughness threshold in meters.
        #[arg(long, value_name = "M")]
        roughness_m: Option<f64>,
        /// How no-data samples map to occupancy: occupied | free.
        #[arg(long, value_name = "POLICY")]
        nodata: Option<NodataPolicy>,
        /// Output grid file; extension may pick the format.
        #[arg(long, value_name = "GRID")]
        out: Option<PathBuf>,
        /// Grid format: pgm | csv (default from the output extension).
        #[arg(long)]
        format: Option<GridFormat>,
        /// Override the grid name recorded in the sidecar.
        #[arg(long)]
        name: Option<String>,
    },
    /// Sample one far-apart start/goal task per map in a directory.
    SampleTasks {
        /// Directory containing .pgm/.csv occupancy grids.
        #[arg(long, value_name = "DIR")]
        maps: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output task CSV.
        #[arg(long, value_name = "CSV")]
        out: Option<PathBuf>,
        /// Per-task time budget in seconds.
        #[arg(long, value_name = "S")]
        budget_s: Option<f64>,
    },
    /// Run a single planner on a single map.
    Plan {
        #[arg(long, value_name = "GRID")]
        map: Option<PathBuf>,
        /// dijkstra | astar | thetastar | rrt | rrt_connect | dynamic_rrt
        #[arg(long)]
        planner: Option<PlannerKind>,
        /// Start cell as row,col.
        #[arg(long, value_name = "R,C")]
        start: Option<String>,
        /// Goal cell as row,col.
        #[arg(long, value_name = "R,C")]
        goal: Option<String>,
        #[arg(long, value_name = "S")]
        budget_s: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sampling-planner step size in cell units.
        #[arg(long)]
        epsilon: Option<f64>,
        /// Probability of sampling the goal directly.
        #[arg(long)]
        goal_bias: Option<f64>,
        #[arg(long)]
        max_iters: Option<u64>,
        /// Result JSON destination.
        #[arg(long, value_name = "JSON")]
        out: Option<PathBuf>,
        /// Optional SVG overlay destination.
        #[arg(long, value_name = "SVG")]
        overlay: Option<PathBuf>,
    },
    /// Run every configured planner over a dataset manifest.
    Bench {
        /// Dataset manifest JSON.
        #[arg(long, value_name = "JSON")]
        manifest: Option<PathBuf>,
        /// Task CSV matching the manifest's grid names.
        #[arg(long, value_name = "CSV")]
        tasks: Option<PathBuf>,
        /// Comma-separated planner list.
        #[arg(long, value_name = "LIST")]
        planners: Option<String>,
        /// Override every task's budget, seconds.
        #[arg(long, value_name = "S")]
        budget_s: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
        /// Hard watchdog slack beyond the budget, seconds.
        #[arg(long, value_name = "S")]
        watchdog_slack_s: Option<f64>,
        /// Skip SVG overlay generation.
        #[arg(long, action = ArgAction::SetTrue)]
        no_overlays: bool,
        /// Sampling-planner step size for all planners.
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        goal_bias: Option<f64>,
        #[arg(long)]
        max_iters: Option<u64>,
    },
    /// Recompute aggregates and emit reports from existing records.
    Report {
        /// Per-trial records (JSON lines) from a bench run.
        #[arg(long, value_name = "JSONL")]
        records: Option<PathBuf>,
        /// Full report JSON to verify and re-emit instead of records.
        #[arg(long, value_name = "JSON")]
        report: Option<PathBuf>,
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
}

/// File-backed defaults, one table per subcommand, kebab-case keys.
#[derive(Default, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
struct IngestFileCfg {
    input: Option<PathBuf>,
    slope_deg: Option<f64>,
    downsample: Option<usize>,
    roughness_m: Option<f64>,
    nodata: Option<NodataPolicy>,
    out: Option<PathBuf>,
    format: Option<GridFormat>,
    name: Option<String>,
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
struct SampleTasksFileCfg {
    maps: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    budget_s: Option<f64>,
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
struct PlanFileCfg {
    map: Option<PathBuf>,
    planner: Option<String>,
    start: Option<String>,
    goal: Option<String>,
    budget_s: Option<f64>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    goal_bias: Option<f64>,
    max_iters: Option<u64>,
    out: Option<PathBuf>,
    overlay: Option<PathBuf>,
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
struct BenchFileCfg {
    manifest: Option<PathBuf>,
    tasks: Option<PathBuf>,
    planners: Option<String>,
    budget_s: Option<f64>,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    watchdog_slack_s: Option<f64>,
    epsilon: Option<f64>,
    goal_bias: Option<f64>,
    max_iters: Option<u64>,
}

#[derive(Default, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
struct ReportFileCfg {
    records: Option<PathBuf>,
    report: Option<PathBuf>,
    out_dir: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn require<T>(value: Option<T>, flag: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required option {flag}")))
}

/// Parse and run; returns the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprint!("{e}");
                    1
                }
            };
        }
    };
    let file_cfg = match load_config_file(cli.config.as_deref()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(cli.command, &file_cfg, cli.verbose) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `terrapath --help` for usage");
            1
        }
        Err(CliError::Runtime(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_config_file(path: Option<&Path>) -> Result<Option<serde_json::Value>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_toml = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("toml"));
    let value = if is_toml {
        let parsed: toml::Table = text
            .parse()
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        serde_json::to_value(parsed).map_err(|e| Error::Format(e.to_string()))?
    } else {
        serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?
    };
    Ok(Some(value))
}

fn section<T: DeserializeOwned + Default>(
    file_cfg: &Option<serde_json::Value>,
    key: &str,
) -> Result<T> {
    match file_cfg.as_ref().and_then(|v| v.get(key)) {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| Error::Format(format!("config section [{key}]: {e}"))),
        None => Ok(T::default()),
    }
}

fn parse_cell(s: &str, flag: &str) -> CliResult<Cell> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || CliError::Usage(format!("{flag} expects row,col; got {s:?}"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let row = parts[0].trim().parse().map_err(|_| bad())?;
    let col = parts[1].trim().parse().map_err(|_| bad())?;
    Ok(Cell::new(row, col))
}

fn default_out_dir(explicit: Option<PathBuf>) -> CliResult<PathBuf> {
    if let Some(dir) = explicit {
        return Ok(dir);
    }
    if let Some(dir) = std::env::var_os(OUT_DIR_ENV) {
        return Ok(PathBuf::from(dir));
    }
    Err(CliError::Usage(format!(
        "missing required option --out-dir (or set {OUT_DIR_ENV})"
    )))
}

fn run(command: Command, file_cfg: &Option<serde_json::Value>, verbose: u8) -> CliResult<()> {
    match command {
        Command::Ingest {
            input,
            slope_deg,
            downsample,
            roughness_m,
            nodata,
            out,
            format,
            name,
        } => {
            let file: IngestFileCfg = section(file_cfg, "ingest")?;
            let input = require(input.or(file.input), "--input")?;
            let slope_deg = require(slope_deg.or(file.slope_deg), "--slope-deg")?;
            let out = require(out.or(file.out), "--out")?;
            let cfg = IngestConfig {
                slope_threshold_deg: slope_deg,
                downsample_factor: downsample.or(file.downsample).unwrap_or(1),
                roughness_threshold_m: roughness_m.or(file.roughness_m),
                nodata_policy: nodata.or(file.nodata).unwrap_or_default(),
            };
            let raster = read_raster(&input)?;
            let mut grid = threshold_to_grid(&raster, &cfg)?;
            if let Some(name) = name.or(file.name) {
                grid = grid.with_name(name);
            } else if grid.name().is_empty() {
                grid = grid.with_name(out.file_stem().and_then(|s| s.to_str()).unwrap_or("grid"));
            }
            let format = format
                .or(file.format)
                .or_else(|| GridFormat::from_path(&out))
                .unwrap_or(GridFormat::Pgm);
            write_grid(&grid, format, &out)?;
            println!(
                "ingested {} -> {} ({}x{}, {:.1}% occupied, {} m/cell)",
                input.display(),
                out.display(),
                grid.width(),
                grid.height(),
                100.0 * grid.count_occupied() as f64 / grid.len() as f64,
                grid.resolution_m()
            );
            Ok(())
        }
        Command::SampleTasks {
            maps,
            seed,
            out,
            budget_s,
        } => {
            let file: SampleTasksFileCfg = section(file_cfg, "sample-tasks")?;
            let maps = require(maps.or(file.maps), "--maps")?;
            let out = require(out.or(file.out), "--out")?;
            let seed = seed.or(file.seed).unwrap_or(0);
            let budget_s = budget_s
                .or(file.budget_s)
                .unwrap_or(crate::tasks::DEFAULT_BUDGET_S);

            let mut entries: Vec<PathBuf> = std::fs::read_dir(&maps)
                .map_err(|e| Error::io(&maps, e))?
                .filter_map(|r| r.ok().map(|d| d.path()))
                .filter(|p| GridFormat::from_path(p).is_some())
                .collect();
            entries.sort();
            if entries.is_empty() {
                return Err(CliError::Runtime(Error::Manifest(format!(
                    "no .pgm or .csv maps found under {}",
                    maps.display()
                ))));
            }
            let mut tasks = Vec::new();
            for path in &entries {
                let grid = read_grid(path)?;
                let mut task = sample_task(&grid, seed)?;
                task.budget_s = budget_s;
                if verbose > 0 {
                    eprintln!("{}: start {} goal {}", grid.name(), task.start, task.goal);
                }
                tasks.push(task);
            }
            save_tasks(&tasks, &out)?;
            println!("sampled {} tasks -> {}", tasks.len(), out.display());
            Ok(())
        }
        Command::Plan {
            map,
            planner,
            start,
            goal,
            budget_s,
            seed,
            epsilon,
            goal_bias,
            max_iters,
            out,
            overlay,
        } => {
            let file: PlanFileCfg = section(file_cfg, "plan")?;
            let map = require(map.or(file.map), "--map")?;
            let planner = match planner {
                Some(p) => p,
                None => match file.planner {
                    Some(s) => s.parse()?,
                    None => {
                        return Err(CliError::Usage("missing required option --planner".into()));
                    }
                },
            };
            let start = parse_cell(&require(start.or(file.start), "--start")?, "--start")?;
            let goal = parse_cell(&require(goal.or(file.goal), "--goal")?, "--goal")?;
            let out = require(out.or(file.out), "--out")?;

            let grid = read_grid(&map)?;
            let mut task = PlanningTask::new(grid.name(), start, goal);
            task.budget_s = budget_s
                .or(file.budget_s)
                .unwrap_or(crate::tasks::DEFAULT_BUDGET_S);
            task.seed = seed.or(file.seed).unwrap_or(0);
            let mut cfg = PlannerConfig::new(planner);
            cfg.seed = task.seed;
            if let Some(e) = epsilon.or(file.epsilon) {
                cfg.epsilon = e;
            }
            if let Some(b) = goal_bias.or(file.goal_bias) {
                cfg.goal_bias = b;
            }
            if let Some(m) = max_iters.or(file.max_iters) {
                cfg.max_iterations = m;
            }
            cfg.validate()?;
            if !grid.in_bounds(start) || !grid.in_bounds(goal) {
                return Err(CliError::Usage(format!(
                    "start/goal must lie inside the {}x{} grid",
                    grid.height(),
                    grid.width()
                )));
            }

            let result = plan(&grid, &task, &cfg);
            let json = serde_json::to_string_pretty(&result).expect("result serializes");
            std::fs::write(&out, json + "\n").map_err(|e| Error::io(&out, e))?;
            if let Some(svg) = overlay.or(file.overlay) {
                let labeled = [(planner.to_string(), &result.path)];
                write_overlay(&grid, &labeled, Some((start, goal)), &svg)?;
            }
            println!(
                "{planner} on {}: {:?} in {:.3}s, {} waypoints{}",
                grid.name(),
                result.status,
                result.planning_time_s,
                result.path.len(),
                result
                    .cost
                    .map(|c| format!(", cost {c:.3}"))
                    .unwrap_or_default()
            );
            Ok(())
        }
        Command::Bench {
            manifest,
            tasks,
            planners,
            budget_s,
            seed,
            out_dir,
            watchdog_slack_s,
            no_overlays,
            epsilon,
            goal_bias,
            max_iters,
        } => {
            let file: BenchFileCfg = section(file_cfg, "bench")?;
            let manifest_path = require(manifest.or(file.manifest), "--manifest")?;
            let tasks_path = require(tasks.or(file.tasks), "--tasks")?;
            let out_dir = default_out_dir(out_dir.or(file.out_dir))?;

            let kinds: Vec<PlannerKind> = match planners.or(file.planners) {
                Some(list) => list
                    .split(',')
                    .map(|s| s.trim().parse())
                    .collect::<Result<_>>()?,
                None => PlannerKind::ALL.to_vec(),
            };
            let base_seed = seed.or(file.seed).unwrap_or(0);
            let mut template = PlannerConfig::new(PlannerKind::Dijkstra);
            if let Some(e) = epsilon.or(file.epsilon) {
                template.epsilon = e;
            }
            if let Some(b) = goal_bias.or(file.goal_bias) {
                template.goal_bias = b;
            }
            if let Some(m) = max_iters.or(file.max_iters) {
                template.max_iterations = m;
            }
            template.validate()?;
            let configs = planner_configs(&kinds, &template, base_seed);
            let options = BenchOptions {
                budget_override_s: budget_s.or(file.budget_s),
                watchdog_slack_s: watchdog_slack_s
                    .or(file.watchdog_slack_s)
                    .unwrap_or(WATCHDOG_SLACK_S),
                base_seed,
            };

            let manifest = DatasetManifest::load(&manifest_path)?;
            let base_dir = manifest_path
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from("."));
            let task_list = load_tasks(&tasks_path)?;
            let grids = manifest.load_grids(&base_dir)?;
            if verbose > 0 {
                eprintln!(
                    "benchmarking {} maps x {} planners",
                    grids.len(),
                    configs.len()
                );
            }
            let report = run_benchmark_on_grids(
                &manifest.dataset_name,
                &grids,
                &configs,
                &task_list,
                &options,
            )?;

            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            write_records_jsonl(&report.records, &out_dir.join("records.jsonl"))?;
            emit_report(&report, ReportFormat::Csv, &out_dir.join("aggregates.csv"))?;
            emit_report(&report, ReportFormat::Markdown, &out_dir.join("report.md"))?;
            emit_report(&report, ReportFormat::Json, &out_dir.join("report.json"))?;
            if !no_overlays {
                let overlay_dir = out_dir.join("overlays");
                std::fs::create_dir_all(&overlay_dir).map_err(|e| Error::io(&overlay_dir, e))?;
                for record in &report.records {
                    let grid = grids
                        .iter()
                        .find(|g| g.name() == record.task.grid_name)
                        .expect("record grids come from this run");
                    let labeled = [(record.planner.to_string(), &record.result.path)];
                    let dest = overlay_dir
                        .join(format!("{}_{}.svg", record.task.grid_name, record.planner));
                    write_overlay(
                        grid,
                        &labeled,
                        Some((record.task.start, record.task.goal)),
                        &dest,
                    )?;
                }
            }
            for row in &report.aggregates {
                println!(
                    "{:<12} SR {:>5.1}%  len {:>9.2}  time {:>7.3}s  dist-left {:>8.2}",
                    row.planner.to_string(),
                    row.success_rate_pct,
                    row.mean_path_length,
                    row.mean_planning_time_s,
                    row.mean_distance_left
                );
            }
            println!("wrote {}", out_dir.display());
            Ok(())
        }
        Command::Report {
            records,
            report,
            out_dir,
        } => {
            let file: ReportFileCfg = section(file_cfg, "report")?;
            let out_dir = default_out_dir(out_dir.or(file.out_dir))?;
            let report_data = match (records.or(file.records), report.or(file.report)) {
                (_, Some(json)) => BenchmarkReport::load(&json)?,
                (Some(jsonl), None) => {
                    let records = load_records_jsonl(&jsonl)?;
                    if records.is_empty() {
                        return Err(CliError::Runtime(Error::Format(format!(
                            "{}: no records",
                            jsonl.display()
                        ))));
                    }
                    let aggregates = aggregate(&records)?;
                    let mut configs: Vec<PlannerConfig> = Vec::new();
                    for r in &records {
                        if !configs.iter().any(|c| c.planner_kind == r.planner) {
                            configs.push(r.result.config.clone());
                        }
                    }
                    BenchmarkReport {
                        config: RunSnapshot {
                            dataset_name: records[0].dataset.clone(),
                            planner_configs: configs,
                            base_seed: 0,
                            budget_override_s: None,
                            watchdog_slack_s: WATCHDOG_SLACK_S,
                            concurrency: 1,
                        },
                        environment: EnvFingerprint::capture(),
                        records,
                        aggregates,
                    }
                }
                (None, None) => {
                    return Err(CliError::Usage(
                        "missing required option --records (or --report)".into(),
                    ));
                }
            };
            std::fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
            emit_report(
                &report_data,
                ReportFormat::Csv,
                &out_dir.join("aggregates.csv"),
            )?;
            emit_report(
                &report_data,
                ReportFormat::Markdown,
                &out_dir.join("report.md"),
            )?;
            emit_report(
                &report_data,
                ReportFormat::Json,
                &out_dir.join("report.json"),
            )?;
            println!(
                "report over {} records -> {}",
                report_data.records.len(),
                out_dir.display()
            );
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_version_exit_zero() {
        assert_eq!(dispatch(["terrapath", "--help"]), 0);
        assert_eq!(dispatch(["terrapath", "--version"]), 0);
        assert_eq!(dispatch(["terrapath", "plan", "--help"]), 0);
    }

    #[test]
    fn unknown_subcommand_is_usage_error() {
        assert_eq!(dispatch(["terrapath", "frobnicate"]), 1);
    }

    #[test]
    fn missing_required_flag_names_it() {
        // `plan` without --map: exit code 1 (message checked by the CLI
        // integration test, which captures stderr).
        assert_eq!(dispatch(["terrapath", "plan"]), 1);
    }

    #[test]
    fn parse_cell_formats() {
        assert_eq!(parse_cell("3,4", "--start").ok(), Some(Cell::new(3, 4)));
        assert_eq!(
            parse_cell(" 0 , 12 ", "--goal").ok(),
            Some(Cell::new(0, 12))
        );
        assert!(parse_cell("3;4", "--start").is_err());
        assert!(parse_cell("3", "--start").is_err());
    }
}
