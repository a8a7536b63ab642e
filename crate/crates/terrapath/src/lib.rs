//! terrapath: a terrain path-planning benchmark toolkit.
//!
//! The crate turns elevation rasters (DTMs/DEMs) into binary occupancy
//! grids with slope/roughness thresholding, samples far-apart start/goal
//! tasks, runs six classical global planners (Dijkstra, A*, Theta*, RRT,
//! RRT-Connect, Dynamic RRT) under a time budget, and computes the full
//! metric suite — success rate, path length, planning time, distance left,
//! path deviation, memory, smoothness, obstacle clearance — with
//! reproducible aggregate reports and SVG path overlays.
//!
//! Start with the `examples/` directory for runnable walkthroughs of each
//! capability, or the `terrapath` binary for the same pipeline as
//! subcommands (`ingest`, `sample-tasks`, `plan`, `bench`, `report`).
//!
//! Conventions shared across the crate: cells are `(row, col)` with the
//! origin top-left; out-of-bounds is occupied; movement is 8-connected
//! with unit/sqrt(2) costs and no corner cutting; all planner outputs are
//! deterministic functions of `(grid, task, config)` including seeds.

pub mod bench;
pub mod cli;
pub mod edt;
pub mod error;
pub mod grid;
pub mod grid_io;
pub mod memtrack;
pub mod metrics;
pub mod overlay;
pub mod planners;
pub mod report;
pub mod synthetic;
pub mod tasks;
pub mod terrain;
pub mod terrain_io;

pub use bench::{
    BenchOptions, BenchmarkReport, DatasetManifest, run_benchmark, run_benchmark_on_grids,
};
pub use error::{Error, Result};
pub use grid::{Cell, GridPath, OccupancyGrid, is_feasible, path_length};
pub use grid_io::{read_grid, write_grid};
pub use metrics::{AggregateRow, TrialRecord, aggregate};
pub use planners::{PlanResult, PlanStatus, PlannerConfig, PlannerKind, plan};
pub use tasks::{PlanningTask, largest_free_component, sample_task};
pub use terrain::{ElevationRaster, IngestConfig, threshold_to_grid};
