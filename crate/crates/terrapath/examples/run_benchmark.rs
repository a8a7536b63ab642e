//! Full benchmark over a synthetic dataset: six planners, per-trial
//! records, aggregate tables and SVG overlays.
//!
//! ```bash
//! cargo run --release --example run_benchmark
//! ```

use terrapath::bench::{BenchOptions, planner_configs, run_benchmark_on_grids};
use terrapath::memtrack::TrackingAllocator;
use terrapath::overlay::write_overlay;
use terrapath::planners::{PlannerConfig, PlannerKind};
use terrapath::report::{ReportFormat, emit_report, write_records_jsonl};
use terrapath::synthetic::fractal_terrain;
use terrapath::tasks::sample_task;
use terrapath::terrain::{IngestConfig, threshold_to_grid};

// Installing the tracking allocator gives real peak-memory numbers in the
// report, exactly like the terrapath binary does.
#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

fn main() -> terrapath::Result<()> {
    let out_dir = std::path::Path::new("target/run_benchmark");
    std::fs::create_dir_all(out_dir).expect("create output dir");

    // Five terrain maps at a 12-degree slope threshold.
    let mut grids = Vec::new();
    let mut tasks = Vec::new();
    for i in 0..5u64 {
        let raster = fractal_terrain(192, 192, 100 + i, 60.0, 2.0);
        let grid = threshold_to_grid(&raster, &IngestConfig::new(12.0, 2))?
            .with_name(format!("terrain{i}"));
        let mut task = sample_task(&grid, 0)?;
        task.budget_s = 10.0;
        tasks.push(task);
        grids.push(grid);
    }

    let configs = planner_configs(
        &PlannerKind::ALL,
        &PlannerConfig::new(PlannerKind::Dijkstra),
        2024,
    );
    let report = run_benchmark_on_grids(
        "synthetic5",
        &grids,
        &configs,
        &tasks,
        &BenchOptions {
            base_seed: 2024,
            ..BenchOptions::default()
        },
    )?;

    write_records_jsonl(&report.records, &out_dir.join("records.jsonl"))?;
    emit_report(&report, ReportFormat::Csv, &out_dir.join("aggregates.csv"))?;
    emit_report(&report, ReportFormat::Markdown, &out_dir.join("report.md"))?;
    emit_report(&report, ReportFormat::Json, &out_dir.join("report.json"))?;
    let overlay_dir = out_dir.join("overlays");
    std::fs::create_dir_all(&overlay_dir).expect("create overlay dir");
    for record in &report.records {
        let grid = grids
            .iter()
            .find(|g| g.name() == record.task.grid_name)
            .unwrap();
        let labeled = [(record.planner.to_string(), &record.result.path)];
        write_overlay(
            grid,
            &labeled,
            Some((record.task.start, record.task.goal)),
            &overlay_dir.join(format!("{}_{}.svg", record.task.grid_name, record.planner)),
        )?;
    }

    println!(
        "{:<12} {:>6} {:>10} {:>10} {:>10} {:>9}",
        "planner", "SR %", "length", "time (s)", "dist left", "mem KiB"
    );
    for row in &report.aggregates {
        println!(
            "{:<12} {:>6.0} {:>10.2} {:>10.4} {:>10.2} {:>9.0}",
            row.planner.to_string(),
            row.success_rate_pct,
            row.mean_path_length,
            row.mean_planning_time_s,
            row.mean_distance_left,
            row.mean_peak_memory_kib
        );
    }
    println!("\nreports and overlays under {}", out_dir.display());
    Ok(())
}
