//! Report serialization: per-trial JSON-lines, aggregate CSV, a markdown
//! table per dataset, and the lossless JSON report.
//!
//! The markdown table marks the shortest mean path in bold and the fastest
//! mean planning time with underline, considering only planners at 100%
//! success rate.

use std::fmt::Write as _;
use std::path::Path;

use crate::bench::BenchmarkReport;
use crate::error::{Error, Result};
use crate::metrics::{AggregateRow, TrialRecord};

/// Fixed aggregate CSV header: the classic four metric columns first, then
/// the extended ones.
pub const AGGREGATE_CSV_HEADER: &str = "dataset,planner,success_rate_pct,mean_path_length,\
mean_planning_time_s,mean_distance_left,mean_path_deviation,mean_smoothness_rad_per_move,\
mean_clearance_cells,mean_peak_memory_kib,n_trials";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Markdown,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Format(format!("unknown report format {other:?}"))),
        }
    }
}

/// Serialize the report in the chosen format to `destination`.
pub fn emit_report(
    report: &BenchmarkReport,
    format: ReportFormat,
    destination: &Path,
) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => aggregates_csv(&report.aggregates),
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes") + "\n"
        }
        ReportFormat::Markdown => markdown_report(report),
    };
    std::fs::write(destination, text).map_err(|e| Error::io(destination, e))
}

/// One JSON object per line, in record order.
pub fn records_jsonl(records: &[TrialRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    out
}

pub fn write_records_jsonl(records: &[TrialRecord], path: &Path) -> Result<()> {
    std::fs::write(path, records_jsonl(records)).map_err(|e| Error::io(path, e))
}

pub fn load_records_jsonl(path: &Path) -> Result<Vec<TrialRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: TrialRecord = serde_json::from_str(line)
            .map_err(|e| Error::parse(path.display().to_string(), i + 1, e.to_string()))?;
        records.push(record);
    }
    Ok(records)
}

pub fn aggregates_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from(AGGREGATE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.planner,
            fmt_num(r.success_rate_pct),
            fmt_num(r.mean_path_length),
            fmt_num(r.mean_planning_time_s),
            fmt_num(r.mean_distance_left),
            fmt_num(r.mean_path_deviation),
            fmt_num(r.mean_smoothness),
            fmt_num(r.mean_clearance),
            fmt_num(r.mean_peak_memory_kib),
            r.n_trials
        );
    }
    out
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v:.6}")
    }
}

/// Markdown report: one table per dataset, planner rows in canonical
/// order, with bold shortest / underlined fastest among 100%-success
/// planners.
pub fn markdown_report(report: &BenchmarkReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Benchmark report\n");
    let _ = writeln!(
        out,
        "- environment: {} {} (crate {})",
        report.environment.os, report.environment.arch, report.environment.crate_version
    );
    let _ = writeln!(out, "- base seed: {}", report.config.base_seed);
    let _ = writeln!(out, "- concurrency: {}", report.config.concurrency);
    let _ = writeln!(
        out,
        "- trials: {} ({} planners)\n",
        report.records.len(),
        report.config.planner_configs.len()
    );

    let mut datasets: Vec<&str> = report
        .aggregates
        .iter()
        .map(|r| r.dataset.as_str())
        .collect();
    datasets.dedup();
    for dataset in datasets {
        let rows: Vec<&AggregateRow> = report
            .aggregates
            .iter()
            .filter(|r| r.dataset == dataset)
            .collect();
        let _ = writeln!(out, "## {dataset}\n");
        out.push_str(&markdown_table(&rows));
        let _ = writeln!(
            out,
            "\n**Bold** marks the shortest mean path and <u>underline</u> the fastest mean \
             planning time among planners with a 100% success rate.\n"
        );
    }
    out
}

fn markdown_table(rows: &[&AggregateRow]) -> String {
    let full_sr: Vec<&&AggregateRow> = rows
        .iter()
        .filter(|r| r.success_rate_pct == 100.0)
        .collect();
    let shortest = full_sr
        .iter()
        .map(|r| r.mean_path_length)
        .fold(f64::INFINITY, f64::min);
    let fastest = full_sr
        .iter()
        .map(|r| r.mean_planning_time_s)
        .fold(f64::INFINITY, f64::min);

    let mut out = String::new();
    out.push_str(
        "| Planner | Success rate (%) | Path length | Planning time (s) | Distance left | \
         Path deviation | Smoothness (rad/move) | Clearance | Peak memory (KiB) |\n",
    );
    out.push_str("|---|---|---|---|---|---|---|---|---|\n");
    for r in rows {
        let at_full = r.success_rate_pct == 100.0;
        let length = if at_full && r.mean_path_length == shortest {
            format!("**{}**", fmt_cell(r.mean_path_length))
        } else {
            fmt_cell(r.mean_path_length)
        };
        let time = if at_full && r.mean_planning_time_s == fastest {
            format!("<u>{}</u>", fmt_cell(r.mean_planning_time_s))
        } else {
            fmt_cell(r.mean_planning_time_s)
        };
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} |",
            r.planner,
            r.success_rate_pct.round() as i64,
            length,
            time,
            fmt_cell(r.mean_distance_left),
            fmt_cell(r.mean_path_deviation),
            fmt_cell(r.mean_smoothness),
            fmt_cell(r.mean_clearance),
            fmt_cell(r.mean_peak_memory_kib),
        );
    }
    out
}

fn fmt_cell(v: f64) -> String {
    format!("{v:.2}")
}
