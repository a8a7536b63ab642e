//! Render an SVG overlay comparing a grid-optimal path with an any-angle
//! path on the same map.
//!
//! ```bash
//! cargo run --example render_overlay
//! ```

use terrapath::grid::OccupancyGrid;
use terrapath::overlay::write_overlay;
use terrapath::planners::{PlannerConfig, PlannerKind, plan_astar, plan_thetastar};
use terrapath::tasks::sample_task;

fn main() -> terrapath::Result<()> {
    let out_dir = std::path::Path::new("target/render_overlay");
    std::fs::create_dir_all(out_dir).expect("create output dir");

    let grid = OccupancyGrid::from_ascii(
        "
        ....................
        ......##............
        ......##............
        ......##............
        ......##........##..
        ......##........##..
        ................##..
        ................##..
        ....##..........##..
        ....##..........##..
        ....##..............
        ....##..............
        ....##......##......
        ............##......
        ............##......
        ....................
        ",
    )?
    .with_name("slalom");

    let mut task = sample_task(&grid, 0)?;
    task.budget_s = 5.0;
    let astar = plan_astar(&grid, &task, &PlannerConfig::new(PlannerKind::Astar));
    let theta = plan_thetastar(&grid, &task, &PlannerConfig::new(PlannerKind::Thetastar));
    println!(
        "astar: {:?}, cost {:.3} over {} waypoints",
        astar.status,
        astar.cost.unwrap_or(f64::NAN),
        astar.path.len()
    );
    println!(
        "theta*: {:?}, cost {:.3} over {} waypoints",
        theta.status,
        theta.cost.unwrap_or(f64::NAN),
        theta.path.len()
    );

    let labeled = [
        ("astar".to_string(), &astar.path),
        ("thetastar".to_string(), &theta.path),
    ];
    let svg = out_dir.join("slalom.svg");
    write_overlay(&grid, &labeled, Some((task.start, task.goal)), &svg)?;
    println!("wrote {}", svg.display());
    Ok(())
}
