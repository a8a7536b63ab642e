//! Run all six planners on one map and compare their results.
//!
//! ```bash
//! cargo run --example plan_on_grid
//! ```

use terrapath::grid::OccupancyGrid;
use terrapath::planners::{PlannerConfig, PlannerKind, plan};
use terrapath::tasks::sample_task;

fn main() -> terrapath::Result<()> {
    let grid = OccupancyGrid::from_ascii(
        "
        ........................
        ........####............
        ........####............
        ........####............
        ...########......###....
        ...#..............###...
        ...#...######......##...
        ...#...#....#.......#...
        .......#....#.......#...
        .......#....########....
        ....####................
        ....#...................
        ....#......#######......
        ...........#.....#......
        .....###...#.....#......
        .....###...........#####
        ........................
        ",
    )?
    .with_name("courtyards");

    let mut task = sample_task(&grid, 0)?;
    task.budget_s = 10.0;
    println!(
        "map {}: {}x{}, start {} goal {}\n",
        grid.name(),
        grid.width(),
        grid.height(),
        task.start,
        task.goal
    );
    println!(
        "{:<12} {:>9} {:>10} {:>10} {:>7} {:>7}",
        "planner", "status", "length", "time (ms)", "iters", "waypts"
    );
    for kind in PlannerKind::ALL {
        let cfg = PlannerConfig::new(kind).with_seed(7);
        let result = plan(&grid, &task, &cfg);
        println!(
            "{:<12} {:>9} {:>10} {:>10.2} {:>7} {:>7}",
            kind.to_string(),
            format!("{:?}", result.status).to_lowercase(),
            result
                .cost
                .map(|c| format!("{c:.3}"))
                .unwrap_or_else(|| "-".into()),
            result.planning_time_s * 1e3,
            result.iterations,
            result.path.len()
        );
    }
    println!("\ngraph planners agree on optimal cost; theta* cuts corners any-angle");
    Ok(())
}
