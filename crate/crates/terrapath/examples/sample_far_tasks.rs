//! Sample far-apart start/goal tasks on a batch of maps and round-trip
//! them through the task CSV format.
//!
//! ```bash
//! cargo run --example sample_far_tasks
//! ```

use terrapath::synthetic::{random_grid, serpentine_maze};
use terrapath::tasks::{hop_distances, load_tasks, sample_task, save_tasks};

fn main() -> terrapath::Result<()> {
    let out_dir = std::path::Path::new("target/sample_far_tasks");
    std::fs::create_dir_all(out_dir).expect("create output dir");

    let mut maps = vec![serpentine_maze(40, 40, 5, false).with_name("maze")];
    for i in 0..4u64 {
        maps.push(random_grid(40, 40, 0.25, i).with_name(format!("scatter{i}")));
    }

    let mut tasks = Vec::new();
    println!(
        "{:<10} {:>12} {:>12} {:>10} {:>10}",
        "map", "start", "goal", "euclidean", "hops"
    );
    for grid in &maps {
        let task = sample_task(grid, 3)?;
        let hops = hop_distances(grid, task.start)[task.goal.index(grid.width())];
        println!(
            "{:<10} {:>12} {:>12} {:>10.2} {:>10}",
            grid.name(),
            task.start.to_string(),
            task.goal.to_string(),
            task.start.distance(task.goal),
            hops
        );
        tasks.push(task);
    }

    let csv = out_dir.join("tasks.csv");
    save_tasks(&tasks, &csv)?;
    let reloaded = load_tasks(&csv)?;
    assert_eq!(reloaded, tasks);
    println!(
        "\nsaved and reloaded {} tasks via {}",
        tasks.len(),
        csv.display()
    );
    println!(
        "the maze's hop distance dwarfs its euclidean distance: the double sweep\nfollows the corridors, not the crow"
    );
    Ok(())
}
