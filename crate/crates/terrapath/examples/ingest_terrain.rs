//! Turn elevation terrain into occupancy grids at several slope
//! thresholds and watch the obstacle set shrink as the threshold rises.
//!
//! ```bash
//! cargo run --example ingest_terrain
//! ```

use terrapath::grid_io::{GridFormat, write_grid};
use terrapath::synthetic::fractal_terrain;
use terrapath::terrain::{IngestConfig, threshold_to_grid};
use terrapath::terrain_io::write_esri_ascii;

fn main() -> terrapath::Result<()> {
    let out_dir = std::path::Path::new("target/ingest_terrain");
    std::fs::create_dir_all(out_dir).expect("create output dir");

    // A 256x256 synthetic DEM with ~80 m of relief at 2 m per sample.
    let raster = fractal_terrain(256, 256, 42, 80.0, 2.0).with_name("demo-terrain");
    write_esri_ascii(&raster, &out_dir.join("demo-terrain.asc"))?;
    println!(
        "terrain: {}x{} samples at {} m/px",
        raster.width(),
        raster.height(),
        raster.ground_res_m()
    );

    for threshold in [10.0, 15.0, 20.0] {
        let mut cfg = IngestConfig::new(threshold, 4);
        cfg.roughness_threshold_m = None;
        let grid = threshold_to_grid(&raster, &cfg)?.with_name(format!("demo-{threshold:.0}"));
        let occupied_pct = 100.0 * grid.count_occupied() as f64 / grid.len() as f64;
        println!(
            "threshold {threshold:>4.1} deg -> {}x{} grid at {} m/cell, {occupied_pct:.1}% occupied",
            grid.width(),
            grid.height(),
            grid.resolution_m()
        );
        let path = out_dir.join(format!("demo-{threshold:.0}.pgm"));
        write_grid(&grid, GridFormat::Pgm, &path)?;
        println!("  wrote {}", path.display());
    }
    println!("\nhigher thresholds tolerate steeper terrain, so obstacles only shrink");
    Ok(())
}
