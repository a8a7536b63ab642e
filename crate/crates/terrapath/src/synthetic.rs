//! Seeded synthetic fixtures: fractal terrain, random obstacle grids and
//! mazes. These back the runnable examples and the acceptance suite, and
//! let the pipeline be exercised end to end without downloading real DTMs.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grid::{Cell, FREE, OCCUPIED, OccupancyGrid};
use crate::terrain::ElevationRaster;

/// Value-noise terrain: several octaves of bilinearly interpolated random
/// lattices, scaled to roughly `relief_m` of total relief. Deterministic in
/// `seed`.
pub fn fractal_terrain(
    width: usize,
    height: usize,
    seed: u64,
    relief_m: f64,
    ground_res_m: f64,
) -> ElevationRaster {
    assert!(
        width >= 2 && height >= 2,
        "terrain needs at least 2x2 samples"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0f64; width * height];
    let mut amplitude = 1.0;
    let mut cell = (width.max(height) / 2).max(2);
    let mut total_amp = 0.0;
    while cell >= 2 {
        let lat_w = width.div_ceil(cell) + 2;
        let lat_h = height.div_ceil(cell) + 2;
        let lattice: Vec<f64> = (0..lat_w * lat_h).map(|_| rng.random::<f64>()).collect();
        for r in 0..height {
            for c in 0..width {
                let fx = c as f64 / cell as f64;
                let fy = r as f64 / cell as f64;
                let (x0, y0) = (fx.floor() as usize, fy.floor() as usize);
                let (tx, ty) = (fx - x0 as f64, fy - y0 as f64);
                // Smoothstep keeps lattice seams out of the slope field.
                let (sx, sy) = (tx * tx * (3.0 - 2.0 * tx), ty * ty * (3.0 - 2.0 * ty));
                let v00 = lattice[y0 * lat_w + x0];
                let v01 = lattice[y0 * lat_w + x0 + 1];
                let v10 = lattice[(y0 + 1) * lat_w + x0];
                let v11 = lattice[(y0 + 1) * lat_w + x0 + 1];
                let top = v00 + (v01 - v00) * sx;
                let bot = v10 + (v11 - v10) * sx;
                values[r * width + c] += amplitude * (top + (bot - top) * sy);
            }
        }
        total_amp += amplitude;
        amplitude *= 0.5;
        cell /= 2;
    }
    let scale = relief_m / total_amp;
    for v in &mut values {
        *v *= scale;
    }
    ElevationRaster::new(width, height, values, ground_res_m)
        .expect("generator produces a valid raster")
        .with_name(format!("fractal-{seed}"))
}

/// Bernoulli obstacle grid with the given occupied-cell density.
pub fn random_grid(width: usize, height: usize, density: f64, seed: u64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = (0..width * height)
        .map(|_| {
            if rng.random::<f64>() < density {
                OCCUPIED
            } else {
                FREE
            }
        })
        .collect();
    OccupancyGrid::new(width, height, cells)
        .expect("generator produces a valid grid")
        .with_name(format!("rand-{width}x{height}-{seed}"))
}

/// Random grid re-rolled until `start` and `goal` land in the same free
/// component, returning the grid and a solvable cell pair. Obstacle density
/// is kept as requested; only the seed advances between attempts.
pub fn random_solvable_grid(
    width: usize,
    height: usize,
    density: f64,
    seed: u64,
) -> (OccupancyGrid, Cell, Cell) {
    for attempt in 0..10_000u64 {
        let grid = random_grid(width, height, density, seed.wrapping_add(attempt));
        if let Some((start, goal)) = farthest_connected_pair(&grid) {
            return (grid, start, goal);
        }
    }
    unreachable!("a solvable grid should appear well within the attempt budget")
}

/// Pick the lowest-index free cell and the farthest cell reachable from it
/// (movement connectivity); None when no pair of distinct connected free
/// cells exists.
fn farthest_connected_pair(grid: &OccupancyGrid) -> Option<(Cell, Cell)> {
    let start = grid.iter_cells().find(|&c| grid.is_free(c))?;
    let mut seen = vec![false; grid.len()];
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start.index(grid.width())] = true;
    let mut last = start;
    while let Some(cell) = queue.pop_front() {
        last = cell;
        for (n, _) in grid.neighbors(cell) {
            let i = n.index(grid.width());
            if !seen[i] {
                seen[i] = true;
                queue.push_back(n);
            }
        }
    }
    (last != start).then_some((start, last))
}

/// Serpentine maze: horizontal walls every `gap` rows, each with a single
/// opening on alternating sides. With `sealed_goal` the bottom-right cell
/// is boxed in, making every task into it unsolvable.
pub fn serpentine_maze(
    width: usize,
    height: usize,
    gap: usize,
    sealed_goal: bool,
) -> OccupancyGrid {
    assert!(width >= 4 && height >= 4 && gap >= 2);
    let mut cells = vec![FREE; width * height];
    let mut left_opening = false;
    let mut row = gap;
    while row < height {
        for col in 0..width {
            cells[row * width + col] = OCCUPIED;
        }
        let open_col = if left_opening { 0 } else { width - 1 };
        cells[row * width + open_col] = FREE;
        left_opening = !left_opening;
        row += gap;
    }
    if sealed_goal {
        let (gr, gc) = (height - 1, width - 1);
        for (dr, dc) in [(0isize, -1isize), (-1, -1), (-1, 0)] {
            let (r, c) = (gr as isize + dr, gc as isize + dc);
            cells[r as usize * width + c as usize] = OCCUPIED;
        }
        cells[gr * width + gc] = FREE;
    }
    OccupancyGrid::new(width, height, cells)
        .expect("maze dimensions are valid")
        .with_name(format!("maze-{width}x{height}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractal_terrain_is_deterministic() {
        let a = fractal_terrain(32, 24, 7, 80.0, 2.0);
        let b = fractal_terrain(32, 24, 7, 80.0, 2.0);
        assert_eq!(a.values(), b.values());
        let c = fractal_terrain(32, 24, 8, 80.0, 2.0);
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn random_solvable_pair_is_connected() {
        let (grid, start, goal) = random_solvable_grid(20, 20, 0.3, 1);
        assert!(grid.is_free(start));
        assert!(grid.is_free(goal));
        assert_ne!(start, goal);
    }

    #[test]
    fn sealed_maze_goal_is_isolated() {
        let m = serpentine_maze(12, 12, 3, true);
        let goal = Cell::new(11, 11);
        assert!(m.is_free(goal));
        assert!(m.neighbors(goal).is_empty());
    }
}
