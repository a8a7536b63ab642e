//! Exact Euclidean distance transform over occupancy grids.
//!
//! Two-pass Felzenszwalb-Huttenlocher construction: per-row squared
//! distances to the nearest obstacle column, then a lower-envelope-of-
//! parabolas pass down each column. Squared distances stay integral in
//! f64, so results are exact. The grid is padded with a one-cell occupied
//! ring first, consistent with out-of-bounds space being non-traversable.

use crate::grid::{Cell, OccupancyGrid};

/// Per-cell Euclidean distance (cell units) to the nearest occupied cell
/// center, counting the boundary ring just outside the grid as occupied.
#[derive(Clone, Debug)]
pub struct DistanceField {
    width: usize,
    height: usize,
    dist: Vec<f64>,
}

impl DistanceField {
    pub fn from_grid(grid: &OccupancyGrid) -> Self {
        let (w, h) = (grid.width() + 2, grid.height() + 2);
        let mut obstacle = vec![true; w * h];
        for cell in grid.iter_cells() {
            if grid.is_free(cell) {
                obstacle[(cell.row + 1) * w + cell.col + 1] = false;
            }
        }
        let squared = squared_edt(&obstacle, w, h);
        let mut dist = Vec::with_capacity(grid.len());
        for r in 0..grid.height() {
            for c in 0..grid.width() {
                dist.push(squared[(r + 1) * w + c + 1].sqrt());
            }
        }
        DistanceField {
            width: grid.width(),
            height: grid.height(),
            dist,
        }
    }

    pub fn at(&self, cell: Cell) -> f64 {
        debug_assert!(cell.row < self.height && cell.col < self.width);
        self.dist[cell.row * self.width + cell.col]
    }

    pub fn values(&self) -> &[f64] {
        &self.dist
    }
}

fn squared_edt(obstacle: &[bool], width: usize, height: usize) -> Vec<f64> {
    const INF: f64 = 1e20;
    // Row pass: squared distance to the nearest obstacle in the same row.
    let mut rowdist = vec![INF; width * height];
    let mut column: Vec<f64> = vec![0.0; height.max(width)];
    let mut out = vec![0.0; width * height];
    for r in 0..height {
        let row = &mut rowdist[r * width..(r + 1) * width];
        let src = &obstacle[r * width..(r + 1) * width];
        let f: Vec<f64> = src.iter().map(|&o| if o { 0.0 } else { INF }).collect();
        dt_1d(&f, row);
    }
    // Column pass over the row results.
    let mut scratch = vec![0.0; height];
    for c in 0..width {
        for r in 0..height {
            column[r] = rowdist[r * width + c];
        }
        dt_1d(&column[..height], &mut scratch);
        for r in 0..height {
            out[r * width + c] = scratch[r];
        }
    }
    out
}

/// 1D squared distance transform of sampled function `f` (lower envelope
/// of the parabolas `f[i] + (x - i)^2`).
fn dt_1d(f: &[f64], out: &mut [f64]) {
    let n = f.len();
    debug_assert!(out.len() >= n);
    let mut v = vec![0usize; n]; // parabola apex positions
    let mut z = vec![0.0f64; n + 1]; // envelope breakpoints
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let s = ((f[q] + (q * q) as f64) - (f[v[k]] + (v[k] * v[k]) as f64))
                / (2.0 * q as f64 - 2.0 * v[k] as f64);
            if s <= z[k] {
                k -= 1;
            } else {
                k += 1;
                v[k] = q;
                z[k] = s;
                z[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    k = 0;
    for (q, out_q) in out.iter_mut().enumerate().take(n) {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let d = q as f64 - v[k] as f64;
        *out_q = d * d + f[v[k]];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::FREE;

    /// Brute-force oracle: scan every obstacle cell including the padding
    /// ring.
    fn brute_force(grid: &OccupancyGrid, cell: Cell) -> f64 {
        let mut best = f64::INFINITY;
        for r in -1..=(grid.height() as isize) {
            for c in -1..=(grid.width() as isize) {
                let inside =
                    r >= 0 && c >= 0 && (r as usize) < grid.height() && (c as usize) < grid.width();
                let occupied = if inside {
                    !grid.is_free(Cell::new(r as usize, c as usize))
                } else {
                    true
                };
                if occupied {
                    let dr = cell.row as f64 - r as f64;
                    let dc = cell.col as f64 - c as f64;
                    best = best.min((dr * dr + dc * dc).sqrt());
                }
            }
        }
        best
    }

    #[test]
    fn center_of_open_5x5_is_three_from_boundary() {
        let g = OccupancyGrid::filled(5, 5, FREE).unwrap();
        let field = DistanceField::from_grid(&g);
        assert_eq!(field.at(Cell::new(2, 2)), 3.0);
        assert_eq!(field.at(Cell::new(0, 0)), 1.0);
    }

    #[test]
    fn adjacent_and_diagonal_distances() {
        let g = OccupancyGrid::from_ascii(
            "
            ....
            .#..
            ....
            ....
            ",
        )
        .unwrap();
        let field = DistanceField::from_grid(&g);
        assert_eq!(field.at(Cell::new(1, 2)), 1.0);
        assert_eq!(field.at(Cell::new(2, 2)), std::f64::consts::SQRT_2);
    }

    #[test]
    fn matches_brute_force_on_random_grids() {
        for seed in 0..10 {
            let g = crate::synthetic::random_grid(17, 13, 0.2, seed);
            let field = DistanceField::from_grid(&g);
            for cell in g.iter_cells() {
                let expected = brute_force(&g, cell);
                let got = field.at(cell);
                assert!(
                    (got - expected).abs() < 1e-9,
                    "seed {seed} cell {cell}: {got} vs {expected}"
                );
            }
        }
    }

    #[test]
    fn occupied_cells_have_zero_distance() {
        let g = OccupancyGrid::new(2, 1, vec![0, 1]).unwrap();
        let field = DistanceField::from_grid(&g);
        assert_eq!(field.at(Cell::new(0, 1)), 0.0);
        assert_eq!(field.at(Cell::new(0, 0)), 1.0);
    }
}
