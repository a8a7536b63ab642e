//! Binary occupancy grids and the geometric primitives shared by every
//! planner: connectivity, line of sight, path length and feasibility.
//!
//! Coordinate convention, used everywhere in this crate: a cell is addressed
//! as `(row, col)` with the origin at the top-left corner and row-major
//! storage. Continuous coordinates map a cell to its center, `x = col`,
//! `y = row`, so cell `(r, c)` covers the unit square
//! `[c - 0.5, c + 0.5] x [r - 0.5, r + 0.5]`. Out-of-bounds space is treated
//! as occupied.
//!
//! Connectivity is 8-connected with unit cost for orthogonal moves and
//! `sqrt(2)` for diagonal moves. A diagonal move is blocked when either of
//! the two flanking orthogonal cells is occupied, so a path can never slip
//! between two corner-touching obstacles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FREE: u8 = 0;
pub const OCCUPIED: u8 = 1;

/// Grid cell address: `(row, col)`, origin top-left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
}

// On the wire a cell is the two-element array [row, col].
impl Serialize for Cell {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.row, self.col).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let (row, col) = <(usize, usize)>::deserialize(deserializer)?;
        Ok(Cell { row, col })
    }
}

impl Cell {
    pub const fn new(row: usize, col: usize) -> Self {
        Cell { row, col }
    }

    /// Row-major index within a grid of the given width.
    pub fn index(&self, width: usize) -> usize {
        self.row * width + self.col
    }

    /// Euclidean distance between cell centers, in cell units.
    pub fn distance(&self, other: Cell) -> f64 {
        let dr = self.row as f64 - other.row as f64;
        let dc = self.col as f64 - other.col as f64;
        (dr * dr + dc * dc).sqrt()
    }

    /// Center of the cell in continuous `(x, y)` coordinates.
    pub fn center(&self) -> (f64, f64) {
        (self.col as f64, self.row as f64)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

/// 2D binary traversability map. Immutable once built; cheap to share
/// across concurrent planner invocations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    cells: Vec<u8>,
    resolution_m: f64,
    name: String,
}

impl OccupancyGrid {
    /// Build a grid from row-major cell values (0 = free, 1 = occupied).
    pub fn new(width: usize, height: usize, cells: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if cells.len() != width * height {
            return Err(Error::InvalidGrid(format!(
                "expected {} cells for a {width}x{height} grid, got {}",
                width * height,
                cells.len()
            )));
        }
        if let Some(bad) = cells.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidGrid(format!(
                "cell values must be 0 or 1, found {bad}"
            )));
        }
        Ok(OccupancyGrid {
            width,
            height,
            cells,
            resolution_m: 1.0,
            name: String::new(),
        })
    }

    /// Grid with every cell set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    /// Parse ASCII art into a grid: `.` or `0` is free, `#` or `1` is
    /// occupied, one text line per grid row. Whitespace-only lines are
    /// skipped. Handy for tests and examples.
    pub fn from_ascii(art: &str) -> Result<Self> {
        let rows: Vec<&str> = art
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(Error::InvalidGrid("empty ascii grid".into()));
        }
        let width = rows[0].chars().count();
        let mut cells = Vec::with_capacity(rows.len() * width);
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(Error::InvalidGrid(format!(
                    "row {i} has {} cells, expected {width}",
                    row.chars().count()
                )));
            }
            for ch in row.chars() {
                match ch {
                    '.' | '0' => cells.push(FREE),
                    '#' | '1' => cells.push(OCCUPIED),
                    other => {
                        return Err(Error::InvalidGrid(format!(
                            "unexpected character {other:?}"
                        )));
                    }
                }
            }
        }
        Self::new(width, rows.len(), cells)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_resolution_m(mut self, resolution_m: f64) -> Result<Self> {
        if resolution_m.is_nan() || resolution_m <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "resolution_m must be positive, got {resolution_m}"
            )));
        }
        self.resolution_m = resolution_m;
        Ok(self)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Meters per cell edge.
    pub fn resolution_m(&self) -> f64 {
        self.resolution_m
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Raw row-major cell values.
    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn in_bounds(&self, cell: Cell) -> bool {
        cell.row < self.height && cell.col < self.width
    }

    /// True iff `cell` is in bounds and free. Out-of-bounds counts as
    /// occupied, so this is a total function.
    pub fn is_free(&self, cell: Cell) -> bool {
        self.in_bounds(cell) && self.cells[cell.index(self.width)] == FREE
    }

    pub fn is_occupied(&self, cell: Cell) -> bool {
        !self.is_free(cell)
    }

    pub fn count_occupied(&self) -> usize {
        self.cells.iter().filter(|&&v| v == OCCUPIED).count()
    }

    pub fn count_free(&self) -> usize {
        self.len() - self.count_occupied()
    }

    /// Iterate all cells in row-major order.
    pub fn iter_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |r| (0..self.width).map(move |c| Cell::new(r, c)))
    }

    /// Free 8-connected neighbors of `cell` with their move costs:
    /// 1 for orthogonal moves, `sqrt(2)` for diagonals. A diagonal is
    /// excluded when either flanking orthogonal cell is occupied. An
    /// occupied or out-of-bounds input yields no neighbors.
    pub fn neighbors(&self, cell: Cell) -> Vec<(Cell, f64)> {
        let mut out = Vec::with_capacity(8);
        if !self.is_free(cell) {
            return out;
        }
        // (dr, dc) in a fixed order so downstream tie-breaking is stable.
        const MOVES: [(isize, isize); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        let (r, c) = (cell.row as isize, cell.col as isize);
        for (dr, dc) in MOVES {
            let (nr, nc) = (r + dr, c + dc);
            if nr < 0 || nc < 0 {
                continue;
            }
            let n = Cell::new(nr as usize, nc as usize);
            if !self.is_free(n) {
                continue;
            }
            if dr != 0 && dc != 0 {
                let flank_a = Cell::new(r as usize, nc as usize);
                let flank_b = Cell::new(nr as usize, c as usize);
                if !self.is_free(flank_a) || !self.is_free(flank_b) {
                    continue;
                }
                out.push((n, std::f64::consts::SQRT_2));
            } else {
                out.push((n, 1.0));
            }
        }
        out
    }

    /// True iff every cell touched by the closed segment between the centers
    /// of `a` and `b` is free (supercover traversal: a segment grazing a
    /// cell corner checks all cells meeting at that corner). False when
    /// either endpoint is out of bounds.
    pub fn line_of_sight(&self, a: Cell, b: Cell) -> bool {
        if !self.in_bounds(a) || !self.in_bounds(b) {
            return false;
        }
        supercover_visit(a, b, |row, col| {
            self.cells[row as usize * self.width + col as usize] == FREE
        })
    }
}

/// Visit every cell the closed segment between the centers of `a` and `b`
/// touches, in traversal order from `a`. Stops early and returns false the
/// first time `visit` returns false. Integer arithmetic throughout, so
/// corner grazes are detected exactly and both cells flanking a crossed
/// corner are visited.
pub fn supercover_visit(a: Cell, b: Cell, mut visit: impl FnMut(isize, isize) -> bool) -> bool {
    let (mut x, mut y) = (a.col as isize, a.row as isize);
    let (x1, y1) = (b.col as isize, b.row as isize);
    let (sx, sy) = ((x1 - x).signum(), (y1 - y).signum());
    let (dx, dy) = ((x1 - x).abs(), (y1 - y).abs());
    if !visit(y, x) {
        return false;
    }
    let (ddx, ddy) = (2 * dx, 2 * dy);
    if ddx >= ddy {
        let mut error = dx;
        let mut error_prev = dx;
        for _ in 0..dx {
            x += sx;
            error += ddy;
            if error > ddx {
                y += sy;
                error -= ddx;
                if error + error_prev < ddx {
                    if !visit(y - sy, x) {
                        return false;
                    }
                } else if error + error_prev > ddx {
                    if !visit(y, x - sx) {
                        return false;
                    }
                } else {
                    // Segment crosses a lattice corner exactly: both cells
                    // flanking the corner are touched.
                    if !visit(y - sy, x) {
                        return false;
                    }
                    if !visit(y, x - sx) {
                        return false;
                    }
                }
            }
            if !visit(y, x) {
                return false;
            }
            error_prev = error;
        }
    } else {
        let mut error = dy;
        let mut error_prev = dy;
        for _ in 0..dy {
            y += sy;
            error += ddx;
            if error > ddy {
                x += sx;
                error -= ddy;
                if error + error_prev < ddy {
                    if !visit(y, x - sx) {
                        return false;
                    }
                } else if error + error_prev > ddy {
                    if !visit(y - sy, x) {
                        return false;
                    }
                } else {
                    if !visit(y, x - sx) {
                        return false;
                    }
                    if !visit(y - sy, x) {
                        return false;
                    }
                }
            }
            if !visit(y, x) {
                return false;
            }
            error_prev = error;
        }
    }
    true
}

/// Ordered waypoint sequence through a grid. Grid planners emit chains of
/// 8-connected cells; any-angle and sampling planners emit waypoints that
/// are pairwise visible instead.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridPath {
    pub waypoints: Vec<Cell>,
}

impl GridPath {
    pub fn new(waypoints: Vec<Cell>) -> Self {
        GridPath { waypoints }
    }

    pub fn single(cell: Cell) -> Self {
        GridPath {
            waypoints: vec![cell],
        }
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn first(&self) -> Option<Cell> {
        self.waypoints.first().copied()
    }

    pub fn last(&self) -> Option<Cell> {
        self.waypoints.last().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = Cell> + '_ {
        self.waypoints.iter().copied()
    }

    /// Consecutive waypoint pairs.
    pub fn segments(&self) -> impl Iterator<Item = (Cell, Cell)> + '_ {
        self.waypoints.windows(2).map(|w| (w[0], w[1]))
    }

    /// Sum of Euclidean distances between consecutive waypoints, in cell
    /// units. A single waypoint has length 0; an empty path is an error.
    pub fn length(&self) -> Result<f64> {
        if self.waypoints.is_empty() {
            return Err(Error::EmptyPath);
        }
        Ok(self.segments().map(|(a, b)| a.distance(b)).sum())
    }
}

impl From<Vec<Cell>> for GridPath {
    fn from(waypoints: Vec<Cell>) -> Self {
        GridPath { waypoints }
    }
}

/// Sum of Euclidean distances between consecutive waypoints.
pub fn path_length(path: &GridPath) -> Result<f64> {
    path.length()
}

/// A path solves the task iff it starts at `start`, ends at `goal`, every
/// waypoint is free, and every consecutive pair is mutually visible (which
/// subsumes cell-to-cell continuity on the grid).
pub fn is_feasible(grid: &OccupancyGrid, path: &GridPath, start: Cell, goal: Cell) -> bool {
    if path.first() != Some(start) || path.last() != Some(goal) {
        return false;
    }
    if !path.iter().all(|w| grid.is_free(w)) {
        return false;
    }
    path.segments().all(|(a, b)| grid.line_of_sight(a, b))
}
