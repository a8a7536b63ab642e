//! Elevation rasters and their conversion to traversability grids.
//!
//! The pipeline is: block-average downsample the raster, compute per-sample
//! slope (and optionally detrended roughness) on the downsampled raster,
//! then mark cells non-traversable where slope meets or exceeds the
//! threshold. The slope threshold is inclusive: a cell exactly at the
//! threshold is occupied. No-data samples are carried as NaN and resolve to
//! occupied or free according to [`NodataPolicy`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FREE, OCCUPIED, OccupancyGrid};

/// 2D field of elevation samples in meters, row-major, with NaN marking
/// no-data. `ground_res_m` is the ground distance covered by one sample
/// along both axes.
#[derive(Clone, Debug, PartialEq)]
pub struct ElevationRaster {
    width: usize,
    height: usize,
    values: Vec<f64>,
    ground_res_m: f64,
    name: String,
}

impl ElevationRaster {
    pub fn new(width: usize, height: usize, values: Vec<f64>, ground_res_m: f64) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidRaster(format!(
                "dimensions must be at least 1x1, got {width}x{height}"
            )));
        }
        if values.len() != width * height {
            return Err(Error::InvalidRaster(format!(
                "expected {} samples for a {width}x{height} raster, got {}",
                width * height,
                values.len()
            )));
        }
        if ground_res_m.is_nan() || ground_res_m <= 0.0 {
            return Err(Error::InvalidRaster(format!(
                "ground_res_m must be positive, got {ground_res_m}"
            )));
        }
        if values.iter().any(|v| v.is_infinite()) {
            return Err(Error::InvalidRaster(
                "elevation values must be finite or NaN (no-data)".into(),
            ));
        }
        Ok(ElevationRaster {
            width,
            height,
            values,
            ground_res_m,
            name: String::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn ground_res_m(&self) -> f64 {
        self.ground_res_m
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    fn valid(&self, row: usize, col: usize) -> Option<f64> {
        let v = self.at(row, col);
        if v.is_nan() { None } else { Some(v) }
    }
}

/// Row-major scalar field produced by slope and roughness computations.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub width: usize,
    pub height: usize,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }
}

/// How no-data samples map to occupancy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodataPolicy {
    /// Conservative default: unknown terrain is non-traversable.
    #[default]
    Occupied,
    Free,
}

impl std::str::FromStr for NodataPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "occupied" => Ok(NodataPolicy::Occupied),
            "free" => Ok(NodataPolicy::Free),
            other => Err(Error::Format(format!("unknown nodata policy {other:?}"))),
        }
    }
}

/// Raster-to-grid conversion parameters.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IngestConfig {
    /// Cells with slope at or above this are occupied. Degrees, in (0, 90).
    pub slope_threshold_deg: f64,
    /// Block edge for the mean downsampling step; 1 keeps the raster as-is.
    pub downsample_factor: usize,
    /// Optional detrended-roughness cap in meters; when set, cells at or
    /// above it are occupied as well.
    pub roughness_threshold_m: Option<f64>,
    pub nodata_policy: NodataPolicy,
}

impl IngestConfig {
    pub fn new(slope_threshold_deg: f64, downsample_factor: usize) -> Self {
        IngestConfig {
            slope_threshold_deg,
            downsample_factor,
            roughness_threshold_m: None,
            nodata_policy: NodataPolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slope_threshold_deg > 0.0 && self.slope_threshold_deg < 90.0) {
            return Err(Error::InvalidConfig(format!(
                "slope_threshold_deg must be in (0, 90), got {}",
                self.slope_threshold_deg
            )));
        }
        if self.downsample_factor == 0 {
            return Err(Error::InvalidConfig(
                "downsample_factor must be at least 1".into(),
            ));
        }
        if let Some(r) = self.roughness_threshold_m
            && (r.is_nan() || r <= 0.0)
        {
            return Err(Error::InvalidConfig(format!(
                "roughness_threshold_m must be positive, got {r}"
            )));
        }
        Ok(())
    }
}

/// Window edge used for the roughness field inside [`threshold_to_grid`].
pub const ROUGHNESS_WINDOW: usize = 3;

/// Per-sample terrain slope in degrees: `atan(|grad z|)` with the gradient
/// taken by central differences (one-sided at borders and next to no-data),
/// scaled by the ground resolution. A sample is NaN when it is no-data or
/// when a gradient component cannot be formed on either side.
pub fn compute_slope(raster: &ElevationRaster) -> Result<ScalarField> {
    if raster.width < 2 || raster.height < 2 {
        return Err(Error::InvalidRaster(format!(
            "slope needs at least a 2x2 raster, got {}x{}",
            raster.width, raster.height
        )));
    }
    let res = raster.ground_res_m;
    let mut values = vec![f64::NAN; raster.width * raster.height];
    for row in 0..raster.height {
        for col in 0..raster.width {
            let Some(center) = raster.valid(row, col) else {
                continue;
            };
            let gx = axis_gradient(
                col.checked_sub(1).and_then(|c| raster.valid(row, c)),
                center,
                (col + 1 < raster.width)
                    .then(|| raster.valid(row, col + 1))
                    .flatten(),
                res,
            );
            let gy = axis_gradient(
                row.checked_sub(1).and_then(|r| raster.valid(r, col)),
                center,
                (row + 1 < raster.height)
                    .then(|| raster.valid(row + 1, col))
                    .flatten(),
                res,
            );
            if let (Some(gx), Some(gy)) = (gx, gy) {
                values[row * raster.width + col] = (gx * gx + gy * gy).sqrt().atan().to_degrees();
            }
        }
    }
    Ok(ScalarField {
        width: raster.width,
        height: raster.height,
        values,
    })
}

/// Central difference when both neighbors exist, one-sided otherwise,
/// None when the sample is isolated along this axis.
fn axis_gradient(before: Option<f64>, center: f64, after: Option<f64>, res: f64) -> Option<f64> {
    match (before, after) {
        (Some(b), Some(a)) => Some((a - b) / (2.0 * res)),
        (None, Some(a)) => Some((a - center) / res),
        (Some(b), None) => Some((center - b) / res),
        (None, None) => None,
    }
}

/// Per-sample standard deviation of elevation inside a centered
/// `window x window` patch after removing the patch's least-squares plane.
/// Windows are clipped at the raster border; samples with fewer than three
/// valid points in the window are NaN.
pub fn compute_roughness(raster: &ElevationRaster, window: usize) -> Result<ScalarField> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "roughness window must be odd and at least 3, got {window}"
        )));
    }
    if window > raster.width || window > raster.height {
        return Err(Error::InvalidConfig(format!(
            "roughness window {window} exceeds raster {}x{}",
            raster.width, raster.height
        )));
    }
    let half = (window / 2) as isize;
    let mut values = vec![f64::NAN; raster.width * raster.height];
    for row in 0..raster.height {
        for col in 0..raster.width {
            if raster.valid(row, col).is_none() {
                continue;
            }
            let mut points: Vec<(f64, f64, f64)> = Vec::with_capacity(window * window);
            for dr in -half..=half {
                for dc in -half..=half {
                    let (r, c) = (row as isize + dr, col as isize + dc);
                    if r < 0 || c < 0 || r as usize >= raster.height || c as usize >= raster.width {
                        continue;
                    }
                    if let Some(z) = raster.valid(r as usize, c as usize) {
                        points.push((dc as f64, dr as f64, z));
                    }
                }
            }
            values[row * raster.width + col] = detrended_stddev(&points);
        }
    }
    Ok(ScalarField {
        width: raster.width,
        height: raster.height,
        values,
    })
}

/// Population standard deviation of residuals after a least-squares plane
/// fit `z = a + b*x + c*y`. NaN for fewer than three points.
fn detrended_stddev(points: &[(f64, f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 3 {
        return f64::NAN;
    }
    // Center coordinates for conditioning; the plane fit is invariant.
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mz = points.iter().map(|p| p.2).sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy, mut sxz, mut syz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, z) in points {
        let (dx, dy, dz) = (x - mx, y - my, z - mz);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        sxz += dx * dz;
        syz += dy * dz;
    }
    // Solve [sxx sxy; sxy syy] [b c]^T = [sxz syz]^T; fall back to a flat
    // fit when the window geometry is degenerate (collinear points).
    let det = sxx * syy - sxy * sxy;
    let (b, c) = if det.abs() > 1e-12 * (sxx + syy).max(1.0) {
        ((syy * sxz - sxy * syz) / det, (sxx * syz - sxy * sxz) / det)
    } else if sxx > 1e-12 {
        (sxz / sxx, 0.0)
    } else if syy > 1e-12 {
        (0.0, syz / syy)
    } else {
        (0.0, 0.0)
    };
    let ss: f64 = points
        .iter()
        .map(|&(x, y, z)| {
            let r = (z - mz) - b * (x - mx) - c * (y - my);
            r * r
        })
        .sum();
    (ss / n).sqrt()
}

/// Mean-downsample by `factor x factor` blocks. Partial blocks at the
/// right/bottom edge average whatever samples they cover; no-data samples
/// are excluded from block means and a block with no valid sample stays
/// no-data.
pub fn downsample(raster: &ElevationRaster, factor: usize) -> Result<ElevationRaster> {
    if factor == 0 {
        return Err(Error::InvalidConfig(
            "downsample factor must be at least 1".into(),
        ));
    }
    if factor == 1 {
        return Ok(raster.clone());
    }
    let out_w = raster.width.div_ceil(factor);
    let out_h = raster.height.div_ceil(factor);
    let mut values = Vec::with_capacity(out_w * out_h);
    for br in 0..out_h {
        for bc in 0..out_w {
            let mut sum = 0.0;
            let mut count = 0usize;
            for r in br * factor..((br + 1) * factor).min(raster.height) {
                for c in bc * factor..((bc + 1) * factor).min(raster.width) {
                    if let Some(z) = raster.valid(r, c) {
                        sum += z;
                        count += 1;
                    }
                }
            }
            values.push(if count > 0 {
                sum / count as f64
            } else {
                f64::NAN
            });
        }
    }
    ElevationRaster::new(out_w, out_h, values, raster.ground_res_m * factor as f64)
        .map(|r| r.with_name(raster.name.clone()))
}

/// Convert an elevation raster to an occupancy grid: downsample, compute
/// slope (and roughness when configured), and mark a cell occupied iff its
/// slope meets the threshold, its roughness meets the roughness threshold,
/// or it is no-data under the occupied no-data policy. The output grid
/// resolution is `ground_res_m * downsample_factor`.
pub fn threshold_to_grid(raster: &ElevationRaster, cfg: &IngestConfig) -> Result<OccupancyGrid> {
    cfg.validate()?;
    let ds = downsample(raster, cfg.downsample_factor)?;
    if ds.width < 2 || ds.height < 2 {
        return Err(Error::InvalidRaster(format!(
            "downsampled raster is {}x{}; need at least 2x2 for slope",
            ds.width, ds.height
        )));
    }
    let slope = compute_slope(&ds)?;
    let roughness = match cfg.roughness_threshold_m {
        Some(_) => Some(compute_roughness(&ds, ROUGHNESS_WINDOW)?),
        None => None,
    };
    let nodata_cell = match cfg.nodata_policy {
        NodataPolicy::Occupied => OCCUPIED,
        NodataPolicy::Free => FREE,
    };
    let mut cells = Vec::with_capacity(ds.width * ds.height);
    for row in 0..ds.height {
        for col in 0..ds.width {
            let s = slope.at(row, col);
            if s.is_nan() {
                // No-data sample, or data sample isolated among no-data.
                cells.push(nodata_cell);
                continue;
            }
            let mut occupied = s >= cfg.slope_threshold_deg;
            if let (Some(thresh), Some(field)) = (cfg.roughness_threshold_m, &roughness) {
                let r = field.at(row, col);
                if r.is_nan() {
                    occupied = occupied || nodata_cell == OCCUPIED;
                } else {
                    occupied = occupied || r >= thresh;
                }
            }
            cells.push(if occupied { OCCUPIED } else { FREE });
        }
    }
    OccupancyGrid::new(ds.width, ds.height, cells)?
        .with_name(raster.name.clone())
        .with_resolution_m(ds.ground_res_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_x(width: usize, height: usize, gradient: f64, res: f64) -> ElevationRaster {
        let mut values = Vec::with_capacity(width * height);
        for _ in 0..height {
            for c in 0..width {
                values.push(c as f64 * gradient * res);
            }
        }
        ElevationRaster::new(width, height, values, res).unwrap()
    }

    #[test]
    fn slope_flat_is_zero() {
        let r = ElevationRaster::new(4, 4, vec![5.0; 16], 2.0).unwrap();
        let s = compute_slope(&r).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn slope_of_plane_matches_analytic_value() {
        let g = (10.0_f64).to_radians().tan();
        let r = ramp_x(8, 6, g, 3.0);
        let s = compute_slope(&r).unwrap();
        for row in 0..6 {
            for col in 1..7 {
                assert!(
                    (s.at(row, col) - 10.0).abs() < 1e-9,
                    "slope {} at ({row},{col})",
                    s.at(row, col)
                );
            }
        }
    }

    #[test]
    fn slope_of_diagonal_plane() {
        // Rising equally in x and y with per-axis gradient g: slope is
        // atan(g * sqrt(2)).
        let g = 0.25;
        let (w, h, res) = (6, 6, 2.0);
        let mut values = Vec::new();
        for r in 0..h {
            for c in 0..w {
                values.push((r + c) as f64 * g * res);
            }
        }
        let raster = ElevationRaster::new(w, h, values, res).unwrap();
        let s = compute_slope(&raster).unwrap();
        let expected = (g * std::f64::consts::SQRT_2).atan().to_degrees();
        for row in 1..h - 1 {
            for col in 1..w - 1 {
                assert!((s.at(row, col) - expected).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn slope_rejects_tiny_raster() {
        let r = ElevationRaster::new(1, 3, vec![0.0, 1.0, 2.0], 1.0).unwrap();
        assert!(compute_slope(&r).is_err());
    }

    #[test]
    fn slope_near_nodata_uses_one_sided() {
        let mut values = vec![0.0; 9];
        values[0] = f64::NAN; // corner no-data
        for (i, v) in values.iter_mut().enumerate() {
            if !v.is_nan() {
                *v = (i % 3) as f64; // ramp in x
            }
        }
        let r = ElevationRaster::new(3, 3, values, 1.0).unwrap();
        let s = compute_slope(&r).unwrap();
        assert!(s.at(0, 0).is_nan());
        assert!(!s.at(0, 1).is_nan());
        assert!(!s.at(1, 0).is_nan());
    }

    #[test]
    fn roughness_flat_and_ramp_are_zero() {
        let flat = ElevationRaster::new(5, 5, vec![3.0; 25], 1.0).unwrap();
        let r = compute_roughness(&flat, 3).unwrap();
        assert!(r.values.iter().all(|&v| v.abs() < 1e-12));

        let ramp = ramp_x(6, 6, 0.7, 1.0);
        let r = compute_roughness(&ramp, 3).unwrap();
        assert!(
            r.values.iter().all(|&v| v.abs() < 1e-9),
            "plane removal should leave ~0 residual"
        );
    }

    #[test]
    fn roughness_spike_matches_hand_fit() {
        // 3x3 window over {0 everywhere, +h at center}: symmetric points
        // give a flat fit at h/9; residual population std-dev is
        // sqrt(((8h/9)^2 + 8*(h/9)^2) / 9) = 2*sqrt(2)*h/9.
        let h = 0.9;
        let mut values = vec![0.0; 9];
        values[4] = h;
        let r = ElevationRaster::new(3, 3, values, 1.0).unwrap();
        let field = compute_roughness(&r, 3).unwrap();
        let expected = 2.0 * std::f64::consts::SQRT_2 * h / 9.0;
        assert!((field.at(1, 1) - expected).abs() < 1e-12);
    }

    #[test]
    fn roughness_window_validation() {
        let r = ElevationRaster::new(3, 3, vec![0.0; 9], 1.0).unwrap();
        assert!(compute_roughness(&r, 2).is_err());
        assert!(compute_roughness(&r, 5).is_err());
    }

    #[test]
    fn downsample_identity_and_block_mean() {
        let r = ramp_x(4, 4, 1.0, 1.0);
        assert_eq!(downsample(&r, 1).unwrap(), r);

        let ds = downsample(&r, 2).unwrap();
        assert_eq!((ds.width(), ds.height()), (2, 2));
        assert_eq!(ds.ground_res_m(), 2.0);
        // Block (0,0) covers columns 0..2 with values 0 and 1.
        assert_eq!(ds.at(0, 0), 0.5);
        assert_eq!(ds.at(0, 1), 2.5);
    }

    #[test]
    fn threshold_flat_raster_all_free() {
        let r = ElevationRaster::new(6, 6, vec![2.0; 36], 1.0).unwrap();
        let grid = threshold_to_grid(&r, &IngestConfig::new(10.0, 1)).unwrap();
        assert_eq!(grid.count_occupied(), 0);
    }

    #[test]
    fn threshold_is_inclusive_at_exact_slope() {
        // Pin the inclusive boundary by thresholding at the very slope
        // value the pipeline computes for this ramp. Zeroing the low
        // mantissa bits of the gradient makes col * g exact for every
        // column, so all cells carry the bitwise-identical slope.
        let g = f64::from_bits((10.0_f64).to_radians().tan().to_bits() & !0xFF);
        let r = ramp_x(8, 5, g, 1.0);
        let slope = compute_slope(&r).unwrap();
        let exact = slope.at(2, 3);
        assert!((exact - 10.0).abs() < 1e-9);

        let grid = threshold_to_grid(&r, &IngestConfig::new(exact, 1)).unwrap();
        assert_eq!(
            grid.count_occupied(),
            grid.len(),
            "cells exactly at the threshold must be occupied"
        );
    }

    #[test]
    fn threshold_piecewise_flat_and_steep() {
        // Flat on the left half, 30-degree ramp on the right; threshold 20.
        let (w, h) = (12, 6);
        let g = (30.0_f64).to_radians().tan();
        let mut values = Vec::new();
        for _ in 0..h {
            for c in 0..w {
                let z = if c < w / 2 {
                    0.0
                } else {
                    (c - w / 2 + 1) as f64 * g
                };
                values.push(z);
            }
        }
        let r = ElevationRaster::new(w, h, values, 1.0).unwrap();
        let grid = threshold_to_grid(&r, &IngestConfig::new(20.0, 1)).unwrap();
        for row in 0..h {
            for col in 0..w {
                let cell = crate::grid::Cell::new(row, col);
                if col < w / 2 - 1 {
                    assert!(grid.is_free(cell), "flat side free at {cell}");
                } else if col > w / 2 {
                    assert!(!grid.is_free(cell), "steep side occupied at {cell}");
                }
            }
        }
    }

    #[test]
    fn threshold_monotone_in_slope() {
        let g = (25.0_f64).to_radians().tan();
        let r = ramp_x(10, 10, g, 1.0);
        let g10 = threshold_to_grid(&r, &IngestConfig::new(10.0, 1)).unwrap();
        let g20 = threshold_to_grid(&r, &IngestConfig::new(20.0, 1)).unwrap();
        let g30 = threshold_to_grid(&r, &IngestConfig::new(30.0, 1)).unwrap();
        for i in 0..g10.len() {
            assert!(g30.cells()[i] <= g20.cells()[i]);
            assert!(g20.cells()[i] <= g10.cells()[i]);
        }
    }

    #[test]
    fn nodata_policy_applies() {
        // Interior no-data sample: every neighbor still has a one-sided
        // difference available, so only the NaN cell itself is affected.
        let mut values = vec![0.0; 25];
        values[12] = f64::NAN;
        let r = ElevationRaster::new(5, 5, values, 1.0).unwrap();
        let occ = threshold_to_grid(&r, &IngestConfig::new(10.0, 1)).unwrap();
        assert_eq!(occ.count_occupied(), 1);
        assert!(!occ.is_free(crate::grid::Cell::new(2, 2)));

        let mut cfg = IngestConfig::new(10.0, 1);
        cfg.nodata_policy = NodataPolicy::Free;
        let free = threshold_to_grid(&r, &cfg).unwrap();
        assert_eq!(free.count_occupied(), 0);
    }

    #[test]
    fn border_sample_isolated_by_nodata_follows_policy() {
        // NaN at (1,1) leaves border cells (1,0) and (0,1) with no valid
        // neighbor along one axis, so they resolve through the no-data
        // policy too.
        let mut values = vec![0.0; 16];
        values[5] = f64::NAN;
        let r = ElevationRaster::new(4, 4, values, 1.0).unwrap();
        let occ = threshold_to_grid(&r, &IngestConfig::new(10.0, 1)).unwrap();
        assert_eq!(occ.count_occupied(), 3);
        for cell in [(1, 1), (1, 0), (0, 1)] {
            assert!(!occ.is_free(crate::grid::Cell::new(cell.0, cell.1)));
        }
    }

    #[test]
    fn roughness_criterion_marks_spikes() {
        let mut values = vec![0.0; 49];
        values[24] = 5.0; // spike at (3,3) on flat ground
        let r = ElevationRaster::new(7, 7, values, 1.0).unwrap();
        let mut cfg = IngestConfig::new(45.0, 1);
        cfg.roughness_threshold_m = Some(0.5);
        let grid = threshold_to_grid(&r, &cfg).unwrap();
        // The spike slope also exceeds 45 deg at neighbors, but the center
        // cell itself is flagged through roughness (its central diffs
        // cancel, slope 0 there).
        assert!(!grid.is_free(crate::grid::Cell::new(3, 3)));
    }
}
