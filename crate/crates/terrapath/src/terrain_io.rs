//! Elevation raster input: ESRI ASCII grids (`.asc`) and float CSV with a
//! JSON sidecar. GeoTIFF and other GIS formats are expected to be converted
//! to `.asc` with standard tooling (e.g. `gdal_translate -of AAIGrid`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terrain::ElevationRaster;

/// Sidecar for CSV elevation files: `<file>.json` next to the data.
#[derive(Serialize, Deserialize)]
pub struct RasterSidecar {
    pub ground_res_m: f64,
    #[serde(default)]
    pub nodata: Option<f64>,
    #[serde(default)]
    pub name: Option<String>,
}

/// Read a raster, dispatching on the file extension: `.asc` is an ESRI
/// ASCII grid, `.csv` is comma-separated floats with a sidecar.
pub fn read_raster(path: &Path) -> Result<ElevationRaster> {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("asc") => read_esri_ascii(path),
        Some(e) if e.eq_ignore_ascii_case("csv") => read_elevation_csv(path),
        _ => Err(Error::Format(format!(
            "cannot infer raster format of {} (expected .asc or .csv)",
            path.display()
        ))),
    }
}

/// Parse an ESRI ASCII grid: `ncols`, `nrows`, `xllcorner`/`xllcenter`,
/// `yllcorner`/`yllcenter`, `cellsize`, optional `nodata_value` header
/// (case-insensitive), followed by row-major values with the top row first.
pub fn read_esri_ascii(path: &Path) -> Result<ElevationRaster> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let path_str = path.display().to_string();
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("raster")
        .to_string();
    parse_esri_ascii(&text, &path_str).map(|r| r.with_name(name))
}

pub fn parse_esri_ascii(text: &str, source: &str) -> Result<ElevationRaster> {
    let mut ncols = None;
    let mut nrows = None;
    let mut cellsize = None;
    let mut nodata: Option<f64> = None;
    let mut lines = text.lines().enumerate().peekable();
    while let Some(&(i, line)) = lines.peek() {
        let mut parts = line.split_whitespace();
        let Some(key) = parts.next() else {
            lines.next();
            continue;
        };
        let key = key.to_ascii_lowercase();
        let known = matches!(
            key.as_str(),
            "ncols"
                | "nrows"
                | "xllcorner"
                | "yllcorner"
                | "xllcenter"
                | "yllcenter"
                | "cellsize"
                | "nodata_value"
        );
        if !known {
            break; // start of the data block
        }
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(source, i + 1, format!("header {key} missing value")))?;
        let parsed: f64 = value
            .parse()
            .map_err(|_| Error::parse(source, i + 1, format!("bad header value {value:?}")))?;
        match key.as_str() {
            "ncols" => ncols = Some(parsed as usize),
            "nrows" => nrows = Some(parsed as usize),
            "cellsize" => cellsize = Some(parsed),
            "nodata_value" => nodata = Some(parsed),
            _ => {} // georeferencing corners are accepted and ignored
        }
        lines.next();
    }
    let ncols = ncols.ok_or_else(|| Error::parse(source, 1, "missing ncols"))?;
    let nrows = nrows.ok_or_else(|| Error::parse(source, 1, "missing nrows"))?;
    let cellsize = cellsize.ok_or_else(|| Error::parse(source, 1, "missing cellsize"))?;

    let mut values = Vec::with_capacity(ncols * nrows);
    for (i, line) in lines {
        for tok in line.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| Error::parse(source, i + 1, format!("bad value {tok:?}")))?;
            let v = match nodata {
                Some(nd) if v == nd => f64::NAN,
                _ => v,
            };
            values.push(v);
        }
    }
    if values.len() != ncols * nrows {
        return Err(Error::Format(format!(
            "{source}: expected {} values ({ncols}x{nrows}), got {}",
            ncols * nrows,
            values.len()
        )));
    }
    ElevationRaster::new(ncols, nrows, values, cellsize)
}

/// Write an ESRI ASCII grid; NaN samples become the declared nodata value.
pub fn write_esri_ascii(raster: &ElevationRaster, path: &Path) -> Result<()> {
    let nodata = -9999.0;
    let mut out = String::new();
    out.push_str(&format!("ncols {}\n", raster.width()));
    out.push_str(&format!("nrows {}\n", raster.height()));
    out.push_str("xllcorner 0.0\nyllcorner 0.0\n");
    out.push_str(&format!("cellsize {}\n", raster.ground_res_m()));
    out.push_str(&format!("NODATA_value {nodata}\n"));
    for row in raster.values().chunks(raster.width()) {
        let line: Vec<String> = row
            .iter()
            .map(|v| {
                if v.is_nan() {
                    format!("{nodata}")
                } else {
                    format!("{v}")
                }
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read comma-separated elevation values; the `<file>.json` sidecar
/// supplies the ground resolution and optional no-data marker.
pub fn read_elevation_csv(path: &Path) -> Result<ElevationRaster> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let path_str = path.display().to_string();

    let mut sc_path = path.as_os_str().to_os_string();
    sc_path.push(".json");
    let sc_path = std::path::PathBuf::from(sc_path);
    let sidecar: RasterSidecar = if sc_path.exists() {
        let sc_text = fs::read_to_string(&sc_path).map_err(|e| Error::io(&sc_path, e))?;
        serde_json::from_str(&sc_text)
            .map_err(|e| Error::Format(format!("{}: {e}", sc_path.display())))?
    } else {
        RasterSidecar {
            ground_res_m: 1.0,
            nodata: None,
            name: None,
        }
    };

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| {
                Error::parse(&path_str, i + 1, format!("bad elevation value {field:?}"))
            })?;
            let v = match sidecar.nodata {
                Some(nd) if v == nd => f64::NAN,
                _ => v,
            };
            row.push(v);
        }
        if let Some(first) = rows.first()
            && first.len() != row.len()
        {
            return Err(Error::parse(
                &path_str,
                i + 1,
                format!("row has {} values, expected {}", row.len(), first.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(&path_str, 1, "empty elevation CSV"));
    }
    let width = rows[0].len();
    let height = rows.len();
    let name = sidecar.name.unwrap_or_else(|| {
        path.file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("raster")
            .to_string()
    });
    ElevationRaster::new(width, height, rows.concat(), sidecar.ground_res_m)
        .map(|r| r.with_name(name))
}
