//! Occupancy grid file I/O.
//!
//! Two on-disk formats: PGM (both P2 ASCII and P5 binary; pixel 0 is
//! occupied, 255 free, any value below 128 reads back as occupied) and CSV
//! of 0/1 integers with one line per grid row. A JSON sidecar next to the
//! grid file (`<file>.json`) carries the grid name and resolution in
//! meters; writes always emit it, reads fall back to the file stem and a
//! 1 m resolution when it is missing.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FREE, OCCUPIED, OccupancyGrid};

/// On-disk grid format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridFormat {
    Pgm,
    Csv,
}

impl GridFormat {
    pub fn from_path(path: &Path) -> Option<GridFormat> {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("pgm") => Some(GridFormat::Pgm),
            Some(e) if e.eq_ignore_ascii_case("csv") => Some(GridFormat::Csv),
            _ => None,
        }
    }
}

impl std::str::FromStr for GridFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pgm" => Ok(GridFormat::Pgm),
            "csv" => Ok(GridFormat::Csv),
            other => Err(Error::Format(format!("unknown grid format {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    name: String,
    resolution_m: f64,
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".json");
    std::path::PathBuf::from(s)
}

/// Write a grid plus its JSON sidecar. Round-trips bit-exactly through
/// [`read_grid`].
pub fn write_grid(grid: &OccupancyGrid, format: GridFormat, path: &Path) -> Result<()> {
    let bytes = match format {
        GridFormat::Pgm => pgm_bytes(grid),
        GridFormat::Csv => csv_bytes(grid),
    };
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let sidecar = Sidecar {
        name: grid.name().to_string(),
        resolution_m: grid.resolution_m(),
    };
    let sc_path = sidecar_path(path);
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    fs::write(&sc_path, json).map_err(|e| Error::io(sc_path, e))?;
    Ok(())
}

/// Read a grid in either format, detected from the extension (PGM magic as
/// a fallback), applying the sidecar when present.
pub fn read_grid(path: &Path) -> Result<OccupancyGrid> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let format = GridFormat::from_path(path).unwrap_or_else(|| {
        if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") {
            GridFormat::Pgm
        } else {
            GridFormat::Csv
        }
    });
    let grid = match format {
        GridFormat::Pgm => parse_pgm(&bytes, path)?,
        GridFormat::Csv => parse_csv(&bytes, path)?,
    };
    let sc_path = sidecar_path(path);
    let grid = if sc_path.exists() {
        let text = fs::read_to_string(&sc_path).map_err(|e| Error::io(&sc_path, e))?;
        let sc: Sidecar = serde_json::from_str(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", sc_path.display())))?;
        grid.with_name(sc.name).with_resolution_m(sc.resolution_m)?
    } else {
        let stem = path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("grid")
            .to_string();
        grid.with_name(stem)
    };
    Ok(grid)
}

fn pgm_bytes(grid: &OccupancyGrid) -> Vec<u8> {
    let mut out = String::new();
    out.push_str("P2\n");
    out.push_str(&format!("{} {}\n255\n", grid.width(), grid.height()));
    for row in grid.cells().chunks(grid.width()) {
        let line: Vec<&str> = row
            .iter()
            .map(|&v| if v == FREE { "255" } else { "0" })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

fn csv_bytes(grid: &OccupancyGrid) -> Vec<u8> {
    let mut out = String::new();
    for row in grid.cells().chunks(grid.width()) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Header tokens of a PGM file, skipping `#` comments.
struct PgmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PgmTokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        PgmTokens { bytes, pos: 0 }
    }

    fn next_token(&mut self) -> Option<&'a str> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).ok()
    }
}

fn parse_pgm(bytes: &[u8], path: &Path) -> Result<OccupancyGrid> {
    let path_str = path.display().to_string();
    let mut tokens = PgmTokens::new(bytes);
    let magic = tokens
        .next_token()
        .ok_or_else(|| Error::parse(&path_str, 1, "missing PGM magic"))?;
    if magic != "P2" && magic != "P5" {
        return Err(Error::parse(
            &path_str,
            1,
            format!("unsupported PGM magic {magic:?}"),
        ));
    }
    let mut header = [0usize; 3];
    for slot in header.iter_mut() {
        let tok = tokens
            .next_token()
            .ok_or_else(|| Error::parse(&path_str, 1, "truncated PGM header"))?;
        *slot = tok
            .parse()
            .map_err(|_| Error::parse(&path_str, 1, format!("bad header value {tok:?}")))?;
    }
    let (width, height, maxval) = (header[0], header[1], header[2]);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::parse(&path_str, 1, format!("bad maxval {maxval}")));
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| Error::parse(&path_str, 1, "grid size overflow"))?;
    let mut cells = Vec::with_capacity(n);
    if magic == "P2" {
        for i in 0..n {
            let tok = tokens.next_token().ok_or_else(|| {
                Error::parse(&path_str, 1, format!("expected {n} pixels, got {i}"))
            })?;
            let v: u32 = tok
                .parse()
                .map_err(|_| Error::parse(&path_str, 1, format!("bad pixel value {tok:?}")))?;
            cells.push(if v < 128 { OCCUPIED } else { FREE });
        }
    } else {
        // One whitespace byte separates maxval from the raster.
        let data_start = tokens.pos + 1;
        if data_start > bytes.len() {
            return Err(Error::parse(&path_str, 1, "P5 raster missing"));
        }
        let data = &bytes[data_start..];
        let per_px = if maxval < 256 { 1 } else { 2 };
        if data.len() < n * per_px {
            return Err(Error::parse(
                &path_str,
                1,
                format!(
                    "P5 raster truncated: need {} bytes, have {}",
                    n * per_px,
                    data.len()
                ),
            ));
        }
        for i in 0..n {
            let v: u32 = if per_px == 1 {
                data[i] as u32
            } else {
                ((data[2 * i] as u32) << 8) | data[2 * i + 1] as u32
            };
            cells.push(if v < 128 { OCCUPIED } else { FREE });
        }
    }
    OccupancyGrid::new(width, height, cells)
}

fn parse_csv(bytes: &[u8], path: &Path) -> Result<OccupancyGrid> {
    let path_str = path.display().to_string();
    let text = std::str::from_utf8(bytes)
        .map_err(|_| Error::parse(&path_str, 1, "grid CSV is not valid UTF-8"))?;
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            match field.trim() {
                "0" => row.push(FREE),
                "1" => row.push(OCCUPIED),
                other => {
                    return Err(Error::parse(
                        &path_str,
                        i + 1,
                        format!("expected 0 or 1, got {other:?}"),
                    ));
                }
            }
        }
        if let Some(first) = rows.first()
            && first.len() != row.len()
        {
            return Err(Error::parse(
                &path_str,
                i + 1,
                format!("row has {} cells, expected {}", row.len(), first.len()),
            ));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(&path_str, 1, "empty grid CSV"));
    }
    let width = rows[0].len();
    let height = rows.len();
    OccupancyGrid::new(width, height, rows.concat())
}

/// Write a P5 (binary) PGM; mostly useful for interoperability tests and
/// for shrinking large map files.
pub fn write_pgm_binary(grid: &OccupancyGrid, w: &mut impl Write) -> std::io::Result<()> {
    write!(w, "P5\n{} {}\n255\n", grid.width(), grid.height())?;
    let data: Vec<u8> = grid
        .cells()
        .iter()
        .map(|&v| if v == FREE { 255 } else { 0 })
        .collect();
    w.write_all(&data)
}

/// Parse a PGM from any reader (no sidecar handling).
pub fn read_pgm(r: &mut impl Read) -> Result<OccupancyGrid> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)
        .map_err(|e| Error::io("<reader>", e))?;
    parse_pgm(&bytes, Path::new("<reader>"))
}
