//! SVG overlays: occupancy grid with labeled planner paths on top.
//!
//! Output bytes are deterministic for a fixed input: occupied cells are
//! merged into per-row run rectangles in scan order, colors come from a
//! fixed palette in input order, and floats are printed with a fixed
//! format.

use std::io::Write;

use crate::error::{Error, Result};
use crate::grid::{Cell, GridPath, OccupancyGrid};

/// Stroke palette, applied to paths in input order (wrapping around).
const PALETTE: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

const FREE_FILL: &str = "#f4f1ea";
const OCCUPIED_FILL: &str = "#3b3b3b";

/// Render the grid with the labeled paths as polylines, optional start and
/// goal markers, and a legend. An empty path list yields a grid-only
/// image.
pub fn render_overlay(
    grid: &OccupancyGrid,
    paths: &[(String, &GridPath)],
    markers: Option<(Cell, Cell)>,
    out: &mut impl Write,
) -> Result<()> {
    let svg = overlay_svg(grid, paths, markers);
    out.write_all(svg.as_bytes())
        .map_err(|e| Error::io("<svg writer>", e))
}

/// Render straight to a file.
pub fn write_overlay(
    grid: &OccupancyGrid,
    paths: &[(String, &GridPath)],
    markers: Option<(Cell, Cell)>,
    path: &std::path::Path,
) -> Result<()> {
    let svg = overlay_svg(grid, paths, markers);
    std::fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn overlay_svg(
    grid: &OccupancyGrid,
    paths: &[(String, &GridPath)],
    markers: Option<(Cell, Cell)>,
) -> String {
    let (w, h) = (grid.width(), grid.height());
    // Scale the raster up so small grids stay legible; cap large ones.
    let scale = (800 / w.max(h)).clamp(1, 24);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.5 -0.5 {w} {h}\" \
         width=\"{}\" height=\"{}\">\n",
        w * scale,
        h * scale
    ));
    svg.push_str(&format!(
        "<rect x=\"-0.5\" y=\"-0.5\" width=\"{w}\" height=\"{h}\" fill=\"{FREE_FILL}\"/>\n"
    ));

    // Occupied cells as row runs.
    svg.push_str(&format!("<g fill=\"{OCCUPIED_FILL}\">\n"));
    for row in 0..h {
        let mut col = 0;
        while col < w {
            if grid.is_free(Cell::new(row, col)) {
                col += 1;
                continue;
            }
            let run_start = col;
            while col < w && !grid.is_free(Cell::new(row, col)) {
                col += 1;
            }
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"1\"/>\n",
                fmt(run_start as f64 - 0.5),
                fmt(row as f64 - 0.5),
                col - run_start
            ));
        }
    }
    svg.push_str("</g>\n");

    let stroke_width = (w.max(h) as f64 / 160.0).max(0.12);
    for (i, (label, path)) in paths.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if path.len() > 1 {
            let points: Vec<String> = path
                .iter()
                .map(|c| format!("{},{}", c.col, c.row))
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\" \
                 stroke-linejoin=\"round\" stroke-linecap=\"round\" points=\"{}\"><title>{}</title></polyline>\n",
                fmt(stroke_width),
                points.join(" "),
                xml_escape(label)
            ));
        }
        // Legend entry in input order.
        let ly = -0.5 + (i as f64 + 1.0) * (h as f64 / 24.0).max(1.0) * 0.6;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"{}\" fill=\"{color}\">{}</text>\n",
            fmt(w as f64 * 0.02 - 0.5),
            fmt(ly),
            fmt((h.max(w) as f64 / 40.0).max(0.6)),
            xml_escape(label)
        ));
    }

    if let Some((start, goal)) = markers {
        let r = fmt(stroke_width * 2.5);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"#00a000\" stroke=\"white\" stroke-width=\"{}\"/>\n",
            start.col, start.row, fmt(stroke_width * 0.5)
        ));
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"{r}\" fill=\"#c00000\" stroke=\"white\" stroke-width=\"{}\"/>\n",
            goal.col, goal.row, fmt(stroke_width * 0.5)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn fmt(v: f64) -> String {
    // Fixed precision keeps output byte-stable yet compact.
    let s = format!("{v:.3}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() || trimmed == "-" {
        "0".into()
    } else {
        trimmed.to_string()
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
