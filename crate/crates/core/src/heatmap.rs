//! SVG heatmap of success rate over two summary-CSV columns.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

const CELL: f64 = 56.0;
const LEFT: f64 = 90.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 70.0;
const RIGHT: f64 = 30.0;

/// White (0) to dark blue (1).
fn color(rate: f64) -> String {
    let t = rate.clamp(0.0, 1.0);
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", lerp(247.0, 8.0), lerp(251.0, 48.0), lerp(255.0, 107.0))
}

fn key(v: f64) -> i64 {
    // Grid values are short decimals; 1e-9 resolution keeps them distinct.
    (v * 1e9).round() as i64
}

/// Renders the mean `success_rate` for each (x, y) pair found in
/// `summary_csv`. Axes may be any numeric column.
pub fn render_heatmap(summary_csv: &str, x_axis: &str, y_axis: &str) -> Result<String> {
    let mut reader = csv::Reader::from_reader(summary_csv.as_bytes());
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingField(name.to_string()))
    };
    let (xi, yi, ri) = (col(x_axis)?, col(y_axis)?, col("success_rate")?);

    let mut cells: BTreeMap<(i64, i64), (f64, f64, f64, usize)> = BTreeMap::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .unwrap_or("")
                .parse::<f64>()
                .map_err(|e| Error::Parse {
                    line: k + 2,
                    message: format!("column {}: {e}", headers.get(i).unwrap_or("?")),
                })
        };
        let (x, y, r) = (num(xi)?, num(yi)?, num(ri)?);
        let e = cells.entry((key(x), key(y))).or_insert((x, y, 0.0, 0));
        e.2 += r;
        e.3 += 1;
    }

    let mut xs: Vec<(i64, f64)> = cells.values().map(|c| (key(c.0), c.0)).collect();
    let mut ys: Vec<(i64, f64)> = cells.values().map(|c| (key(c.1), c.1)).collect();
    xs.sort_by_key(|p| p.0);
    xs.dedup_by_key(|p| p.0);
    ys.sort_by_key(|p| p.0);
    ys.dedup_by_key(|p| p.0);

    let width = LEFT + CELL * xs.len() as f64 + RIGHT;
    let height = TOP + CELL * ys.len() as f64 + BOTTOM;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="13">success rate</text>"#,
        width / 2.0
    );
    for (col_idx, (xk, xv)) in xs.iter().enumerate() {
        for (row_idx, (yk, _)) in ys.iter().enumerate() {
            let Some(&(_, _, sum, count)) = cells.get(&(*xk, *yk)) else {
                continue;
            };
            let rate = sum / count as f64;
            // larger y values at the top
            let px = LEFT + CELL * col_idx as f64;
            let py = TOP + CELL * (ys.len() - 1 - row_idx) as f64;
            let _ = writeln!(
                svg,
                r##"<rect class="cell" x="{px}" y="{py}" width="{CELL}" height="{CELL}" fill="{}" stroke="#888" stroke-width="0.5"/>"##,
                color(rate)
            );
            let fg = if rate > 0.55 { "#fff" } else { "#000" };
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" text-anchor="middle" fill="{fg}">{rate:.2}</text>"#,
                px + CELL / 2.0,
                py + CELL / 2.0 + 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{xv}</text>"#,
            LEFT + CELL * (col_idx as f64 + 0.5),
            TOP + CELL * ys.len() as f64 + 16.0
        );
    }
    for (row_idx, (_, yv)) in ys.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{yv}</text>"#,
            LEFT - 8.0,
            TOP + CELL * (ys.len() - 1 - row_idx) as f64 + CELL / 2.0 + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="{}" y="{}" text-anchor="middle" font-size="13">{x_axis}</text>"#,
        LEFT + CELL * xs.len() as f64 / 2.0,
        height - 20.0
    );
    let cy = TOP + CELL * ys.len() as f64 / 2.0;
    let _ = writeln!(
        svg,
        r#"<text class="axis-label" x="20" y="{cy}" text-anchor="middle" font-size="13" transform="rotate(-90 20 {cy})">{y_axis}</text>"#
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Reads a summary CSV and writes the SVG to `out_path`.
pub fn emit_heatmap(
    summary_csv_path: &std::path::Path,
    out_path: &std::path::Path,
    x_axis: &str,
    y_axis: &str,
) -> Result<()> {
    let text = std::fs::read_to_string(summary_csv_path)?;
    let svg = render_heatmap(&text, x_axis, y_axis)?;
    std::fs::write(out_path, svg)?;
    Ok(())
}
