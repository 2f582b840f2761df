//! CSV tables and SVG charts.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::bench::experiment::{median, BoundRow, PhaseGrid, ResultRow};
use crate::error::{Error, Result};
use crate::model::SparsityModel;

pub const CSV_HEADER: [&str; 7] = ["model", "ratio", "trial", "snr_db", "support_f1", "iters", "wall_time_s"];

/// Writes result rows as CSV with the fixed header.
pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to write".into()));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.model.name().to_string(),
            r.ratio.to_string(),
            r.trial.to_string(),
            r.snr_db.to_string(),
            r.support_f1.to_string(),
            r.iters.to_string(),
            r.wall_time_s.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn rows_to_csv(rows: &[ResultRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_rows(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

/// CSV file plus an optional SVG chart next to it.
pub fn emit_outputs(rows: &[ResultRow], csv_path: &Path, svg_path: Option<&Path>) -> Result<()> {
    write_rows(rows, std::fs::File::create(csv_path)?)?;
    if let Some(p) = svg_path {
        std::fs::write(p, svg_chart(rows, "median SNR (dB) vs sampling ratio")?)?;
    }
    Ok(())
}

/// `model,measurements,success,success_monotone` per grid point.
pub fn phase_grid_csv(grid: &PhaseGrid) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "measurements", "success", "success_monotone"])?;
    for (mi, model) in grid.models.iter().enumerate() {
        for (ci, m) in grid.measurements.iter().enumerate() {
            w.write_record([
                model.name().to_string(),
                m.to_string(),
                grid.raw[mi][ci].to_string(),
                grid.monotone[mi][ci].to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn bounds_csv(rows: &[BoundRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["model", "n", "k", "channels", "bound"])?;
    for r in rows {
        w.write_record([
            r.model.name().to_string(),
            r.n.to_string(),
            r.k.to_string(),
            r.channels.to_string(),
            r.bound.to_string(),
        ])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

const COLORS: [&str; 4] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"];

/// Static line chart of the median finite SNR per ratio, one polyline per
/// model present in `rows`.
pub fn svg_chart(rows: &[ResultRow], title: &str) -> Result<String> {
    let mut models: Vec<SparsityModel> = Vec::new();
    let mut ratios: Vec<f64> = Vec::new();
    for r in rows {
        if !models.contains(&r.model) {
            models.push(r.model);
        }
        if !ratios.contains(&r.ratio) {
            ratios.push(r.ratio);
        }
    }
    ratios.sort_by(|a, b| a.total_cmp(b));
    let series: Vec<Vec<(f64, f64)>> = models
        .iter()
        .map(|&m| {
            ratios
                .iter()
                .filter_map(|&q| {
                    let mut v: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.model == m && r.ratio == q && r.snr_db.is_finite())
                        .map(|r| r.snr_db)
                        .collect();
                    median(&mut v).map(|s| (q, s))
                })
                .collect()
        })
        .collect();
    let pts = series.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y1 = y0 + 1.0;
    }
    let (w, h, pad) = (640.0, 400.0, 50.0);
    let sx = |x: f64| pad + (x - x0) / (x1 - x0) * (w - 2.0 * pad);
    let sy = |y: f64| h - pad - (y - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-size="16" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    let _ = writeln!(
        s,
        r#"<path d="M{pad} {pad} V{} H{}" stroke="black" fill="none"/>"#,
        h - pad,
        w - pad
    );
    let _ = writeln!(s, r#"<text x="{pad}" y="{}" font-size="11">{x0:.3}</text>"#, h - pad + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{x1:.3}</text>"#, w - pad, h - pad + 16.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{y0:.2}</text>"#, pad - 4.0, h - pad);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11" text-anchor="end">{y1:.2}</text>"#, pad - 4.0, pad + 4.0);
    for (i, (m, pts)) in models.iter().zip(&series).enumerate() {
        let color = COLORS[i % COLORS.len()];
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" fill="{color}">{}</text>"#,
            w - pad + 4.0,
            pad + 16.0 * i as f64,
            m.name()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(model: SparsityModel, ratio: f64, snr_db: f64) -> ResultRow {
        ResultRow {
            model,
            ratio,
            trial: 0,
            snr_db,
            support_f1: 1.0,
            iters: 3,
            wall_time_s: 0.0,
        }
    }

    #[test]
    fn one_row_gives_two_lines() {
        let csv = rows_to_csv(&[row(SparsityModel::Forest, 0.3, 12.5)]).unwrap();
        assert_eq!(csv, "model,ratio,trial,snr_db,support_f1,iters,wall_time_s\nforest,0.3,0,12.5,1,3,0\n");
    }

    #[test]
    fn comma_field_is_quoted() {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["a,b", "c"]).unwrap();
        assert_eq!(finish(w).unwrap(), "\"a,b\",c\n");
    }

    #[test]
    fn failed_rows_render_negative_infinity() {
        let csv = rows_to_csv(&[row(SparsityModel::Tree, 0.2, f64::NEG_INFINITY)]).unwrap();
        assert!(csv.lines().nth(1).unwrap().contains("-inf"));
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(rows_to_csv(&[]).is_err());
    }

    #[test]
    fn svg_has_one_polyline_per_model() {
        let rows = vec![
            row(SparsityModel::Standard, 0.2, 5.0),
            row(SparsityModel::Standard, 0.3, 6.0),
            row(SparsityModel::Forest, 0.2, 7.0),
            row(SparsityModel::Forest, 0.3, 9.0),
        ];
        let svg = svg_chart(&rows, "t").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
