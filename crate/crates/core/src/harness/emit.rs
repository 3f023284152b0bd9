//! Report output: curve csv, full json, and an svg plot of `J` and `D`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Report;
use crate::error::{Error, Result};
use crate::functionals::FunctionalSample;

/// Output formats of [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::config("format", format!("unknown format `{other}` (csv, json, svg)"))),
        }
    }
}

/// Column order of the curve csv.
pub const CSV_HEADER: &str = "t,J,D,dJdt_fd,term_energy,term_potential,term_l2,quad_err";

fn samples(report: &Report) -> &[FunctionalSample] {
    report.curve.as_ref().map(|c| c.samples.as_slice()).unwrap_or(&[])
}

/// The curve as csv; floats use the shortest representation that parses
/// back to the same value.
pub fn render_csv(report: &Report) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in samples(report) {
        let _ = writeln!(
            out,
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}",
            s.t, s.j, s.d, s.dj_dt_fd, s.term_energy, s.term_potential, s.term_l2, s.quadrature_error
        );
    }
    out
}

/// The whole report as json, keys in declaration order.
pub fn render_json(report: &Report) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

const PANEL_W: f64 = 640.0;
const PANEL_H: f64 = 220.0;
const MARGIN: f64 = 56.0;

fn panel(out: &mut String, top: f64, label: &str, ts: &[f64], ys: &[f64]) {
    let (t_lo, t_hi) = bounds(ts);
    let (mut y_lo, mut y_hi) = bounds(ys);
    if y_hi - y_lo <= 1e-12 * y_hi.abs().max(y_lo.abs()).max(f64::MIN_POSITIVE) {
        let pad = 0.5 * y_hi.abs().max(1e-300);
        y_lo -= pad;
        y_hi += pad;
    }
    let x0 = MARGIN;
    let x1 = PANEL_W - 16.0;
    let y0 = top + PANEL_H - 28.0;
    let y1 = top + 16.0;
    let px = |t: f64| x0 + (x1 - x0) * if t_hi > t_lo { (t - t_lo) / (t_hi - t_lo) } else { 0.5 };
    let py = |y: f64| y0 + (y1 - y0) * (y - y_lo) / (y_hi - y_lo);
    let _ = writeln!(
        out,
        r#"<path d="M{x0:.1} {y1:.1} L{x0:.1} {y0:.1} L{x1:.1} {y0:.1}" stroke="black" fill="none"/>"#
    );
    let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" font-size="13">{label}</text>"#, x0 + 6.0, y1 + 2.0);
    let _ = writeln!(out, r#"<text x="4" y="{:.1}" font-size="10">{y_hi:.4e}</text>"#, y1 + 4.0);
    let _ = writeln!(out, r#"<text x="4" y="{y0:.1}" font-size="10">{y_lo:.4e}</text>"#);
    let _ = writeln!(out, r#"<text x="{x0:.1}" y="{:.1}" font-size="10">t = {t_lo}</text>"#, y0 + 16.0);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">t = {t_hi}</text>"#,
        x1,
        y0 + 16.0
    );
    if !ts.is_empty() {
        let pts: Vec<String> = ts.iter().zip(ys).map(|(t, y)| format!("{:.2},{:.2}", px(*t), py(*y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline points="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#,
            pts.join(" ")
        );
    }
}

fn bounds(v: &[f64]) -> (f64, f64) {
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() && hi.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

/// Line plots of `J(t)` and `D(t)`.
pub fn render_svg(report: &Report) -> String {
    let s = samples(report);
    let ts: Vec<f64> = s.iter().map(|x| x.t).collect();
    let js: Vec<f64> = s.iter().map(|x| x.j).collect();
    let ds: Vec<f64> = s.iter().map(|x| x.d).collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{PANEL_W}" height="{}" font-family="sans-serif">"#,
        2.0 * PANEL_H + 24.0
    );
    let _ = writeln!(out, r#"<text x="8" y="16" font-size="13">{}</text>"#, report.scenario.name);
    panel(&mut out, 24.0, "J(t)", &ts, &js);
    panel(&mut out, 24.0 + PANEL_H, "D(t)", &ts, &ds);
    out.push_str("</svg>\n");
    out
}

/// Write a report in the given format.
pub fn emit(report: &Report, format: Format, path: &Path) -> Result<()> {
    let text = match format {
        Format::Csv => render_csv(report),
        Format::Json => render_json(report)?,
        Format::Svg => render_svg(report),
    };
    std::fs::write(path, text)?;
    Ok(())
}
