//! CSV traces and SVG average-regret charts.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{MetricsReport, Trace};

pub const CSV_COLUMNS: [&str; 12] = [
    "t",
    "algo",
    "strategy",
    "loss",
    "comparator_loss",
    "regret_cum",
    "regret_avg",
    "epsilon",
    "sigma_cum",
    "state_norm",
    "pruned",
    "delta",
];

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// Writes `#`-prefixed metadata rows, the column header and one row per slot.
pub fn write_csv<W: Write>(
    mut out: W,
    trace: &Trace,
    report: Option<&MetricsReport>,
) -> Result<()> {
    for (k, v) in &trace.metadata {
        writeln!(out, "# {k}={v}")?;
    }
    if let Some(r) = report {
        writeln!(out, "# regret_cum={}", r.regret_cum)?;
        writeln!(out, "# path_length={}", r.path_length)?;
        writeln!(out, "# pred_energy={}", r.pred_energy)?;
        writeln!(out, "# hybrid={}", r.hybrid)?;
        if let Some(b) = r.bound_value {
            writeln!(out, "# bound={b}")?;
        }
    }
    let strategy = trace
        .strategy
        .map(|s| s.kind.name().to_string())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS).map_err(csv_error)?;
    let mut regret = 0.0;
    for r in &trace.records {
        regret += r.loss - r.comparator_loss;
        w.write_record([
            r.t.to_string(),
            trace.algo.clone(),
            strategy.clone(),
            r.loss.to_string(),
            r.comparator_loss.to_string(),
            regret.to_string(),
            (regret / r.t as f64).to_string(),
            r.epsilon.to_string(),
            r.sigma_cum.to_string(),
            r.state_norm.to_string(),
            u8::from(r.pruned).to_string(),
            r.delta.map(|d| d.to_string()).unwrap_or_default(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_csv(trace: &Trace, report: Option<&MetricsReport>, path: &Path) -> Result<()> {
    let file = BufWriter::new(File::create(path)?);
    write_csv(file, trace, report)
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 170.0;
const MARGIN_Y: f64 = 40.0;
const MAX_POINTS: usize = 1000;

fn legend_label(trace: &Trace) -> String {
    match &trace.strategy {
        Some(s) => format!("{} ({})", trace.algo, s.kind.name()),
        None => trace.algo.clone(),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Average regret against slot index for every trace, as a standalone SVG
/// document. Long traces are subsampled to at most 1000 vertices.
pub fn render_svg(traces: &[Trace]) -> String {
    let series: Vec<Vec<(f64, f64)>> = traces
        .iter()
        .map(|tr| {
            let avg = tr.average_regret_series();
            let stride = avg.len().div_ceil(MAX_POINTS).max(1);
            let mut pts: Vec<(f64, f64)> = avg
                .iter()
                .enumerate()
                .step_by(stride)
                .map(|(i, v)| ((i + 1) as f64, *v))
                .collect();
            if let Some(last) = avg.last() {
                if pts.last().map(|p| p.0) != Some(avg.len() as f64) {
                    pts.push((avg.len() as f64, *last));
                }
            }
            pts
        })
        .collect();
    let t_max = series
        .iter()
        .filter_map(|s| s.last().map(|p| p.0))
        .fold(1.0, f64::max);
    let (mut y_min, mut y_max) = series
        .iter()
        .flatten()
        .fold((0.0f64, 0.0f64), |(lo, hi), p| (lo.min(p.1), hi.max(p.1)));
    if y_max - y_min < 1e-12 {
        y_max = y_min + 1.0;
    }
    let pad = 0.05 * (y_max - y_min);
    y_min -= if y_min < 0.0 { pad } else { 0.0 };
    y_max += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |t: f64| MARGIN_LEFT + plot_w * (t - 1.0) / (t_max - 1.0).max(1.0);
    let sy = |v: f64| MARGIN_Y + plot_h * (y_max - v) / (y_max - y_min);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let x0 = MARGIN_LEFT;
    let x1 = MARGIN_LEFT + plot_w;
    let y0 = MARGIN_Y + plot_h;
    let _ = writeln!(
        svg,
        r#"<path d="M{x0:.2} {:.2} L{x0:.2} {y0:.2} L{x1:.2} {y0:.2}" fill="none" stroke="black"/>"#,
        MARGIN_Y
    );
    if y_min < 0.0 {
        let zy = sy(0.0);
        let _ = writeln!(
            svg,
            r##"<line x1="{x0:.2}" y1="{zy:.2}" x2="{x1:.2}" y2="{zy:.2}" stroke="#999" stroke-dasharray="4 3"/>"##
        );
    }
    for k in 0..=4 {
        let v = y_min + (y_max - y_min) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#,
            x0 - 6.0,
            sy(v) + 4.0
        );
    }
    for k in 0..=4 {
        let t = 1.0 + (t_max - 1.0) * k as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(t),
            y0 + 16.0,
            t.round()
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        x0 + plot_w / 2.0,
        HEIGHT - 6.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{:.2}" text-anchor="middle" transform="rotate(-90 14 {:.2})">average regret</text>"#,
        MARGIN_Y + plot_h / 2.0,
        MARGIN_Y + plot_h / 2.0
    );
    for (i, pts) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> = pts
            .iter()
            .map(|(t, v)| format!("{:.2},{:.2}", sx(*t), sy(*v)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
    }
    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (i, tr) in traces.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let ly = MARGIN_Y + 10.0 + 20.0 * i as f64;
        let lx = x1 + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&legend_label(tr))
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    svg
}

pub fn render_chart(traces: &[Trace], path: &Path) -> Result<()> {
    std::fs::write(path, render_svg(traces))?;
    Ok(())
}
