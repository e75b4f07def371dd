//! Self-contained SVG plots of result rows.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::config::PlotStyle;
use super::{pair_alignment_rows, ResultRow};
use crate::error::Result;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 180.0;
const MARGIN_Y: f64 = 40.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

impl PlotStyle {
    pub fn name(self) -> &'static str {
        match self {
            PlotStyle::RatioVsP => "ratio_vs_p",
            PlotStyle::RatioVsScaledP => "ratio_vs_scaled_p",
            PlotStyle::DeltaVsAlignment => "delta_vs_alignment",
        }
    }
}

/// A named set of points; `connect` draws a polyline through them.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
    pub connect: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Builds the figures for `style`, one per graph for the ratio styles.
pub fn figures(rows: &[ResultRow], style: PlotStyle) -> Vec<(String, Figure)> {
    match style {
        PlotStyle::RatioVsP | PlotStyle::RatioVsScaledP => {
            let scaled = style == PlotStyle::RatioVsScaledP;
            let mut by_graph: BTreeMap<&str, BTreeMap<String, Vec<(f64, f64)>>> = BTreeMap::new();
            for r in rows {
                let x = if scaled { r.scaled_p } else { r.p as f64 };
                by_graph
                    .entry(&r.graph_id)
                    .or_default()
                    .entry(r.series())
                    .or_default()
                    .push((x, r.ratio));
            }
            by_graph
                .into_iter()
                .map(|(id, series)| {
                    let series = series
                        .into_iter()
                        .map(|(name, mut points)| {
                            points.sort_by(|a, b| a.0.total_cmp(&b.0));
                            Series {
                                name,
                                points,
                                connect: true,
                            }
                        })
                        .collect();
                    let fig = Figure {
                        title: id.to_string(),
                        x_label: if scaled { "scaled depth p·m'/m" } else { "p" }.into(),
                        y_label: "approximation ratio".into(),
                        series,
                    };
                    (format!("{}_{}.svg", style.name(), sanitize(id)), fig)
                })
                .collect()
        }
        PlotStyle::DeltaVsAlignment => {
            let mut by_p: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
            for a in pair_alignment_rows(rows) {
                by_p.entry(a.p)
                    .or_default()
                    .push((a.aligned_levels as f64, a.delta));
            }
            if by_p.is_empty() {
                return Vec::new();
            }
            let series = by_p
                .into_iter()
                .map(|(p, points)| Series {
                    name: format!("p={p}"),
                    points,
                    connect: false,
                })
                .collect();
            vec![(
                format!("{}.svg", style.name()),
                Figure {
                    title: "ratio change vs aligned levels".into(),
                    x_label: "aligned levels".into(),
                    y_label: "ratio (sparse) - ratio (standard)".into(),
                    series,
                },
            )]
        }
    }
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn padded_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

fn marker(out: &mut String, shape: usize, x: f64, y: f64, color: &str) {
    let _ = match shape % 3 {
        0 => writeln!(
            out,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="{color}"/>"#
        ),
        1 => writeln!(
            out,
            r#"<rect x="{:.2}" y="{:.2}" width="7" height="7" fill="{color}"/>"#,
            x - 3.5,
            y - 3.5
        ),
        _ => writeln!(
            out,
            r#"<polygon points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x,
            y - 4.5,
            x - 4.5,
            y + 4.0,
            x + 4.5,
            y + 4.0
        ),
    };
}

pub fn render_svg(fig: &Figure) -> String {
    let pts = || fig.series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = padded_range(pts().map(|p| p.0));
    let (y0, y1) = padded_range(pts().map(|p| p.1));
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - 2.0 * MARGIN_Y;
    let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| MARGIN_Y + (1.0 - (y - y0) / (y1 - y0)) * plot_h;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        escape(&fig.title)
    );
    let _ = writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_Y}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            out,
            r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{xv:.2}</text>"#,
            MARGIN_Y + plot_h + 16.0
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.1}" y="{:.1}" text-anchor="end">{yv:.3}</text><line x1="{MARGIN_LEFT}" x2="{:.1}" y1="{py:.1}" y2="{py:.1}" stroke="#ddd"/>"##,
            MARGIN_LEFT - 4.0,
            py + 4.0,
            MARGIN_LEFT + plot_w
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 6.0,
        escape(&fig.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(14 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
        MARGIN_Y + plot_h / 2.0,
        escape(&fig.y_label)
    );

    for (i, s) in fig.series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if s.connect && s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
                path.join(" ")
            );
        }
        for &(x, y) in &s.points {
            marker(&mut out, i, sx(x), sy(y), color);
        }
        let ly = MARGIN_Y + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - MARGIN_RIGHT + 14.0;
        marker(&mut out, i, lx, ly, color);
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            lx + 10.0,
            ly + 4.0,
            escape(&s.name)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Writes the figures for `style` into `dir` and returns their paths.
pub fn emit_plots(rows: &[ResultRow], style: PlotStyle, dir: &Path) -> Result<Vec<PathBuf>> {
    let figs = figures(rows, style);
    if figs.is_empty() {
        return Ok(Vec::new());
    }
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (file, fig) in figs {
        let path = dir.join(file);
        fs::write(&path, render_svg(&fig))?;
        written.push(path);
    }
    Ok(written)
}
