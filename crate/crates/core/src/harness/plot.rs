//! Standalone SVG line charts of sweep results on a logarithmic y axis.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::sweep::ResultRow;

/// Error rates below this are drawn at the floor and marked as clamped.
pub const LOG_FLOOR: f64 = 1e-6;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 190.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Pe,
    Ber,
}

impl Metric {
    pub fn label(self) -> &'static str {
        match self {
            Metric::Pe => "P_e",
            Metric::Ber => "BER",
        }
    }

    fn of(self, row: &ResultRow) -> f64 {
        match self {
            Metric::Pe => row.pe_mean,
            Metric::Ber => row.ber_mean,
        }
    }
}

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("plot needs at least two sweep values, got {0}")]
    TooFewPoints(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

struct Series<'a> {
    name: &'a str,
    points: Vec<(f64, f64)>,
}

fn group(rows: &[ResultRow], metric: Metric) -> Vec<Series<'_>> {
    let mut out: Vec<Series> = Vec::new();
    for r in rows {
        let p = (r.value, metric.of(r));
        match out.iter_mut().find(|s| s.name == r.detector) {
            Some(s) => s.points.push(p),
            None => out.push(Series {
                name: &r.detector,
                points: vec![p],
            }),
        }
    }
    for s in &mut out {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

pub fn render_svg(rows: &[ResultRow], metric: Metric) -> Result<String, PlotError> {
    let mut xs: Vec<f64> = rows.iter().map(|r| r.value).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(PlotError::TooFewPoints(xs.len()));
    }
    let (x_min, x_max) = (xs[0], xs[xs.len() - 1]);
    let series = group(rows, metric);
    let y_max = rows
        .iter()
        .map(|r| metric.of(r))
        .fold(LOG_FLOOR, f64::max)
        .max(LOG_FLOOR * 10.0);
    let dec_lo = LOG_FLOOR.log10().floor() as i32;
    let dec_hi = y_max.log10().ceil() as i32;
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| {
        let t = (y.max(LOG_FLOOR).log10() - dec_lo as f64) / (dec_hi - dec_lo) as f64;
        TOP + (1.0 - t) * plot_h
    };
    let x_label = rows.first().map(|r| r.sweep_var.as_str()).unwrap_or("");

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    for d in dec_lo..=dec_hi {
        let y = sy(10f64.powi(d));
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##,
            LEFT + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">1e{d}</text>"#,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for &x in &xs {
        let px = sx(x);
        let _ = writeln!(
            svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h + 18.0,
            super::results_csv::format_sig6(x)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" class="x-label">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})" class="y-label">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        metric.label()
    );

    let mut any_clamped = false;
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            pts.join(" ")
        );
        for &(x, y) in &s.points {
            let (px, py) = (sx(x), sy(y));
            if y < LOG_FLOOR {
                any_clamped = true;
                let _ = writeln!(
                    svg,
                    r#"<rect class="clamped" x="{:.2}" y="{:.2}" width="8" height="8" fill="white" stroke="{color}"/>"#,
                    px - 4.0,
                    py - 4.0
                );
            } else {
                let _ = writeln!(
                    svg,
                    r#"<circle cx="{px:.2}" cy="{py:.2}" r="3" fill="{color}"/>"#
                );
            }
        }
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + plot_w + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/>"#,
            lx + 24.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 30.0,
            ly + 4.0,
            escape(s.name)
        );
    }
    if any_clamped {
        let _ = writeln!(
            svg,
            r#"<text class="clamp-note" x="{:.2}" y="{:.2}" font-size="10">open squares: zero, drawn at 1e-6</text>"#,
            LEFT + plot_w + 15.0,
            TOP + plot_h
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(rows: &[ResultRow], metric: Metric, path: &Path) -> Result<(), PlotError> {
    let svg = render_svg(rows, metric)?;
    fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(detectors: &[&str], values: &[f64], ber: f64) -> Vec<ResultRow> {
        let mut out = Vec::new();
        for &v in values {
            for d in detectors {
                out.push(ResultRow {
                    sweep_var: "snr_db".into(),
                    value: v,
                    detector: d.to_string(),
                    pe_mean: 0.01,
                    pe_ci: 0.0,
                    ber_mean: ber,
                    ber_ci: 0.0,
                    trials: 1,
                    wall_ms_mean: 0.0,
                    mult_estimate: 0.0,
                });
            }
        }
        out
    }

    #[test]
    fn one_polyline_per_detector() {
        let svg = render_svg(&rows(&["a", "b"], &[0.0, 2.0, 4.0], 0.1), Metric::Ber).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains(">a</text>") && svg.contains(">b</text>"));
        assert!(!svg.contains("clamp-note"));
    }

    #[test]
    fn zero_series_is_clamped_and_annotated() {
        let svg = render_svg(&rows(&["a"], &[0.0, 2.0, 4.0], 0.0), Metric::Ber).unwrap();
        assert_eq!(svg.matches(r#"class="clamped""#).count(), 3);
        assert!(svg.contains("clamp-note"));
    }

    #[test]
    fn axis_labels_follow_sweep_variable() {
        let mut r = rows(&["a"], &[10.0, 20.0], 0.1);
        for row in &mut r {
            row.sweep_var = "N_r".into();
        }
        let svg = render_svg(&r, Metric::Pe).unwrap();
        assert!(svg.contains(r#"class="x-label">N_r</text>"#));
        assert!(svg.contains(r#"class="y-label">P_e</text>"#));
    }

    #[test]
    fn single_point_is_rejected() {
        assert!(matches!(
            render_svg(&rows(&["a"], &[1.0], 0.1), Metric::Ber),
            Err(PlotError::TooFewPoints(1))
        ));
    }
}
