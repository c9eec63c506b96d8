//! Minimal SVG log-log line plots.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    /// Positive `(x, y)` pairs, ascending in `x`.
    pub points: Vec<(f64, f64)>,
    /// Shown next to the label.
    pub slope: Option<f64>,
}

pub struct LogLogPlot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

/// Decade-aligned log range covering `values`.
fn log_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let (lo, hi) = (lo.log10().floor(), hi.log10().ceil());
    if lo == hi {
        (lo, lo + 1.0)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if (1e-3..1e4).contains(&v.abs()) {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

impl LogLogPlot {
    pub fn to_svg(&self) -> String {
        let points = || {
            self.series
                .iter()
                .flat_map(|s| s.points.iter())
                .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        };
        let (x0, x1) = log_range(points().map(|p| p.0));
        let (y0, y1) = log_range(points().map(|p| p.1));
        let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
        let sx = |x: f64| LEFT + (x.log10() - x0) / (x1 - x0) * pw;
        let sy = |y: f64| TOP + (y1 - y.log10()) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            LEFT + pw / 2.0,
            escape(&self.title)
        );

        // decade grid and ticks
        for (lo, hi, vertical) in [(x0, x1, true), (y0, y1, false)] {
            let mut e = lo;
            while e <= hi + 1e-9 {
                for m in 1..10 {
                    let v = m as f64 * 10f64.powf(e);
                    if v.log10() > hi + 1e-9 {
                        break;
                    }
                    let stroke = if m == 1 { "#bbbbbb" } else { "#eeeeee" };
                    // the x axis spans few decades, so 2 and 5 are labelled too
                    let label = m == 1 || (vertical && (m == 2 || m == 5));
                    if vertical {
                        let x = sx(v);
                        let _ = writeln!(
                            s,
                            r#"<line x1="{x:.1}" y1="{TOP:.1}" x2="{x:.1}" y2="{:.1}" stroke="{stroke}"/>"#,
                            TOP + ph
                        );
                        if label {
                            let _ = writeln!(
                                s,
                                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
                                TOP + ph + 18.0,
                                tick_label(v)
                            );
                        }
                    } else {
                        let y = sy(v);
                        let _ = writeln!(
                            s,
                            r#"<line x1="{LEFT:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{stroke}"/>"#,
                            LEFT + pw
                        );
                        if label {
                            let _ = writeln!(
                                s,
                                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{}</text>"#,
                                LEFT - 6.0,
                                y + 4.0,
                                tick_label(v)
                            );
                        }
                    }
                }
                e += 1.0;
            }
        }
        let _ = writeln!(
            s,
            r#"<rect x="{LEFT:.1}" y="{TOP:.1}" width="{pw:.1}" height="{ph:.1}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
            LEFT + pw / 2.0,
            HEIGHT - 16.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text transform="translate(20 {:.1}) rotate(-90)" text-anchor="middle">{}</text>"#,
            TOP + ph / 2.0,
            escape(&self.y_label)
        );

        for (i, series) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let pts: Vec<String> = series
                .points
                .iter()
                .filter(|(x, y)| *x > 0.0 && *y > 0.0)
                .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
                .collect();
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
            for p in &pts {
                let (x, y) = p.split_once(',').unwrap_or(("0", "0"));
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
            let ly = TOP + 14.0 + 36.0 * i as f64;
            let lx = LEFT + pw + 12.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"/>"#,
                lx + 20.0
            );
            let _ = writeln!(
                s,
                r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
                lx + 26.0,
                ly + 4.0,
                escape(&series.label)
            );
            if let Some(slope) = series.slope {
                let _ = writeln!(
                    s,
                    r#"<text x="{:.1}" y="{:.1}" fill="{color}">slope {slope:.3}</text>"#,
                    lx + 26.0,
                    ly + 20.0
                );
            }
        }
        s.push_str("</svg>\n");
        s
    }
}
