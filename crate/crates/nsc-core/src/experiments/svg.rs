//! Minimal self-contained SVG charts: one polyline chart and one grouped
//! bar chart, no external assets, deterministic output.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_BOTTOM: f64 = 70.0;
const SERIES_COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series<'a> {
    pub name: &'a str,
    pub points: Vec<(f64, f64)>,
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn x(&self, v: f64) -> f64 {
        let span = (self.x_max - self.x_min).max(f64::MIN_POSITIVE);
        MARGIN_LEFT + (v - self.x_min) / span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        let span = (self.y_max - self.y_min).max(f64::MIN_POSITIVE);
        HEIGHT - MARGIN_BOTTOM - (v - self.y_min) / span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    }
}

fn header(title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r#"<text x="{}" y="28" font-family="sans-serif" font-size="16" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    out
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let x0 = MARGIN_LEFT;
    let x1 = WIDTH - MARGIN_RIGHT;
    let y0 = HEIGHT - MARGIN_BOTTOM;
    let y1 = MARGIN_TOP;
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#
    );
    let _ = writeln!(
        out,
        r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let xv = frame.x_min + t * (frame.x_max - frame.x_min);
        let yv = frame.y_min + t * (frame.y_max - frame.y_min);
        let xp = frame.x(xv);
        let yp = frame.y(yv);
        let _ = writeln!(
            out,
            r#"<line x1="{xp}" y1="{y0}" x2="{xp}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{xp}" y="{}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            fmt(xv)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{yp}" x2="{x0}" y2="{yp}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 9.0,
            yp + 4.0,
            fmt(yv)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 18.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 18 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        escape(y_label)
    );
}

fn legend(out: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = MARGIN_TOP + 6.0 + 18.0 * i as f64;
        let x = WIDTH - MARGIN_RIGHT - 170.0;
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let _ = writeln!(
            out,
            r#"<rect x="{x}" y="{}" width="12" height="12" fill="{color}"/>"#,
            y - 10.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{y}" font-family="sans-serif" font-size="12">{}</text>"#,
            x + 18.0,
            escape(name)
        );
    }
}

/// Polyline chart over shared axes; bounds grow to fit all series.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all: Vec<(f64, f64)> = series.iter().flat_map(|s| s.points.iter().copied()).collect();
    let x_min = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min).min(0.0);
    let x_max = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max).max(x_min + 1.0);
    let y_min = all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min).min(0.0);
    let y_max = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max).max(y_min + 1.0);
    let frame = Frame { x_min, x_max, y_min, y_max };

    let mut out = header(title);
    axes(&mut out, &frame, x_label, y_label);
    for (i, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let coords: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", frame.x(x), frame.y(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for &(x, y) in &s.points {
            let _ = writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                frame.x(x),
                frame.y(y)
            );
        }
    }
    legend(&mut out, &series.iter().map(|s| s.name).collect::<Vec<_>>());
    out.push_str("</svg>\n");
    out
}

/// Grouped bar chart: one bar per (category, series) pair.
pub fn bar_chart(
    title: &str,
    x_label: &str,
    y_label: &str,
    categories: &[String],
    series: &[(String, Vec<f64>)],
) -> String {
    let y_max = series
        .iter()
        .flat_map(|(_, vs)| vs.iter().copied())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let frame = Frame {
        x_min: 0.0,
        x_max: categories.len() as f64,
        y_min: 0.0,
        y_max: y_max * 1.1,
    };

    let mut out = header(title);
    axes(&mut out, &frame, x_label, y_label);
    let slot = (WIDTH - MARGIN_LEFT - MARGIN_RIGHT) / categories.len() as f64;
    let bar_w = slot * 0.8 / series.len().max(1) as f64;
    for (ci, cat) in categories.iter().enumerate() {
        let base = MARGIN_LEFT + slot * ci as f64 + slot * 0.1;
        for (si, (_, values)) in series.iter().enumerate() {
            let v = values.get(ci).copied().unwrap_or(0.0);
            let top = frame.y(v);
            let h = (HEIGHT - MARGIN_BOTTOM) - top;
            let color = SERIES_COLORS[si % SERIES_COLORS.len()];
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{top:.2}" width="{bar_w:.2}" height="{h:.2}" fill="{color}"/>"#,
                base + bar_w * si as f64
            );
        }
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            base + slot * 0.4,
            HEIGHT - MARGIN_BOTTOM + 20.0,
            escape(cat)
        );
    }
    legend(
        &mut out,
        &series.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>(),
    );
    out.push_str("</svg>\n");
    out
}
