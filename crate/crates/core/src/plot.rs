//! Standalone SVG scatter plots with labelled points.

use std::fmt::Write as _;

pub struct ScatterPoint {
    pub x: f64,
    pub y: f64,
    pub label: String,
    pub highlight: bool,
}

pub struct Scatter {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<ScatterPoint>,
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 540.0;
const MARGIN: f64 = 70.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    let pad = ((hi - lo) * 0.1).max(1e-6);
    (lo - pad, hi + pad)
}

impl Scatter {
    pub fn to_svg(&self) -> String {
        let (x0, x1) = extent(self.points.iter().map(|p| p.x));
        let (y0, y1) = extent(self.points.iter().map(|p| p.y));
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="30" text-anchor="middle" font-size="18">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        let _ = writeln!(
            svg,
            r##"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="#444"/>"##,
            WIDTH - 2.0 * MARGIN,
            HEIGHT - 2.0 * MARGIN
        );
        if x0 < 0.0 && x1 > 0.0 {
            let _ = writeln!(
                svg,
                r##"<line x1="{0:.2}" y1="{MARGIN}" x2="{0:.2}" y2="{1}" stroke="#bbb" stroke-dasharray="4 4"/>"##,
                sx(0.0),
                HEIGHT - MARGIN
            );
        }
        if y0 < 0.0 && y1 > 0.0 {
            let _ = writeln!(
                svg,
                r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1}" y2="{0:.2}" stroke="#bbb" stroke-dasharray="4 4"/>"##,
                sy(0.0),
                WIDTH - MARGIN
            );
        }
        for (value, anchor) in [(x0, "start"), (x1, "end")] {
            let _ = writeln!(
                svg,
                r##"<text x="{:.2}" y="{}" text-anchor="{anchor}" font-size="11" fill="#666">{value:.2}</text>"##,
                sx(value),
                HEIGHT - MARGIN + 16.0
            );
        }
        for value in [y0, y1] {
            let _ = writeln!(
                svg,
                r##"<text x="{}" y="{:.2}" text-anchor="end" font-size="11" fill="#666">{value:.2}</text>"##,
                MARGIN - 6.0,
                sy(value) + 4.0
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 20.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="20" y="{0}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {0})">{1}</text>"#,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        for p in &self.points {
            let fill = if p.highlight { "#c0392b" } else { "#2c6fbb" };
            let (cx, cy) = (sx(p.x), sy(p.y));
            let _ = writeln!(svg, r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="5" fill="{fill}"/>"#);
            let _ = writeln!(
                svg,
                r#"<text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
                cx + 7.0,
                cy - 6.0,
                escape(&p.label)
            );
        }
        svg.push_str("</svg>\n");
        svg
    }
}
