//! Just enough SVG for line, scatter and heat-map figures.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;

/// Fixed palette; labels get colors in order of first appearance.
pub const PALETTE: [&str; 12] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939",
];

enum Layer {
    Line { points: Vec<(f64, f64)>, color: &'static str },
    Dots { points: Vec<(f64, f64)>, color: &'static str, radius: f64 },
    Cells { cells: Vec<(f64, f64, f64, f64, &'static str)> },
}

pub struct Figure {
    title: String,
    x_label: String,
    y_label: String,
    layers: Vec<Layer>,
    legend: Vec<(String, &'static str)>,
}

impl Figure {
    pub fn new(title: &str, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            layers: Vec::new(),
            legend: Vec::new(),
        }
    }

    pub fn line(&mut self, points: Vec<(f64, f64)>, color: &'static str) -> &mut Self {
        self.layers.push(Layer::Line { points, color });
        self
    }

    pub fn dots(&mut self, points: Vec<(f64, f64)>, color: &'static str, radius: f64) -> &mut Self {
        self.layers.push(Layer::Dots { points, color, radius });
        self
    }

    /// Axis-aligned rectangles `(x0, y0, x1, y1, color)` in data units.
    pub fn cells(&mut self, cells: Vec<(f64, f64, f64, f64, &'static str)>) -> &mut Self {
        self.layers.push(Layer::Cells { cells });
        self
    }

    pub fn legend(&mut self, name: &str, color: &'static str) -> &mut Self {
        self.legend.push((name.into(), color));
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        let mut eat = |x: f64, y: f64| {
            if x.is_finite() && y.is_finite() {
                b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
            }
        };
        for layer in &self.layers {
            match layer {
                Layer::Line { points, .. } | Layer::Dots { points, .. } => points.iter().for_each(|&(x, y)| eat(x, y)),
                Layer::Cells { cells } => cells.iter().for_each(|&(x0, y0, x1, y1, _)| {
                    eat(x0, y0);
                    eat(x1, y1);
                }),
            }
        }
        if !b.0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let pad = |lo: f64, hi: f64| if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let (x0, x1) = pad(b.0, b.1);
        let (y0, y1) = pad(b.2, b.3);
        (x0, x1, y0, y1)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let pw = WIDTH - 2.0 * MARGIN;
        let ph = HEIGHT - 2.0 * MARGIN;
        let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph;
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        for layer in &self.layers {
            match layer {
                Layer::Cells { cells } => {
                    for &(a, b, c, d, color) in cells {
                        let (px, py) = (sx(a.min(c)), sy(b.max(d)));
                        let (w, h) = ((sx(c) - sx(a)).abs(), (sy(d) - sy(b)).abs());
                        let _ = writeln!(
                            s,
                            r#"<rect x="{px:.2}" y="{py:.2}" width="{w:.2}" height="{h:.2}" fill="{color}"/>"#
                        );
                    }
                }
                Layer::Line { points, color } => {
                    // Break the polyline at non-finite points.
                    for run in points.split(|(x, y)| !x.is_finite() || !y.is_finite()) {
                        if run.len() < 2 {
                            continue;
                        }
                        let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
                        let _ = writeln!(
                            s,
                            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
                            pts.join(" ")
                        );
                    }
                }
                Layer::Dots { points, color, radius } => {
                    for &(x, y) in points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{color}"/>"#,
                            sx(x),
                            sy(y)
                        );
                    }
                }
            }
        }
        let (l, r, t, b) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
        let _ = writeln!(
            s,
            r#"<rect x="{l}" y="{t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
        );
        let _ = writeln!(s, r#"<text x="{l}" y="{:.0}" text-anchor="middle">{}</text>"#, b + 16.0, fmt_tick(x0));
        let _ = writeln!(s, r#"<text x="{r}" y="{:.0}" text-anchor="middle">{}</text>"#, b + 16.0, fmt_tick(x1));
        let _ = writeln!(s, r#"<text x="{:.0}" y="{b}" text-anchor="end">{}</text>"#, l - 4.0, fmt_tick(y0));
        let _ = writeln!(s, r#"<text x="{:.0}" y="{:.0}" text-anchor="end">{}</text>"#, l - 4.0, t + 10.0, fmt_tick(y1));
        let _ = writeln!(
            s,
            r#"<text x="{:.0}" y="{:.0}" text-anchor="middle">{}</text>"#,
            WIDTH / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="14" y="{:.0}" text-anchor="middle" transform="rotate(-90 14 {:.0})">{}</text>"#,
            HEIGHT / 2.0,
            HEIGHT / 2.0,
            escape(&self.y_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.0}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );
        for (i, (name, color)) in self.legend.iter().enumerate() {
            let y = t + 14.0 * i as f64 + 8.0;
            let _ = writeln!(s, r#"<rect x="{:.0}" y="{:.0}" width="10" height="10" fill="{color}"/>"#, r + 4.0, y - 9.0);
            let _ = writeln!(s, r#"<text x="{:.0}" y="{y:.0}" font-size="9">{}</text>"#, r + 16.0, escape(name));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn fmt_tick(v: f64) -> String {
    format!("{v:.4}").trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_well_formed_document() {
        let mut f = Figure::new("t <1>", "x", "y");
        f.line(vec![(0.0, 0.0), (1.0, 2.0), (f64::NAN, 0.0), (2.0, 1.0), (3.0, 3.0)], PALETTE[0]);
        f.dots(vec![(0.5, 0.5)], PALETTE[1], 1.5);
        let s = f.render();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("t &lt;1&gt;"));
    }

    #[test]
    fn degenerate_bounds_do_not_divide_by_zero() {
        let mut f = Figure::new("", "", "");
        f.dots(vec![(1.0, 1.0)], PALETTE[0], 1.0);
        assert!(!f.render().contains("NaN"));
    }
}
