//! Static SVG plot of a projected curve.

use std::fmt::Write as _;

use clap::ValueEnum;
use pgc_core::Vector;

pub const WIDTH: f64 = 800.0;
pub const HEIGHT: f64 = 600.0;
pub const MARGIN: f64 = 40.0;
const TICKS: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Projection {
    Yz,
    Xy,
    Xz,
}

impl Projection {
    fn pick(self, p: &Vector) -> (f64, f64) {
        match self {
            Projection::Yz => (p.y, p.z),
            Projection::Xy => (p.x, p.y),
            Projection::Xz => (p.x, p.z),
        }
    }

    fn labels(self) -> (&'static str, &'static str) {
        match self {
            Projection::Yz => ("y", "z"),
            Projection::Xy => ("x", "y"),
            Projection::Xz => ("x", "z"),
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:.3}")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Linear map of the data bounding box into the viewport inside the margins.
/// A degenerate range (a flat projection) is widened to ±1 around its value.
struct Axis {
    lo: f64,
    hi: f64,
    from: f64,
    to: f64,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, from: f64, to: f64) -> Self {
        let (mut lo, mut hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        if !(hi - lo > 1e-12 * (1.0 + lo.abs().max(hi.abs()))) {
            let c = if lo.is_finite() { lo } else { 0.0 };
            lo = c - 1.0;
            hi = c + 1.0;
        }
        Self { lo, hi, from, to }
    }

    fn map(&self, v: f64) -> f64 {
        self.from + (v - self.lo) / (self.hi - self.lo) * (self.to - self.from)
    }

    fn ticks(&self) -> impl Iterator<Item = f64> + '_ {
        (0..TICKS).map(move |i| self.lo + (self.hi - self.lo) * i as f64 / (TICKS - 1) as f64)
    }
}

pub fn render(title: &str, points: &[Vector], projection: Projection, footer: &str) -> String {
    let xy: Vec<(f64, f64)> = points.iter().map(|p| projection.pick(p)).collect();
    let ax = Axis::new(xy.iter().map(|p| p.0), MARGIN, WIDTH - MARGIN);
    // SVG y grows downward
    let ay = Axis::new(xy.iter().map(|p| p.1), HEIGHT - MARGIN, MARGIN);
    let (lx, ly) = projection.labels();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#, WIDTH / 2.0, escape(title));
    let (x0, x1, y0, y1) = (MARGIN, WIDTH - MARGIN, HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M {x0} {y1} L {x0} {y0} L {x1} {y0}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for t in ax.ticks() {
        let px = num(ax.map(t));
        let _ = writeln!(s, r#"<line x1="{px}" y1="{y0}" x2="{px}" y2="{}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{px}" y="{}" text-anchor="middle" font-size="9">{}</text>"#,
            y0 + 15.0,
            num(t)
        );
    }
    for t in ay.ticks() {
        let py = num(ay.map(t));
        let _ = writeln!(s, r#"<line x1="{}" y1="{py}" x2="{x0}" y2="{py}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{py}" text-anchor="end" font-size="9" transform="rotate(-90 {} {py})">{}</text>"#,
            x0 - 7.0,
            x0 - 7.0,
            num(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{lx}</text>"#, x1 + 4.0, y0 + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" font-size="11">{ly}</text>"#, x0 - 4.0, y1 - 8.0);

    let pts: Vec<String> = xy.iter().map(|&(x, y)| format!("{},{}", num(ax.map(x)), num(ay.map(y)))).collect();
    let _ = writeln!(s, r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="11">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 8.0,
        escape(footer)
    );
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_projection_stays_on_axis() {
        let pts: Vec<Vector> = (0..11).map(|i| Vector::new(i as f64, 0.0, (i * i) as f64 / 2.0)).collect();
        let svg = render("circle", &pts, Projection::Xy, "kappa");
        let line = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        let ys: Vec<&str> = line.split("points=\"").nth(1).unwrap().trim_end_matches("\"/>").split(' ').map(|p| p.split(',').nth(1).unwrap()).collect();
        assert_eq!(ys.len(), 11);
        assert!(ys.iter().all(|y| *y == ys[0]));
    }

    #[test]
    fn escapes_title() {
        let svg = render("a<b", &[Vector::zero(), Vector::new(1.0, 1.0, 1.0)], Projection::Yz, "");
        assert!(svg.contains("a&lt;b"));
    }
}
