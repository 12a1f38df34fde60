//! Deterministic SVG of `f`, `H_n` and the strip around `H_n`.

use std::fmt::Write;

use takagi::rational::{format_decimal, to_f64};
use takagi::{CertifiedValue, PiecewiseLinearFunction, Rational};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 40.0;

pub struct Sample {
    pub x: Rational,
    pub f: CertifiedValue,
    pub h: Rational,
}

struct Frame {
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + x * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (HEIGHT - 2.0 * MARGIN)
    }

    fn scale_y(&self) -> f64 {
        (HEIGHT - 2.0 * MARGIN) / (self.y_max - self.y_min)
    }
}

fn polyline(out: &mut String, pts: impl Iterator<Item = (f64, f64)>) {
    for (k, (x, y)) in pts.enumerate() {
        if k > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.3},{y:.3}");
    }
}

pub fn render(hn: &PiecewiseLinearFunction, halfwidth: &Rational, samples: &[Sample]) -> String {
    let w = to_f64(halfwidth);
    let vertices: Vec<(f64, f64)> = (0..hn.len())
        .map(|j| (to_f64(&hn.grid_x(j)), to_f64(&hn.value(j))))
        .collect();
    let mut y_min = vertices.iter().map(|v| v.1).fold(f64::INFINITY, f64::min) - w;
    let mut y_max = vertices
        .iter()
        .map(|v| v.1)
        .fold(f64::NEG_INFINITY, f64::max)
        + w;
    for s in samples {
        y_min = y_min.min(to_f64(&s.f.lo()));
        y_max = y_max.max(to_f64(&s.f.hi()));
    }
    let pad = ((y_max - y_min) * 0.05).max(1e-9);
    let frame = Frame {
        y_min: y_min - pad,
        y_max: y_max + pad,
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    out.push_str(
        r##"<g id="strip"><polygon fill="#9ecae1" fill-opacity="0.5" stroke="none" points=""##,
    );
    let upper = vertices
        .iter()
        .map(|&(x, y)| (frame.px(x), frame.py(y + w)));
    let lower = vertices
        .iter()
        .rev()
        .map(|&(x, y)| (frame.px(x), frame.py(y - w)));
    polyline(&mut out, upper.chain(lower));
    out.push_str("\"/></g>\n");

    out.push_str(
        r##"<g id="partial-sum"><polyline fill="none" stroke="#d95f02" stroke-width="1" points=""##,
    );
    polyline(
        &mut out,
        vertices.iter().map(|&(x, y)| (frame.px(x), frame.py(y))),
    );
    out.push_str("\"/></g>\n");

    let radius = samples
        .iter()
        .map(|s| to_f64(&s.f.radius))
        .fold(0.0, f64::max);
    let stroke = (2.0 * radius * frame.scale_y()).max(0.75);
    let _ = write!(
        out,
        r#"<g id="function"><polyline fill="none" stroke="black" stroke-width="{stroke:.3}" points=""#
    );
    polyline(
        &mut out,
        samples
            .iter()
            .map(|s| (frame.px(to_f64(&s.x)), frame.py(to_f64(&s.f.center)))),
    );
    out.push_str("\"/></g>\n");

    let _ = writeln!(
        out,
        r#"<line x1="{0:.3}" y1="{1:.3}" x2="{2:.3}" y2="{1:.3}" stroke="gray"/>"#,
        frame.px(0.0),
        HEIGHT - MARGIN,
        frame.px(1.0)
    );
    out.push_str("</svg>\n");
    out
}

pub fn samples_csv(samples: &[Sample], halfwidth: &Rational, digits: u32) -> String {
    let mut out = String::from("x,f_center,f_radius,h_n,strip_lo,strip_hi\n");
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            format_decimal(&s.x, digits),
            format_decimal(&s.f.center, digits),
            format_decimal(&s.f.radius, digits),
            format_decimal(&s.h, digits),
            format_decimal(&(&s.h - halfwidth), digits),
            format_decimal(&(&s.h + halfwidth), digits),
        );
    }
    out
}
