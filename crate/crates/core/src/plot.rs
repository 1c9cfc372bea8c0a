//! Deterministic SVG scatter plots with fitted lines (`d = 1`).

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::model::{DataSet, Hyperplane};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineStyle {
    Solid,
    Dashed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotLine {
    pub hyperplane: Hyperplane,
    pub style: LineStyle,
    pub label: String,
}

/// A misreport: the agent's `x`, true `y` and reported `y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviation {
    pub x: f64,
    pub truth: f64,
    pub report: f64,
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - PAD - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * PAD)
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let m = 0.05 * (hi - lo);
        (lo - m, hi + m)
    } else {
        (lo - 1.0, hi + 1.0)
    }
}

fn fmt(v: f64) -> String {
    let s = format!("{v:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Renders points, lines and an optional deviation marker. Axes cover the
/// points, the marker and the lines at the extreme `x`, with 5% margins.
pub fn render_svg(data: &DataSet, lines: &[PlotLine], deviation: Option<Deviation>) -> Result<String> {
    if data.dim() != 1 {
        return Err(Error::Unsupported("plot".into(), format!("plots need d = 1, data has d = {}", data.dim())));
    }
    if let Some(l) = lines.iter().find(|l| l.hyperplane.dim() != 1) {
        return Err(Error::DimensionMismatch { expected: 1, found: l.hyperplane.dim() });
    }
    let xs: Vec<f64> = (0..data.n()).map(|i| data.x(i)[0]).collect();
    let (xmin, xmax) = xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let mut ys: Vec<f64> = data.ys().to_vec();
    for l in lines {
        ys.push(l.hyperplane.eval(&[xmin]));
        ys.push(l.hyperplane.eval(&[xmax]));
    }
    if let Some(dv) = deviation {
        ys.push(dv.report);
    }
    let (ymin, ymax) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let (x0, x1) = padded(xmin, xmax);
    let (y0, y1) = padded(ymin, ymax);
    let f = Frame { x0, x1, y0, y1 };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(
        s,
        r#"<defs><clipPath id="plot-area"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath></defs>"#,
        PAD,
        PAD,
        WIDTH - 2.0 * PAD,
        HEIGHT - 2.0 * PAD
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g class="axes" stroke="black" stroke-width="1"><line x1="{p}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{p}" y1="{p}" x2="{p}" y2="{b}"/></g>"#,
        p = PAD,
        b = HEIGHT - PAD,
        r = WIDTH - PAD
    );
    let _ = writeln!(
        s,
        r#"<g class="ticks" font-family="sans-serif" font-size="10"><text x="{}" y="{}">{}</text><text x="{}" y="{}" text-anchor="end">{}</text><text x="{}" y="{}">{}</text><text x="{}" y="{}">{}</text></g>"#,
        PAD,
        HEIGHT - PAD + 14.0,
        fmt(x0),
        WIDTH - PAD,
        HEIGHT - PAD + 14.0,
        fmt(x1),
        4.0,
        HEIGHT - PAD,
        fmt(y0),
        4.0,
        PAD,
        fmt(y1)
    );
    let _ = writeln!(s, r#"<g clip-path="url(#plot-area)">"#);
    for l in lines {
        let dash = match l.style {
            LineStyle::Solid => "",
            LineStyle::Dashed => r#" stroke-dasharray="6 4""#,
        };
        let h = &l.hyperplane;
        let _ = writeln!(
            s,
            r#"<line class="fit" data-label="{}" data-slope="{}" data-intercept="{}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="steelblue" stroke-width="2"{dash}/>"#,
            l.label,
            h.beta1[0] + 0.0,
            h.beta0 + 0.0,
            fmt(f.px(x0)),
            fmt(f.py(h.eval(&[x0]))),
            fmt(f.px(x1)),
            fmt(f.py(h.eval(&[x1])))
        );
    }
    let _ = writeln!(s, "</g>");
    for i in 0..data.n() {
        let _ = writeln!(
            s,
            r#"<circle class="point" cx="{}" cy="{}" r="4" fill="black"/>"#,
            fmt(f.px(data.x(i)[0])),
            fmt(f.py(data.y(i)))
        );
    }
    if let Some(dv) = deviation {
        let (cx, cy) = (f.px(dv.x), f.py(dv.report));
        let _ = writeln!(
            s,
            r#"<path class="deviation" d="M {} {} L {} {} M {} {} L {} {}" stroke="crimson" stroke-width="2"/>"#,
            fmt(cx - 5.0),
            fmt(cy - 5.0),
            fmt(cx + 5.0),
            fmt(cy + 5.0),
            fmt(cx - 5.0),
            fmt(cy + 5.0),
            fmt(cx + 5.0),
            fmt(cy - 5.0)
        );
        let _ = writeln!(
            s,
            r#"<line class="deviation-arrow" x1="{}" y1="{}" x2="{}" y2="{}" stroke="crimson" stroke-dasharray="2 2"/>"#,
            fmt(f.px(dv.x)),
            fmt(f.py(dv.truth)),
            fmt(cx),
            fmt(cy)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}
