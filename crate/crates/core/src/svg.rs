//! Standalone SVG rendering of curves.
//!
//! Each curve is drawn as the staircase that the rectangular rule
//! integrates: from each point the path drops to the next point's y-value,
//! then runs across to its x-value.

use std::fmt::Write;

use crate::curve::{Curve, OperatingPoint};
use crate::error::{Result, UccError};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 20.0;
const BOTTOM: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Equal-cost line `c * x + (1 - c) * y = level`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Isocost {
    pub c: f64,
    pub level: f64,
}

struct Frame {
    x_max: f64,
    y_max: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        LEFT + x / self.x_max * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - BOTTOM - y / self.y_max * (HEIGHT - TOP - BOTTOM)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders named curves, operating-point markers and an optional isocost
/// line. All curves must share a coordinate system.
pub fn render_svg(
    curves: &[(&str, &Curve)],
    markers: &[OperatingPoint],
    isocost: Option<Isocost>,
) -> Result<String> {
    let (_, first) = curves.first().ok_or(UccError::NoCurves)?;
    let coords = first.coords();
    if curves.iter().any(|(_, c)| c.coords() != coords) {
        return Err(UccError::MixedCoordinates);
    }
    if let Some(iso) = isocost {
        if !(0.0..=1.0).contains(&iso.c) {
            return Err(UccError::InvalidTradeoff(iso.c));
        }
    }

    let xs = curves
        .iter()
        .flat_map(|(_, c)| c.xy().map(|(x, _)| x))
        .chain(markers.iter().map(|m| m.x(coords)));
    let ys = curves
        .iter()
        .flat_map(|(_, c)| c.xy().map(|(_, y)| y))
        .chain(markers.iter().map(|m| m.y(coords)));
    let nonzero = |m: f64| if m > 0.0 && m.is_finite() { m } else { 1.0 };
    let frame = Frame {
        x_max: nonzero(xs.fold(0.0, f64::max)),
        y_max: nonzero(ys.fold(0.0, f64::max)).max(1.0),
    };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="plot"><rect x="{LEFT}" y="{TOP}" width="{:.3}" height="{:.3}"/></clipPath></defs>"#,
        WIDTH - LEFT - RIGHT,
        HEIGHT - TOP - BOTTOM
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    axes(&mut out, &frame, coords.x_label(), coords.y_label());

    if let Some(iso) = isocost {
        let (x0, y0, x1, y1) = if iso.c == 1.0 {
            (iso.level, 0.0, iso.level, frame.y_max)
        } else {
            let y = |x: f64| (iso.level - iso.c * x) / (1.0 - iso.c);
            (0.0, y(0.0), frame.x_max, y(frame.x_max))
        };
        let _ = writeln!(
            out,
            r##"<line class="isocost" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#555555" stroke-dasharray="6 4" clip-path="url(#plot)"/>"##,
            frame.px(x0),
            frame.py(y0),
            frame.px(x1),
            frame.py(y1)
        );
    }

    for (i, (name, curve)) in curves.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let mut d = String::new();
        for (j, (x, y)) in curve.xy().enumerate() {
            if j == 0 {
                let _ = write!(d, "M {:.3} {:.3}", frame.px(x), frame.py(y));
            } else {
                let _ = write!(d, " V {:.3} H {:.3}", frame.py(y), frame.px(x));
            }
        }
        let _ = writeln!(
            out,
            r#"<path class="curve" data-name="{}" d="{d}" fill="none" stroke="{colour}" stroke-width="2"/>"#,
            escape(name)
        );
    }

    for m in markers {
        let (cx, cy) = (frame.px(m.x(coords)), frame.py(m.y(coords)));
        let _ = writeln!(
            out,
            r#"<g class="marker"><circle cx="{cx:.3}" cy="{cy:.3}" r="4" fill="black"/><text x="{:.3}" y="{:.3}">k = {:.3}</text></g>"#,
            cx + 6.0,
            cy - 6.0,
            m.k
        );
    }

    if curves.len() >= 2 {
        let _ = writeln!(out, r#"<g class="legend">"#);
        for (i, (name, _)) in curves.iter().enumerate() {
            let y = TOP + 10.0 + 18.0 * i as f64;
            let x = WIDTH - RIGHT - 150.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x:.3}" y1="{y:.3}" x2="{:.3}" y2="{y:.3}" stroke="{}" stroke-width="2"/><text x="{:.3}" y="{:.3}">{}</text>"#,
                x + 20.0,
                PALETTE[i % PALETTE.len()],
                x + 26.0,
                y + 4.0,
                escape(name)
            );
        }
        let _ = writeln!(out, "</g>");
    }

    out.push_str("</svg>\n");
    Ok(out)
}

fn axes(out: &mut String, frame: &Frame, x_label: &str, y_label: &str) {
    let (x0, y0) = (frame.px(0.0), frame.py(0.0));
    let (x1, y1) = (frame.px(frame.x_max), frame.py(frame.y_max));
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black"><line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y0:.3}"/><line x1="{x0:.3}" y1="{y0:.3}" x2="{x0:.3}" y2="{y1:.3}"/></g>"#
    );
    for t in 0..=4 {
        let f = t as f64 / 4.0;
        let (xv, yv) = (f * frame.x_max, f * frame.y_max);
        let _ = writeln!(
            out,
            r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{xv:.3}</text><text x="{:.3}" y="{:.3}" text-anchor="end">{yv:.3}</text>"#,
            frame.px(xv),
            y0 + 16.0,
            x0 - 6.0,
            frame.py(yv) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">{x_label}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text transform="translate(18 {:.3}) rotate(-90)" text-anchor="middle">{y_label}</text>"#,
        (y0 + y1) / 2.0
    );
}
