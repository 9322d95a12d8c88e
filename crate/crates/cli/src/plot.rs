//! Static SVG panels: scatter markers, polylines and shaded regions on
//! linear or logarithmic axes.

use std::fmt::Write;

const PANEL_WIDTH: f64 = 420.0;
const PANEL_HEIGHT: f64 = 340.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 46.0;
const TICKS: usize = 5;

pub const BLACK: &str = "#000000";
pub const ORANGE: &str = "#f28e1c";
pub const SHADE: &str = "#cfe3f7";
pub const GREY: &str = "#8c8c8c";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Marker {
    Ball,
    Square,
    Ring,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    /// Closed polygons filled with the even–odd rule.
    Region {
        polygons: Vec<Vec<(f64, f64)>>,
        fill: &'static str,
    },
    Line {
        points: Vec<(f64, f64)>,
        stroke: &'static str,
        dashed: bool,
    },
    Points {
        points: Vec<(f64, f64)>,
        marker: Marker,
        color: &'static str,
        label: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub x_range: (f64, f64),
    pub y_range: (f64, f64),
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub layers: Vec<Layer>,
}

impl Panel {
    pub fn new(title: impl Into<String>, x_label: &str, y_label: &str) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            x_range: (0.0, 1.0),
            y_range: (0.0, 1.0),
            x_scale: Scale::Linear,
            y_scale: Scale::Linear,
            layers: Vec::new(),
        }
    }

    pub fn ranges(mut self, x: (f64, f64), y: (f64, f64)) -> Self {
        self.x_range = x;
        self.y_range = y;
        self
    }

    pub fn log_log(mut self) -> Self {
        self.x_scale = Scale::Log;
        self.y_scale = Scale::Log;
        self
    }

    pub fn layer(mut self, layer: Layer) -> Self {
        self.layers.push(layer);
        self
    }

    /// Ranges covering every point of every layer with a 5% margin.
    pub fn fit(mut self) -> Self {
        let points: Vec<(f64, f64)> = self
            .layers
            .iter()
            .flat_map(|l| match l {
                Layer::Region { polygons, .. } => polygons.concat(),
                Layer::Line { points, .. } | Layer::Points { points, .. } => points.clone(),
            })
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .collect();
        self.x_range = padded(points.iter().map(|p| p.0), self.x_scale);
        self.y_range = padded(points.iter().map(|p| p.1), self.y_scale);
        self
    }
}

fn padded(values: impl Iterator<Item = f64>, scale: Scale) -> (f64, f64) {
    let values: Vec<f64> = values
        .filter(|v| scale == Scale::Linear || *v > 0.0)
        .map(|v| if scale == Scale::Log { v.log10() } else { v })
        .collect();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    };
    match scale {
        Scale::Linear => (lo, hi),
        Scale::Log => (10f64.powf(lo), 10f64.powf(hi)),
    }
}

struct Frame {
    left: f64,
    top: f64,
    width: f64,
    height: f64,
    x: Axis,
    y: Axis,
}

struct Axis {
    lo: f64,
    hi: f64,
    scale: Scale,
}

impl Axis {
    fn fraction(&self, v: f64) -> f64 {
        match self.scale {
            Scale::Linear => (v - self.lo) / (self.hi - self.lo),
            Scale::Log => (v.log10() - self.lo.log10()) / (self.hi.log10() - self.lo.log10()),
        }
    }

    fn ticks(&self) -> Vec<f64> {
        match self.scale {
            Scale::Linear => {
                let raw = (self.hi - self.lo) / TICKS as f64;
                let magnitude = 10f64.powf(raw.log10().floor());
                let step = [1.0, 2.0, 2.5, 5.0, 10.0]
                    .iter()
                    .map(|m| m * magnitude)
                    .find(|s| *s >= raw)
                    .unwrap_or(raw);
                let first = (self.lo / step).ceil() as i64;
                let last = (self.hi / step).floor() as i64;
                (first..=last).map(|k| k as f64 * step).collect()
            }
            Scale::Log => {
                let first = self.lo.log10().ceil() as i32;
                let last = self.hi.log10().floor() as i32;
                (first..=last).map(|e| 10f64.powi(e)).collect()
            }
        }
    }
}

impl Frame {
    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (
            self.left + self.x.fraction(x) * self.width,
            self.top + (1.0 - self.y.fraction(y)) * self.height,
        )
    }

    fn visible(&self, p: (f64, f64)) -> bool {
        let fx = self.x.fraction(p.0);
        let fy = self.y.fraction(p.1);
        fx.is_finite()
            && fy.is_finite()
            && (-1e-9..=1.0 + 1e-9).contains(&fx)
            && (-1e-9..=1.0 + 1e-9).contains(&fy)
    }
}

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if v.abs() >= 1e4 || v.abs() < 1e-2 {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn render_panel(out: &mut String, panel: &Panel, offset_x: f64) {
    let frame = Frame {
        left: offset_x + MARGIN_LEFT,
        top: MARGIN_TOP,
        width: PANEL_WIDTH - MARGIN_LEFT - MARGIN_RIGHT,
        height: PANEL_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM,
        x: Axis {
            lo: panel.x_range.0,
            hi: panel.x_range.1,
            scale: panel.x_scale,
        },
        y: Axis {
            lo: panel.y_range.0,
            hi: panel.y_range.1,
            scale: panel.y_scale,
        },
    };
    let clip = format!("clip{}", offset_x as i64);
    let _ = writeln!(
        out,
        r#"<clipPath id="{clip}"><rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}"/></clipPath>"#,
        frame.left, frame.top, frame.width, frame.height
    );
    let _ = writeln!(out, r#"<g clip-path="url(#{clip})">"#);
    for layer in &panel.layers {
        render_layer(out, &frame, layer);
    }
    out.push_str("</g>\n");

    let _ = writeln!(
        out,
        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="{BLACK}" stroke-width="1"/>"#,
        frame.left, frame.top, frame.width, frame.height
    );
    let bottom = frame.top + frame.height;
    for t in frame.x.ticks() {
        let (x, _) = frame.map((t, frame.y.lo));
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="{BLACK}"/><text x="{x:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            bottom - 5.0,
            bottom + 15.0,
            tick_label(t)
        );
    }
    for t in frame.y.ticks() {
        let (_, y) = frame.map((frame.x.lo, t));
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{BLACK}"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            frame.left,
            frame.left + 5.0,
            frame.left - 4.0,
            y + 4.0,
            tick_label(t)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="13" text-anchor="middle">{}</text>"#,
        frame.left + frame.width / 2.0,
        MARGIN_TOP - 10.0,
        escape(&panel.title)
    );
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        frame.left + frame.width / 2.0,
        bottom + 34.0,
        escape(&panel.x_label)
    );
    let (lx, ly) = (offset_x + 16.0, frame.top + frame.height / 2.0);
    let _ = writeln!(
        out,
        r#"<text x="{lx:.2}" y="{ly:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 {lx:.2} {ly:.2})">{}</text>"#,
        escape(&panel.y_label)
    );
}

fn render_layer(out: &mut String, frame: &Frame, layer: &Layer) {
    match layer {
        Layer::Region { polygons, fill } => {
            let mut d = String::new();
            for polygon in polygons.iter().filter(|p| p.len() >= 3) {
                for (k, &p) in polygon.iter().enumerate() {
                    let (x, y) = frame.map(p);
                    let _ = write!(d, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" });
                }
                d.push_str("Z ");
            }
            let _ = writeln!(
                out,
                r#"<path d="{}" fill="{fill}" fill-rule="evenodd" stroke="{GREY}" stroke-width="0.6"/>"#,
                d.trim_end()
            );
        }
        Layer::Line {
            points,
            stroke,
            dashed,
        } => {
            let coords: Vec<String> = points
                .iter()
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .map(|&p| {
                    let (x, y) = frame.map(p);
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            let dash = if *dashed {
                r#" stroke-dasharray="4 3""#
            } else {
                ""
            };
            let _ = writeln!(
                out,
                r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="1.2"{dash}/>"#,
                coords.join(" ")
            );
        }
        Layer::Points {
            points,
            marker,
            color,
            label,
        } => {
            let _ = writeln!(out, r#"<g><title>{}</title>"#, escape(label));
            for &p in points.iter().filter(|&&p| frame.visible(p)) {
                let (x, y) = frame.map(p);
                let _ = match marker {
                    Marker::Ball => writeln!(
                        out,
                        r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#
                    ),
                    Marker::Ring => writeln!(
                        out,
                        r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="none" stroke="{color}"/>"#
                    ),
                    Marker::Square => writeln!(
                        out,
                        r#"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="{color}"/>"#,
                        x - 3.0,
                        y - 3.0
                    ),
                };
            }
            out.push_str("</g>\n");
        }
    }
}

/// Panels side by side in one document.
pub fn render(panels: &[Panel]) -> String {
    let width = PANEL_WIDTH * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{PANEL_HEIGHT:.0}" viewBox="0 0 {width:.0} {PANEL_HEIGHT:.0}" font-family="serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, panel) in panels.iter().enumerate() {
        render_panel(&mut out, panel, k as f64 * PANEL_WIDTH);
    }
    out.push_str("</svg>\n");
    out
}
