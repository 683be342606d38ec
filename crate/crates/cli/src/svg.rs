//! Minimal self-contained SVG plots: linear axes, polylines, markers, labels.

use std::fmt::Write;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN_LEFT: f64 = 62.0;
const MARGIN_RIGHT: f64 = 16.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 46.0;

pub fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Round tick positions covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64, target: usize) -> Vec<f64> {
    let span = hi - lo;
    if !(span.is_finite() && span > 0.0) {
        return vec![lo];
    }
    let raw = span / target.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|m| m * mag)
        .find(|s| span / s <= target as f64)
        .unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|i| i as f64 * step).collect()
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl Range {
    /// Bounds of `values` padded by 5% on each side.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.into_iter().filter(|v| v.is_finite()) {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            return Self { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            return Self {
                lo: lo - 0.5,
                hi: hi + 0.5,
            };
        }
        let pad = 0.05 * (hi - lo);
        Self {
            lo: lo - pad,
            hi: hi + pad,
        }
    }
}

/// One plot panel placed at an offset inside a document.
pub struct Panel {
    x0: f64,
    y0: f64,
    w: f64,
    h: f64,
    xr: Range,
    yr: Range,
    body: String,
}

impl Panel {
    pub fn new(x0: f64, y0: f64, w: f64, h: f64, xr: Range, yr: Range) -> Self {
        Self {
            x0,
            y0,
            w,
            h,
            xr,
            yr,
            body: String::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.x0 + MARGIN_LEFT + (x - self.xr.lo) / (self.xr.hi - self.xr.lo) * (self.w - MARGIN_LEFT - MARGIN_RIGHT)
    }

    /// y grows upwards.
    fn py(&self, y: f64) -> f64 {
        self.y0 + self.h - MARGIN_BOTTOM - (y - self.yr.lo) / (self.yr.hi - self.yr.lo) * (self.h - MARGIN_TOP - MARGIN_BOTTOM)
    }

    pub fn axes(&mut self, title: &str, xlabel: &str, ylabel: &str) -> &mut Self {
        let (l, r) = (self.px(self.xr.lo), self.px(self.xr.hi));
        let (b, t) = (self.py(self.yr.lo), self.py(self.yr.hi));
        let _ = writeln!(
            self.body,
            r##"<rect x="{l:.1}" y="{t:.1}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            r - l,
            b - t
        );
        for v in ticks(self.xr.lo, self.xr.hi, 6) {
            let x = self.px(v);
            let _ = writeln!(
                self.body,
                r##"<line x1="{x:.1}" y1="{b:.1}" x2="{x:.1}" y2="{:.1}" stroke="#333"/><text x="{x:.1}" y="{:.1}" font-size="10" text-anchor="middle">{}</text>"##,
                b + 4.0,
                b + 15.0,
                fmt_tick(v)
            );
        }
        for v in ticks(self.yr.lo, self.yr.hi, 6) {
            let y = self.py(v);
            let _ = writeln!(
                self.body,
                r##"<line x1="{:.1}" y1="{y:.1}" x2="{l:.1}" y2="{y:.1}" stroke="#333"/><text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{}</text>"##,
                l - 4.0,
                l - 6.0,
                y + 3.5,
                fmt_tick(v)
            );
        }
        let _ = writeln!(
            self.body,
            r#"<text x="{:.1}" y="{:.1}" font-size="12" text-anchor="middle">{}</text>"#,
            0.5 * (l + r),
            self.y0 + 18.0,
            escape(title)
        );
        let _ = writeln!(
            self.body,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">{}</text>"#,
            0.5 * (l + r),
            b + 32.0,
            escape(xlabel)
        );
        let (yx, yy) = (self.x0 + 14.0, 0.5 * (b + t));
        let _ = writeln!(
            self.body,
            r#"<text x="{yx:.1}" y="{yy:.1}" font-size="11" text-anchor="middle" transform="rotate(-90 {yx:.1} {yy:.1})">{}</text>"#,
            escape(ylabel)
        );
        self
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str, closed: bool) -> &mut Self {
        let pts: Vec<String> = points
            .iter()
            .filter(|p| p.0.is_finite() && p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", self.px(x), self.py(y)))
            .collect();
        let tag = if closed { "polygon" } else { "polyline" };
        let _ = writeln!(
            self.body,
            r#"<{tag} points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
            pts.join(" "),
            escape(color)
        );
        self
    }

    /// Piecewise-constant profile: `values[i]` held over `[edges[i], edges[i+1]]`.
    pub fn steps(&mut self, edges: &[f64], values: &[f64], color: &str) -> &mut Self {
        let mut pts = Vec::with_capacity(2 * values.len());
        for (i, &v) in values.iter().enumerate() {
            pts.push((edges[i], v));
            pts.push((edges[i + 1], v));
        }
        self.polyline(&pts, color, false)
    }

    pub fn dots(&mut self, points: &[(f64, f64)], color: &str, radius: f64) -> &mut Self {
        for &(x, y) in points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
            let _ = writeln!(
                self.body,
                r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}" fill="{}"/>"#,
                self.px(x),
                self.py(y),
                escape(color)
            );
        }
        self
    }

    pub fn label(&mut self, x: f64, y: f64, text: &str) -> &mut Self {
        let _ = writeln!(
            self.body,
            r#"<text x="{:.1}" y="{:.1}" font-size="11">{}</text>"#,
            self.px(x) + 4.0,
            self.py(y) - 4.0,
            escape(text)
        );
        self
    }

    pub fn legend(&mut self, entries: &[(&str, &str)]) -> &mut Self {
        let x = self.x0 + self.w - MARGIN_RIGHT - 110.0;
        for (i, (color, name)) in entries.iter().enumerate() {
            let y = self.y0 + MARGIN_TOP + 12.0 + 14.0 * i as f64;
            let _ = writeln!(
                self.body,
                r#"<rect x="{x:.1}" y="{:.1}" width="10" height="10" fill="{}"/><text x="{:.1}" y="{:.1}" font-size="10">{}</text>"#,
                y - 9.0,
                escape(color),
                x + 14.0,
                y,
                escape(name)
            );
        }
        self
    }
}

/// Renders panels into one document sized to fit them.
pub fn document(panels: Vec<Panel>) -> String {
    let (mut w, mut h): (f64, f64) = (0.0, 0.0);
    for p in &panels {
        w = w.max(p.x0 + p.w);
        h = h.max(p.y0 + p.h);
    }
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w:.0} {h:.0}" width="{w:.0}" height="{h:.0}" font-family="sans-serif">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for p in panels {
        out.push_str(&p.body);
    }
    out.push_str("</svg>\n");
    out
}

/// Panel of the default size at grid cell `(col, row)`.
pub fn cell(col: usize, row: usize, xr: Range, yr: Range) -> Panel {
    Panel::new(col as f64 * WIDTH, row as f64 * HEIGHT, WIDTH, HEIGHT, xr, yr)
}
