//! Minimal deterministic SVG rendering for box plots and line plots.
//!
//! Output depends only on the inputs: elements are emitted in input order and
//! every coordinate is printed with fixed precision.

use std::fmt::Write as _;

use crate::experiments::SummaryStats;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

#[derive(Clone, Copy)]
struct Range {
    lo: f64,
    hi: f64,
}

impl Range {
    fn of(values: impl Iterator<Item = f64>) -> Range {
        let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if !lo.is_finite() {
            return Range { lo: 0.0, hi: 1.0 };
        }
        if hi - lo < 1e-12 {
            return Range { lo: lo - 0.5, hi: hi + 0.5 };
        }
        let pad = 0.05 * (hi - lo);
        Range { lo: lo - pad, hi: hi + pad }
    }

    fn map(&self, v: f64, from: f64, to: f64) -> f64 {
        from + (v - self.lo) / (self.hi - self.lo) * (to - from)
    }
}

struct Canvas {
    svg: String,
}

impl Canvas {
    fn new(title: &str, x_label: &str, y_label: &str, metadata: Option<&str>) -> Self {
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        if let Some(m) = metadata {
            let _ = writeln!(svg, "<metadata>{}</metadata>", escape(m));
        }
        let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(title)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
            HEIGHT - 15.0,
            escape(x_label)
        );
        let _ = writeln!(
            svg,
            r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
            TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
            TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
            escape(y_label)
        );
        Canvas { svg }
    }

    fn y(&self, r: &Range, v: f64) -> f64 {
        r.map(v, HEIGHT - BOTTOM, TOP)
    }

    fn axes(&mut self, y: &Range) {
        let (x0, x1, y0, y1) = (LEFT, WIDTH - RIGHT, HEIGHT - BOTTOM, TOP);
        let _ = writeln!(self.svg, r#"<g class="axes" stroke="black" fill="none">"#);
        let _ = writeln!(self.svg, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}"/>"#);
        let _ = writeln!(self.svg, r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}"/>"#);
        let _ = writeln!(self.svg, "</g>");
        for k in 0..=4 {
            let v = y.lo + (y.hi - y.lo) * k as f64 / 4.0;
            let py = self.y(y, v);
            let _ = writeln!(
                self.svg,
                r#"<line x1="{:.2}" y1="{py:.2}" x2="{x0:.2}" y2="{py:.2}" stroke="black"/>"#,
                x0 - 5.0
            );
            let _ =
                writeln!(self.svg, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{v:.3}</text>"#, x0 - 8.0, py + 4.0);
        }
    }

    fn x_tick(&mut self, px: f64, label: &str) {
        let y0 = HEIGHT - BOTTOM;
        let _ =
            writeln!(self.svg, r#"<line x1="{px:.2}" y1="{y0:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(
            self.svg,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 20.0,
            escape(label)
        );
    }

    fn finish(mut self) -> String {
        self.svg.push_str("</svg>\n");
        self.svg
    }
}

/// One box glyph per group: whiskers at min/max, box from q1 to q3, median line.
pub fn box_plot(
    groups: &[(String, SummaryStats)],
    title: &str,
    x_label: &str,
    y_label: &str,
    metadata: Option<&str>,
) -> String {
    let mut c = Canvas::new(title, x_label, y_label, metadata);
    let y = Range::of(groups.iter().flat_map(|(_, s)| [s.min, s.max]));
    c.axes(&y);
    let slot = (WIDTH - LEFT - RIGHT) / groups.len().max(1) as f64;
    for (k, (label, s)) in groups.iter().enumerate() {
        let cx = LEFT + slot * (k as f64 + 0.5);
        let half = (slot * 0.3).min(40.0);
        let (ymin, yq1, ymed, yq3, ymax) =
            (c.y(&y, s.min), c.y(&y, s.q1), c.y(&y, s.median), c.y(&y, s.q3), c.y(&y, s.max));
        let _ = writeln!(c.svg, r#"<g class="box" data-group="{}" stroke="black">"#, escape(label));
        let _ = writeln!(c.svg, r#"<line x1="{cx:.2}" y1="{ymin:.2}" x2="{cx:.2}" y2="{yq1:.2}"/>"#);
        let _ = writeln!(c.svg, r#"<line x1="{cx:.2}" y1="{yq3:.2}" x2="{cx:.2}" y2="{ymax:.2}"/>"#);
        for yy in [ymin, ymax] {
            let _ = writeln!(
                c.svg,
                r#"<line x1="{:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}"/>"#,
                cx - half / 2.0,
                cx + half / 2.0
            );
        }
        let _ = writeln!(
            c.svg,
            r#"<rect x="{:.2}" y="{yq3:.2}" width="{:.2}" height="{:.2}" fill="{}" fill-opacity="0.5"/>"#,
            cx - half,
            2.0 * half,
            (yq1 - yq3).max(0.0),
            PALETTE[k % PALETTE.len()]
        );
        let _ = writeln!(
            c.svg,
            r#"<line x1="{:.2}" y1="{ymed:.2}" x2="{:.2}" y2="{ymed:.2}" stroke-width="2"/>"#,
            cx - half,
            cx + half
        );
        let _ = writeln!(c.svg, "</g>");
        c.x_tick(cx, &format!("{label} [{}]", s.count));
    }
    c.finish()
}

/// Polylines with point markers, one per series, on shared axes.
pub fn line_plot(
    series: &[(String, Vec<(f64, f64)>)],
    title: &str,
    x_label: &str,
    y_label: &str,
    metadata: Option<&str>,
) -> String {
    let mut c = Canvas::new(title, x_label, y_label, metadata);
    let x = Range::of(series.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.0)));
    let y = Range::of(series.iter().flat_map(|(_, pts)| pts.iter().map(|p| p.1)));
    c.axes(&y);
    for k in 0..=4 {
        let v = x.lo + (x.hi - x.lo) * k as f64 / 4.0;
        c.x_tick(x.map(v, LEFT, WIDTH - RIGHT), &format!("{v:.1}"));
    }
    let dense = series.iter().map(|(_, p)| p.len()).max().unwrap_or(0) > 60;
    for (k, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> =
            pts.iter().map(|&(px, py)| format!("{:.2},{:.2}", x.map(px, LEFT, WIDTH - RIGHT), c.y(&y, py))).collect();
        let _ = writeln!(c.svg, r#"<g class="series" data-name="{}">"#, escape(name));
        let _ = writeln!(
            c.svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            coords.join(" ")
        );
        if !dense {
            for p in &coords {
                let (px, py) = p.split_once(',').expect("formatted above");
                let _ = writeln!(c.svg, r#"<circle cx="{px}" cy="{py}" r="3" fill="{color}"/>"#);
            }
        }
        let _ = writeln!(c.svg, "</g>");
        let ly = TOP + 14.0 * k as f64;
        let _ = writeln!(
            c.svg,
            r#"<text x="{:.2}" y="{:.2}" fill="{color}" text-anchor="end">{}</text>"#,
            WIDTH - RIGHT - 4.0,
            ly + 4.0,
            escape(name)
        );
    }
    c.finish()
}
