//! Log-log roofline plot as plain SVG.
//!
//! The output is a pure function of the report: coordinates are printed
//! with fixed precision and elements are emitted in a fixed order, so the
//! same inputs always give byte-identical files.

use std::fmt::Write as _;

use crate::kernels::KernelId;
use crate::report::RooflineReport;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const MARKER: f64 = 5.0;

const PATTERN_COLORS: [(&str, &str); 4] = [
    ("random", "#d62728"),
    ("diagonal", "#2ca02c"),
    ("blocked", "#1f77b4"),
    ("scale-free", "#9467bd"),
];

fn pattern_color(p: &str) -> &'static str {
    PATTERN_COLORS
        .iter()
        .find(|(name, _)| *name == p)
        .map_or("#7f7f7f", |(_, c)| c)
}

fn kernel_color(k: KernelId) -> &'static str {
    match k {
        KernelId::Csr => "#1f77b4",
        KernelId::Csb => "#e6ab02",
        KernelId::Reference => "#444444",
    }
}

/// Decade-aligned `[lo, hi]` covering all values, at least one decade wide.
fn decade_range(values: impl Iterator<Item = f64>) -> (i32, i32) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values.filter(|v| *v > 0.0 && v.is_finite()) {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0, 1);
    }
    let lo = lo.log10().floor() as i32;
    let hi = (hi.log10().ceil() as i32).max(lo + 1);
    (lo, hi)
}

struct Axes {
    x: (i32, i32),
    y: (i32, i32),
}

impl Axes {
    fn px(&self, v: f64) -> f64 {
        let frac = (v.log10() - self.x.0 as f64) / (self.x.1 - self.x.0) as f64;
        LEFT + frac * (WIDTH - LEFT - RIGHT)
    }

    fn py(&self, v: f64) -> f64 {
        let frac = (v.log10() - self.y.0 as f64) / (self.y.1 - self.y.0) as f64;
        HEIGHT - BOTTOM - frac * (HEIGHT - TOP - BOTTOM)
    }

    fn x_min(&self) -> f64 {
        10f64.powi(self.x.0)
    }

    fn x_max(&self) -> f64 {
        10f64.powi(self.x.1)
    }
}

fn decade_label(k: i32) -> String {
    if (-3..=3).contains(&k) {
        format!("{}", 10f64.powi(k))
    } else {
        format!("1e{k}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

pub fn render_svg(report: &RooflineReport) -> String {
    let beta = report.profile.beta_gbps;
    let pi = report.profile.pi_gflops;

    let x_dec = decade_range(
        report
            .verticals
            .iter()
            .map(|v| v.ai)
            .chain(report.points.iter().map(|p| p.ai_model)),
    );
    let y_dec = decade_range(report.points.iter().map(|p| p.gflops.min(pi)).chain([
        (beta * 10f64.powi(x_dec.0)).min(pi),
        (beta * 10f64.powi(x_dec.1)).min(pi),
    ]));
    let axes = Axes { x: x_dec, y: y_dec };
    let (plot_l, plot_r) = (LEFT, WIDTH - RIGHT);
    let (plot_t, plot_b) = (TOP, HEIGHT - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    let names: Vec<&str> = report.matrices.iter().map(|m| m.matrix.as_str()).collect();
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">Roofline: {} (beta = {} GB/s)</text>"#,
        (plot_l + plot_r) / 2.0,
        escape(&names.join(", ")),
        beta
    );

    // Grid and tick labels.
    let _ = writeln!(s, r##"<g class="grid" stroke="#dddddd" stroke-width="1">"##);
    for k in x_dec.0..=x_dec.1 {
        let x = axes.px(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{plot_t:.2}" x2="{x:.2}" y2="{plot_b:.2}"/>"#
        );
    }
    for k in y_dec.0..=y_dec.1 {
        let y = axes.py(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<line x1="{plot_l:.2}" y1="{y:.2}" x2="{plot_r:.2}" y2="{y:.2}"/>"#
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g class="ticks">"#);
    for k in x_dec.0..=x_dec.1 {
        let x = axes.px(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            plot_b + 18.0,
            decade_label(k)
        );
    }
    for k in y_dec.0..=y_dec.1 {
        let y = axes.py(10f64.powi(k));
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            plot_l - 6.0,
            y + 4.0,
            decade_label(k)
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{plot_l:.2}" y="{plot_t:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
        plot_r - plot_l,
        plot_b - plot_t
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">Arithmetic intensity (FLOP/byte)</text>"#,
        (plot_l + plot_r) / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text transform="translate(20 {:.2}) rotate(-90)" text-anchor="middle">Performance (GFLOP/s)</text>"#,
        (plot_t + plot_b) / 2.0
    );

    // Bandwidth roof, flattened at pi past the ridge point.
    let (x0, x1) = (axes.x_min(), axes.x_max());
    let ridge = pi / beta;
    let mut roof = vec![(x0, (beta * x0).min(pi))];
    if ridge > x0 && ridge < x1 {
        roof.push((ridge, pi));
    }
    roof.push((x1, (beta * x1).min(pi)));
    let pts: Vec<String> = roof
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", axes.px(x), axes.py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline class="roofline" points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        pts.join(" ")
    );

    // Model verticals, one per (matrix, pattern, d).
    let _ = writeln!(s, r#"<g class="verticals">"#);
    for v in &report.verticals {
        let x = axes.px(v.ai);
        let pattern = v.pattern.as_str();
        let _ = writeln!(
            s,
            r#"<line class="model-ai" data-matrix="{}" data-pattern="{pattern}" data-d="{}" data-ai="{:.6e}" data-bound="{:.6e}" x1="{x:.2}" y1="{plot_t:.2}" x2="{x:.2}" y2="{plot_b:.2}" stroke="{}" stroke-dasharray="4 3"/>"#,
            escape(&v.matrix),
            v.d,
            v.ai,
            v.bound_gflops,
            pattern_color(pattern)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="10" fill="{}">d={}</text>"#,
            x + 3.0,
            plot_t + 12.0,
            pattern_color(pattern),
            v.d
        );
    }
    let _ = writeln!(s, "</g>");

    // Measured points at the model intensity of their pattern and width.
    let _ = writeln!(s, r#"<g class="points">"#);
    for p in &report.points {
        let shown = p.gflops.min(pi);
        let clipped = if p.gflops > pi {
            r#" data-clipped="true""#
        } else {
            ""
        };
        let (x, y) = (axes.px(p.ai_model), axes.py(shown));
        let attrs = format!(
            r#"class="point" data-matrix="{}" data-kernel="{}" data-d="{}" data-threads="{}" data-gflops="{:.6e}"{clipped}"#,
            escape(&p.matrix),
            p.kernel,
            p.d,
            p.threads,
            shown
        );
        let color = kernel_color(p.kernel);
        let _ = writeln!(s, "{}", marker(p.kernel, x, y, &attrs, color));
    }
    let _ = writeln!(s, "</g>");

    // Legend.
    let lx = plot_r + 16.0;
    let mut ly = plot_t + 10.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    let mut kernels: Vec<KernelId> = report.points.iter().map(|p| p.kernel).collect();
    kernels.sort();
    kernels.dedup();
    for k in kernels {
        let _ = writeln!(
            s,
            "{}",
            marker(k, lx, ly, r#"class="legend-marker""#, kernel_color(k))
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 12.0,
            ly + 4.0,
            k.as_str().to_uppercase()
        );
        ly += 20.0;
    }
    let mut patterns: Vec<&str> = report
        .verticals
        .iter()
        .map(|v| v.pattern.as_str())
        .collect();
    patterns.sort();
    patterns.dedup();
    for p in patterns {
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{}" stroke-dasharray="4 3"/>"#,
            lx - 6.0,
            lx + 6.0,
            pattern_color(p)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{p} AI</text>"#,
            lx + 12.0,
            ly + 4.0
        );
        ly += 20.0;
    }
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="black" stroke-width="2"/>"#,
        lx - 6.0,
        lx + 6.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}">beta x AI</text>"#,
        lx + 12.0,
        ly + 4.0
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

/// Circle for CSR, square for CSB, triangle for the reference kernel.
fn marker(kernel: KernelId, x: f64, y: f64, attrs: &str, color: &str) -> String {
    match kernel {
        KernelId::Csr => {
            format!(r#"<circle {attrs} cx="{x:.2}" cy="{y:.2}" r="{MARKER:.2}" fill="{color}"/>"#)
        }
        KernelId::Csb => format!(
            r#"<rect {attrs} x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            x - MARKER,
            y - MARKER,
            2.0 * MARKER,
            2.0 * MARKER
        ),
        KernelId::Reference => format!(
            r#"<polygon {attrs} points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}" fill="{color}"/>"#,
            x,
            y - MARKER,
            x - MARKER,
            y + MARKER,
            x + MARKER,
            y + MARKER
        ),
    }
}
