//! Minimal log-log line plot in SVG 1.1.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub name: String,
    /// `(h, error)` pairs; non-positive values are skipped.
    pub points: Vec<(f64, f64)>,
}

fn decade_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| *v > 0.0 && v.is_finite())
        .map(f64::log10)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 0.0);
    }
    let (lo, hi) = (lo.floor(), hi.ceil());
    if lo == hi {
        (lo - 1.0, hi)
    } else {
        (lo, hi)
    }
}

/// Renders `series` on log-log axes, plus dashed guide lines of the given
/// slopes anchored below the finest point of the first series.
pub fn loglog_plot(title: &str, series: &[Series], guide_slopes: &[f64]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter().copied());
    let (x0, x1) = decade_range(all().map(|p| p.0));
    let (y0, y1) = decade_range(all().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |h: f64| LEFT + (h.log10() - x0) / (x1 - x0) * pw;
    let sy = |e: f64| TOP + (y1 - e.log10()) / (y1 - y0) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(svg, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);

    for d in (x0 as i32)..=(x1 as i32) {
        let x = sx(10f64.powi(d));
        let _ = writeln!(svg, r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{}" stroke="#dddddd"/>"##, TOP + ph);
        let _ = writeln!(svg, r#"<text x="{x:.2}" y="{}" text-anchor="middle">1e{d}</text>"#, TOP + ph + 18.0);
    }
    for d in (y0 as i32)..=(y1 as i32) {
        let y = sy(10f64.powi(d));
        let _ = writeln!(svg, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + pw);
        let _ = writeln!(svg, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{d}</text>"#, LEFT - 6.0, y + 4.0);
    }
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">h</text>"#, LEFT + pw / 2.0, HEIGHT - 16.0);
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">error</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );

    let mut legend_y = TOP + 10.0;
    let legend_x = LEFT + pw + 15.0;
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<(f64, f64)> = s.points.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).collect();
        let path: Vec<String> = pts.iter().map(|&(h, e)| format!("{:.2},{:.2}", sx(h), sy(e))).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#, path.join(" "));
        for &(h, e) in &pts {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(h), sy(e));
        }
        let _ = writeln!(
            svg,
            r#"<line x1="{legend_x}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="{color}" stroke-width="2"/>"#,
            legend_x + 20.0
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{}</text>"#, legend_x + 26.0, legend_y + 4.0, escape(&s.name));
        legend_y += 18.0;
    }

    let anchor = series.first().and_then(|s| {
        s.points.iter().copied().filter(|p| p.0 > 0.0 && p.1 > 0.0).min_by(|a, b| a.0.total_cmp(&b.0))
    });
    let h_max = all().map(|p| p.0).fold(0.0, f64::max);
    if let Some((h_min, e_min)) = anchor {
        for &slope in guide_slopes {
            let e0 = 0.5 * e_min;
            let e1 = e0 * (h_max / h_min).powf(slope);
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#555555" stroke-dasharray="5,4"/>"##,
                sx(h_min),
                sy(e0),
                sx(h_max),
                sy(e1)
            );
            let _ = writeln!(
                svg,
                r##"<line x1="{legend_x}" y1="{legend_y}" x2="{}" y2="{legend_y}" stroke="#555555" stroke-dasharray="5,4"/>"##,
                legend_x + 20.0
            );
            let _ = writeln!(svg, r#"<text x="{}" y="{}">slope {slope}</text>"#, legend_x + 26.0, legend_y + 4.0);
            legend_y += 18.0;
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
