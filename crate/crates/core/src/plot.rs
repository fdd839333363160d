//! Static SVG rendering of grid maps and trajectory series.
//!
//! Output depends only on the input values, so repeated renders are
//! byte-identical.

use std::fmt::Write as _;

use crate::analysis::{GridMap, TrajectorySeries};
use crate::ingest::format_sig9;
use crate::model::Channel;

const LIGHT: [f64; 3] = [247.0, 251.0, 255.0];
const DARK: [f64; 3] = [8.0, 48.0, 107.0];
const MARGIN: f64 = 40.0;
const LEGEND_W: f64 = 110.0;

fn unit_label(c: Channel) -> &'static str {
    match c {
        Channel::HrtDdodDeg | Channel::HrtDdoaDeg | Channel::CrtDdodDeg | Channel::CrtDdoaDeg => " [deg]",
        _ => "",
    }
}

/// Linear ramp from light to dark; `t` is clamped to [0, 1].
fn ramp(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let c: Vec<u8> = (0..3)
        .map(|k| (LIGHT[k] + (DARK[k] - LIGHT[k]) * t).round() as u8)
        .collect();
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn value_range(values: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    values.fold(None, |acc, v| match acc {
        None => Some((v, v)),
        Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
    })
}

fn legend(svg: &mut String, x: f64, y: f64, h: f64, range: Option<(f64, f64)>) {
    let _ = writeln!(
        svg,
        r#"<defs><linearGradient id="ramp" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        ramp(0.0),
        ramp(1.0)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{x:.2}" y="{y:.2}" width="16" height="{h:.2}" fill="url(#ramp)" stroke="#444444" stroke-width="0.5"/>"##
    );
    let (lo, hi) = match range {
        Some((lo, hi)) => (format_sig9(lo), format_sig9(hi)),
        None => ("n/a".to_string(), "n/a".to_string()),
    };
    let tx = x + 22.0;
    let _ = writeln!(svg, r#"<text x="{tx:.2}" y="{:.2}" class="legend">max {hi}</text>"#, y + 10.0);
    let _ = writeln!(svg, r#"<text x="{tx:.2}" y="{:.2}" class="legend">min {lo}</text>"#, y + h);
}

fn header(svg: &mut String, width: f64, height: f64, title: &str) {
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    svg.push_str("<style>text{font-family:sans-serif;font-size:11px;fill:#222222}.title{font-size:13px}</style>\n");
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let _ = writeln!(svg, r#"<text x="{MARGIN:.2}" y="24" class="title">{}</text>"#, escape(title));
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heatmap of one channel over the grid. Cells without a value (missing
/// receiver or non-ok status) are drawn as outlines only.
pub fn render_heatmap(map: &GridMap, channel: Channel, title: &str) -> String {
    let g = &map.grid;
    let cell = (600.0 / g.nx.max(g.ny) as f64).floor().clamp(2.0, 24.0);
    let plot_w = cell * g.nx as f64;
    let plot_h = cell * g.ny as f64;
    let width = MARGIN * 2.0 + plot_w + LEGEND_W;
    let height = MARGIN * 2.0 + plot_h;
    let range = value_range(map.iter().filter_map(|(ix, iy, _)| map.value(ix, iy, channel)));

    let mut svg = String::new();
    header(&mut svg, width, height, &format!("{title} {}{}", channel.name(), unit_label(channel)));
    svg.push_str("<g shape-rendering=\"crispEdges\">\n");
    for (ix, iy, _) in map.iter() {
        let x = MARGIN + cell * ix as f64;
        // iy = 0 at the bottom
        let y = MARGIN + cell * (g.ny - 1 - iy) as f64;
        match map.value(ix, iy, channel) {
            Some(v) => {
                let t = match range {
                    Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
                    _ => 0.0,
                };
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}"/>"#,
                    ramp(t)
                );
            }
            None => {
                let _ = writeln!(
                    svg,
                    r##"<rect x="{x:.2}" y="{y:.2}" width="{cell:.2}" height="{cell:.2}" fill="none" stroke="#cccccc" stroke-width="0.5"/>"##
                );
            }
        }
    }
    svg.push_str("</g>\n");
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444444" stroke-width="1"/>"##
    );
    let x_hi = g.origin_x + g.dx * (g.nx - 1) as f64;
    let y_hi = g.origin_y + g.dy * (g.ny - 1) as f64;
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN:.2}" y="{:.2}">x {} .. {} m, y {} .. {} m</text>"#,
        MARGIN + plot_h + 16.0,
        format_sig9(g.origin_x),
        format_sig9(x_hi),
        format_sig9(g.origin_y),
        format_sig9(y_hi)
    );
    legend(&mut svg, MARGIN * 1.5 + plot_w, MARGIN, plot_h.max(60.0), range);
    svg.push_str("</svg>\n");
    svg
}

/// Line chart of one channel against time. Non-ok steps break the line.
pub fn render_series(series: &TrajectorySeries, channel: Channel, title: &str) -> String {
    let (plot_w, plot_h) = (640.0, 280.0);
    let width = MARGIN * 2.0 + plot_w + 20.0;
    let height = MARGIN * 2.0 + plot_h;
    let t_range = value_range(series.steps.iter().map(|s| s.t));
    let v_range = value_range(series.series(channel).into_iter().map(|(_, v)| v));

    let mut svg = String::new();
    header(&mut svg, width, height, &format!("{title} {}{}", channel.name(), unit_label(channel)));
    let _ = writeln!(
        svg,
        r##"<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="#444444" stroke-width="1"/>"##
    );
    let scale = |v: f64, r: Option<(f64, f64)>| match r {
        Some((lo, hi)) if hi > lo => (v - lo) / (hi - lo),
        _ => 0.0,
    };
    let mut segments: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for s in &series.steps {
        match channel.value(&s.result) {
            Some(v) => {
                let x = MARGIN + plot_w * scale(s.t, t_range);
                let y = MARGIN + plot_h * (1.0 - scale(v, v_range));
                segments.last_mut().expect("non-empty").push((x, y));
            }
            None => segments.push(Vec::new()),
        }
    }
    for seg in segments.iter().filter(|s| !s.is_empty()) {
        let pts: Vec<String> = seg.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        if seg.len() == 1 {
            let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#, seg[0].0, seg[0].1, ramp(1.0));
        } else {
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="1.5"/>"#,
                pts.join(" "),
                ramp(1.0)
            );
        }
    }
    let fmt_range = |r: Option<(f64, f64)>| match r {
        Some((lo, hi)) => (format_sig9(lo), format_sig9(hi)),
        None => ("n/a".to_string(), "n/a".to_string()),
    };
    let (t_lo, t_hi) = fmt_range(t_range);
    let (v_lo, v_hi) = fmt_range(v_range);
    let base = MARGIN + plot_h + 16.0;
    let _ = writeln!(svg, r#"<text x="{MARGIN:.2}" y="{base:.2}">t {t_lo} s</text>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{base:.2}" text-anchor="end">t {t_hi} s</text>"#,
        MARGIN + plot_w
    );
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">max {v_hi}</text>"#, MARGIN + 4.0, MARGIN + 12.0);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}">min {v_lo}</text>"#, MARGIN + 4.0, MARGIN + plot_h - 4.0);
    svg.push_str("</svg>\n");
    svg
}
