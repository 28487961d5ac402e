use pnav_core::{CostReport, Point2, WorkspaceMap};
use std::fmt::Write;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];
const LEGEND_ROW: f64 = 18.0;
const MARGIN: f64 = 10.0;

/// One trajectory drawn on the map.
pub struct Layer {
    pub label: String,
    pub points: Vec<Point2>,
    pub rotations: Vec<Point2>,
    pub report: CostReport,
}

/// Renders the map with obstacles as filled cells, each layer as a
/// polyline with circles at its rotations, and a legend row per layer.
pub fn render(map: &WorkspaceMap, layers: &[Layer]) -> String {
    let (origin, extent) = (map.origin(), map.extent());
    let (w_m, h_m) = (extent.x - origin.x, extent.y - origin.y);
    let scale = (800.0 / w_m.max(h_m)).min(100.0);
    let (w, h) = (w_m * scale, h_m * scale);
    let px = |p: Point2| {
        (
            MARGIN + (p.x - origin.x) * scale,
            MARGIN + (extent.y - p.y) * scale,
        )
    };
    let total_w = w + 2.0 * MARGIN;
    let total_h = h + 2.0 * MARGIN + LEGEND_ROW * layers.len() as f64;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_w:.0}" height="{total_h:.0}" viewBox="0 0 {total_w:.2} {total_h:.2}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{total_w:.2}" height="{total_h:.2}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r##"<rect x="{MARGIN:.2}" y="{MARGIN:.2}" width="{w:.2}" height="{h:.2}" fill="none" stroke="#444" stroke-width="1"/>"##
    );

    // horizontal runs of obstacle cells, one rect each
    let res = map.resolution() * scale;
    s.push_str("<g fill=\"#555\">\n");
    for iy in (0..map.height()).rev() {
        let mut ix = 0;
        while ix < map.width() {
            if !map.is_obstacle(ix, iy) {
                ix += 1;
                continue;
            }
            let first = ix;
            while ix < map.width() && map.is_obstacle(ix, iy) {
                ix += 1;
            }
            let x = MARGIN + first as f64 * res;
            let y = MARGIN + (map.height() - 1 - iy) as f64 * res;
            let _ = writeln!(
                s,
                r#"<rect x="{x:.2}" y="{y:.2}" width="{:.2}" height="{res:.2}"/>"#,
                (ix - first) as f64 * res
            );
        }
    }
    s.push_str("</g>\n");

    for (i, layer) in layers.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points: Vec<(f64, f64)> = Vec::with_capacity(layer.points.len());
        for &p in &layer.points {
            let q = px(p);
            if points.last() != Some(&q) {
                points.push(q);
            }
        }
        let coords: Vec<String> = points
            .iter()
            .map(|(x, y)| format!("{x:.2},{y:.2}"))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
        for &p in &layer.rotations {
            let (x, y) = px(p);
            let _ = writeln!(
                s,
                r#"<circle cx="{x:.2}" cy="{y:.2}" r="4" fill="none" stroke="{color}" stroke-width="1.5"/>"#
            );
        }
    }

    for (i, layer) in layers.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let y = h + 2.0 * MARGIN + LEGEND_ROW * i as f64;
        let r = &layer.report;
        let _ = writeln!(
            s,
            r#"<g class="legend"><rect x="{MARGIN:.2}" y="{:.2}" width="12" height="12" fill="{color}"/><text x="{:.2}" y="{:.2}" font-family="monospace" font-size="12">{}: V={:.4} N={} D={:.3}</text></g>"#,
            y + 2.0,
            MARGIN + 18.0,
            y + 12.0,
            escape(&layer.label),
            r.obstruction,
            r.turns,
            r.distance
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
