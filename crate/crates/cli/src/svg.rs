//! Static SVG rendering of a Shatz polygon.

use std::fmt::Write;

use vbstab::filtration::ShatzPolygon;

const WIDTH: f64 = 480.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;

pub fn render(p: &ShatzPolygon) -> String {
    let xs = p.vertices.iter().map(|v| v.0);
    let ys = p.vertices.iter().map(|v| v.1);
    let (x0, x1) = (
        xs.clone().min().unwrap_or(0).min(0),
        xs.max().unwrap_or(0).max(1),
    );
    let (y0, y1) = (
        ys.clone().min().unwrap_or(0).min(0),
        ys.max().unwrap_or(0).max(0),
    );
    let span_x = (x1 - x0).max(1) as f64;
    let span_y = (y1 - y0).max(1) as f64;
    let sx = (WIDTH - 2.0 * MARGIN) / span_x;
    let sy = (HEIGHT - 2.0 * MARGIN) / span_y;
    let px = |x: i64| MARGIN + (x - x0) as f64 * sx;
    let py = |y: i64| HEIGHT - MARGIN - (y - y0) as f64 * sy;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    // Axes through the origin.
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
        px(x0),
        py(0),
        px(x1),
        py(0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray"/>"#,
        px(0),
        py(y0),
        px(0),
        py(y1)
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">r</text>"#,
        WIDTH - MARGIN + 8.0,
        py(0) + 4.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="14">d</text>"#,
        px(0) - 4.0,
        MARGIN - 12.0
    );
    let points: Vec<String> = p
        .vertices
        .iter()
        .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
        points.join(" ")
    );
    for &(x, y) in &p.vertices {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="black"/>"#,
            px(x),
            py(y)
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">({x}, {y})</text>"#,
            px(x) + 6.0,
            py(y) - 6.0
        );
    }
    s.push_str("</svg>\n");
    s
}
