//! SVG drawings of rod configurations.

use std::fmt::Write as _;

use num_rational::BigRational;

use crate::geometry::IncidenceGeometry;
use crate::oracle::field::rational_to_f64;
use crate::oracle::LinearRealization;

pub const VIEWPORT: f64 = 1000.0;
const MARGIN: f64 = 60.0;

/// Draws each rod as one segment spanning its points, the points as filled
/// dots and, when `cone_points` is given, one hollow dot per line joined to
/// that line's points by thin spokes.
pub fn rod_configuration_svg(
    s: &IncidenceGeometry,
    rho: &LinearRealization<BigRational>,
    cone_points: Option<&[(BigRational, BigRational)]>,
) -> String {
    let pts: Vec<(f64, f64)> = rho
        .coords
        .iter()
        .map(|(x, y)| (rational_to_f64(x), rational_to_f64(y)))
        .collect();
    let cones: Vec<(f64, f64)> = cone_points
        .unwrap_or(&[])
        .iter()
        .map(|(x, y)| (rational_to_f64(x), rational_to_f64(y)))
        .collect();
    let (min_x, max_x, min_y, max_y) = pts.iter().chain(&cones).fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    let span = (max_x - min_x).max(max_y - min_y).max(f64::EPSILON);
    let scale = (VIEWPORT - 2.0 * MARGIN) / span;
    // y grows downwards in SVG
    let map = |(x, y): (f64, f64)| (MARGIN + (x - min_x) * scale, VIEWPORT - MARGIN - (y - min_y) * scale);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {v} {v}" width="{v}" height="{v}">"#,
        v = VIEWPORT
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (l, (cx, cy)) in cones.iter().enumerate() {
        for &p in s.line(l) {
            let (x1, y1) = map((*cx, *cy));
            let (x2, y2) = map(pts[p]);
            let _ = writeln!(
                out,
                r##"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#888" stroke-width="1" stroke-dasharray="4 3"/>"##
            );
        }
    }
    for l in 0..s.num_lines() {
        let ends = s.line(l).iter().map(|&p| pts[p]);
        let lo = ends.clone().min_by(|a, b| a.0.total_cmp(&b.0)).expect("line has points");
        let hi = ends.max_by(|a, b| a.0.total_cmp(&b.0)).expect("line has points");
        let (x1, y1) = map(lo);
        let (x2, y2) = map(hi);
        let _ = writeln!(
            out,
            r##"<line class="rod" data-line="{l}" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#1f4e79" stroke-width="6" stroke-linecap="round"/>"##
        );
    }
    for (p, &q) in pts.iter().enumerate() {
        let (x, y) = map(q);
        let _ = writeln!(
            out,
            r##"<circle class="point" cx="{x:.2}" cy="{y:.2}" r="8" fill="#c0392b"/>"##
        );
        let label = s.name(p).map_or_else(|| p.to_string(), str::to_string);
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-size="22" font-family="sans-serif">{}</text>"#,
            x + 10.0,
            y - 10.0,
            escape(&label)
        );
    }
    for (l, &c) in cones.iter().enumerate() {
        let (x, y) = map(c);
        let _ = writeln!(
            out,
            r##"<circle class="cone" cx="{x:.2}" cy="{y:.2}" r="8" fill="none" stroke="#2c3e50" stroke-width="2"/>"##
        );
        let _ = writeln!(
            out,
            r##"<text x="{:.2}" y="{:.2}" font-size="18" font-family="sans-serif" fill="#555">c{l}</text>"##,
            x + 10.0,
            y + 20.0
        );
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rods_span_their_points() {
        let s = IncidenceGeometry::new(3, vec![vec![0, 1, 2]]).unwrap();
        let coords = vec![(q(0, 1), q(0, 1)), (q(2, 1), q(1, 1)), (q(1, 1), q(1, 2))];
        let rho = LinearRealization::from_coords(&s, coords, None).unwrap();
        let svg = rod_configuration_svg(&s, &rho, Some(&[(q(0, 1), q(2, 1))]));
        assert_eq!(svg.matches("class=\"rod\"").count(), 1);
        assert_eq!(svg.matches("class=\"point\"").count(), 3);
        assert_eq!(svg.matches("class=\"cone\"").count(), 1);
        assert!(svg.contains("fill=\"none\""));
        // the rod runs from (0,0) to (2,1), mapped into the viewport
        assert!(svg.contains(r#"x1="60.00" y1="940.00" x2="940.00" y2="500.00""#), "{svg}");
    }
}
