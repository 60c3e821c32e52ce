//! Deterministic SVG drawings of instances and solutions.

use std::fmt::Write;

use crate::color::ColorSet;
use crate::instance::{edge_color, Instance, Solution};

/// Drawing parameters. Lengths are in SVG user units.
#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    /// Width of the drawing area; the height follows the instance's aspect ratio.
    pub width: f64,
    pub point_radius: f64,
    pub stroke_width: f64,
    pub margin: f64,
}

impl Default for RenderStyle {
    fn default() -> Self {
        RenderStyle {
            width: 800.0,
            point_radius: 4.0,
            stroke_width: 2.0,
            margin: 20.0,
        }
    }
}

/// Display color of a color set. Up to three colors the standard names are used
/// (red, blue, yellow, and green, orange, purple, black for the mixtures);
/// other sets get a hue derived from their bits. The empty set is gray.
pub fn display_color(cs: ColorSet) -> String {
    const R: u16 = 1;
    const B: u16 = 2;
    const Y: u16 = 4;
    let named = match cs.bits() {
        0 => Some("#9e9e9e"),
        R => Some("#d62728"),
        B => Some("#1f5fd6"),
        Y => Some("#e8c200"),
        x if x == B | Y => Some("#2ca02c"),
        x if x == R | Y => Some("#ff7f0e"),
        x if x == R | B => Some("#8e44ad"),
        x if x == R | B | Y => Some("#000000"),
        _ => None,
    };
    match named {
        Some(c) => c.to_string(),
        None => {
            let hue = (cs.bits() as f64 * 137.507_764).rem_euclid(360.0);
            format!("hsl({hue:.1},70%,45%)")
        }
    }
}

/// Renders the points of `inst` as disks and, if given, the edges of `sol` as
/// segments, each colored by its color set.
pub fn render_svg(inst: &Instance, sol: Option<&Solution>, style: &RenderStyle) -> String {
    let pts = inst.points();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let span_x = (x1 - x0).max(f64::MIN_POSITIVE);
    let span_y = y1 - y0;
    let inner = style.width - 2.0 * style.margin;
    let scale = if x1 > x0 {
        inner / span_x
    } else if span_y > 0.0 {
        inner / span_y
    } else {
        1.0
    };
    let height = span_y * scale + 2.0 * style.margin;
    let map = |x: f64, y: f64| (style.margin + (x - x0) * scale, style.margin + (y1 - y) * scale);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.3}" height="{:.3}" viewBox="0 0 {:.3} {:.3}">"#,
        style.width, height, style.width, height
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(sol) = sol {
        let _ = writeln!(
            s,
            r#"<g stroke-width="{:.3}" stroke-linecap="round">"#,
            style.stroke_width
        );
        for &e in &sol.edges {
            let (a, b) = (&pts[e.a], &pts[e.b]);
            let (p, q) = (map(a.x, a.y), map(b.x, b.y));
            let cs = edge_color(inst, e);
            let dash = if cs.is_empty() {
                r#" stroke-dasharray="4 3""#
            } else {
                ""
            };
            let _ = writeln!(
                s,
                r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="{}"{dash}/>"#,
                p.0,
                p.1,
                q.0,
                q.1,
                display_color(cs)
            );
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(s, "<g>");
    for p in pts {
        let (cx, cy) = map(p.x, p.y);
        let _ = writeln!(
            s,
            r#"<circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="{}"/>"#,
            style.point_radius,
            display_color(p.colors)
        );
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Edge, Point};

    fn pair() -> Instance {
        let rb = ColorSet::from_colors([1, 2]);
        Instance::new(3, vec![Point::new(0.0, 0.0, rb), Point::new(1.0, 1.0, rb)]).unwrap()
    }

    #[test]
    fn palette_covers_three_colors() {
        let mut seen = std::collections::HashSet::new();
        for bits in 1u16..8 {
            assert!(seen.insert(display_color(ColorSet::from_bits(bits))));
        }
        assert_eq!(display_color(ColorSet::from_colors([1, 2])), "#8e44ad");
        assert!(display_color(ColorSet::from_colors([4])).starts_with("hsl("));
    }

    #[test]
    fn purple_edge_and_points_only() {
        let inst = pair();
        let bare = render_svg(&inst, None, &RenderStyle::default());
        assert_eq!(bare.matches("<circle").count(), 2);
        assert!(!bare.contains("<line"));
        let sol = Solution::new(&inst, "x", vec![Edge::new(0, 1)], None);
        let svg = render_svg(&inst, Some(&sol), &RenderStyle::default());
        assert!(svg.contains(r##"<line"##) && svg.contains(r##"stroke="#8e44ad""##));
        assert_eq!(svg, render_svg(&inst, Some(&sol), &RenderStyle::default()));
    }

    #[test]
    fn single_point() {
        let inst = Instance::new(1, vec![Point::new(2.0, 3.0, ColorSet::single(1))]).unwrap();
        let svg = render_svg(&inst, None, &RenderStyle::default());
        assert!(svg.contains(r#"cx="20.000" cy="20.000""#));
    }
}
