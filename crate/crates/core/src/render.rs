//! Deterministic SVG rendering of 2D scenes and trace overlays. The canvas
//! maps world coordinates directly: the viewBox covers the square enclosing
//! `B_{R0+2}` and the y axis is flipped once at the outermost group.

use crate::geom::{Hyperplane, Point, PolyhedralScatterer};
use crate::scene::Scene;
use crate::trace::TraceStep;

/// Extra elements drawn on top of the scatterers.
#[derive(Default)]
pub struct Overlay<'a> {
    /// Dashed reflection lines.
    pub lines: Vec<Hyperplane>,
    /// Trace log: regions hatched, flat points marked.
    pub steps: &'a [TraceStep],
}

fn fmt(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v }; // normalise -0
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

/// Renders a 2D scene (and optional overlay) as SVG 1.1 text. 3D scenes are
/// rejected.
pub fn render_svg(scene: &Scene, overlay: &Overlay) -> Result<String, String> {
    if scene.dimension != 2 {
        return Err(format!(
            "render supports 2D scenes only, got dimension {}",
            scene.dimension
        ));
    }
    let radius = (scene.bounding_radius() + 2.0).max(3.0);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" height=\"640\" viewBox=\"{} {} {} {}\">\n",
        fmt(-radius), fmt(-radius), fmt(2.0 * radius), fmt(2.0 * radius)
    ));
    out.push_str("  <defs>\n");
    out.push_str(&format!(
        "    <pattern id=\"hatch\" width=\"{w}\" height=\"{w}\" patternTransform=\"rotate(45)\" patternUnits=\"userSpaceOnUse\">\n      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"{w}\" stroke=\"#7a9e7e\" stroke-width=\"{sw}\"/>\n    </pattern>\n",
        w = fmt(radius / 40.0),
        sw = fmt(radius / 200.0)
    ));
    out.push_str("  </defs>\n");
    out.push_str("  <g transform=\"scale(1,-1)\">\n");
    // Frame and escape ball.
    out.push_str(&format!(
        "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\" stroke=\"#444444\" stroke-width=\"{}\"/>\n",
        fmt(-radius), fmt(-radius), fmt(2.0 * radius), fmt(2.0 * radius), fmt(radius / 300.0)
    ));
    out.push_str(&format!(
        "    <circle cx=\"0\" cy=\"0\" r=\"{}\" fill=\"none\" stroke=\"#bbbbbb\" stroke-width=\"{}\"/>\n",
        fmt(scene.bounding_radius() + 2.0),
        fmt(radius / 300.0)
    ));
    // Region cells first, under everything else.
    for step in overlay.steps {
        let half = step.region.resolution / 2.0;
        for c in &step.region.cells_plus {
            rect_cell(&mut out, c, half);
        }
        let mirror = crate::geom::Isometry::reflection(&step.region.plane);
        for c in &step.region.cells_plus {
            rect_cell(&mut out, &mirror.apply(c), half);
        }
    }
    // Scatterers, in name order.
    for scatterer in scene.scatterers.values() {
        draw_scatterer(&mut out, scatterer, radius);
    }
    // Reflection lines, dashed, clipped to the canvas box.
    for line in &overlay.lines {
        if let Some((a, b)) = clip_line_to_box(line, radius) {
            out.push_str(&format!(
                "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#b03030\" stroke-width=\"{}\" stroke-dasharray=\"{} {}\"/>\n",
                fmt(a[0]), fmt(a[1]), fmt(b[0]), fmt(b[1]),
                fmt(radius / 200.0), fmt(radius / 40.0), fmt(radius / 80.0)
            ));
        }
    }
    // Flat points and the S intervals on top.
    for step in overlay.steps {
        let lc = &step.region.line_component;
        let lo = lc.t_lo.max(-2.0 * radius);
        let hi = lc.t_hi.min(2.0 * radius);
        let a = lc.point_at(lo);
        let b = lc.point_at(hi);
        out.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#3050b0\" stroke-width=\"{}\"/>\n",
            fmt(a[0]), fmt(a[1]), fmt(b[0]), fmt(b[1]), fmt(radius / 250.0)
        ));
        let p = &step.flat_point.point;
        out.push_str(&format!(
            "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"#3050b0\" stroke=\"none\"/>\n",
            fmt(p[0]), fmt(p[1]), fmt(radius / 100.0)
        ));
    }
    out.push_str("  </g>\n</svg>\n");
    Ok(out)
}

fn rect_cell(out: &mut String, center: &Point, half: f64) {
    out.push_str(&format!(
        "    <rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"url(#hatch)\" stroke=\"none\"/>\n",
        fmt(center[0] - half),
        fmt(center[1] - half),
        fmt(2.0 * half),
        fmt(2.0 * half)
    ));
}

fn draw_scatterer(out: &mut String, scatterer: &PolyhedralScatterer, radius: f64) {
    for poly in scatterer.obstacles() {
        let pts: Vec<String> = poly
            .ordered_vertices_2d()
            .iter()
            .map(|v| format!("{},{}", fmt(v[0]), fmt(v[1])))
            .collect();
        out.push_str(&format!(
            "    <polygon points=\"{}\" fill=\"#8899aa\" stroke=\"#223344\" stroke-width=\"{}\"/>\n",
            pts.join(" "),
            fmt(radius / 300.0)
        ));
    }
    for cell in scatterer.screens() {
        let vs = cell.world_vertices();
        out.push_str(&format!(
            "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#223344\" stroke-width=\"{}\"/>\n",
            fmt(vs[0][0]),
            fmt(vs[0][1]),
            fmt(vs[1][0]),
            fmt(vs[1][1]),
            fmt(radius / 120.0)
        ));
    }
}

/// Intersection of a line with the canvas box, as two endpoints.
fn clip_line_to_box(line: &Hyperplane, radius: f64) -> Option<(Point, Point)> {
    let origin = line.foot();
    let tangent = line.tangent_basis()[0].clone();
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for axis in 0..2 {
        let o = origin[axis];
        let d = tangent[axis];
        if d.abs() < 1e-14 {
            if o.abs() > radius {
                return None;
            }
            continue;
        }
        let t1 = (-radius - o) / d;
        let t2 = (radius - o) / d;
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        t_lo = t_lo.max(lo);
        t_hi = t_hi.min(hi);
    }
    (t_lo < t_hi).then(|| {
        (
            &origin + &tangent * t_lo,
            &origin + &tangent * t_hi,
        )
    })
}
