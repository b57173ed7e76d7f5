//! Euclidean distance primitives between points, segments and planar convex
//! polygons in ambient dimension 2 or 3, plus 1D interval arithmetic. These
//! back the face-distance, clearance and screen-overlap computations.

use super::{Hyperplane, Point};

pub fn dist_point_segment(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 < 1e-24 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Closest distance between two segments (any ambient dimension).
pub fn dist_segment_segment(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> f64 {
    let d1 = a2 - a1;
    let d2 = b2 - b1;
    let r = a1 - b1;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (mut s, mut t);
    if a < 1e-24 && e < 1e-24 {
        return (a1 - b1).norm();
    }
    if a < 1e-24 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e < 1e-24 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            s = if denom.abs() > 1e-24 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
        }
    }
    ((a1 + d1 * s) - (b1 + d2 * t)).norm()
}

/// Crossing point of two 2D segments when they are not parallel and the
/// crossing lies on both (inclusive within `eps` of the endpoints in
/// parameter space). Parallel or disjoint pairs return `None`.
pub fn segments_intersect_2d(
    a1: &Point,
    a2: &Point,
    b1: &Point,
    b2: &Point,
    eps: f64,
) -> Option<Point> {
    let d1 = a2 - a1;
    let d2 = b2 - b1;
    let denom = d1[0] * d2[1] - d1[1] * d2[0];
    let scale = d1.norm() * d2.norm();
    if denom.abs() <= 1e-14 * scale.max(1e-14) {
        return None;
    }
    let r = b1 - a1;
    let t = (r[0] * d2[1] - r[1] * d2[0]) / denom;
    let u = (r[0] * d1[1] - r[1] * d1[0]) / denom;
    if (-eps..=1.0 + eps).contains(&t) && (-eps..=1.0 + eps).contains(&u) {
        Some(a1 + d1 * t)
    } else {
        None
    }
}

/// Distance from a point to a solid planar convex polygon in 3D, given its
/// boundary vertices in order and the carrier plane.
pub fn dist_point_polygon3(p: &Point, vertices: &[Point], plane: &Hyperplane) -> f64 {
    let h = plane.signed_distance(p);
    let proj = p - plane.normal() * h;
    if point_in_planar_polygon(&proj, vertices, plane) {
        return h.abs();
    }
    let n = vertices.len();
    (0..n)
        .map(|i| dist_point_segment(p, &vertices[i], &vertices[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min)
}

/// Membership of an on-plane point in the closed polygon.
pub fn point_in_planar_polygon(q: &Point, vertices: &[Point], plane: &Hyperplane) -> bool {
    let n = vertices.len();
    if n < 3 {
        return false;
    }
    let normal = plane.normal();
    let mut sign = 0.0f64;
    for i in 0..n {
        let a = &vertices[i];
        let b = &vertices[(i + 1) % n];
        let cross = super::cross3(&(b - a), &(q - a));
        let s = cross.dot(normal);
        if s.abs() < 1e-12 {
            continue;
        }
        if sign == 0.0 {
            sign = s.signum();
        } else if s.signum() != sign {
            return false;
        }
    }
    true
}

/// Distance between a segment and a solid planar convex polygon in 3D.
pub fn dist_segment_polygon3(a: &Point, b: &Point, vertices: &[Point], plane: &Hyperplane) -> f64 {
    let mut best = dist_point_polygon3(a, vertices, plane)
        .min(dist_point_polygon3(b, vertices, plane));
    let n = vertices.len();
    for i in 0..n {
        best = best.min(dist_segment_segment(
            a,
            b,
            &vertices[i],
            &vertices[(i + 1) % n],
        ));
    }
    // Portion of [a, b] whose projection falls inside the polygon: the height
    // is linear there, so the minimum sits at the ends of the clipped range
    // or at a sign change.
    let ha = plane.signed_distance(a);
    let hb = plane.signed_distance(b);
    let mut t_lo = 0.0f64;
    let mut t_hi = 1.0f64;
    let pa = a - plane.normal() * ha;
    let pb = b - plane.normal() * hb;
    let normal = plane.normal();
    for i in 0..n {
        let va = &vertices[i];
        let vb = &vertices[(i + 1) % n];
        let edge = vb - va;
        let inward = super::cross3(normal, &edge);
        // Constraint inward . (q(t) - va) >= 0 with q linear in t.
        let c0 = inward.dot(&(&pa - va));
        let c1 = inward.dot(&(&pb - va));
        let slope = c1 - c0;
        if slope.abs() < 1e-15 {
            if c0 < 0.0 {
                t_lo = 1.0;
                t_hi = 0.0;
                break;
            }
            continue;
        }
        let t_star = -c0 / slope;
        if slope > 0.0 {
            t_lo = t_lo.max(t_star);
        } else {
            t_hi = t_hi.min(t_star);
        }
    }
    if t_lo <= t_hi {
        let h_lo = ha + (hb - ha) * t_lo;
        let h_hi = ha + (hb - ha) * t_hi;
        if h_lo * h_hi <= 0.0 {
            return 0.0;
        }
        best = best.min(h_lo.abs().min(h_hi.abs()));
    }
    best
}

/// A convex piece of a point set, used for face-to-face distances.
#[derive(Clone, Debug)]
pub enum SetPiece {
    Point(Point),
    Segment(Point, Point),
    /// Ordered boundary vertices of a planar convex polygon plus its carrier.
    Polygon {
        vertices: Vec<Point>,
        plane: Hyperplane,
    },
}

impl SetPiece {
    pub fn dim(&self) -> usize {
        match self {
            SetPiece::Point(_) => 0,
            SetPiece::Segment(..) => 1,
            SetPiece::Polygon { .. } => 2,
        }
    }

    pub fn vertices(&self) -> Vec<Point> {
        match self {
            SetPiece::Point(p) => vec![p.clone()],
            SetPiece::Segment(a, b) => vec![a.clone(), b.clone()],
            SetPiece::Polygon { vertices, .. } => vertices.clone(),
        }
    }
}

pub fn piece_distance(a: &SetPiece, b: &SetPiece) -> f64 {
    use SetPiece::*;
    match (a, b) {
        (Point(p), Point(q)) => (p - q).norm(),
        (Point(p), Segment(x, y)) | (Segment(x, y), Point(p)) => dist_point_segment(p, x, y),
        (Point(p), Polygon { vertices, plane }) | (Polygon { vertices, plane }, Point(p)) => {
            dist_point_polygon3(p, vertices, plane)
        }
        (Segment(a1, a2), Segment(b1, b2)) => dist_segment_segment(a1, a2, b1, b2),
        (Segment(x, y), Polygon { vertices, plane })
        | (Polygon { vertices, plane }, Segment(x, y)) => {
            dist_segment_polygon3(x, y, vertices, plane)
        }
        (
            Polygon { vertices: va, plane: pa },
            Polygon { vertices: vb, plane: pb },
        ) => {
            let mut best = f64::INFINITY;
            let na = va.len();
            for i in 0..na {
                best = best.min(dist_segment_polygon3(&va[i], &va[(i + 1) % na], vb, pb));
            }
            let nb = vb.len();
            for i in 0..nb {
                best = best.min(dist_segment_polygon3(&vb[i], &vb[(i + 1) % nb], va, pa));
            }
            best
        }
    }
}

/// Union of closed 1D intervals with the usual normalize/subtract queries.
#[derive(Clone, Debug, Default)]
pub struct IntervalSet {
    items: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, lo: f64, hi: f64) {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        self.items.push((lo, hi));
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sorts and merges intervals whose gap is at most `merge_gap`.
    pub fn normalize(&mut self, merge_gap: f64) {
        self.items
            .sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(self.items.len());
        for &(lo, hi) in &self.items {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + merge_gap => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        self.items = merged;
    }

    pub fn items(&self) -> &[(f64, f64)] {
        &self.items
    }

    /// The open component of the complement containing `t`, with infinite
    /// endpoints when unbounded; `None` when `t` lies inside the set. Call
    /// after `normalize`.
    pub fn complement_component(&self, t: f64) -> Option<(f64, f64)> {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for &(a, b) in &self.items {
            if a <= t && t <= b {
                return None;
            }
            if b < t {
                lo = lo.max(b);
            }
            if a > t {
                hi = hi.min(a);
            }
        }
        Some((lo, hi))
    }

    /// `[lo, hi]` minus this set, keeping components longer than `min_len`.
    /// Call after `normalize`.
    pub fn subtract_from(&self, lo: f64, hi: f64, min_len: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cursor = lo;
        for &(a, b) in &self.items {
            if b < lo || a > hi {
                continue;
            }
            if a > cursor && a - cursor > min_len {
                out.push((cursor, a.min(hi)));
            }
            cursor = cursor.max(b);
            if cursor >= hi {
                break;
            }
        }
        if hi - cursor > min_len {
            out.push((cursor, hi));
        }
        out
    }
}
