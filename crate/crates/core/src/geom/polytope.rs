//! Convex polytopes as half-space intersections with lazily enumerated
//! vertices. Instance sizes are tiny, so vertex enumeration is the exhaustive
//! intersection of every subset of `dim` boundary hyperplanes; no incremental
//! hull is needed.

use super::{GeomError, Hyperplane, Isometry, Point};
use crate::tol;
use itertools::Itertools;
use nalgebra::DMatrix;

/// Which side of the (canonical) hyperplane is feasible.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `normal . x <= offset`
    NonPositive,
    /// `normal . x >= offset`
    NonNegative,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::NonPositive => Side::NonNegative,
            Side::NonNegative => Side::NonPositive,
        }
    }
}

/// One feasible half-space of a polytope.
#[derive(Clone, Debug)]
pub struct HalfSpace {
    pub plane: Hyperplane,
    pub side: Side,
}

impl HalfSpace {
    pub fn new(plane: Hyperplane, side: Side) -> Self {
        Self { plane, side }
    }

    /// Builds from a raw `normal . x (<=|>=) rhs` constraint; the stored
    /// plane is canonical and the side is adjusted if the sign flipped.
    pub fn from_constraint(normal: Point, rhs: f64, side: Side) -> Result<Self, GeomError> {
        let (plane, flipped) = Hyperplane::new_tracked(normal, rhs)?;
        Ok(Self {
            plane,
            side: if flipped { side.flip() } else { side },
        })
    }

    /// Slack of `x`: nonnegative iff feasible, and equal to the Euclidean
    /// distance from the boundary plane.
    pub fn slack(&self, x: &Point) -> f64 {
        let s = self.plane.signed_distance(x);
        match self.side {
            Side::NonPositive => -s,
            Side::NonNegative => s,
        }
    }

    /// Outward normal (pointing away from the feasible side).
    pub fn outward_normal(&self) -> Point {
        match self.side {
            Side::NonPositive => self.plane.normal().clone(),
            Side::NonNegative => -self.plane.normal().clone(),
        }
    }

    /// The complementary (closed) half-space.
    pub fn complement(&self) -> HalfSpace {
        HalfSpace {
            plane: self.plane.clone(),
            side: self.side.flip(),
        }
    }

    /// A copy whose feasible region is shrunk by `margin`.
    pub fn shrunk(&self, margin: f64) -> HalfSpace {
        let offset = match self.side {
            Side::NonPositive => self.plane.offset() - margin,
            Side::NonNegative => self.plane.offset() + margin,
        };
        HalfSpace {
            plane: Hyperplane::new(self.plane.normal().clone(), offset)
                .expect("shrinking keeps the normal"),
            side: self.side,
        }
    }

    pub fn transform(&self, iso: &Isometry) -> HalfSpace {
        let n = iso.apply_linear(self.plane.normal());
        let c = self.plane.offset() + n.dot(&iso.translation);
        HalfSpace::from_constraint(n, c, self.side).expect("isometry keeps the normal unit")
    }
}

/// A bounded convex polytope with nonempty interior, stored as the
/// intersection of half-spaces together with the enumerated vertex set.
#[derive(Clone, Debug)]
pub struct ConvexPolytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<Point>,
}

impl ConvexPolytope {
    /// Intersection of the given half-spaces. Errors when the result is
    /// unbounded, empty, or has empty interior.
    pub fn from_halfspaces(dim: usize, halfspaces: Vec<HalfSpace>) -> Result<Self, GeomError> {
        for hs in &halfspaces {
            if hs.plane.dim() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    got: hs.plane.dim(),
                });
            }
        }
        if recession_cone_nontrivial(dim, &halfspaces) {
            return Err(GeomError::Unbounded);
        }
        let vertices = enumerate_vertices(dim, &halfspaces);
        if vertices.is_empty() {
            return Err(GeomError::EmptyInterior);
        }
        let centroid = centroid(&vertices);
        let min_slack = halfspaces
            .iter()
            .map(|h| h.slack(&centroid))
            .fold(f64::INFINITY, f64::min);
        if min_slack <= tol::FEAS_TOL {
            return Err(GeomError::EmptyInterior);
        }
        Ok(Self {
            dim,
            halfspaces,
            vertices,
        })
    }

    /// Convex hull of a point set, via supporting hyperplanes found by
    /// exhaustive `dim`-subset enumeration.
    pub fn from_vertices(dim: usize, points: &[Point]) -> Result<Self, GeomError> {
        if points.iter().any(|p| p.len() != dim) {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                got: points.iter().map(|p| p.len()).find(|&l| l != dim).unwrap_or(dim),
            });
        }
        if points.len() < dim + 1 {
            return Err(GeomError::EmptyInterior);
        }
        let mut halfspaces: Vec<HalfSpace> = Vec::new();
        for subset in (0..points.len()).combinations(dim) {
            let Some(plane) = affine_span_hyperplane(dim, &subset, points) else {
                continue;
            };
            let mut pos = false;
            let mut neg = false;
            for p in points {
                let s = plane.signed_distance(p);
                if s > tol::FEAS_TOL {
                    pos = true;
                }
                if s < -tol::FEAS_TOL {
                    neg = true;
                }
            }
            let side = match (pos, neg) {
                (true, false) => Side::NonNegative,
                (false, true) | (false, false) => Side::NonPositive,
                (true, true) => continue,
            };
            let hs = HalfSpace::new(plane, side);
            if !halfspaces.iter().any(|h| same_halfspace(h, &hs)) {
                halfspaces.push(hs);
            }
        }
        Self::from_halfspaces(dim, halfspaces)
    }

    /// Axis-aligned box `[lo, hi]` in each coordinate.
    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self, GeomError> {
        let dim = lo.len();
        let mut hs = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut n = Point::zeros(dim);
            n[i] = 1.0;
            hs.push(HalfSpace::from_constraint(n.clone(), hi[i], Side::NonPositive)?);
            hs.push(HalfSpace::from_constraint(n, lo[i], Side::NonNegative)?);
        }
        Self::from_halfspaces(dim, hs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn centroid(&self) -> Point {
        centroid(&self.vertices)
    }

    /// All constraints satisfied within `tolerance`.
    pub fn contains(&self, x: &Point, tolerance: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) >= -tolerance)
    }

    /// Strict interior with the given margin.
    pub fn interior_contains(&self, x: &Point, margin: f64) -> bool {
        self.halfspaces.iter().all(|h| h.slack(x) > margin)
    }

    /// Intersection with additional half-spaces; `None` when empty or
    /// degenerate (measure below the degeneracy threshold).
    pub fn clip(&self, extra: &[HalfSpace]) -> Option<ConvexPolytope> {
        let mut hs = self.halfspaces.clone();
        hs.extend(extra.iter().cloned());
        ConvexPolytope::from_halfspaces(self.dim, hs).ok()
    }

    /// `dim`-volume of the polytope: interval length in 1D, polygon area in
    /// 2D (the only cases the artifact needs measures for).
    pub fn measure(&self) -> f64 {
        measure_of_vertices(self.dim, &self.vertices)
    }

    /// Vertices of the boundary ordered along the boundary (2D only).
    pub fn ordered_vertices_2d(&self) -> Vec<Point> {
        assert_eq!(self.dim, 2);
        order_by_angle(&self.vertices)
    }

    /// Boundary edges as vertex pairs (2D only).
    pub fn edges_2d(&self) -> Vec<(Point, Point)> {
        let ordered = self.ordered_vertices_2d();
        let n = ordered.len();
        (0..n)
            .map(|i| (ordered[i].clone(), ordered[(i + 1) % n].clone()))
            .collect()
    }

    /// Image under a rigid motion.
    pub fn transform(&self, iso: &Isometry) -> ConvexPolytope {
        ConvexPolytope {
            dim: self.dim,
            halfspaces: self.halfspaces.iter().map(|h| h.transform(iso)).collect(),
            vertices: self.vertices.iter().map(|v| iso.apply(v)).collect(),
        }
    }

    pub fn max_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Measure of the convex hull of `points` (1D length or 2D area); zero for
/// degenerate sets.
pub(crate) fn measure_of_vertices(dim: usize, points: &[Point]) -> f64 {
    match dim {
        1 => {
            let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            (hi - lo).max(0.0)
        }
        2 => {
            if points.len() < 3 {
                return 0.0;
            }
            let ordered = order_by_angle(points);
            let n = ordered.len();
            let mut twice_area = 0.0;
            for i in 0..n {
                let a = &ordered[i];
                let b = &ordered[(i + 1) % n];
                twice_area += a[0] * b[1] - b[0] * a[1];
            }
            twice_area.abs() / 2.0
        }
        _ => panic!("measure is only defined for dimensions 1 and 2"),
    }
}

/// Measure of the intersection of two convex polytopes of equal dimension.
/// Degenerate intersections report (near) zero.
pub fn intersection_measure(a: &ConvexPolytope, b: &ConvexPolytope) -> f64 {
    assert_eq!(a.dim(), b.dim());
    let mut hs = a.halfspaces.to_vec();
    hs.extend(b.halfspaces.iter().cloned());
    let vertices = enumerate_vertices(a.dim(), &hs);
    if vertices.is_empty() {
        0.0
    } else {
        measure_of_vertices(a.dim(), &vertices)
    }
}

/// Vertex candidates of the feasible set of `halfspaces` (no boundedness or
/// interior requirements); used for measure queries on raw intersections.
pub(crate) fn enumerate_vertices(dim: usize, halfspaces: &[HalfSpace]) -> Vec<Point> {
    let m = halfspaces.len();
    if m < dim {
        return Vec::new();
    }
    let mut vertices: Vec<Point> = Vec::new();
    for subset in (0..m).combinations(dim) {
        let mut a = DMatrix::zeros(dim, dim);
        let mut b = Point::zeros(dim);
        for (row, &i) in subset.iter().enumerate() {
            let plane = &halfspaces[i].plane;
            for col in 0..dim {
                a[(row, col)] = plane.normal()[col];
            }
            b[row] = plane.offset();
        }
        let lu = a.clone().full_piv_lu();
        let Some(x) = lu.solve(&b) else { continue };
        // Guard against near-singular systems that LU still "solves".
        if (&a * &x - &b).norm() > 1e-7 * (1.0 + x.norm()) {
            continue;
        }
        if !x.iter().all(|v| v.is_finite()) {
            continue;
        }
        if halfspaces.iter().all(|h| h.slack(&x) >= -tol::FEAS_TOL)
            && !vertices.iter().any(|v| (v - &x).norm() < tol::FEAS_TOL)
        {
            vertices.push(x);
        }
    }
    sort_points(&mut vertices);
    vertices
}

/// The recession cone `{ d : a_i . d <= 0 }` (outward normals `a_i`) is
/// nontrivial iff the feasible set is unbounded. A pointed cone is spanned by
/// extreme rays lying on `dim - 1` independent active constraints, so those
/// are enumerated; a rank-deficient normal matrix means a full lineality
/// direction exists.
fn recession_cone_nontrivial(dim: usize, halfspaces: &[HalfSpace]) -> bool {
    let outward: Vec<Point> = halfspaces.iter().map(|h| h.outward_normal()).collect();
    if outward.is_empty() {
        return true;
    }
    let mut mat = DMatrix::zeros(outward.len(), dim);
    for (i, n) in outward.iter().enumerate() {
        for j in 0..dim {
            mat[(i, j)] = n[j];
        }
    }
    if mat.svd(false, false).rank(tol::RANK_SV_TOL) < dim {
        return true;
    }
    let feasible_dir = |d: &Point| outward.iter().all(|a| a.dot(d) <= 1e-12);
    for subset in (0..outward.len()).combinations(dim - 1) {
        let dir = match dim {
            1 => {
                let mut e = Point::zeros(1);
                e[0] = 1.0;
                e
            }
            2 => {
                let a = &outward[subset[0]];
                Point::from_vec(vec![-a[1], a[0]])
            }
            3 => super::cross3(&outward[subset[0]], &outward[subset[1]]),
            _ => unreachable!("dimensions are restricted to 1..=3"),
        };
        let norm = dir.norm();
        if norm < 1e-9 {
            continue;
        }
        let dir = dir / norm;
        if feasible_dir(&dir) || feasible_dir(&(-dir.clone())) {
            return true;
        }
    }
    false
}

fn affine_span_hyperplane(dim: usize, subset: &[usize], points: &[Point]) -> Option<Hyperplane> {
    let base = &points[subset[0]];
    match dim {
        1 => Hyperplane::new(Point::from_vec(vec![1.0]), base[0]).ok(),
        2 => {
            let d = &points[subset[1]] - base;
            if d.norm() < 1e-12 {
                return None;
            }
            let n = Point::from_vec(vec![-d[1], d[0]]);
            Hyperplane::through_point(n, base).ok()
        }
        3 => {
            let u = &points[subset[1]] - base;
            let v = &points[subset[2]] - base;
            let n = super::cross3(&u, &v);
            if n.norm() < 1e-10 {
                return None;
            }
            Hyperplane::through_point(n, base).ok()
        }
        _ => None,
    }
}

fn same_halfspace(a: &HalfSpace, b: &HalfSpace) -> bool {
    a.side == b.side && a.plane.approx_eq(&b.plane)
}

pub(crate) fn centroid(points: &[Point]) -> Point {
    let dim = points[0].len();
    let mut c = Point::zeros(dim);
    for p in points {
        c += p;
    }
    c / points.len() as f64
}

/// Deterministic lexicographic ordering used everywhere a point set needs a
/// canonical order.
pub fn sort_points(points: &mut [Point]) {
    points.sort_by(|a, b| {
        for i in 0..a.len() {
            match a[i].partial_cmp(&b[i]) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        std::cmp::Ordering::Equal
    });
}

fn order_by_angle(points: &[Point]) -> Vec<Point> {
    let c = centroid(points);
    let mut with_angle: Vec<(f64, Point)> = points
        .iter()
        .map(|p| ((p[1] - c[1]).atan2(p[0] - c[0]), p.clone()))
        .collect();
    with_angle.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    with_angle.into_iter().map(|(_, p)| p).collect()
}
