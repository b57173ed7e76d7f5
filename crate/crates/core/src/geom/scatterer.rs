//! Polyhedral scatterers: a union of convex polytope obstacles and screen
//! cells, bounded, with pairwise internally disjoint cells.

use super::polytope::intersection_measure;
use super::{Cell, ConvexPolytope, GeomError, Hyperplane, Isometry, Point};
use crate::tol;

#[derive(Clone, Debug)]
pub struct PolyhedralScatterer {
    dim: usize,
    obstacles: Vec<ConvexPolytope>,
    screens: Vec<Cell>,
    bounding_radius: f64,
}

impl PolyhedralScatterer {
    /// Validates dimensions and internal disjointness of the screen cells;
    /// the bounding radius is the maximum vertex norm. Complement
    /// connectivity is a separate check (`complement_connected_2d`), run at
    /// scene load in 2D and declared in 3D.
    pub fn new(
        dim: usize,
        obstacles: Vec<ConvexPolytope>,
        screens: Vec<Cell>,
    ) -> Result<Self, GeomError> {
        if dim != 2 && dim != 3 {
            return Err(GeomError::UnsupportedDimension(dim));
        }
        for o in &obstacles {
            if o.dim() != dim {
                return Err(GeomError::DimensionMismatch { expected: dim, got: o.dim() });
            }
        }
        for s in &screens {
            if s.dim() != dim {
                return Err(GeomError::DimensionMismatch { expected: dim, got: s.dim() });
            }
        }
        for i in 0..screens.len() {
            for j in i + 1..screens.len() {
                if let Some(reason) = cells_internally_overlap(&screens[i], &screens[j]) {
                    return Err(GeomError::CellsOverlap(format!(
                        "screens {i} and {j}: {reason}"
                    )));
                }
            }
        }
        let mut r = 0.0f64;
        for o in &obstacles {
            r = r.max(o.max_vertex_norm());
        }
        for s in &screens {
            r = r.max(s.max_vertex_norm());
        }
        Ok(Self {
            dim,
            obstacles,
            screens,
            bounding_radius: r,
        })
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            obstacles: Vec::new(),
            screens: Vec::new(),
            bounding_radius: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn obstacles(&self) -> &[ConvexPolytope] {
        &self.obstacles
    }

    pub fn screens(&self) -> &[Cell] {
        &self.screens
    }

    pub fn is_empty_set(&self) -> bool {
        self.obstacles.is_empty() && self.screens.is_empty()
    }

    /// Maximum vertex norm: the radius of the smallest origin-centred ball
    /// containing every vertex.
    pub fn bounding_radius(&self) -> f64 {
        self.bounding_radius
    }

    /// Euclidean distance from `x` to the scatterer (zero inside).
    pub fn distance(&self, x: &Point) -> f64 {
        let mut best = f64::INFINITY;
        for o in &self.obstacles {
            best = best.min(distance_to_polytope(o, x));
            if best == 0.0 {
                return 0.0;
            }
        }
        for s in &self.screens {
            best = best.min(s.distance(x));
        }
        best
    }

    pub fn contains(&self, x: &Point, tolerance: f64) -> bool {
        self.distance(x) <= tolerance
    }

    pub fn transform(&self, iso: &Isometry) -> PolyhedralScatterer {
        PolyhedralScatterer {
            dim: self.dim,
            obstacles: self.obstacles.iter().map(|o| o.transform(iso)).collect(),
            screens: self.screens.iter().map(|s| s.transform(iso)).collect(),
            bounding_radius: self
                .obstacles
                .iter()
                .map(|o| o.transform(iso).max_vertex_norm())
                .chain(self.screens.iter().map(|s| s.transform(iso).max_vertex_norm()))
                .fold(0.0, f64::max),
        }
    }

    /// Union of this scatterer with another (parts are concatenated; no
    /// disjointness re-check between obstacle interiors, which may overlap).
    pub fn union(&self, other: &PolyhedralScatterer) -> PolyhedralScatterer {
        PolyhedralScatterer {
            dim: self.dim,
            obstacles: self
                .obstacles
                .iter()
                .chain(other.obstacles.iter())
                .cloned()
                .collect(),
            screens: self
                .screens
                .iter()
                .chain(other.screens.iter())
                .cloned()
                .collect(),
            bounding_radius: self.bounding_radius.max(other.bounding_radius),
        }
    }

    /// All vertices of all parts, sorted lexicographically. Two scatterers
    /// built from the same parts compare equal through this.
    pub fn vertex_set(&self) -> Vec<Point> {
        let mut vs: Vec<Point> = Vec::new();
        for o in &self.obstacles {
            vs.extend(o.vertices().iter().cloned());
        }
        for s in &self.screens {
            vs.extend(s.world_vertices());
        }
        let mut dedup: Vec<Point> = Vec::new();
        for v in vs {
            if !dedup.iter().any(|u| (u - &v).norm() < tol::DEDUP_TOL) {
                dedup.push(v);
            }
        }
        super::polytope::sort_points(&mut dedup);
        dedup
    }

    /// Set distance between the vertex sets of two scatterers (Hausdorff).
    pub fn vertex_set_distance(&self, other: &PolyhedralScatterer) -> f64 {
        let a = self.vertex_set();
        let b = other.vertex_set();
        let one_way = |xs: &[Point], ys: &[Point]| {
            xs.iter()
                .map(|x| {
                    ys.iter()
                        .map(|y| (x - y).norm())
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0f64, f64::max)
        };
        if a.is_empty() && b.is_empty() {
            return 0.0;
        }
        if a.is_empty() || b.is_empty() {
            return f64::INFINITY;
        }
        one_way(&a, &b).max(one_way(&b, &a))
    }
}

pub(crate) fn distance_to_polytope(poly: &ConvexPolytope, x: &Point) -> f64 {
    if poly.contains(x, 0.0) {
        return 0.0;
    }
    match poly.dim() {
        2 => poly
            .edges_2d()
            .iter()
            .map(|(a, b)| super::dist::dist_point_segment(x, a, b))
            .fold(f64::INFINITY, f64::min),
        3 => facet_polygons(poly)
            .iter()
            .map(|(plane, vs)| super::dist::dist_point_polygon3(x, vs, plane))
            .fold(f64::INFINITY, f64::min),
        1 => {
            let lo = poly.vertices().iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
            let hi = poly
                .vertices()
                .iter()
                .map(|v| v[0])
                .fold(f64::NEG_INFINITY, f64::max);
            (lo - x[0]).max(x[0] - hi).max(0.0)
        }
        d => panic!("unsupported polytope dimension {d}"),
    }
}

/// Facets of a 3D polytope as (carrier plane, ordered boundary vertices).
pub(crate) fn facet_polygons(poly: &ConvexPolytope) -> Vec<(Hyperplane, Vec<Point>)> {
    assert_eq!(poly.dim(), 3);
    let mut out = Vec::new();
    for hs in poly.halfspaces() {
        let on_plane: Vec<Point> = poly
            .vertices()
            .iter()
            .filter(|v| hs.plane.contains(v, tol::FEAS_TOL * 10.0))
            .cloned()
            .collect();
        if on_plane.len() < 3 {
            continue;
        }
        let frame = super::cell::Frame::canonical(&hs.plane);
        let coords: Vec<Point> = on_plane.iter().map(|v| frame.project(v)).collect();
        let Ok(poly2) = ConvexPolytope::from_vertices(2, &coords) else {
            continue;
        };
        let ordered: Vec<Point> = poly2
            .ordered_vertices_2d()
            .iter()
            .map(|u| frame.embed(u))
            .collect();
        if !out
            .iter()
            .any(|(p, _): &(Hyperplane, Vec<Point>)| p.approx_eq(&hs.plane))
        {
            out.push((hs.plane.clone(), ordered));
        }
    }
    out
}

/// `Some(reason)` when the relative interiors of two cells intersect with
/// positive measure (same carrier) or at a transversal crossing.
fn cells_internally_overlap(a: &Cell, b: &Cell) -> Option<String> {
    let dim = a.dim();
    if a.carrier().approx_eq(b.carrier()) {
        // Shared carrier: compare the (N-1)-polytopes in a's frame.
        let coords_b: Vec<Point> = b
            .world_vertices()
            .iter()
            .map(|v| a.frame().project(v))
            .collect();
        let overlap = match dim {
            2 => {
                let lo_a = a.polygon().vertices().iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                let hi_a = a
                    .polygon()
                    .vertices()
                    .iter()
                    .map(|v| v[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                let lo_b = coords_b.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                let hi_b = coords_b.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
                (hi_a.min(hi_b) - lo_a.max(lo_b)).max(0.0)
            }
            3 => match ConvexPolytope::from_vertices(2, &coords_b) {
                Ok(poly_b) => intersection_measure(a.polygon(), &poly_b),
                Err(_) => 0.0,
            },
            _ => 0.0,
        };
        if overlap > tol::MEASURE_TOL {
            return Some(format!("coplanar overlap of measure {overlap:.3e}"));
        }
        return None;
    }
    match dim {
        2 => {
            let va = a.world_vertices();
            let vb = b.world_vertices();
            if let Some(x) =
                super::dist::segments_intersect_2d(&va[0], &va[1], &vb[0], &vb[1], 0.0)
            {
                // Strictly interior to both segments.
                let interior = |vs: &[Point], x: &Point| {
                    let d0 = (x - &vs[0]).norm();
                    let d1 = (x - &vs[1]).norm();
                    d0 > tol::DISJOINT_TOL && d1 > tol::DISJOINT_TOL
                };
                if interior(&va, &x) && interior(&vb, &x) {
                    return Some(format!(
                        "transversal crossing at ({:.6}, {:.6})",
                        x[0], x[1]
                    ));
                }
            }
            None
        }
        3 => {
            // Chords of both polygons along the carrier intersection line.
            let n1 = a.carrier().normal();
            let n2 = b.carrier().normal();
            let dir = super::cross3(n1, n2);
            if dir.norm() < 1e-9 {
                return None; // parallel distinct carriers cannot meet
            }
            let dir = dir.normalize();
            // Point on both planes: x = alpha n1 + beta n2.
            let g11 = 1.0;
            let g12 = n1.dot(n2);
            let g22 = 1.0;
            let det = g11 * g22 - g12 * g12;
            let c1 = a.carrier().offset();
            let c2 = b.carrier().offset();
            let alpha = (c1 * g22 - c2 * g12) / det;
            let beta = (c2 * g11 - c1 * g12) / det;
            let origin = n1 * alpha + n2 * beta;
            let chord = |cell: &Cell| -> Option<(f64, f64)> {
                let o = cell.frame().project(&origin);
                let d = {
                    let rel = cell.frame().project(&(&origin + &dir));
                    rel - &o
                };
                let mut t_lo = f64::NEG_INFINITY;
                let mut t_hi = f64::INFINITY;
                for hs in cell.polygon().halfspaces() {
                    let num = hs.slack(&o);
                    let den = hs.slack(&(&o + &d)) - num;
                    if den.abs() < 1e-14 {
                        if num < 0.0 {
                            return None;
                        }
                        continue;
                    }
                    let t_star = -num / den;
                    if den > 0.0 {
                        t_lo = t_lo.max(t_star);
                    } else {
                        t_hi = t_hi.min(t_star);
                    }
                }
                (t_lo < t_hi).then_some((t_lo, t_hi))
            };
            let (a_lo, a_hi) = chord(a)?;
            let (b_lo, b_hi) = chord(b)?;
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if hi - lo > tol::MEASURE_TOL {
                let mid = &origin + &dir * ((lo + hi) / 2.0);
                let strict = |cell: &Cell, x: &Point| {
                    cell.polygon()
                        .interior_contains(&cell.frame().project(x), tol::MEASURE_TOL)
                };
                if strict(a, &mid) && strict(b, &mid) {
                    return Some(format!("transversal crossing chord of length {:.3e}", hi - lo));
                }
            }
            None
        }
        _ => None,
    }
}
