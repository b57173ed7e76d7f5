//! Face complexes of polyhedral obstacles: the (N-1)-faces are the maximal
//! flat pieces of the boundary of the union of the obstacle polytopes
//! (coplanar overlapping facets merged, interior contacts removed), lower
//! faces are the boundary decompositions of higher ones, down to vertices.

use super::cell::Frame;
use super::dist::{piece_distance, IntervalSet, SetPiece};
use super::polytope::{HalfSpace, Side};
use super::{ConvexPolytope, GeomError, Hyperplane, Point, PolyhedralScatterer};
use crate::tol;

/// One face of the complex: a connected union of convex pieces with a common
/// affine span.
#[derive(Clone, Debug)]
pub struct Face {
    pub dim: usize,
    /// A point of the affine span.
    pub span_point: Point,
    /// Orthonormal basis of the span's direction space (`dim` vectors).
    pub span_basis: Vec<Point>,
    /// Canonical carrier normal, for (N-1)-faces.
    pub normal: Option<Point>,
    pub pieces: Vec<SetPiece>,
    /// Normals of the (N-1)-faces whose closure contains this face.
    pub incident_facet_normals: Vec<Point>,
}

impl Face {
    pub fn distance_to(&self, other: &Face) -> f64 {
        let mut best = f64::INFINITY;
        for a in &self.pieces {
            for b in &other.pieces {
                best = best.min(piece_distance(a, b));
            }
        }
        best
    }

    pub fn distance_to_point(&self, x: &Point) -> f64 {
        self.pieces
            .iter()
            .map(|p| piece_distance(p, &SetPiece::Point(x.clone())))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Debug)]
pub struct FaceComplex {
    dim: usize,
    faces_by_dim: Vec<Vec<Face>>,
}

impl FaceComplex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Faces of dimension `k` (0 <= k <= N-1).
    pub fn faces(&self, k: usize) -> &[Face] {
        &self.faces_by_dim[k]
    }

    pub fn counts(&self) -> Vec<usize> {
        self.faces_by_dim.iter().map(|f| f.len()).collect()
    }

    pub fn all_faces(&self) -> impl Iterator<Item = &Face> {
        self.faces_by_dim.iter().flatten()
    }

    /// Smallest singular value of the stacked incident-normal matrix of each
    /// vertex; the vertex normal-span property requires all of them to exceed
    /// the rank threshold.
    pub fn vertex_normal_span_min_svs(&self) -> Vec<f64> {
        self.faces(0)
            .iter()
            .map(|v| {
                let normals = &v.incident_facet_normals;
                if normals.len() < self.dim {
                    return 0.0;
                }
                let mut m = nalgebra::DMatrix::zeros(normals.len(), self.dim);
                for (i, n) in normals.iter().enumerate() {
                    for j in 0..self.dim {
                        m[(i, j)] = n[j];
                    }
                }
                let svd = m.svd(false, false);
                svd.singular_values
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Minimum set distance over pairs of disjoint faces; infinite when no
    /// disjoint pair exists.
    pub fn min_face_distance(&self) -> f64 {
        let all: Vec<&Face> = self.all_faces().collect();
        let mut delta = f64::INFINITY;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let d = all[i].distance_to(all[j]);
                if d > tol::DISJOINT_TOL {
                    delta = delta.min(d);
                }
            }
        }
        delta
    }
}

/// Complete face complex of an obstacle scatterer.
pub fn faces(scatterer: &PolyhedralScatterer) -> Result<FaceComplex, GeomError> {
    if !scatterer.screens().is_empty() {
        return Err(GeomError::NotAnObstacle);
    }
    let dim = scatterer.dim();
    let polys = scatterer.obstacles();

    let groups = carrier_groups(dim, polys);
    let mut facet_faces: Vec<Face> = Vec::new();
    // Per-face piece data kept in frame coordinates for the boundary step.
    let mut component_data: Vec<(Frame, Vec<ConvexPolytope>)> = Vec::new();

    for group in &groups {
        let pieces = boundary_pieces(group, polys);
        if pieces.is_empty() {
            continue;
        }
        for component in connected_components(dim - 1, &pieces) {
            let member_polys: Vec<ConvexPolytope> =
                component.iter().map(|&i| pieces[i].clone()).collect();
            facet_faces.push(facet_face(dim, group, &member_polys));
            component_data.push((group.frame.clone(), member_polys));
        }
    }

    let mut faces_by_dim: Vec<Vec<Face>> = vec![Vec::new(); dim];
    match dim {
        2 => {
            // 0-faces are the endpoints of each merged 1-face.
            let mut points: Vec<Point> = Vec::new();
            for face in &facet_faces {
                for piece in &face.pieces {
                    if let SetPiece::Segment(a, b) = piece {
                        points.push(a.clone());
                        points.push(b.clone());
                    }
                }
            }
            faces_by_dim[0] = dedup_points(points)
                .into_iter()
                .map(|p| Face {
                    dim: 0,
                    span_point: p.clone(),
                    span_basis: Vec::new(),
                    normal: None,
                    pieces: vec![SetPiece::Point(p)],
                    incident_facet_normals: Vec::new(),
                })
                .collect();
            faces_by_dim[1] = facet_faces;
        }
        3 => {
            let mut segments: Vec<(Point, Point)> = Vec::new();
            for (frame, members) in &component_data {
                segments.extend(boundary_segments_3d(frame, members));
            }
            let segments = dedup_segments(segments);
            let mut points: Vec<Point> = Vec::new();
            for (a, b) in &segments {
                points.push(a.clone());
                points.push(b.clone());
            }
            faces_by_dim[0] = dedup_points(points)
                .into_iter()
                .map(|p| Face {
                    dim: 0,
                    span_point: p.clone(),
                    span_basis: Vec::new(),
                    normal: None,
                    pieces: vec![SetPiece::Point(p)],
                    incident_facet_normals: Vec::new(),
                })
                .collect();
            faces_by_dim[1] = segments
                .into_iter()
                .map(|(a, b)| {
                    let dir = (&b - &a).normalize();
                    Face {
                        dim: 1,
                        span_point: a.clone(),
                        span_basis: vec![dir],
                        normal: None,
                        pieces: vec![SetPiece::Segment(a, b)],
                        incident_facet_normals: Vec::new(),
                    }
                })
                .collect();
            faces_by_dim[2] = facet_faces;
        }
        d => return Err(GeomError::UnsupportedDimension(d)),
    }

    // Incident facet normals: facets whose closure contains the face.
    let facet_list = faces_by_dim[dim - 1].clone();
    for k in 0..dim {
        for face in &mut faces_by_dim[k] {
            let mut incident: Vec<Point> = Vec::new();
            for facet in &facet_list {
                let contained = face.pieces.iter().all(|piece| {
                    piece
                        .vertices()
                        .iter()
                        .all(|v| facet.distance_to_point(v) <= 1e-7)
                });
                if contained {
                    if let Some(n) = &facet.normal {
                        if !incident.iter().any(|m| (m - n).norm() < tol::DEDUP_TOL) {
                            incident.push(n.clone());
                        }
                    }
                }
            }
            face.incident_facet_normals = incident;
        }
    }

    Ok(FaceComplex { dim, faces_by_dim })
}

/// Minimum distance between any two disjoint faces of the obstacle.
pub fn min_face_distance(scatterer: &PolyhedralScatterer) -> Result<f64, GeomError> {
    Ok(faces(scatterer)?.min_face_distance())
}

struct CarrierGroup {
    carrier: Hyperplane,
    frame: Frame,
    /// (owner polytope index, facet polygon in the group frame, interior side
    /// sign of the owner relative to the canonical carrier).
    facets: Vec<(usize, ConvexPolytope, f64)>,
}

fn carrier_groups(dim: usize, polys: &[ConvexPolytope]) -> Vec<CarrierGroup> {
    let mut groups: Vec<CarrierGroup> = Vec::new();
    for (pi, poly) in polys.iter().enumerate() {
        for hs in poly.halfspaces() {
            let on_plane: Vec<&Point> = poly
                .vertices()
                .iter()
                .filter(|v| hs.plane.contains(v, tol::FEAS_TOL * 10.0))
                .collect();
            if on_plane.len() < dim {
                continue; // redundant constraint, no facet
            }
            let group_idx = match groups.iter().position(|g| g.carrier.approx_eq(&hs.plane)) {
                Some(i) => i,
                None => {
                    groups.push(CarrierGroup {
                        carrier: hs.plane.clone(),
                        frame: Frame::canonical(&hs.plane),
                        facets: Vec::new(),
                    });
                    groups.len() - 1
                }
            };
            if groups[group_idx].facets.iter().any(|(owner, _, _)| *owner == pi) {
                continue; // convexity allows one facet per polytope and carrier
            }
            let frame = &groups[group_idx].frame;
            let coords: Vec<Point> = on_plane.iter().map(|v| frame.project(v)).collect();
            let facet_poly = match dim {
                2 => interval_polytope(&coords),
                3 => ConvexPolytope::from_vertices(2, &coords).ok(),
                _ => None,
            };
            let Some(facet_poly) = facet_poly else { continue };
            let side = groups[group_idx]
                .carrier
                .signed_distance(&poly.centroid())
                .signum();
            groups[group_idx].facets.push((pi, facet_poly, side));
        }
    }
    groups
}

fn interval_polytope(coords: &[Point]) -> Option<ConvexPolytope> {
    let lo = coords.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
    let hi = coords.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= tol::MEASURE_TOL {
        return None;
    }
    ConvexPolytope::axis_box(&[lo], &[hi]).ok()
}

/// The boundary region of the union on one carrier, as pairwise internally
/// disjoint convex pieces in the group frame: facets minus strict interiors
/// of the other polytopes, minus opposite-side facet contact, de-overlapped
/// against each other.
fn boundary_pieces(group: &CarrierGroup, polys: &[ConvexPolytope]) -> Vec<ConvexPolytope> {
    let mut pieces: Vec<ConvexPolytope> = Vec::new();
    for (owner, facet_poly, side) in &group.facets {
        let mut parts = vec![facet_poly.clone()];
        // Strict interiors of the other polytopes crossing this carrier.
        for (pj, poly) in polys.iter().enumerate() {
            if pj == *owner {
                continue;
            }
            if let Some(constraints) =
                embedded_constraints(poly, &group.frame, tol::FEAS_TOL)
            {
                parts = subtract_constraints(&parts, &constraints);
            }
        }
        // Interior contact: overlap with an opposite-side facet is matter on
        // both sides of the carrier.
        for (other_owner, other_poly, other_side) in &group.facets {
            if other_owner == owner || other_side == side {
                continue;
            }
            parts = subtract_constraints(&parts, other_poly.halfspaces());
        }
        // De-overlap against pieces already collected (same-side coplanar
        // facets of overlapping polytopes).
        for existing in &pieces {
            parts = subtract_constraints(&parts, existing.halfspaces());
        }
        pieces.extend(
            parts
                .into_iter()
                .filter(|p| p.measure() > tol::MEASURE_TOL),
        );
    }
    pieces
}

/// Constraints of an N-polytope restricted to the carrier frame, shrunk by
/// `shrink` (so the restriction is the strict interior cross-section);
/// `None` when the cross-section is empty.
fn embedded_constraints(
    poly: &ConvexPolytope,
    frame: &Frame,
    shrink: f64,
) -> Option<Vec<HalfSpace>> {
    let mut out = Vec::new();
    for hs in poly.halfspaces() {
        let nu = hs.plane.normal();
        let in_frame =
            Point::from_vec(frame.basis.iter().map(|b| b.dot(nu)).collect::<Vec<f64>>());
        let rhs = hs.plane.offset() - nu.dot(&frame.origin);
        if in_frame.norm() < 1e-10 {
            // Constraint does not involve the in-plane coordinates.
            let ok = match hs.side {
                Side::NonPositive => 0.0 <= rhs - shrink,
                Side::NonNegative => 0.0 >= rhs + shrink,
            };
            if !ok {
                return None;
            }
            continue;
        }
        let constraint = HalfSpace::from_constraint(in_frame, rhs, hs.side)
            .expect("nonzero in-frame normal")
            .shrunk(shrink);
        out.push(constraint);
    }
    Some(out)
}

/// `parts` minus the convex region cut out by `constraints`, as convex pieces.
fn subtract_constraints(
    parts: &[ConvexPolytope],
    constraints: &[HalfSpace],
) -> Vec<ConvexPolytope> {
    let mut out = Vec::new();
    for part in parts {
        let mut remaining = Some(part.clone());
        for h in constraints {
            let Some(cur) = remaining else { break };
            if let Some(outside) = cur.clip(&[h.complement()]) {
                if outside.measure() > tol::MEASURE_TOL {
                    out.push(outside);
                }
            }
            remaining = cur.clip(std::slice::from_ref(h));
        }
        // Anything still inside every constraint is covered and dropped.
    }
    out
}

/// Connected components of the piece adjacency graph. Pieces of dimension 1
/// touch when their intervals abut; 2D pieces touch when they share a
/// boundary segment of positive length.
fn connected_components(piece_dim: usize, pieces: &[ConvexPolytope]) -> Vec<Vec<usize>> {
    let n = pieces.len();
    let adjacent = |a: &ConvexPolytope, b: &ConvexPolytope| -> bool {
        match piece_dim {
            1 => {
                let (alo, ahi) = interval_of(a);
                let (blo, bhi) = interval_of(b);
                blo <= ahi + 10.0 * tol::MEASURE_TOL && alo <= bhi + 10.0 * tol::MEASURE_TOL
            }
            2 => {
                for (a1, a2) in a.edges_2d() {
                    for (b1, b2) in b.edges_2d() {
                        if let Some(len) = collinear_overlap_2d(&a1, &a2, &b1, &b2) {
                            if len > tol::MEASURE_TOL * 10.0 {
                                return true;
                            }
                        }
                    }
                }
                false
            }
            _ => false,
        }
    };
    let mut visited = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        visited[start] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !visited[j] && adjacent(&pieces[i], &pieces[j]) {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort_unstable();
        components.push(comp);
    }
    components
}

fn interval_of(p: &ConvexPolytope) -> (f64, f64) {
    let lo = p.vertices().iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
    let hi = p.vertices().iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Overlap length of two collinear 2D segments; `None` when not collinear.
fn collinear_overlap_2d(a1: &Point, a2: &Point, b1: &Point, b2: &Point) -> Option<f64> {
    let d = a2 - a1;
    let len = d.norm();
    if len < 1e-12 {
        return None;
    }
    let dir = d / len;
    let off = |p: &Point| {
        let rel = p - a1;
        (rel.clone() - &dir * dir.dot(&rel)).norm()
    };
    if off(b1) > 1e-7 || off(b2) > 1e-7 {
        return None;
    }
    let t = |p: &Point| dir.dot(&(p - a1));
    let (alo, ahi) = (0.0f64, len);
    let (mut blo, mut bhi) = (t(b1), t(b2));
    if blo > bhi {
        std::mem::swap(&mut blo, &mut bhi);
    }
    Some((ahi.min(bhi) - alo.max(blo)).max(0.0))
}

fn facet_face(dim: usize, group: &CarrierGroup, members: &[ConvexPolytope]) -> Face {
    let pieces: Vec<SetPiece> = match dim {
        2 => {
            // Contiguous touching intervals merge into one segment.
            let lo = members
                .iter()
                .map(|m| interval_of(m).0)
                .fold(f64::INFINITY, f64::min);
            let hi = members
                .iter()
                .map(|m| interval_of(m).1)
                .fold(f64::NEG_INFINITY, f64::max);
            vec![SetPiece::Segment(
                group.frame.embed(&Point::from_vec(vec![lo])),
                group.frame.embed(&Point::from_vec(vec![hi])),
            )]
        }
        3 => members
            .iter()
            .map(|m| SetPiece::Polygon {
                vertices: m
                    .ordered_vertices_2d()
                    .iter()
                    .map(|u| group.frame.embed(u))
                    .collect(),
                plane: group.carrier.clone(),
            })
            .collect(),
        _ => unreachable!(),
    };
    Face {
        dim: dim - 1,
        span_point: group.frame.origin.clone(),
        span_basis: group.frame.basis.clone(),
        normal: Some(group.carrier.normal().clone()),
        pieces,
        incident_facet_normals: Vec::new(),
    }
}

/// Boundary segments (world space) of one 2-face component given its disjoint
/// convex pieces in the carrier frame: piece edges minus the parts shared
/// with other pieces, merged per line.
fn boundary_segments_3d(frame: &Frame, members: &[ConvexPolytope]) -> Vec<(Point, Point)> {
    struct LineGroup {
        line: Hyperplane,     // in frame coordinates (2D)
        origin: Point,        // foot, frame coords
        tangent: Point,       // unit, frame coords
        edges: Vec<(usize, f64, f64)>,
    }
    let mut lines: Vec<LineGroup> = Vec::new();
    for (pi, piece) in members.iter().enumerate() {
        for (a, b) in piece.edges_2d() {
            let d = &b - &a;
            if d.norm() < tol::MEASURE_TOL {
                continue;
            }
            let normal = Point::from_vec(vec![-d[1], d[0]]);
            let Ok(line) = Hyperplane::through_point(normal, &a) else {
                continue;
            };
            let idx = match lines.iter().position(|g| g.line.approx_eq(&line)) {
                Some(i) => i,
                None => {
                    let origin = line.foot();
                    let tangent = line.tangent_basis()[0].clone();
                    lines.push(LineGroup {
                        line,
                        origin,
                        tangent,
                        edges: Vec::new(),
                    });
                    lines.len() - 1
                }
            };
            let g = &lines[idx];
            let mut t1 = g.tangent.dot(&(&a - &g.origin));
            let mut t2 = g.tangent.dot(&(&b - &g.origin));
            if t1 > t2 {
                std::mem::swap(&mut t1, &mut t2);
            }
            lines[idx].edges.push((pi, t1, t2));
        }
    }
    let mut out = Vec::new();
    for g in &lines {
        let mut exposed = IntervalSet::new();
        for &(pi, lo, hi) in &g.edges {
            let mut others = IntervalSet::new();
            for &(pj, olo, ohi) in &g.edges {
                if pj != pi {
                    others.add(olo, ohi);
                }
            }
            others.normalize(tol::MEASURE_TOL);
            for (elo, ehi) in others.subtract_from(lo, hi, tol::MEASURE_TOL) {
                exposed.add(elo, ehi);
            }
        }
        exposed.normalize(10.0 * tol::MEASURE_TOL);
        for &(lo, hi) in exposed.items() {
            let a = frame.embed(&(&g.origin + &g.tangent * lo));
            let b = frame.embed(&(&g.origin + &g.tangent * hi));
            out.push((a, b));
        }
    }
    out
}

fn dedup_points(points: Vec<Point>) -> Vec<Point> {
    let mut out: Vec<Point> = Vec::new();
    for p in points {
        if !out.iter().any(|q| (q - &p).norm() < 1e-7) {
            out.push(p);
        }
    }
    super::polytope::sort_points(&mut out);
    out
}

fn dedup_segments(segments: Vec<(Point, Point)>) -> Vec<(Point, Point)> {
    let mut out: Vec<(Point, Point)> = Vec::new();
    for (a, b) in segments {
        let dup = out.iter().any(|(c, d)| {
            ((c - &a).norm() < 1e-7 && (d - &b).norm() < 1e-7)
                || ((c - &b).norm() < 1e-7 && (d - &a).norm() < 1e-7)
        });
        if !dup {
            out.push((a, b));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PolyhedralScatterer;

    fn square(x0: f64, y0: f64, x1: f64, y1: f64) -> ConvexPolytope {
        ConvexPolytope::axis_box(&[x0, y0], &[x1, y1]).unwrap()
    }

    #[test]
    fn unit_square_faces() {
        let s = PolyhedralScatterer::new(2, vec![square(0.0, 0.0, 1.0, 1.0)], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        assert_eq!(complex.counts(), vec![4, 4]);
        for v in complex.faces(0) {
            assert_eq!(v.incident_facet_normals.len(), 2);
        }
    }

    #[test]
    fn unit_cube_faces() {
        let cube = ConvexPolytope::axis_box(&[0.0; 3], &[1.0; 3]).unwrap();
        let s = PolyhedralScatterer::new(3, vec![cube], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        assert_eq!(complex.counts(), vec![8, 12, 6]);
        for sv in complex.vertex_normal_span_min_svs() {
            assert!(sv > tol::RANK_SV_TOL, "vertex normals must span R^3, got sv {sv}");
        }
    }

    #[test]
    fn rejects_screens() {
        use crate::waves::BoundaryConditionTag as Bc;
        let screen = super::super::Cell::segment_2d(
            &Point::from_vec(vec![0.0, 0.0]),
            &Point::from_vec(vec![1.0, 0.0]),
            Bc::Dirichlet,
        )
        .unwrap();
        let s = PolyhedralScatterer::new(2, vec![], vec![screen]).unwrap();
        assert!(matches!(faces(&s), Err(GeomError::NotAnObstacle)));
    }

    #[test]
    fn l_shape_union_faces() {
        // Two overlapping rectangles forming an L. Expected counts frozen
        // from the brute-force boundary arrangement oracle below: the union
        // outline is a hexagon.
        let a = square(0.0, 0.0, 2.0, 1.0);
        let b = square(0.0, 0.0, 1.0, 2.0);
        let s = PolyhedralScatterer::new(2, vec![a.clone(), b.clone()], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        let oracle = boundary_arrangement_counts_2d(&[a, b]);
        assert_eq!(complex.counts(), oracle);
        assert_eq!(complex.counts(), vec![6, 6]);
    }

    #[test]
    fn overlapping_squares_cross_faces() {
        // A plus-shaped union: every rectangle end sticks out.
        let a = square(-2.0, -0.5, 2.0, 0.5);
        let b = square(-0.5, -2.0, 0.5, 2.0);
        let s = PolyhedralScatterer::new(2, vec![a.clone(), b.clone()], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        let oracle = boundary_arrangement_counts_2d(&[a, b]);
        assert_eq!(complex.counts(), oracle);
        assert_eq!(complex.counts(), vec![12, 12]);
    }

    #[test]
    fn random_rectangle_unions_match_the_arrangement_oracle() {
        // Seeded random rectangle pairs on a quarter-unit lattice: plenty of
        // overlaps, flush contacts and corner touches. Face counts must
        // match the independent boundary-arrangement oracle.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut lattice = |lo: f64, hi: f64| -> f64 {
            let steps = ((hi - lo) / 0.25) as i64;
            lo + 0.25 * rng.gen_range(0..=steps) as f64
        };
        for case in 0..25 {
            let rect = |rng_self: &mut dyn FnMut(f64, f64) -> f64| {
                let x0 = rng_self(-1.5, 1.0);
                let y0 = rng_self(-1.5, 1.0);
                let w = rng_self(0.5, 1.5);
                let h = rng_self(0.5, 1.5);
                ConvexPolytope::axis_box(&[x0, y0], &[x0 + w, y0 + h]).unwrap()
            };
            let a = rect(&mut lattice);
            let b = rect(&mut lattice);
            let s = PolyhedralScatterer::new(2, vec![a.clone(), b.clone()], vec![]).unwrap();
            let complex = faces(&s).unwrap();
            let oracle = boundary_arrangement_counts_2d(&[a.clone(), b.clone()]);
            assert_eq!(
                complex.counts(),
                oracle,
                "case {case}: rect A {:?}, rect B {:?}",
                a.vertices(),
                b.vertices()
            );
        }
    }

    #[test]
    fn flush_stacked_squares_merge_contact() {
        // Two unit squares sharing a full edge: the union is a 1x2 rectangle
        // and the contact edge disappears.
        let a = square(0.0, 0.0, 1.0, 1.0);
        let b = square(0.0, 1.0, 1.0, 2.0);
        let s = PolyhedralScatterer::new(2, vec![a.clone(), b.clone()], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        let oracle = boundary_arrangement_counts_2d(&[a, b]);
        assert_eq!(complex.counts(), oracle);
        assert_eq!(complex.counts(), vec![4, 4]);
    }

    #[test]
    fn flush_stacked_cubes_merge_into_a_box() {
        // Two unit cubes stacked flush: the union is a 1 x 1 x 2 box. The
        // contact face disappears and the four side faces merge across the
        // contact line.
        let a = ConvexPolytope::axis_box(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        let b = ConvexPolytope::axis_box(&[0.0, 0.0, 1.0], &[1.0, 1.0, 2.0]).unwrap();
        let s = PolyhedralScatterer::new(3, vec![a, b], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        assert_eq!(complex.counts(), vec![8, 12, 6]);
        // Side faces consist of two merged pieces each.
        let two_piece_faces = complex
            .faces(2)
            .iter()
            .filter(|f| f.pieces.len() == 2)
            .count();
        assert_eq!(two_piece_faces, 4);
    }

    #[test]
    fn overlapping_boxes_union_is_a_box() {
        // [0,2]^3 union [1,3]x[0,2]^2 is the box [0,3]x[0,2]^2; the interior
        // facets at x = 1 and x = 2 are swallowed.
        let a = ConvexPolytope::axis_box(&[0.0, 0.0, 0.0], &[2.0, 2.0, 2.0]).unwrap();
        let b = ConvexPolytope::axis_box(&[1.0, 0.0, 0.0], &[3.0, 2.0, 2.0]).unwrap();
        let s = PolyhedralScatterer::new(3, vec![a, b], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        assert_eq!(complex.counts(), vec![8, 12, 6]);
        for sv in complex.vertex_normal_span_min_svs() {
            assert!(sv > tol::RANK_SV_TOL);
        }
    }

    #[test]
    fn l_prism_face_complex() {
        // An L-shaped prism: two boxes sharing a flush contact along part of
        // a face. Hand count: 2 L-shaped end faces + 6 rectangular side
        // faces, 18 edges, 12 vertices (Euler 12 - 18 + 8 = 2).
        let a = ConvexPolytope::axis_box(&[0.0, 0.0, 0.0], &[2.0, 2.0, 1.0]).unwrap();
        let b = ConvexPolytope::axis_box(&[0.0, 0.0, 1.0], &[1.0, 2.0, 2.0]).unwrap();
        let s = PolyhedralScatterer::new(3, vec![a, b], vec![]).unwrap();
        let complex = faces(&s).unwrap();
        assert_eq!(complex.counts(), vec![12, 18, 8]);
        for sv in complex.vertex_normal_span_min_svs() {
            assert!(sv > tol::RANK_SV_TOL, "L-prism vertex rank deficiency");
        }
    }

    #[test]
    fn min_face_distance_gap_squares() {
        let g = 0.3;
        let a = square(0.0, 0.0, 1.0, 1.0);
        let b = square(1.0 + g, 0.0, 2.0 + g, 1.0);
        let s = PolyhedralScatterer::new(2, vec![a, b], vec![]).unwrap();
        let delta = min_face_distance(&s).unwrap();
        assert!((delta - g).abs() < 1e-9);
    }

    #[test]
    fn min_face_distance_triangle() {
        // Exhaustive disjoint-pair check: the minimum is over
        // (vertex, opposite-edge) pairs; frozen analytic value below.
        let tri = ConvexPolytope::from_vertices(
            2,
            &[
                Point::from_vec(vec![0.0, 0.0]),
                Point::from_vec(vec![4.0, 0.0]),
                Point::from_vec(vec![0.0, 3.0]),
            ],
        )
        .unwrap();
        let s = PolyhedralScatterer::new(2, vec![tri], vec![]).unwrap();
        let delta = min_face_distance(&s).unwrap();
        // Heights: from (0,0) onto the hypotenuse 12/5 = 2.4; from (4,0)
        // onto x=0 is 4; from (0,3) onto y=0 is 3. Minimum 2.4.
        assert!((delta - 2.4).abs() < 1e-9);
    }

    #[test]
    fn min_face_distance_single_square() {
        let s = PolyhedralScatterer::new(2, vec![square(0.0, 0.0, 1.0, 1.0)], vec![]).unwrap();
        let delta = min_face_distance(&s).unwrap();
        assert!((delta - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cube_min_face_distance() {
        let cube = ConvexPolytope::axis_box(&[0.0; 3], &[1.0; 3]).unwrap();
        let s = PolyhedralScatterer::new(3, vec![cube], vec![]).unwrap();
        let delta = min_face_distance(&s).unwrap();
        assert!((delta - 1.0).abs() < 1e-9);
    }

    /// Independent oracle: brute-force arrangement of the boundary segments.
    /// Splits every polygon edge at its intersections with all other edges,
    /// classifies each sub-segment by whether its midpoint lies in another
    /// polygon's interior, merges surviving collinear touching sub-segments,
    /// and counts endpoints.
    fn boundary_arrangement_counts_2d(polys: &[ConvexPolytope]) -> Vec<usize> {
        use super::super::dist::segments_intersect_2d;
        let mut edges: Vec<(Point, Point, usize)> = Vec::new();
        for (pi, p) in polys.iter().enumerate() {
            for (a, b) in p.edges_2d() {
                edges.push((a, b, pi));
            }
        }
        let mut survivors: Vec<(Point, Point)> = Vec::new();
        for (a, b, pi) in &edges {
            // Split parameters: endpoints plus all crossings.
            let mut ts = vec![0.0, 1.0];
            for (c, d, pj) in &edges {
                if pi == pj {
                    continue;
                }
                if let Some(x) = segments_intersect_2d(a, b, c, d, 1e-9) {
                    let len2 = (b - a).norm_squared();
                    ts.push(((x - a).dot(&(b - a)) / len2).clamp(0.0, 1.0));
                }
                // Collinear overlap endpoints also split.
                for e in [c, d] {
                    let t = (e - a).dot(&(b - a)) / (b - a).norm_squared();
                    if (0.0..=1.0).contains(&t) {
                        let foot = a + (b - a) * t;
                        if (foot - e).norm() < 1e-9 {
                            ts.push(t);
                        }
                    }
                }
            }
            ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
            ts.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
            for w in ts.windows(2) {
                let mid = a + (b - a) * ((w[0] + w[1]) / 2.0);
                let covered = polys
                    .iter()
                    .enumerate()
                    .any(|(pj, p)| pj != *pi && p.interior_contains(&mid, 1e-9));
                // Matter on both sides (flush contact with another polygon's
                // edge pointing the other way) also removes the piece.
                let eps = 1e-6;
                let n = {
                    let d = b - a;
                    Point::from_vec(vec![-d[1], d[0]]).normalize()
                };
                let both_sides = polys.iter().enumerate().any(|(pj, p)| {
                    pj != *pi && p.contains(&(&mid + &n * eps), 0.0)
                }) && polys.iter().enumerate().any(|(pj, p)| {
                    pj != *pi && p.contains(&(&mid - &n * eps), 0.0)
                }) || polys
                    .iter()
                    .enumerate()
                    .any(|(pj, p)| pj != *pi && p.contains(&(&mid + &n * eps), 0.0))
                    && polys[*pi].contains(&(&mid - &n * eps), 0.0)
                    || polys
                        .iter()
                        .enumerate()
                        .any(|(pj, p)| pj != *pi && p.contains(&(&mid - &n * eps), 0.0))
                        && polys[*pi].contains(&(&mid + &n * eps), 0.0);
                if !covered && !both_sides {
                    let pa = a + (b - a) * w[0];
                    let pb = a + (b - a) * w[1];
                    if (&pb - &pa).norm() > 1e-9 {
                        survivors.push((pa, pb));
                    }
                }
            }
        }
        // Merge collinear touching survivors.
        let mut merged = true;
        while merged {
            merged = false;
            'outer: for i in 0..survivors.len() {
                for j in i + 1..survivors.len() {
                    let (a1, a2) = survivors[i].clone();
                    let (b1, b2) = survivors[j].clone();
                    let dir = (&a2 - &a1).normalize();
                    let col = |p: &Point| {
                        let rel = p - &a1;
                        (rel.clone() - &dir * dir.dot(&rel)).norm() < 1e-9
                    };
                    if col(&b1) && col(&b2) {
                        let t = |p: &Point| dir.dot(&(p - &a1));
                        let (mut lo, mut hi) = (0.0f64, t(&a2));
                        let (blo, bhi) = (t(&b1).min(t(&b2)), t(&b1).max(t(&b2)));
                        if blo <= hi + 1e-9 && lo <= bhi + 1e-9 {
                            lo = lo.min(blo);
                            hi = hi.max(bhi);
                            let na = &a1 + &dir * lo;
                            let nb = &a1 + &dir * hi;
                            survivors[i] = (na, nb);
                            survivors.remove(j);
                            merged = true;
                            break 'outer;
                        }
                    }
                }
            }
        }
        let mut pts: Vec<Point> = Vec::new();
        for (a, b) in &survivors {
            pts.push(a.clone());
            pts.push(b.clone());
        }
        let verts = dedup_points(pts);
        vec![verts.len(), survivors.len()]
    }
}
