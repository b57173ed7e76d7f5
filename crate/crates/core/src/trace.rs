//! Constructive flat-point machinery, exact in 2D: the line component S of
//! the complement along a flat point's plane, the symmetric region
//! E = E+ u E- u S built by grid fill, seeding a flat point from a pair of
//! scatterers, and the iterative trace that either certifies a reflection
//! hyperplane (E unbounded) or hops to a new flat point on the region
//! boundary.
//!
//! The field u never appears: flat-point propagation is purely geometric,
//! and the measurements-equal hypothesis behind seeding is an assumption
//! recorded in the output, not checked.

use crate::geom::{
    Grid2, Hyperplane, IntervalSet, Isometry, Point, PolyhedralScatterer,
};
use crate::tol;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("tracing is 2D only, got dimension {0}")]
    NotTwoD(usize),
    #[error("point lies on the scatterer")]
    PointOnScatterer,
    #[error("point is not on the hyperplane (distance {0:.3e})")]
    PointOffPlane(f64),
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("seed cell is blocked at this resolution; retry with a finer one")]
    SeedBlocked,
    #[error("trace failed: {reason}")]
    Failure {
        reason: String,
        steps: Vec<TraceStep>,
    },
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
}

/// A flat point: a complement point on a hyperplane with positive clearance
/// from the scatterer.
#[derive(Clone, Debug)]
pub struct FlatPoint {
    pub point: Point,
    pub plane: Hyperplane,
    pub clearance: f64,
}

impl FlatPoint {
    pub fn new(
        scatterer: &PolyhedralScatterer,
        point: Point,
        plane: Hyperplane,
    ) -> Result<Self, TraceError> {
        let off = plane.signed_distance(&point).abs();
        if off > tol::ON_PLANE_TOL {
            return Err(TraceError::PointOffPlane(off));
        }
        let clearance = scatterer.distance(&point);
        if clearance <= 0.0 {
            return Err(TraceError::PointOnScatterer);
        }
        Ok(Self { point, plane, clearance })
    }
}

/// The connected component S of `G ∩ Π` containing a given point, as an open
/// parameter interval along the plane (infinite endpoints for rays and the
/// full line).
#[derive(Clone, Debug)]
pub struct LineComponent {
    pub plane: Hyperplane,
    pub origin: Point,
    pub tangent: Point,
    pub t_lo: f64,
    pub t_hi: f64,
}

impl LineComponent {
    pub fn point_at(&self, t: f64) -> Point {
        &self.origin + &self.tangent * t
    }

    pub fn is_unbounded(&self) -> bool {
        self.t_lo.is_infinite() || self.t_hi.is_infinite()
    }

    pub fn param_of(&self, x: &Point) -> f64 {
        self.tangent.dot(&(x - &self.origin))
    }

    /// Whether crossing the plane at parameter `t` passes through S.
    pub fn blocks_crossing_at(&self, t: f64) -> bool {
        self.t_lo <= t && t <= self.t_hi
    }
}

/// Closed parameter intervals along the line `origin + t tangent` where the
/// line meets the scatterer; exact segment arithmetic in 2D. Transversal
/// screen crossings contribute degenerate point intervals.
pub(crate) fn blocked_intervals_on_line(
    scatterer: &PolyhedralScatterer,
    origin: &Point,
    tangent: &Point,
) -> IntervalSet {
    let mut blocked = IntervalSet::new();
    for poly in scatterer.obstacles() {
        let mut t_lo = f64::NEG_INFINITY;
        let mut t_hi = f64::INFINITY;
        let mut empty = false;
        for hs in poly.halfspaces() {
            let s0 = hs.slack(origin);
            let s1 = hs.slack(&(origin + tangent));
            let slope = s1 - s0;
            if slope.abs() < 1e-14 {
                if s0 < -tol::FEAS_TOL {
                    empty = true;
                    break;
                }
                continue;
            }
            let t_star = -s0 / slope;
            if slope > 0.0 {
                t_lo = t_lo.max(t_star);
            } else {
                t_hi = t_hi.min(t_star);
            }
        }
        if !empty && t_lo <= t_hi {
            blocked.add(t_lo, t_hi);
        }
    }
    for cell in scatterer.screens() {
        let vs = cell.world_vertices();
        let (a, b) = (&vs[0], &vs[1]);
        // Signed distance of the screen endpoints from our line.
        let nrm = Point::from_vec(vec![-tangent[1], tangent[0]]);
        let sa = nrm.dot(&(a - origin));
        let sb = nrm.dot(&(b - origin));
        if sa.abs() <= 1e-9 && sb.abs() <= 1e-9 {
            // Collinear screen: a solid interval.
            blocked.add(tangent.dot(&(a - origin)), tangent.dot(&(b - origin)));
        } else if sa * sb <= 0.0 && (sa - sb).abs() > 1e-14 {
            // Transversal crossing: a point obstruction.
            let w = sa / (sa - sb);
            let crossing = a + (b - a) * w;
            let t = tangent.dot(&(&crossing - origin));
            blocked.add(t, t);
        }
    }
    blocked.normalize(0.0);
    blocked
}

/// Maximal open interval of `Π \ Σ` containing `x`, via exact segment
/// arithmetic against all obstacle edges and screen cells crossing the plane.
pub fn line_component(
    scatterer: &PolyhedralScatterer,
    plane: &Hyperplane,
    x: &Point,
) -> Result<LineComponent, TraceError> {
    if scatterer.dim() != 2 {
        return Err(TraceError::NotTwoD(scatterer.dim()));
    }
    let off = plane.signed_distance(x).abs();
    if off > tol::ON_PLANE_TOL {
        return Err(TraceError::PointOffPlane(off));
    }
    if scatterer.contains(x, 0.0) {
        return Err(TraceError::PointOnScatterer);
    }
    let origin = plane.foot();
    let tangent = plane.tangent_basis()[0].clone();
    let blocked = blocked_intervals_on_line(scatterer, &origin, &tangent);
    let t_x = tangent.dot(&(x - &origin));
    let (t_lo, t_hi) = blocked
        .complement_component(t_x)
        .ok_or(TraceError::PointOnScatterer)?;
    Ok(LineComponent {
        plane: plane.clone(),
        origin,
        tangent,
        t_lo,
        t_hi,
    })
}

/// The symmetric region E(x) of a flat point, built by flood fill at the
/// given resolution: `E+` is the component of `G+ ∩ T_Π(G-)` seeded at
/// `x + (r/2) ν`, `E-` is its mirror image, and S joins them. The two sides
/// are seeded independently; when `G+ = G-` (the complement wraps around
/// the end of S) the two fills simply coincide.
#[derive(Clone, Debug)]
pub struct SymmetryRegion {
    pub plane: Hyperplane,
    pub line_component: LineComponent,
    /// Cell centres of the `E+` fill (the mirror image is `E-`).
    pub cells_plus: Vec<Point>,
    pub resolution: f64,
    pub unbounded: bool,
    /// Unboundedness certified exactly by the far criterion
    /// (`norm(x) > R0 + 1`) rather than by the fill reaching the escape ball.
    pub far_criterion: bool,
}

impl SymmetryRegion {
    /// All region sample points: the `E+` cells and their mirror images.
    pub fn sample_points(&self) -> Vec<Point> {
        let mirror = Isometry::reflection(&self.plane);
        let mut out = self.cells_plus.clone();
        out.extend(self.cells_plus.iter().map(|c| mirror.apply(c)));
        out
    }
}

pub fn build_e(
    scatterer: &PolyhedralScatterer,
    fp: &FlatPoint,
    resolution: f64,
) -> Result<SymmetryRegion, TraceError> {
    if scatterer.dim() != 2 {
        return Err(TraceError::NotTwoD(scatterer.dim()));
    }
    if !(resolution > 0.0) {
        return Err(TraceError::InvalidResolution(resolution));
    }
    let line = line_component(scatterer, &fp.plane, &fp.point)?;
    let r0 = scatterer.bounding_radius();
    let escape_radius = r0 + 2.0;
    let far = fp.point.norm() > r0 + 1.0;
    if far {
        // The far criterion is exact: E is unbounded, no fill needed.
        return Ok(SymmetryRegion {
            plane: fp.plane.clone(),
            line_component: line,
            cells_plus: Vec::new(),
            resolution,
            unbounded: true,
            far_criterion: true,
        });
    }

    // The box must also contain the mirror image of every cell it holds.
    let base = escape_radius.max(fp.point.norm() + 1.0);
    let half_width = base + 2.0 * fp.plane.offset().abs() + 2.0 * resolution;
    let grid = Grid2::new(half_width, resolution)?;
    let margin = resolution * std::f64::consts::SQRT_2 / 2.0;
    let mirror = Isometry::reflection(&fp.plane);

    let free: Vec<bool> = grid.mark(|c| scatterer.distance(c) > margin);
    let step_ok = |a: usize, b: usize| {
        let pa = grid.center(a);
        let pb = grid.center(b);
        let sa = fp.plane.signed_distance(&pa);
        let sb = fp.plane.signed_distance(&pb);
        if sa * sb >= 0.0 {
            return true;
        }
        let w = sa / (sa - sb);
        let crossing = &pa + (&pb - &pa) * w;
        !line.blocks_crossing_at(line.param_of(&crossing))
    };

    // Seeds sit in B_r(x) on either side of the plane; the offset is capped
    // so large clearances cannot push them out of the fill box.
    let nu = fp.plane.normal().clone();
    let offset = (fp.clearance / 2.0).min(1.0);
    let seed_plus = &fp.point + &nu * offset;
    let seed_minus = &fp.point - &nu * offset;
    let cell_plus = grid.locate(&seed_plus).ok_or(TraceError::SeedBlocked)?;
    let cell_minus = grid.locate(&seed_minus).ok_or(TraceError::SeedBlocked)?;
    if !free[cell_plus] || !free[cell_minus] {
        return Err(TraceError::SeedBlocked);
    }

    let g_plus = grid.flood(&[cell_plus], &free, step_ok);
    let g_minus = grid.flood(&[cell_minus], &free, step_ok);

    // E+ cells: in G+, with the mirrored centre in G-.
    let in_e_plus: Vec<bool> = (0..grid.cells())
        .map(|i| {
            if !g_plus[i] {
                return false;
            }
            let m = mirror.apply(&grid.center(i));
            match grid.locate(&m) {
                Some(j) => g_minus[j],
                None => false,
            }
        })
        .collect();
    let e_plus = grid.flood(&[cell_plus], &in_e_plus, step_ok);

    let mut cells_plus = Vec::new();
    let mut reaches_escape = false;
    for i in 0..grid.cells() {
        if e_plus[i] {
            let c = grid.center(i);
            if c.norm() >= escape_radius - 1.5 * resolution {
                reaches_escape = true;
            }
            if mirror.apply(&c).norm() >= escape_radius - 1.5 * resolution {
                reaches_escape = true;
            }
            cells_plus.push(c);
        }
    }

    let unbounded = far || line.is_unbounded() || reaches_escape;
    Ok(SymmetryRegion {
        plane: fp.plane.clone(),
        line_component: line,
        cells_plus,
        resolution,
        unbounded,
        far_criterion: far,
    })
}

/// Outcome of seeding a flat point from two scatterers assumed to produce
/// equal measurements.
#[derive(Clone, Debug)]
pub enum SeedOutcome {
    Found {
        flat_point: FlatPoint,
        /// The seed lies on the boundary of the FIRST scatterer instead of
        /// the second: the roles were swapped, and the trace must run
        /// against the second scatterer.
        swapped: bool,
    },
    /// No boundary point of either scatterer lies outside the other: the two
    /// are equal as point sets.
    Identical,
}

/// Boundary segments of a 2D scatterer: obstacle edges plus screens.
fn boundary_segments(scatterer: &PolyhedralScatterer) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for poly in scatterer.obstacles() {
        out.extend(poly.edges_2d());
    }
    for cell in scatterer.screens() {
        let vs = cell.world_vertices();
        out.push((vs[0].clone(), vs[1].clone()));
    }
    out
}

fn lex_less(a: &Point, b: &Point) -> bool {
    for i in 0..a.len() {
        if a[i] < b[i] - 1e-15 {
            return true;
        }
        if a[i] > b[i] + 1e-15 {
            return false;
        }
    }
    false
}

/// A flat point for the pair `(Σ, Σ')`: a point of `∂Σ' \ Σ` on the
/// unbounded component of the joint complement, centred in its free
/// sub-segment, with maximal clearance; roles are swapped when `∂Σ'` is
/// covered by `Σ`; `Identical` when neither side has free boundary.
pub fn seed_flat_point(
    sigma: &PolyhedralScatterer,
    sigma_prime: &PolyhedralScatterer,
) -> Result<SeedOutcome, TraceError> {
    if sigma.dim() != 2 || sigma_prime.dim() != 2 {
        return Err(TraceError::NotTwoD(sigma.dim().max(sigma_prime.dim())));
    }
    for (swapped, (scat, other)) in [(false, (sigma, sigma_prime)), (true, (sigma_prime, sigma))]
    {
        // Candidates live on `other`'s boundary, cleared against `scat`.
        if let Some(fp) = best_boundary_candidate(scat, other)? {
            return Ok(SeedOutcome::Found { flat_point: fp, swapped });
        }
    }
    Ok(SeedOutcome::Identical)
}

fn best_boundary_candidate(
    scatterer: &PolyhedralScatterer,
    boundary_of: &PolyhedralScatterer,
) -> Result<Option<FlatPoint>, TraceError> {
    struct Candidate {
        point: Point,
        plane: Hyperplane,
        clearance: f64,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut min_len = f64::INFINITY;
    for (a, b) in boundary_segments(boundary_of) {
        let dir = &b - &a;
        let len = dir.norm();
        if len < tol::MEASURE_TOL {
            continue;
        }
        let tangent = &dir / len;
        let blocked = blocked_intervals_on_line(scatterer, &a, &tangent);
        let normal = Point::from_vec(vec![-tangent[1], tangent[0]]);
        let plane = Hyperplane::through_point(normal, &a).expect("unit tangent");
        for (lo, hi) in blocked.subtract_from(0.0, len, 10.0 * tol::MEASURE_TOL) {
            let mid = &a + &tangent * ((lo + hi) / 2.0);
            let clearance = scatterer.distance(&mid);
            if clearance <= tol::DISJOINT_TOL {
                continue;
            }
            min_len = min_len.min(hi - lo);
            candidates.push(Candidate { point: mid, plane: plane.clone(), clearance });
        }
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    // Keep only candidates adjacent to the unbounded component of the joint
    // complement.
    let joint = scatterer.union(boundary_of);
    let res = (min_len / 8.0)
        .clamp(1e-4, 0.1)
        .max((joint.bounding_radius() + 1.0) / 3500.0);
    let grid = Grid2::new(joint.bounding_radius() + 1.0, res)?;
    let passable: Vec<bool> = {
        let blocked = grid.blocked_by(&joint);
        blocked.iter().map(|b| !b).collect()
    };
    let seeds: Vec<usize> = (0..grid.cells())
        .filter(|&i| grid.is_border(i) && passable[i])
        .collect();
    let outside = grid.flood(&seeds, &passable, |_, _| true);
    let reachable = |p: &Point| -> bool {
        match grid.locate(p) {
            Some(i) => outside[i],
            None => true, // beyond the box is outside everything
        }
    };
    candidates.retain(|c| {
        let nu = c.plane.normal();
        let eps = res;
        reachable(&(&c.point + nu * eps)) || reachable(&(&c.point - nu * eps))
    });
    // Maximal clearance, ties broken lexicographically.
    candidates.sort_by(|x, y| {
        y.clearance
            .partial_cmp(&x.clearance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                if lex_less(&x.point, &y.point) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
    });
    match candidates.into_iter().next() {
        Some(c) => Ok(Some(FlatPoint::new(scatterer, c.point, c.plane)?)),
        None => Ok(None),
    }
}

/// One iteration of the trace: the flat point and the region built from it.
#[derive(Clone, Debug)]
pub struct TraceStep {
    pub flat_point: FlatPoint,
    pub region: SymmetryRegion,
}

/// A certified reflection-hyperplane witness: the final plane, the exact
/// escape radius (the line minus `B_R` avoids `Σ ∪ T_Π(Σ)`), and the full
/// trace log.
#[derive(Clone, Debug)]
pub struct ReflectionWitness {
    pub plane: Hyperplane,
    pub escape_radius: f64,
    pub steps: Vec<TraceStep>,
}

/// Exact escape radius of a candidate reflection hyperplane: the norm bound
/// past which the plane avoids both the scatterer and its own mirror image.
pub fn witness_escape_radius(scatterer: &PolyhedralScatterer, plane: &Hyperplane) -> f64 {
    let mirrored = scatterer.transform(&Isometry::reflection(plane));
    let origin = plane.foot();
    let tangent = plane.tangent_basis()[0].clone();
    let mut blocked = blocked_intervals_on_line(scatterer, &origin, &tangent);
    for &(lo, hi) in blocked_intervals_on_line(&mirrored, &origin, &tangent).items() {
        blocked.add(lo, hi);
    }
    blocked.normalize(0.0);
    let base = origin.norm_squared();
    blocked
        .items()
        .iter()
        .flat_map(|&(lo, hi)| [lo, hi])
        .map(|t| (base + t * t).sqrt())
        .fold(0.0, f64::max)
}

/// Exact soundness check of a witness plane: `Π \ B_R` lies in the
/// complement of `Σ ∪ T_Π(Σ)`.
pub fn witness_is_sound(
    scatterer: &PolyhedralScatterer,
    plane: &Hyperplane,
    escape_radius: f64,
) -> bool {
    witness_escape_radius(scatterer, plane) <= escape_radius + 1e-9
}

/// Iterates `build_e`; an unbounded region certifies the current plane, a
/// bounded one selects the next flat point on `∂E \ Σ` (a mirrored boundary
/// piece), maximising the distance from the origin (the radial escape
/// direction), ties broken lexicographically.
pub fn trace_to_reflection(
    scatterer: &PolyhedralScatterer,
    seed: &FlatPoint,
    max_iters: usize,
    resolution: f64,
) -> Result<ReflectionWitness, TraceError> {
    if scatterer.dim() != 2 {
        return Err(TraceError::NotTwoD(scatterer.dim()));
    }
    if !(resolution > 0.0) {
        return Err(TraceError::InvalidResolution(resolution));
    }
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut visited: Vec<Point> = vec![seed.point.clone()];
    let mut fp = seed.clone();
    for _ in 0..max_iters {
        let region = build_e(scatterer, &fp, resolution)?;
        let plane = fp.plane.clone();
        steps.push(TraceStep {
            flat_point: fp.clone(),
            region: region.clone(),
        });
        if region.unbounded {
            let escape_radius = witness_escape_radius(scatterer, &plane);
            debug_assert!(witness_is_sound(scatterer, &plane, escape_radius));
            return Ok(ReflectionWitness { plane, escape_radius, steps });
        }
        match next_flat_point(scatterer, &region, &visited, resolution)? {
            Some(next) => {
                visited.push(next.point.clone());
                fp = next;
            }
            None => {
                return Err(TraceError::Failure {
                    reason: format!(
                        "no admissible next flat point on the region boundary at resolution {resolution}"
                    ),
                    steps,
                });
            }
        }
    }
    Err(TraceError::Failure {
        reason: format!("iteration cap {max_iters} exhausted"),
        steps,
    })
}

/// Next flat point: midpoints of free sub-segments of the mirrored boundary
/// pieces that touch the region, scored by distance from the origin.
fn next_flat_point(
    scatterer: &PolyhedralScatterer,
    region: &SymmetryRegion,
    visited: &[Point],
    resolution: f64,
) -> Result<Option<FlatPoint>, TraceError> {
    let mirror = Isometry::reflection(&region.plane);
    let mirrored = scatterer.transform(&mirror);
    let region_points = region.sample_points();
    let touch_radius = 1.6 * resolution;
    let touches_region = |p: &Point| {
        region_points
            .iter()
            .any(|rp| (rp - p).norm() <= touch_radius)
    };
    struct Candidate {
        point: Point,
        plane: Hyperplane,
    }
    let mut candidates: Vec<Candidate> = Vec::new();
    for (a, b) in boundary_segments(&mirrored) {
        let dir = &b - &a;
        let len = dir.norm();
        if len < tol::MEASURE_TOL {
            continue;
        }
        let tangent = &dir / len;
        let normal = Point::from_vec(vec![-tangent[1], tangent[0]]);
        let plane = Hyperplane::through_point(normal, &a).expect("unit tangent");
        let blocked = blocked_intervals_on_line(scatterer, &a, &tangent);
        for (lo, hi) in blocked.subtract_from(0.0, len, 10.0 * tol::MEASURE_TOL) {
            // Clip the free sub-segment to the part adjacent to the region.
            let steps = ((hi - lo) / (resolution / 2.0)).ceil() as usize;
            let steps = steps.clamp(1, 4096);
            let mut run_start: Option<f64> = None;
            let mut runs: Vec<(f64, f64)> = Vec::new();
            for k in 0..=steps {
                let t = lo + (hi - lo) * k as f64 / steps as f64;
                let p = &a + &tangent * t;
                if touches_region(&p) {
                    if run_start.is_none() {
                        run_start = Some(t);
                    }
                } else if let Some(s) = run_start.take() {
                    runs.push((s, t));
                }
            }
            if let Some(s) = run_start {
                runs.push((s, hi));
            }
            for (s, e) in runs {
                if e - s < resolution / 2.0 {
                    continue;
                }
                let mid = &a + &tangent * ((s + e) / 2.0);
                if scatterer.distance(&mid) <= tol::DISJOINT_TOL {
                    continue;
                }
                if visited.iter().any(|v| (v - &mid).norm() < resolution / 2.0) {
                    continue;
                }
                candidates.push(Candidate { point: mid, plane: plane.clone() });
            }
        }
    }
    if candidates.is_empty() {
        return Ok(None);
    }
    candidates.sort_by(|x, y| {
        y.point
            .norm()
            .partial_cmp(&x.point.norm())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                if lex_less(&x.point, &y.point) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
    });
    let best = candidates.into_iter().next().unwrap();
    Ok(Some(FlatPoint::new(scatterer, best.point, best.plane)?))
}

/// Default fill resolution: an eighth of the smaller of the minimum face
/// distance and the seed clearance, clamped to `[1e-4, 0.1]` and floored so
/// the fill grid stays within its cell budget.
pub fn default_resolution(scatterer: &PolyhedralScatterer, seed: &FlatPoint) -> f64 {
    let delta = if scatterer.screens().is_empty() && !scatterer.obstacles().is_empty() {
        crate::geom::min_face_distance(scatterer).unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    let feasible_floor = (scatterer.bounding_radius() + 3.0) / 3500.0;
    (delta.min(seed.clearance) / 8.0)
        .clamp(1e-4, 0.1)
        .max(feasible_floor)
}
