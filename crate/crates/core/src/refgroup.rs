//! Reflection-hyperplane set analysis: the span dimension of the normals,
//! the common subspace contained in every hyperplane, closure under mutual
//! reflection with the generated isometry group, sector counting for
//! pencils, scatterer symmetrization, and escape paths avoiding every
//! reflection line.

use crate::geom::{
    complement_connected_2d, Cell, ConvexPolytope, Grid2, Hyperplane, Isometry, Point,
    PolyhedralScatterer,
};
use crate::tol;
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RefGroupError {
    #[error("reflection set must be nonempty")]
    EmptySet,
    #[error("closure cap {cap} is below the input size {size}")]
    CapBelowInput { cap: usize, size: usize },
    #[error("hyperplanes do not form a pencil around a codimension-2 flat")]
    NotAPencil,
    #[error("group closure did not finish (status {0:?})")]
    GroupNotFinite(ClosureStatus),
    #[error("scatterer is not symmetric under the reflection set (vertex defect {0:.3e})")]
    NotSymmetric(f64),
    #[error("start point is invalid: {0}")]
    BadStart(String),
    #[error("escape search exhausted at resolution {resolution}: {detail}")]
    EscapeExhausted { resolution: f64, detail: String },
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
}

/// A deduplicated set of canonical reflection hyperplanes, kept in a sorted
/// canonical order.
#[derive(Clone, Debug)]
pub struct ReflectionSet {
    dim: usize,
    hyperplanes: Vec<Hyperplane>,
}

impl ReflectionSet {
    pub fn new(dim: usize, planes: Vec<Hyperplane>) -> Result<Self, RefGroupError> {
        if planes.is_empty() {
            return Err(RefGroupError::EmptySet);
        }
        let mut set = Self { dim, hyperplanes: Vec::new() };
        for p in planes {
            set.insert(p);
        }
        set.sort();
        Ok(set)
    }

    fn insert(&mut self, plane: Hyperplane) -> bool {
        if self.hyperplanes.iter().any(|h| h.approx_eq(&plane)) {
            false
        } else {
            self.hyperplanes.push(plane);
            true
        }
    }

    fn sort(&mut self) {
        self.hyperplanes.sort_by(|a, b| {
            for i in 0..self.dim {
                match a.normal()[i].partial_cmp(&b.normal()[i]) {
                    Some(std::cmp::Ordering::Equal) | None => continue,
                    Some(ord) => return ord,
                }
            }
            a.offset()
                .partial_cmp(&b.offset())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn contains(&self, plane: &Hyperplane) -> bool {
        self.hyperplanes.iter().any(|h| h.approx_eq(plane))
    }

    pub fn set_eq(&self, other: &ReflectionSet) -> bool {
        self.len() == other.len() && self.hyperplanes.iter().all(|h| other.contains(h))
    }
}

/// An affine flat: a point plus an orthonormal basis of its directions.
#[derive(Clone, Debug)]
pub struct SubspaceFlat {
    pub point: Point,
    pub directions: Vec<Point>,
}

impl SubspaceFlat {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureStatus {
    Finite,
    /// The closure grew past the cap: the infinite families (parallel
    /// distinct pairs, irrational-angle pencils, full continua around a
    /// common flat) all surface this way.
    ExceededCap,
}

/// The isometry group generated by the reflections in a closed hyperplane
/// set.
#[derive(Clone, Debug)]
pub struct ReflectionGroup {
    pub generators: ReflectionSet,
    pub elements: Vec<Isometry>,
    pub closure_status: ClosureStatus,
}

impl ReflectionGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_finite(&self) -> bool {
        self.closure_status == ClosureStatus::Finite
    }
}

/// Caps for the closure fixpoint; exceeding either reports the infinite case.
#[derive(Clone, Copy, Debug)]
pub struct ClosureCaps {
    pub max_hyperplanes: usize,
    pub max_elements: usize,
}

impl Default for ClosureCaps {
    fn default() -> Self {
        Self {
            max_hyperplanes: 64,
            max_elements: 512,
        }
    }
}

/// Rank of the normal matrix: the dimension `N0` of the span of the normals.
pub fn normal_span_dim(rs: &ReflectionSet) -> usize {
    let m = rs.len();
    let mut mat = DMatrix::zeros(m, rs.dim());
    for (i, h) in rs.hyperplanes().iter().enumerate() {
        for j in 0..rs.dim() {
            mat[(i, j)] = h.normal()[j];
        }
    }
    mat.svd(false, false).rank(tol::RANK_SV_TOL)
}

/// The largest affine flat contained in every hyperplane: the solution set of
/// the joint linear system, or `None` when it is inconsistent.
pub fn common_subspace(rs: &ReflectionSet) -> Option<SubspaceFlat> {
    let m = rs.len();
    let n = rs.dim();
    let mut a = DMatrix::zeros(m, n);
    let mut b = Point::zeros(m);
    for (i, h) in rs.hyperplanes().iter().enumerate() {
        for j in 0..n {
            a[(i, j)] = h.normal()[j];
        }
        b[i] = h.offset();
    }
    let svd = a.clone().svd(true, true);
    let point = svd.solve(&b, tol::RANK_SV_TOL).ok()?;
    if (&a * &point - &b).norm() > 1e-8 {
        return None; // inconsistent: no common point
    }
    // Null-space basis from the right singular vectors.
    let rank = svd.rank(tol::RANK_SV_TOL);
    let v_t = svd.v_t.as_ref()?;
    let mut directions = Vec::new();
    for r in rank..n {
        let row = v_t.row(r);
        directions.push(Point::from_iterator(n, row.iter().cloned()));
    }
    Some(SubspaceFlat { point, directions })
}

/// Closure of the set under mutual reflection, and the generated group.
/// Reaching either cap reports `ExceededCap` with the partial data.
pub fn closure(
    rs: &ReflectionSet,
    caps: ClosureCaps,
) -> Result<(ReflectionSet, ReflectionGroup), RefGroupError> {
    if caps.max_hyperplanes < rs.len() {
        return Err(RefGroupError::CapBelowInput {
            cap: caps.max_hyperplanes,
            size: rs.len(),
        });
    }
    let mut closed = rs.clone();
    let mut exceeded = false;
    'fixpoint: loop {
        let snapshot = closed.hyperplanes().to_vec();
        let mut grew = false;
        for mirror in &snapshot {
            for target in &snapshot {
                let image = mirror.reflect_hyperplane(target);
                if closed.insert(image) {
                    grew = true;
                    if closed.len() > caps.max_hyperplanes {
                        exceeded = true;
                        break 'fixpoint;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    closed.sort();

    if exceeded {
        let group = ReflectionGroup {
            generators: closed.clone(),
            elements: vec![Isometry::identity(rs.dim())],
            closure_status: ClosureStatus::ExceededCap,
        };
        return Ok((closed, group));
    }

    // Group closure over composition with the generator reflections.
    let gens: Vec<Isometry> = closed
        .hyperplanes()
        .iter()
        .map(Isometry::reflection)
        .collect();
    let mut elements = vec![Isometry::identity(rs.dim())];
    let mut frontier = vec![Isometry::identity(rs.dim())];
    let mut status = ClosureStatus::Finite;
    'group: while let Some(next) = {
        let f = std::mem::take(&mut frontier);
        (!f.is_empty()).then_some(f)
    } {
        for elem in &next {
            for g in &gens {
                let composed = g.compose(elem);
                if !elements
                    .iter()
                    .any(|e| e.approx_eq(&composed, tol::ISOMETRY_TOL))
                {
                    elements.push(composed.clone());
                    frontier.push(composed);
                    if elements.len() > caps.max_elements {
                        status = ClosureStatus::ExceededCap;
                        break 'group;
                    }
                }
            }
        }
    }

    if status == ClosureStatus::Finite {
        // Every element must map the closed hyperplane set onto itself.
        debug_assert!(elements.iter().all(|t| {
            closed
                .hyperplanes()
                .iter()
                .all(|h| closed.contains(&t.apply_hyperplane(h)))
        }));
    }

    let group = ReflectionGroup {
        generators: closed.clone(),
        elements,
        closure_status: status,
    };
    Ok((closed, group))
}

/// Sector count of a pencil: `m` hyperplanes through a common
/// codimension-2 flat subdivide space into `2m` sectors. Verified by
/// counting sign-pattern classes over sampled directions in the normal
/// plane.
pub fn sector_count(pencil: &ReflectionSet) -> Result<usize, RefGroupError> {
    let m = pencil.len();
    if m == 1 {
        return Ok(2);
    }
    if normal_span_dim(pencil) != 2 {
        return Err(RefGroupError::NotAPencil);
    }
    let flat = common_subspace(pencil).ok_or(RefGroupError::NotAPencil)?;
    if flat.dim() != pencil.dim() - 2 {
        return Err(RefGroupError::NotAPencil);
    }
    // Orthonormal basis of the (2D) normal plane.
    let b1 = pencil.hyperplanes()[0].normal().clone();
    let mut b2 = None;
    for h in pencil.hyperplanes().iter().skip(1) {
        let mut v = h.normal() - &b1 * b1.dot(h.normal());
        let norm = v.norm();
        if norm > 1e-9 {
            v /= norm;
            b2 = Some(v);
            break;
        }
    }
    let b2 = b2.ok_or(RefGroupError::NotAPencil)?;
    let samples = (8 * m).max(64);
    let mut patterns: Vec<Vec<i8>> = Vec::new();
    for k in 0..samples {
        // Offset to dodge the lines themselves.
        let theta = (k as f64 + 0.37) * std::f64::consts::TAU / samples as f64;
        let dir = &b1 * theta.cos() + &b2 * theta.sin();
        let pattern: Vec<i8> = pencil
            .hyperplanes()
            .iter()
            .map(|h| {
                let s = h.normal().dot(&dir);
                if s > 0.0 {
                    1
                } else {
                    -1
                }
            })
            .collect();
        if !patterns.contains(&pattern) {
            patterns.push(pattern);
        }
    }
    if patterns.len() != 2 * m {
        return Err(RefGroupError::NotAPencil);
    }
    Ok(2 * m)
}

/// Union of the images of the scatterer under every group element, with
/// duplicate parts removed and (in 2D) crossing screen images split at their
/// crossing points.
pub fn symmetrize(
    scatterer: &PolyhedralScatterer,
    group: &ReflectionGroup,
) -> Result<PolyhedralScatterer, RefGroupError> {
    if !group.is_finite() {
        return Err(RefGroupError::GroupNotFinite(group.closure_status));
    }
    let dim = scatterer.dim();
    let mut obstacles: Vec<ConvexPolytope> = Vec::new();
    let mut screens: Vec<Cell> = Vec::new();
    for t in &group.elements {
        let image = scatterer.transform(t);
        for o in image.obstacles() {
            let dup = obstacles
                .iter()
                .any(|e| point_sets_close(e.vertices(), o.vertices(), tol::DEDUP_TOL * 10.0));
            if !dup {
                obstacles.push(o.clone());
            }
        }
        for s in image.screens() {
            let vs = s.world_vertices();
            let dup = screens.iter().any(|existing| {
                existing.carrier().approx_eq(s.carrier())
                    && point_sets_close(&existing.world_vertices(), &vs, tol::DEDUP_TOL * 10.0)
            });
            if !dup {
                screens.push(s.clone());
            }
        }
    }
    let screens = if dim == 2 {
        split_crossing_screens_2d(screens)
    } else {
        screens
    };
    Ok(PolyhedralScatterer::new(dim, obstacles, screens)?)
}

/// Order-insensitive match of two point sets within a tolerance.
fn point_sets_close(a: &[Point], b: &[Point], tolerance: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    'outer: for p in a {
        for (j, q) in b.iter().enumerate() {
            if !used[j] && (p - q).norm() < tolerance {
                used[j] = true;
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Splits 2D screen segments at pairwise transversal crossings so the result
/// satisfies internal disjointness.
fn split_crossing_screens_2d(screens: Vec<Cell>) -> Vec<Cell> {
    let mut work = screens;
    let mut changed = true;
    while changed {
        changed = false;
        'outer: for i in 0..work.len() {
            for j in i + 1..work.len() {
                let va = work[i].world_vertices();
                let vb = work[j].world_vertices();
                let Some(x) =
                    crate::geom::segments_intersect_2d(&va[0], &va[1], &vb[0], &vb[1], 0.0)
                else {
                    continue;
                };
                let interior_a =
                    (&x - &va[0]).norm() > tol::DEDUP_TOL && (&x - &va[1]).norm() > tol::DEDUP_TOL;
                let interior_b =
                    (&x - &vb[0]).norm() > tol::DEDUP_TOL && (&x - &vb[1]).norm() > tol::DEDUP_TOL;
                if !(interior_a && interior_b) {
                    continue;
                }
                let bc_a = work[i].bc();
                let bc_b = work[j].bc();
                let cell_b = work.remove(j);
                let cell_a = work.remove(i);
                let _ = (cell_a, cell_b);
                work.push(Cell::segment_2d(&va[0], &x, bc_a).expect("split keeps positive length"));
                work.push(Cell::segment_2d(&x, &va[1], bc_a).expect("split keeps positive length"));
                work.push(Cell::segment_2d(&vb[0], &x, bc_b).expect("split keeps positive length"));
                work.push(Cell::segment_2d(&x, &vb[1], bc_b).expect("split keeps positive length"));
                changed = true;
                break 'outer;
            }
        }
    }
    work
}

/// Checks that the scatterer is symmetric under every reflection of the set,
/// by vertex-set distance of each image.
pub fn symmetry_defect(scatterer: &PolyhedralScatterer, rs: &ReflectionSet) -> f64 {
    rs.hyperplanes()
        .iter()
        .map(|h| {
            scatterer
                .transform(&Isometry::reflection(h))
                .vertex_set_distance(scatterer)
        })
        .fold(0.0, f64::max)
}

/// A polyline escaping from `start` to the boundary of `B_{R0+2}` through
/// the complement of the (symmetric) scatterer, keeping more than half a
/// resolution away from every reflection line. Found by BFS on the grid.
pub fn escape_path_2d(
    scatterer: &PolyhedralScatterer,
    rs: &ReflectionSet,
    start: &Point,
    resolution: f64,
) -> Result<Vec<Point>, RefGroupError> {
    if scatterer.dim() != 2 || rs.dim() != 2 {
        return Err(RefGroupError::Geom(crate::geom::GeomError::UnsupportedDimension(
            scatterer.dim().max(rs.dim()),
        )));
    }
    let defect = symmetry_defect(scatterer, rs);
    if defect > 1e-7 {
        return Err(RefGroupError::NotSymmetric(defect));
    }
    if scatterer.contains(start, tol::DISJOINT_TOL) {
        return Err(RefGroupError::BadStart("start lies on the scatterer".into()));
    }
    let line_dist = |x: &Point| {
        rs.hyperplanes()
            .iter()
            .map(|h| h.signed_distance(x).abs())
            .fold(f64::INFINITY, f64::min)
    };
    if line_dist(start) <= resolution / 2.0 {
        return Err(RefGroupError::BadStart(
            "start lies within resolution/2 of a reflection line".into(),
        ));
    }
    let r0 = scatterer.bounding_radius();
    let escape_radius = r0 + 2.0;
    let half_width = escape_radius.max(start.norm()) + 0.5;
    let grid = Grid2::new(half_width, resolution)?;
    let margin = resolution * std::f64::consts::SQRT_2 / 2.0;
    let passable = grid.mark(|c| {
        scatterer.distance(c) > margin && line_dist(c) > resolution / 2.0
    });
    let start_cell = grid
        .locate(start)
        .ok_or_else(|| RefGroupError::BadStart("start outside the search box".into()))?;
    if !passable[start_cell] {
        return Err(RefGroupError::BadStart(
            "start cell is blocked at this resolution".into(),
        ));
    }
    match grid.path_to(start_cell, &passable, |i| grid.center(i).norm() >= escape_radius) {
        Some(mut path) => {
            if let Some(first) = path.first() {
                if (first - start).norm() > 1e-12 {
                    path.insert(0, start.clone());
                }
            }
            Ok(path)
        }
        None => {
            let visited = grid.flood(&[start_cell], &passable, |_, _| true);
            let mut blockers: Vec<String> = Vec::new();
            'scan: for i in 0..grid.cells() {
                if visited[i] {
                    for nb in grid.neighbors(i) {
                        if !passable[nb] {
                            let c = grid.center(nb);
                            blockers.push(format!("({:.3}, {:.3})", c[0], c[1]));
                            if blockers.len() >= 8 {
                                break 'scan;
                            }
                        }
                    }
                }
            }
            Err(RefGroupError::EscapeExhausted {
                resolution,
                detail: format!(
                    "enclosed region; blocking cells near: {}",
                    blockers.join(", ")
                ),
            })
        }
    }
}

/// Connectivity re-export used by callers working at the refgroup level.
pub fn complement_connected(
    scatterer: &PolyhedralScatterer,
    resolution: f64,
) -> Result<bool, RefGroupError> {
    Ok(complement_connected_2d(scatterer, resolution)?)
}
