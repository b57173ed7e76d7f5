//! Exact-tolerance geometric kernel: hyperplanes and their reflections,
//! convex polytopes as half-space intersections, boundary cells, polyhedral
//! scatterers, face complexes, and grid-based 2D connectivity.

mod cell;
mod dist;
mod faces;
mod grid;
mod polytope;
mod scatterer;

pub use cell::{Cell, Frame};
pub use dist::{
    dist_point_polygon3, dist_point_segment, dist_segment_segment, piece_distance,
    segments_intersect_2d, IntervalSet, SetPiece,
};
pub use faces::{faces, min_face_distance, Face, FaceComplex};
pub use grid::{complement_connected_2d, Grid2};
pub use polytope::{intersection_measure, sort_points, ConvexPolytope, HalfSpace, Side};
pub use scatterer::PolyhedralScatterer;

use crate::tol;
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Ambient points and direction vectors; dimension is carried at runtime.
pub type Point = DVector<f64>;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("normal vector has zero length")]
    ZeroNormal,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope has empty interior")]
    EmptyInterior,
    #[error("operation requires an obstacle, but the scatterer contains screens")]
    NotAnObstacle,
    #[error("resolution must be positive, got {0}")]
    InvalidResolution(f64),
    #[error("grid would need {cells} cells at this resolution; choose a coarser one")]
    GridTooFine { cells: u64 },
    #[error("cells are not internally disjoint: {0}")]
    CellsOverlap(String),
    #[error("invalid cell geometry: {0}")]
    BadCell(String),
    #[error("dimension {0} is not supported (only 2 and 3 are)")]
    UnsupportedDimension(usize),
    #[error("point lies on the scatterer")]
    PointOnScatterer,
}

/// An (N-1)-dimensional hyperplane `{ x : normal . x = offset }` with unit
/// normal, stored in canonical form: the first component of the normal whose
/// magnitude exceeds the dedup tolerance is positive, so `(v, c)` and
/// `(-v, -c)` map to the same value.
#[derive(Clone, Debug, PartialEq)]
pub struct Hyperplane {
    normal: Point,
    offset: f64,
}

impl Hyperplane {
    /// Builds the canonical hyperplane; the normal is normalised first.
    pub fn new(normal: Point, offset: f64) -> Result<Self, GeomError> {
        let (plane, _) = Self::new_tracked(normal, offset)?;
        Ok(plane)
    }

    /// Like [`Hyperplane::new`] but also reports whether canonicalization
    /// flipped the orientation, which callers tracking a feasible side need.
    pub fn new_tracked(normal: Point, offset: f64) -> Result<(Self, bool), GeomError> {
        let norm = normal.norm();
        if norm <= tol::UNIT_TOL {
            return Err(GeomError::ZeroNormal);
        }
        let mut n = normal / norm;
        let mut c = offset / norm;
        let mut flipped = false;
        for i in 0..n.len() {
            if n[i].abs() > tol::DEDUP_TOL {
                if n[i] < 0.0 {
                    n = -n;
                    c = -c;
                    flipped = true;
                }
                break;
            }
        }
        Ok((Self { normal: n, offset: c }, flipped))
    }

    /// Hyperplane through `point` with the given normal direction.
    pub fn through_point(normal: Point, point: &Point) -> Result<Self, GeomError> {
        let norm = normal.norm();
        if norm <= tol::UNIT_TOL {
            return Err(GeomError::ZeroNormal);
        }
        let n = normal / norm;
        let c = n.dot(point);
        Self::new(n, c)
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &Point {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Signed distance `normal . x - offset`; positive on the side the
    /// canonical normal points into.
    pub fn signed_distance(&self, x: &Point) -> f64 {
        self.normal.dot(x) - self.offset
    }

    pub fn contains(&self, x: &Point, tolerance: f64) -> bool {
        self.signed_distance(x).abs() <= tolerance
    }

    /// The reflection `T_P(x) = x - 2 (normal . x - offset) normal`.
    pub fn reflect_point(&self, x: &Point) -> Point {
        x - &self.normal * (2.0 * self.signed_distance(x))
    }

    /// Reflects `target` in `self`; the image is canonical, and reflecting
    /// twice returns `target`.
    pub fn reflect_hyperplane(&self, target: &Hyperplane) -> Hyperplane {
        let n = &target.normal - &self.normal * (2.0 * self.normal.dot(&target.normal));
        // Image of the foot point of `target` pins the new offset.
        let foot = &target.normal * target.offset;
        let image = self.reflect_point(&foot);
        let c = n.dot(&image);
        Hyperplane::new(n, c).expect("reflected normal stays unit")
    }

    /// Dedup comparison: chord distance between canonical normals below the
    /// dedup tolerance (equivalent to the angle for such small values) and
    /// offsets within the same tolerance.
    pub fn approx_eq(&self, other: &Hyperplane) -> bool {
        (&self.normal - &other.normal).norm() < tol::DEDUP_TOL
            && (self.offset - other.offset).abs() < tol::DEDUP_TOL
    }

    /// Foot of the perpendicular from the origin.
    pub fn foot(&self) -> Point {
        &self.normal * self.offset
    }

    /// Deterministic orthonormal basis of the direction space of the plane.
    ///
    /// In 2D the single tangent is the normal rotated by +90 degrees; in 3D
    /// the first vector comes from the coordinate axis least aligned with the
    /// normal and the second is the cross product, giving a right-handed
    /// `(b1, b2, normal)` triple.
    pub fn tangent_basis(&self) -> Vec<Point> {
        let n = &self.normal;
        match n.len() {
            2 => vec![Point::from_vec(vec![-n[1], n[0]])],
            3 => {
                let mut k = 0;
                for i in 1..3 {
                    if n[i].abs() < n[k].abs() {
                        k = i;
                    }
                }
                let mut e = Point::zeros(3);
                e[k] = 1.0;
                let mut b1 = &e - n * n[k];
                b1 /= b1.norm();
                let b2 = cross3(n, &b1);
                vec![b1, b2]
            }
            d => {
                // General fallback: Gram-Schmidt of the coordinate axes.
                let mut basis: Vec<Point> = Vec::new();
                for i in 0..d {
                    let mut e = Point::zeros(d);
                    e[i] = 1.0;
                    let mut v = &e - n * n.dot(&e);
                    for b in &basis {
                        v -= b * b.dot(&v);
                    }
                    let norm = v.norm();
                    if norm > 1e-8 {
                        basis.push(v / norm);
                    }
                    if basis.len() == d - 1 {
                        break;
                    }
                }
                basis
            }
        }
    }
}

/// 3D cross product on dynamic vectors (panics unless both have length 3).
pub fn cross3(a: &Point, b: &Point) -> Point {
    assert!(a.len() == 3 && b.len() == 3, "cross3 needs 3-vectors");
    Point::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// A rigid motion `x -> linear x + translation` with orthogonal linear part.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub linear: DMatrix<f64>,
    pub translation: Point,
}

impl Isometry {
    pub fn identity(dim: usize) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim),
            translation: Point::zeros(dim),
        }
    }

    /// The reflection in `plane` as an isometry: `I - 2 n n^T` plus `2 c n`.
    pub fn reflection(plane: &Hyperplane) -> Self {
        let n = plane.normal();
        let dim = n.len();
        let linear = DMatrix::identity(dim, dim) - (n * n.transpose()) * 2.0;
        let translation = n * (2.0 * plane.offset());
        Self { linear, translation }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &Point) -> Point {
        &self.linear * x + &self.translation
    }

    /// Applies only the linear (direction) part.
    pub fn apply_linear(&self, v: &Point) -> Point {
        &self.linear * v
    }

    /// `self` after `other`: `(self * other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        Isometry {
            linear: &self.linear * &other.linear,
            translation: &self.linear * &other.translation + &self.translation,
        }
    }

    pub fn approx_eq(&self, other: &Isometry, tolerance: f64) -> bool {
        (&self.linear - &other.linear).norm() <= tolerance
            && (&self.translation - &other.translation).norm() <= tolerance
    }

    /// Image of a hyperplane under this isometry.
    pub fn apply_hyperplane(&self, plane: &Hyperplane) -> Hyperplane {
        let n = self.apply_linear(plane.normal());
        let c = plane.offset() + n.dot(&self.translation);
        Hyperplane::new(n, c).expect("orthogonal image of a unit normal")
    }
}
