//! Boundary cells: the closure of an open subset of a hyperplane, restricted
//! here to a convex (N-1)-dimensional polytope expressed in an orthonormal
//! frame of its carrier. One boundary-condition tag applies to the whole
//! cell, optionally split per side.

use super::{ConvexPolytope, GeomError, Hyperplane, Isometry, Point};
use crate::tol;
use crate::waves::BoundaryConditionTag;

/// Orthonormal coordinate frame of a hyperplane: an origin on the plane plus
/// a basis of its direction space.
#[derive(Clone, Debug)]
pub struct Frame {
    pub origin: Point,
    pub basis: Vec<Point>,
}

impl Frame {
    /// The deterministic canonical frame of a carrier plane.
    pub fn canonical(plane: &Hyperplane) -> Frame {
        Frame {
            origin: plane.foot(),
            basis: plane.tangent_basis(),
        }
    }

    pub fn embed(&self, coords: &Point) -> Point {
        let mut x = self.origin.clone();
        for (b, &u) in self.basis.iter().zip(coords.iter()) {
            x += b * u;
        }
        x
    }

    /// In-frame coordinates of a world point (its projection onto the plane).
    pub fn project(&self, x: &Point) -> Point {
        let rel = x - &self.origin;
        Point::from_vec(self.basis.iter().map(|b| b.dot(&rel)).collect())
    }

    pub fn is_orthonormal(&self) -> bool {
        for (i, a) in self.basis.iter().enumerate() {
            if (a.norm() - 1.0).abs() > tol::UNIT_TOL {
                return false;
            }
            for b in self.basis.iter().skip(i + 1) {
                if a.dot(b).abs() > tol::UNIT_TOL {
                    return false;
                }
            }
        }
        true
    }
}

/// A cell of a polyhedral scatterer boundary that is not an obstacle face:
/// a screen piece with its boundary-condition tag.
#[derive(Clone, Debug)]
pub struct Cell {
    carrier: Hyperplane,
    frame: Frame,
    polygon: ConvexPolytope,
    bc: BoundaryConditionTag,
    side_bcs: Option<(BoundaryConditionTag, BoundaryConditionTag)>,
}

impl Cell {
    pub fn new(
        carrier: Hyperplane,
        polygon: ConvexPolytope,
        bc: BoundaryConditionTag,
    ) -> Result<Self, GeomError> {
        let frame = Frame::canonical(&carrier);
        if polygon.dim() != carrier.dim() - 1 {
            return Err(GeomError::BadCell(format!(
                "cell polygon must have dimension {}, got {}",
                carrier.dim() - 1,
                polygon.dim()
            )));
        }
        if !frame.is_orthonormal() {
            return Err(GeomError::BadCell("carrier frame is not orthonormal".into()));
        }
        Ok(Self {
            carrier,
            frame,
            polygon,
            bc,
            side_bcs: None,
        })
    }

    /// 2D screen from its world endpoints.
    pub fn segment_2d(a: &Point, b: &Point, bc: BoundaryConditionTag) -> Result<Self, GeomError> {
        if a.len() != 2 || b.len() != 2 {
            return Err(GeomError::BadCell("segment endpoints must be 2D".into()));
        }
        let dir = b - a;
        if dir.norm() < tol::MEASURE_TOL {
            return Err(GeomError::BadCell("segment endpoints coincide".into()));
        }
        let normal = Point::from_vec(vec![-dir[1], dir[0]]);
        let carrier = Hyperplane::through_point(normal, a)?;
        let frame = Frame::canonical(&carrier);
        let ta = frame.project(a)[0];
        let tb = frame.project(b)[0];
        let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
        let polygon = ConvexPolytope::axis_box(&[lo], &[hi])?;
        Self::new(carrier, polygon, bc)
    }

    /// 3D screen from coplanar world vertices of a convex polygon.
    pub fn polygon_3d(vertices: &[Point], bc: BoundaryConditionTag) -> Result<Self, GeomError> {
        if vertices.len() < 3 {
            return Err(GeomError::BadCell("polygon needs at least 3 vertices".into()));
        }
        if vertices.iter().any(|v| v.len() != 3) {
            return Err(GeomError::BadCell("polygon vertices must be 3D".into()));
        }
        // Normal from the first non-collinear triple.
        let mut normal = None;
        for i in 1..vertices.len() - 1 {
            let u = &vertices[i] - &vertices[0];
            let v = &vertices[i + 1] - &vertices[0];
            let n = super::cross3(&u, &v);
            if n.norm() > 1e-10 {
                normal = Some(n);
                break;
            }
        }
        let Some(normal) = normal else {
            return Err(GeomError::BadCell("polygon vertices are collinear".into()));
        };
        let carrier = Hyperplane::through_point(normal, &vertices[0])?;
        for (i, v) in vertices.iter().enumerate() {
            if !carrier.contains(v, 1e-9) {
                return Err(GeomError::BadCell(format!(
                    "polygon vertex {i} is off the carrier plane"
                )));
            }
        }
        let frame = Frame::canonical(&carrier);
        let coords: Vec<Point> = vertices.iter().map(|v| frame.project(v)).collect();
        let polygon = ConvexPolytope::from_vertices(2, &coords)?;
        Self::new(carrier, polygon, bc)
    }

    pub fn with_side_bcs(
        mut self,
        plus: BoundaryConditionTag,
        minus: BoundaryConditionTag,
    ) -> Self {
        self.side_bcs = Some((plus, minus));
        self
    }

    pub fn carrier(&self) -> &Hyperplane {
        &self.carrier
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn polygon(&self) -> &ConvexPolytope {
        &self.polygon
    }

    pub fn bc(&self) -> BoundaryConditionTag {
        self.bc
    }

    pub fn side_bcs(&self) -> Option<(BoundaryConditionTag, BoundaryConditionTag)> {
        self.side_bcs
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    /// World-space vertices of the cell polygon.
    pub fn world_vertices(&self) -> Vec<Point> {
        self.polygon
            .vertices()
            .iter()
            .map(|u| self.frame.embed(u))
            .collect()
    }

    /// World-space vertices in boundary order (3D cells).
    pub fn world_vertices_ordered(&self) -> Vec<Point> {
        match self.polygon.dim() {
            1 => self.world_vertices(),
            2 => self
                .polygon
                .ordered_vertices_2d()
                .iter()
                .map(|u| self.frame.embed(u))
                .collect(),
            _ => unreachable!("cells are at most 2-dimensional"),
        }
    }

    pub fn distance(&self, x: &Point) -> f64 {
        match self.dim() {
            2 => {
                let vs = self.world_vertices();
                super::dist::dist_point_segment(x, &vs[0], &vs[1])
            }
            3 => {
                let vs = self.world_vertices_ordered();
                super::dist::dist_point_polygon3(x, &vs, &self.carrier)
            }
            d => panic!("unsupported cell dimension {d}"),
        }
    }

    pub fn transform(&self, iso: &Isometry) -> Cell {
        let carrier = iso.apply_hyperplane(&self.carrier);
        match self.dim() {
            2 => {
                let vs = self.world_vertices();
                let mut cell = Cell::segment_2d(&iso.apply(&vs[0]), &iso.apply(&vs[1]), self.bc)
                    .expect("isometry image of a valid segment cell");
                cell.side_bcs = self.side_bcs;
                cell
            }
            3 => {
                let vs: Vec<Point> = self
                    .world_vertices_ordered()
                    .iter()
                    .map(|v| iso.apply(v))
                    .collect();
                let mut cell =
                    Cell::polygon_3d(&vs, self.bc).expect("isometry image of a valid polygon cell");
                cell.side_bcs = self.side_bcs;
                // The reconstructed carrier and the transformed carrier agree
                // up to canonicalization.
                debug_assert!(cell.carrier.approx_eq(&carrier) || {
                    let flipped = Hyperplane::new(-carrier.normal().clone(), -carrier.offset());
                    flipped.map(|f| cell.carrier.approx_eq(&f)).unwrap_or(false)
                });
                cell
            }
            d => panic!("unsupported cell dimension {d}"),
        }
    }

    pub fn max_vertex_norm(&self) -> f64 {
        self.world_vertices()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(coords: &[f64]) -> Point {
        Point::from_vec(coords.to_vec())
    }

    #[test]
    fn segment_cell_round_trips_endpoints() {
        let a = pt(&[0.0, 1.0]);
        let b = pt(&[2.0, 1.0]);
        let cell = Cell::segment_2d(&a, &b, BoundaryConditionTag::Dirichlet).unwrap();
        let mut vs = cell.world_vertices();
        super::super::polytope::sort_points(&mut vs);
        assert!((&vs[0] - &a).norm() < 1e-12);
        assert!((&vs[1] - &b).norm() < 1e-12);
        assert!(cell.carrier().contains(&pt(&[5.0, 1.0]), 1e-12));
        assert!((cell.distance(&pt(&[1.0, 3.0])) - 2.0).abs() < 1e-12);
        assert!((cell.distance(&pt(&[3.0, 1.0])) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polygon_cell_requires_coplanar_vertices() {
        let bad = Cell::polygon_3d(
            &[
                pt(&[0.0, 0.0, 0.0]),
                pt(&[1.0, 0.0, 0.0]),
                pt(&[1.0, 1.0, 0.3]),
                pt(&[0.0, 1.0, 0.0]),
            ],
            BoundaryConditionTag::Dirichlet,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn polygon_cell_distance() {
        let cell = Cell::polygon_3d(
            &[
                pt(&[0.0, 0.0, 1.0]),
                pt(&[1.0, 0.0, 1.0]),
                pt(&[1.0, 1.0, 1.0]),
                pt(&[0.0, 1.0, 1.0]),
            ],
            BoundaryConditionTag::Neumann,
        )
        .unwrap();
        assert!((cell.distance(&pt(&[0.5, 0.5, 3.0])) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn transform_mirrors_a_segment_cell() {
        let cell = Cell::segment_2d(
            &pt(&[0.0, 1.0]),
            &pt(&[2.0, 1.0]),
            BoundaryConditionTag::Neumann,
        )
        .unwrap();
        let mirror = Hyperplane::new(pt(&[0.0, 1.0]), 0.0).unwrap();
        let image = cell.transform(&Isometry::reflection(&mirror));
        let mut vs = image.world_vertices();
        super::super::polytope::sort_points(&mut vs);
        assert!((&vs[0] - pt(&[0.0, -1.0])).norm() < 1e-12);
        assert!((&vs[1] - pt(&[2.0, -1.0])).norm() < 1e-12);
        assert_eq!(image.bc(), BoundaryConditionTag::Neumann);
    }
}
