//! Square-cell grids over a centred box with deterministic BFS flood fill;
//! the backing for complement connectivity, region construction and escape
//! paths in 2D.

use super::{GeomError, Point, PolyhedralScatterer};
use std::collections::VecDeque;

/// A uniform grid of square cells covering `[-half_width, half_width]^2`.
#[derive(Clone, Debug)]
pub struct Grid2 {
    half_width: f64,
    res: f64,
    n: usize,
}

impl Grid2 {
    pub fn new(half_width: f64, res: f64) -> Result<Self, GeomError> {
        if !(res > 0.0) || !res.is_finite() {
            return Err(GeomError::InvalidResolution(res));
        }
        let side = (2.0 * half_width / res).ceil();
        if side * side > 6.4e7 {
            return Err(GeomError::GridTooFine {
                cells: (side * side) as u64,
            });
        }
        let n = (side as usize).max(3);
        Ok(Self { half_width, res, n })
    }

    pub fn res(&self) -> f64 {
        self.res
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn center(&self, idx: usize) -> Point {
        let (i, j) = (idx % self.n, idx / self.n);
        let step = 2.0 * self.half_width / self.n as f64;
        Point::from_vec(vec![
            -self.half_width + (i as f64 + 0.5) * step,
            -self.half_width + (j as f64 + 0.5) * step,
        ])
    }

    /// Cell containing `p`, or `None` outside the box.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        let step = 2.0 * self.half_width / self.n as f64;
        let fx = (p[0] + self.half_width) / step;
        let fy = (p[1] + self.half_width) / step;
        if fx < 0.0 || fy < 0.0 {
            return None;
        }
        let (i, j) = (fx as usize, fy as usize);
        if i >= self.n || j >= self.n {
            return None;
        }
        Some(j * self.n + i)
    }

    pub fn neighbors(&self, idx: usize) -> impl Iterator<Item = usize> {
        let n = self.n;
        let (i, j) = (idx % n, idx / n);
        let mut out: [Option<usize>; 4] = [None; 4];
        if i > 0 {
            out[0] = Some(idx - 1);
        }
        if i + 1 < n {
            out[1] = Some(idx + 1);
        }
        if j > 0 {
            out[2] = Some(idx - n);
        }
        if j + 1 < n {
            out[3] = Some(idx + n);
        }
        out.into_iter().flatten()
    }

    pub fn is_border(&self, idx: usize) -> bool {
        let (i, j) = (idx % self.n, idx / self.n);
        i == 0 || j == 0 || i == self.n - 1 || j == self.n - 1
    }

    /// Marks every cell whose predicate holds at the cell centre.
    pub fn mark(&self, pred: impl Fn(&Point) -> bool) -> Vec<bool> {
        (0..self.cells()).map(|i| pred(&self.center(i))).collect()
    }

    /// Deterministic BFS over passable cells from the given seeds; the
    /// optional `step_allowed` filter vetoes individual moves (used to forbid
    /// crossing a line component).
    pub fn flood(
        &self,
        seeds: &[usize],
        passable: &[bool],
        step_allowed: impl Fn(usize, usize) -> bool,
    ) -> Vec<bool> {
        let mut visited = vec![false; self.cells()];
        let mut queue = VecDeque::new();
        for &s in seeds {
            if passable[s] && !visited[s] {
                visited[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(cur) = queue.pop_front() {
            for nb in self.neighbors(cur) {
                if !visited[nb] && passable[nb] && step_allowed(cur, nb) {
                    visited[nb] = true;
                    queue.push_back(nb);
                }
            }
        }
        visited
    }

    /// BFS shortest path (in cells) from `start` to any cell satisfying
    /// `target`, as a polyline of cell centres.
    pub fn path_to(
        &self,
        start: usize,
        passable: &[bool],
        target: impl Fn(usize) -> bool,
    ) -> Option<Vec<Point>> {
        if !passable[start] {
            return None;
        }
        let mut parent: Vec<usize> = vec![usize::MAX; self.cells()];
        parent[start] = start;
        let mut queue = VecDeque::new();
        queue.push_back(start);
        let mut found = None;
        'search: while let Some(cur) = queue.pop_front() {
            if target(cur) {
                found = Some(cur);
                break 'search;
            }
            for nb in self.neighbors(cur) {
                if passable[nb] && parent[nb] == usize::MAX {
                    parent[nb] = cur;
                    queue.push_back(nb);
                }
            }
        }
        let mut cur = found?;
        let mut path = vec![self.center(cur)];
        while parent[cur] != cur {
            cur = parent[cur];
            path.push(self.center(cur));
        }
        path.reverse();
        Some(path)
    }

    /// Conservative blocked test: the cell may intersect the scatterer when
    /// the centre is within half the cell diagonal of it.
    pub fn blocked_by(&self, scatterer: &PolyhedralScatterer) -> Vec<bool> {
        let margin = self.res * std::f64::consts::SQRT_2 / 2.0;
        self.mark(|c| scatterer.distance(c) <= margin)
    }
}

/// Grid flood-fill verdict on the connectivity of the complement of a 2D
/// scatterer, over the box enclosing `B_{R0+1}` with every exterior border
/// cell seeded. Conservative: `false` only means some free cell was
/// unreachable at this resolution.
pub fn complement_connected_2d(
    scatterer: &PolyhedralScatterer,
    resolution: f64,
) -> Result<bool, GeomError> {
    if scatterer.dim() != 2 {
        return Err(GeomError::UnsupportedDimension(scatterer.dim()));
    }
    let grid = Grid2::new(scatterer.bounding_radius() + 1.0, resolution)?;
    let blocked = grid.blocked_by(scatterer);
    let passable: Vec<bool> = blocked.iter().map(|b| !b).collect();
    let seeds: Vec<usize> = (0..grid.cells())
        .filter(|&i| grid.is_border(i) && passable[i])
        .collect();
    let visited = grid.flood(&seeds, &passable, |_, _| true);
    Ok((0..grid.cells()).all(|i| !passable[i] || visited[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Cell, ConvexPolytope};
    use crate::waves::BoundaryConditionTag as Bc;

    fn pt(coords: &[f64]) -> Point {
        Point::from_vec(coords.to_vec())
    }

    fn screen(a: [f64; 2], b: [f64; 2]) -> Cell {
        Cell::segment_2d(&pt(&a), &pt(&b), Bc::Dirichlet).unwrap()
    }

    #[test]
    fn single_square_complement_connected() {
        let s = PolyhedralScatterer::new(
            2,
            vec![ConvexPolytope::axis_box(&[-0.5, -0.5], &[0.5, 0.5]).unwrap()],
            vec![],
        )
        .unwrap();
        assert!(complement_connected_2d(&s, 0.05).unwrap());
    }

    #[test]
    fn closed_box_of_screens_disconnects() {
        // Four screens forming a closed box: the interior pocket is
        // unreachable. Verdict agrees across two resolutions.
        let s = PolyhedralScatterer::new(
            2,
            vec![],
            vec![
                screen([-1.0, -1.0], [1.0, -1.0]),
                screen([1.0, -1.0], [1.0, 1.0]),
                screen([1.0, 1.0], [-1.0, 1.0]),
                screen([-1.0, 1.0], [-1.0, -1.0]),
            ],
        )
        .unwrap();
        assert!(!complement_connected_2d(&s, 0.05).unwrap());
        assert!(!complement_connected_2d(&s, 0.025).unwrap());
    }

    #[test]
    fn open_c_box_stays_connected() {
        // C-shaped open box: the pocket leaks through the opening.
        let s = PolyhedralScatterer::new(
            2,
            vec![],
            vec![
                screen([-1.0, -1.0], [1.0, -1.0]),
                screen([1.0, -1.0], [1.0, 1.0]),
                screen([1.0, 1.0], [-1.0, 1.0]),
                // Left side open between y = -0.2 and y = 1.
                screen([-1.0, -1.0], [-1.0, -0.2]),
            ],
        )
        .unwrap();
        assert!(complement_connected_2d(&s, 0.05).unwrap());
        assert!(complement_connected_2d(&s, 0.025).unwrap());
    }

    #[test]
    fn invalid_resolution_rejected() {
        let s = PolyhedralScatterer::empty(2);
        assert!(matches!(
            complement_connected_2d(&s, 0.0),
            Err(GeomError::InvalidResolution(_))
        ));
        assert!(matches!(
            complement_connected_2d(&s, 1e-9),
            Err(GeomError::GridTooFine { .. })
        ));
    }
}
