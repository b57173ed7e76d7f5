//! Geometry of polyhedral scatterers and the reflection machinery built on it:
//! reflection-group closure, constructive flat-point tracing, plane-wave
//! boundary operators for acoustic/electromagnetic/elastic waves, and
//! certification of how many incident-wave measurements suffice for a
//! uniqueness argument to apply.
//!
//! The crate is organised around six parts:
//! - [`geom`]: exact-tolerance geometric kernel (hyperplanes, reflections,
//!   convex polytopes, scatterers, face complexes, 2D grid connectivity);
//! - [`refgroup`]: reflection-hyperplane sets, closure under mutual
//!   reflection, the generated isometry group, sectors, symmetrization;
//! - [`trace`]: flat points, symmetric regions `E(x)` and the iterative
//!   trace to a reflection-hyperplane witness (exact in 2D);
//! - [`waves`]: plane-wave fields, boundary operators and reflection
//!   operators for the six supported boundary conditions;
//! - [`certify`]: measurement-sufficiency certificates with analytic and
//!   sampled decision paths;
//! - [`scene`] / [`report`] / [`render`] / [`run`]: the JSON scene format,
//!   canonical reports, SVG rendering and command dispatch shared by the
//!   CLI and the C API.

pub mod certify;
pub mod geom;
pub mod refgroup;
pub mod render;
pub mod report;
pub mod run;
pub mod scene;
pub mod tol;
pub mod trace;
pub mod waves;

pub use geom::{Cell, ConvexPolytope, HalfSpace, Hyperplane, Isometry, PolyhedralScatterer};
pub use waves::{BoundaryConditionTag, IncidentWave, WaveFamily};
