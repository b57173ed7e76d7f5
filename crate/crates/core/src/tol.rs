//! Central numeric tolerances.
//!
//! All thresholds assume coordinates of magnitude at most `1e3`; inputs far
//! outside that range degrade the guarantees of the dedup and feasibility
//! checks below.

/// Unit-norm and orthonormality checks on constructed vectors and frames.
pub const UNIT_TOL: f64 = 1e-12;

/// Hyperplane deduplication: two canonical hyperplanes are the same when the
/// chord distance between their unit normals and the difference of their
/// offsets are both below this.
pub const DEDUP_TOL: f64 = 1e-9;

/// Singular-value threshold for every rank decision (normal spans,
/// vertex normal-span property, subspace intersections).
pub const RANK_SV_TOL: f64 = 1e-9;

/// Feasibility slack for polytope vertex enumeration and containment.
pub const FEAS_TOL: f64 = 1e-9;

/// Measure threshold below which an intersection or face piece counts as
/// degenerate and is discarded.
pub const MEASURE_TOL: f64 = 1e-9;

/// A point lies on a hyperplane when its signed distance is below this.
pub const ON_PLANE_TOL: f64 = 1e-10;

/// Boundary-operator moduli at or below this count as vanishing on
/// unit-amplitude waves.
pub const VANISH_TOL: f64 = 1e-9;

/// Dedup tolerance on isometry entries (matrix and translation) when closing
/// a reflection group.
pub const ISOMETRY_TOL: f64 = 1e-9;

/// Two sets are at positive distance (disjoint) when their set distance
/// exceeds this.
pub const DISJOINT_TOL: f64 = 1e-9;
