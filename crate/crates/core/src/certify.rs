//! Measurement-sufficiency certification.
//!
//! For a plan (scatterer class, allowed boundary conditions, incident waves)
//! the certifier decides whether the sufficiency criterion holds: no
//! admissible reflection hyperplane lets every wave's boundary-operator
//! modulus vanish (general scatterers), or no N of them with linearly
//! independent normals do (obstacles). `CriterionHolds` certifies the
//! sufficient condition for uniqueness; `CriterionFails` only means the
//! argument does not apply, never that uniqueness actually fails.
//!
//! Analytic paths describe each wave's vanishing-normal set as a finite
//! union of linear subspaces and reduce the decision to rank conditions; a
//! deterministic sampling oracle over the unit sphere provides the
//! independent route and covers mixed elastic waves, whose verdicts are
//! labelled `Sampled`.

use crate::geom::{cross3, Hyperplane, Point};
use crate::tol;
use crate::waves::{
    boundary_modulus_profile, BoundaryConditionTag, IncidentWave, ProfileSampling, WaveError,
    WaveFamily,
};
use nalgebra::DMatrix;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertifyError {
    #[error("plan needs at least one wave and one boundary condition")]
    EmptyPlan,
    #[error("waves must all belong to one family")]
    MixedFamilies,
    #[error("boundary condition {0:?} does not match the wave family {1:?}")]
    BcFamilyMismatch(BoundaryConditionTag, WaveFamily),
    #[error("waves must share frequency and medium parameters")]
    ParameterMismatch,
    #[error("waves must share one ambient dimension")]
    DimensionMismatch,
    #[error("grid density {0} is below the minimum of 64 per great circle")]
    DensityTooLow(usize),
    #[error(transparent)]
    Wave(#[from] WaveError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScattererClass {
    General,
    Obstacle,
}

/// A finite set of incident waves (one per measurement) together with the
/// boundary conditions the unknown scatterer may carry.
#[derive(Clone, Debug)]
pub struct MeasurementPlan {
    pub class: ScattererClass,
    pub allowed_bcs: BTreeSet<BoundaryConditionTag>,
    pub waves: Vec<IncidentWave>,
}

impl MeasurementPlan {
    pub fn new(
        class: ScattererClass,
        allowed_bcs: BTreeSet<BoundaryConditionTag>,
        waves: Vec<IncidentWave>,
    ) -> Result<Self, CertifyError> {
        if allowed_bcs.is_empty() || waves.is_empty() {
            return Err(CertifyError::EmptyPlan);
        }
        let family = waves[0].family();
        if waves.iter().any(|w| w.family() != family) {
            return Err(CertifyError::MixedFamilies);
        }
        for bc in &allowed_bcs {
            if bc.family() != family {
                return Err(CertifyError::BcFamilyMismatch(*bc, family));
            }
        }
        let dim = waves[0].dim();
        if waves.iter().any(|w| w.dim() != dim) {
            return Err(CertifyError::DimensionMismatch);
        }
        let omega = waves[0].omega();
        let params_ok = waves.iter().all(|w| {
            (w.omega() - omega).abs() < 1e-12
                && match (w, &waves[0]) {
                    (IncidentWave::Elastic(a), IncidentWave::Elastic(b)) => {
                        (a.lambda - b.lambda).abs() < 1e-12
                            && (a.mu - b.mu).abs() < 1e-12
                            && (a.rho - b.rho).abs() < 1e-12
                    }
                    _ => true,
                }
        });
        if !params_ok {
            return Err(CertifyError::ParameterMismatch);
        }
        Ok(Self { class, allowed_bcs, waves })
    }

    pub fn dim(&self) -> usize {
        self.waves[0].dim()
    }

    pub fn family(&self) -> WaveFamily {
        self.waves[0].family()
    }
}

/// Per-wave modulus at a decision normal, recorded in certificates.
#[derive(Clone, Debug)]
pub struct ModulusRow {
    pub wave_index: usize,
    pub bc: BoundaryConditionTag,
    pub normal: Point,
    pub modulus: f64,
}

/// One unit normal per hypothetical reflection hyperplane, with the
/// adversarially chosen boundary condition on each.
#[derive(Clone, Debug)]
pub struct Witness {
    pub normals: Vec<Point>,
    pub bcs: Vec<BoundaryConditionTag>,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    /// The criterion holds with the given margin: the smallest, over
    /// adversarial normals (orthonormal frames of them in obstacle mode),
    /// of the largest wave modulus.
    CriterionHolds { margin: f64 },
    /// An admissible normal (or N independent ones) drives every wave's
    /// modulus below the vanishing threshold.
    CriterionFails { witness: Witness },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Analytic,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub verdict: Verdict,
    pub method: Method,
    pub details: Vec<ModulusRow>,
}

impl Certificate {
    pub fn holds(&self) -> bool {
        matches!(self.verdict, Verdict::CriterionHolds { .. })
    }

    pub fn margin(&self) -> Option<f64> {
        match &self.verdict {
            Verdict::CriterionHolds { margin } => Some(*margin),
            Verdict::CriterionFails { .. } => None,
        }
    }
}

/// Decision-path configuration; the defaults match the acceptance setup.
#[derive(Clone, Debug)]
pub struct CertifyConfig {
    /// Sphere sampling density per great circle for the margin search and
    /// the oracle.
    pub grid_density: usize,
    pub seed: u64,
    /// Moduli at or below this vanish.
    pub vanish_threshold: f64,
    /// Sampling policy for non-constant (mixed elastic) profiles inside the
    /// sphere search.
    pub search_profile: ProfileSampling,
    /// Full-accuracy profile for recorded rows and witness validation.
    pub report_profile: ProfileSampling,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            grid_density: 256,
            seed: 0,
            vanish_threshold: tol::VANISH_TOL,
            search_profile: ProfileSampling {
                exclude_radius: 1.0,
                extent: 10.0,
                points_per_unit: 16,
            },
            report_profile: ProfileSampling::default(),
        }
    }
}

/// Exact description of `{ nu : |B u^i| = 0 on planes with normal nu }`.
#[derive(Clone, Debug)]
pub enum VanishingSet {
    Empty,
    /// Finite union of linear subspaces, each given by an orthonormal basis
    /// (columns).
    Subspaces(Vec<DMatrix<f64>>),
    /// No analytic description is derived (mixed elastic waves); the
    /// sampling oracle decides.
    Sampled,
}

/// Analytic vanishing-normal sets, where derivable:
/// Dirichlet: empty. Neumann: the hyperplane of normals orthogonal to `d`.
/// PEC / PMC: the line spanned by `q x d` / `p x d`. Elastic pure
/// longitudinal: `d`-orthogonal hyperplane for the third condition, empty
/// for the fourth. Elastic pure transversal: the subspace orthogonal to both
/// `d` and `q` for the third condition, the line spanned by `q` for the
/// fourth. Mixed elastic: sampled.
pub fn vanishing_normal_set(
    bc: BoundaryConditionTag,
    wave: &IncidentWave,
) -> Result<VanishingSet, CertifyError> {
    if !wave.compatible_with(bc) {
        return Err(CertifyError::BcFamilyMismatch(bc, wave.family()));
    }
    let n = wave.dim();
    let set = match (bc, wave) {
        (BoundaryConditionTag::Dirichlet, _) => VanishingSet::Empty,
        (BoundaryConditionTag::Neumann, IncidentWave::Acoustic(w)) => {
            subspaces_or_empty(vec![complement_of_span(&[w.direction.clone()], n)])
        }
        (BoundaryConditionTag::PerfectElectric, IncidentWave::Electromagnetic(w)) => {
            let v = cross3(&w.q(), &w.direction);
            subspaces_or_empty(vec![span_of(&[v])])
        }
        (BoundaryConditionTag::PerfectMagnetic, IncidentWave::Electromagnetic(w)) => {
            let v = cross3(&w.polarisation, &w.direction);
            subspaces_or_empty(vec![span_of(&[v])])
        }
        (bc, IncidentWave::Elastic(w)) if w.is_pure_longitudinal() => match bc {
            BoundaryConditionTag::ElasticThird => {
                subspaces_or_empty(vec![complement_of_span(&[w.direction.clone()], n)])
            }
            BoundaryConditionTag::ElasticFourth => VanishingSet::Empty,
            _ => unreachable!("family checked above"),
        },
        (bc, IncidentWave::Elastic(w)) if w.is_pure_transversal() => match bc {
            BoundaryConditionTag::ElasticThird => subspaces_or_empty(vec![complement_of_span(
                &[w.direction.clone(), w.transversal.clone()],
                n,
            )]),
            BoundaryConditionTag::ElasticFourth => {
                subspaces_or_empty(vec![span_of(&[w.transversal.clone()])])
            }
            _ => unreachable!("family checked above"),
        },
        (_, IncidentWave::Elastic(_)) => VanishingSet::Sampled,
        _ => unreachable!("family checked above"),
    };
    Ok(set)
}

fn span_of(vectors: &[Point]) -> DMatrix<f64> {
    let n = vectors[0].len();
    let mut m = DMatrix::zeros(n, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = v[i];
        }
    }
    orthonormalize(&m)
}

/// Orthonormal basis of the column space.
fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    let mut cols: Vec<Point> = Vec::new();
    for j in 0..m.ncols() {
        let mut v = Point::from_iterator(n, m.column(j).iter().cloned());
        for b in &cols {
            let d = b.dot(&v);
            v -= b * d;
        }
        let norm = v.norm();
        if norm > tol::RANK_SV_TOL {
            cols.push(v / norm);
        }
    }
    let mut out = DMatrix::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = c[i];
        }
    }
    out
}

fn complement_of_span(vectors: &[Point], n: usize) -> DMatrix<f64> {
    let span = span_of(vectors);
    complement(&span, n)
}

fn complement(basis: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    let mut cols: Vec<Point> = (0..basis.ncols())
        .map(|j| Point::from_iterator(n, basis.column(j).iter().cloned()))
        .collect();
    let mut out_cols: Vec<Point> = Vec::new();
    for i in 0..n {
        let mut e = Point::zeros(n);
        e[i] = 1.0;
        for b in cols.iter().chain(out_cols.iter()) {
            let d = b.dot(&e);
            e -= b * d;
        }
        let norm = e.norm();
        if norm > tol::RANK_SV_TOL {
            out_cols.push(e / norm);
        }
    }
    cols.clear();
    let mut out = DMatrix::zeros(n, out_cols.len());
    for (j, c) in out_cols.iter().enumerate() {
        for i in 0..n {
            out[(i, j)] = c[i];
        }
    }
    out
}

fn intersect_subspaces(a: &DMatrix<f64>, b: &DMatrix<f64>, n: usize) -> DMatrix<f64> {
    // span(a) ∩ span(b) = complement(complement(a) ∪ complement(b)).
    let ca = complement(a, n);
    let cb = complement(b, n);
    let mut stacked = DMatrix::zeros(n, ca.ncols() + cb.ncols());
    for j in 0..ca.ncols() {
        stacked.set_column(j, &ca.column(j).into_owned());
    }
    for j in 0..cb.ncols() {
        stacked.set_column(ca.ncols() + j, &cb.column(j).into_owned());
    }
    complement(&orthonormalize(&stacked), n)
}

fn subspaces_or_empty(pieces: Vec<DMatrix<f64>>) -> VanishingSet {
    let pieces: Vec<DMatrix<f64>> = pieces.into_iter().filter(|p| p.ncols() > 0).collect();
    if pieces.is_empty() {
        VanishingSet::Empty
    } else {
        VanishingSet::Subspaces(pieces)
    }
}

fn same_subspace(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    if a.ncols() != b.ncols() {
        return false;
    }
    // Equal iff projecting b's basis onto a's span keeps full norm.
    for j in 0..b.ncols() {
        let v = b.column(j);
        let mut residual = v.into_owned();
        for i in 0..a.ncols() {
            let ai = a.column(i);
            let d = ai.dot(&residual);
            residual -= ai * d;
        }
        if residual.norm() > 1e-9 {
            return false;
        }
    }
    true
}

/// The admissible vanishing directions of a plan: for each allowed boundary
/// condition, the intersection over all waves of their vanishing sets, as a
/// union of (bc-tagged) subspaces. `None` when some pair has no analytic
/// description.
fn plan_vanishing_pieces(
    plan: &MeasurementPlan,
) -> Result<Option<Vec<(BoundaryConditionTag, DMatrix<f64>)>>, CertifyError> {
    let n = plan.dim();
    let mut out: Vec<(BoundaryConditionTag, DMatrix<f64>)> = Vec::new();
    for &bc in &plan.allowed_bcs {
        // Start from the full space and intersect wave by wave.
        let mut pieces: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
        for wave in &plan.waves {
            let set = vanishing_normal_set(bc, wave)?;
            let wave_pieces = match set {
                VanishingSet::Empty => Vec::new(),
                VanishingSet::Subspaces(s) => s,
                VanishingSet::Sampled => return Ok(None),
            };
            let mut next: Vec<DMatrix<f64>> = Vec::new();
            for p in &pieces {
                for s in &wave_pieces {
                    let q = intersect_subspaces(p, s, n);
                    if q.ncols() > 0 && !next.iter().any(|r| same_subspace(r, &q)) {
                        next.push(q);
                    }
                }
            }
            pieces = next;
            if pieces.is_empty() {
                break;
            }
        }
        for p in pieces {
            if !out
                .iter()
                .any(|(obc, op)| *obc == bc && same_subspace(op, &p))
            {
                out.push((bc, p));
            }
        }
    }
    Ok(Some(out))
}

fn canonical_unit(v: &Point) -> Point {
    let mut u = v / v.norm();
    for i in 0..u.len() {
        if u[i].abs() > tol::DEDUP_TOL {
            if u[i] < 0.0 {
                u = -u;
            }
            break;
        }
    }
    u
}

/// Modulus of one wave's boundary operator on a hyperplane with normal `nu`
/// through the origin.
fn wave_modulus(
    bc: BoundaryConditionTag,
    wave: &IncidentWave,
    nu: &Point,
    profile: &ProfileSampling,
) -> Result<f64, CertifyError> {
    let plane = Hyperplane::new(nu.clone(), 0.0).map_err(|_| CertifyError::EmptyPlan)?;
    Ok(boundary_modulus_profile(bc, wave, &plane, profile)?.value())
}

/// The adversary's value at one normal: the best (smallest) over allowed
/// boundary conditions of the worst (largest) wave modulus.
fn adversary_value(
    plan: &MeasurementPlan,
    nu: &Point,
    profile: &ProfileSampling,
) -> Result<(f64, BoundaryConditionTag), CertifyError> {
    let mut best = f64::INFINITY;
    let mut best_bc = *plan.allowed_bcs.iter().next().unwrap();
    for &bc in &plan.allowed_bcs {
        let mut worst = 0.0f64;
        for wave in &plan.waves {
            worst = worst.max(wave_modulus(bc, wave, nu, profile)?);
        }
        if worst < best {
            best = worst;
            best_bc = bc;
        }
    }
    Ok((best, best_bc))
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn seed_rotation(dim: usize, seed: u64) -> DMatrix<f64> {
    let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
    let mut angle = || {
        let u = splitmix64(&mut state) as f64 / u64::MAX as f64;
        u * std::f64::consts::TAU
    };
    match dim {
        2 => {
            let a = angle();
            DMatrix::from_row_slice(2, 2, &[a.cos(), -a.sin(), a.sin(), a.cos()])
        }
        3 => {
            let (a, b, c) = (angle(), angle(), angle());
            let rz = DMatrix::from_row_slice(
                3,
                3,
                &[a.cos(), -a.sin(), 0.0, a.sin(), a.cos(), 0.0, 0.0, 0.0, 1.0],
            );
            let ry = DMatrix::from_row_slice(
                3,
                3,
                &[b.cos(), 0.0, b.sin(), 0.0, 1.0, 0.0, -b.sin(), 0.0, b.cos()],
            );
            let rx = DMatrix::from_row_slice(
                3,
                3,
                &[1.0, 0.0, 0.0, 0.0, c.cos(), -c.sin(), 0.0, c.sin(), c.cos()],
            );
            rz * ry * rx
        }
        _ => DMatrix::identity(dim, dim),
    }
}

/// Deterministic unit-sphere grid: uniform angles on the circle in 2D, a
/// Fibonacci lattice in 3D, rotated by a seed-derived rotation.
fn sphere_grid(dim: usize, density: usize, seed: u64) -> Vec<Point> {
    let rot = seed_rotation(dim, seed);
    match dim {
        2 => (0..density)
            .map(|k| {
                let theta = std::f64::consts::PI * (k as f64 + 0.5) / density as f64;
                &rot * Point::from_vec(vec![theta.cos(), theta.sin()])
            })
            .collect(),
        3 => {
            let count =
                ((density as f64) * (density as f64) / std::f64::consts::PI).ceil() as usize;
            let golden = (1.0 + 5.0f64.sqrt()) / 2.0;
            (0..count)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = std::f64::consts::TAU * (k as f64 / golden).fract();
                    &rot * Point::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

/// Shrinking pattern search on the sphere around `start`. Probes the
/// tangent axes and their diagonals; max-of-moduli objectives have V-shaped
/// valleys that stall axis-only searches.
fn refine_on_sphere(
    plan: &MeasurementPlan,
    start: &Point,
    start_value: f64,
    profile: &ProfileSampling,
) -> Result<(Point, f64), CertifyError> {
    let mut best = start.clone();
    let mut best_value = start_value;
    let mut delta = 0.1f64;
    // The probe budget bounds zigzag walks along shallow valleys.
    let mut budget = 6000usize;
    while delta > 1e-12 && budget > 0 {
        let mut improved = false;
        let tangents = tangent_frame(&best);
        let mut probes: Vec<Point> = Vec::with_capacity(4);
        probes.extend(tangents.iter().cloned());
        if tangents.len() == 2 {
            let half = std::f64::consts::FRAC_1_SQRT_2;
            probes.push((&tangents[0] + &tangents[1]) * half);
            probes.push((&tangents[0] - &tangents[1]) * half);
        }
        for t in &probes {
            for sign in [-1.0, 1.0] {
                budget = budget.saturating_sub(1);
                let candidate = canonical_unit(&(&best + t * (sign * delta)));
                let (v, _) = adversary_value(plan, &candidate, profile)?;
                if v < best_value - 1e-16 {
                    best_value = v;
                    best = candidate;
                    improved = true;
                }
            }
        }
        if !improved {
            delta *= 0.5;
        }
    }
    Ok((best, best_value))
}

fn tangent_frame(nu: &Point) -> Vec<Point> {
    let plane = Hyperplane::new(nu.clone(), 0.0).expect("unit normal");
    plane.tangent_basis()
}

/// Deterministic Nelder-Mead polish in the tangent chart of the sphere
/// (3D only). The simplex adapts its shape to the V-shaped valleys of
/// max-of-moduli objectives, which stall axis-aligned pattern searches.
fn nelder_mead_on_sphere(
    plan: &MeasurementPlan,
    start: &Point,
    start_value: f64,
    profile: &ProfileSampling,
) -> Result<(Point, f64), CertifyError> {
    if start.len() != 3 {
        return Ok((start.clone(), start_value));
    }
    let mut center = start.clone();
    let mut best_point = start.clone();
    let mut best_value = start_value;
    for _round in 0..4 {
        let tangents = tangent_frame(&center);
        let chart = |u: &[f64; 2]| -> Point {
            let v = &center + &tangents[0] * u[0] + &tangents[1] * u[1];
            v.clone() / v.norm()
        };
        let eval = |u: &[f64; 2]| -> Result<f64, CertifyError> {
            Ok(adversary_value(plan, &chart(u), profile)?.0)
        };
        let delta = 0.02f64;
        let mut simplex: Vec<([f64; 2], f64)> = vec![
            ([0.0, 0.0], eval(&[0.0, 0.0])?),
            ([delta, 0.0], eval(&[delta, 0.0])?),
            ([0.0, delta], eval(&[0.0, delta])?),
        ];
        for _iter in 0..250 {
            simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
            let spread = (simplex[2].1 - simplex[0].1).abs();
            let size = {
                let d1 = (simplex[1].0[0] - simplex[0].0[0]).hypot(simplex[1].0[1] - simplex[0].0[1]);
                let d2 = (simplex[2].0[0] - simplex[0].0[0]).hypot(simplex[2].0[1] - simplex[0].0[1]);
                d1.max(d2)
            };
            if size < 1e-14 && spread < 1e-15 {
                break;
            }
            let centroid = [
                (simplex[0].0[0] + simplex[1].0[0]) / 2.0,
                (simplex[0].0[1] + simplex[1].0[1]) / 2.0,
            ];
            let worst = simplex[2];
            let reflect = [
                centroid[0] + (centroid[0] - worst.0[0]),
                centroid[1] + (centroid[1] - worst.0[1]),
            ];
            let fr = eval(&reflect)?;
            if fr < simplex[0].1 {
                let expand = [
                    centroid[0] + 2.0 * (reflect[0] - centroid[0]),
                    centroid[1] + 2.0 * (reflect[1] - centroid[1]),
                ];
                let fe = eval(&expand)?;
                simplex[2] = if fe < fr { (expand, fe) } else { (reflect, fr) };
            } else if fr < simplex[1].1 {
                simplex[2] = (reflect, fr);
            } else {
                let contract = [
                    centroid[0] + 0.5 * (worst.0[0] - centroid[0]),
                    centroid[1] + 0.5 * (worst.0[1] - centroid[1]),
                ];
                let fc = eval(&contract)?;
                if fc < worst.1 {
                    simplex[2] = (contract, fc);
                } else {
                    // Shrink towards the best vertex.
                    for i in 1..3 {
                        let u = [
                            simplex[0].0[0] + 0.5 * (simplex[i].0[0] - simplex[0].0[0]),
                            simplex[0].0[1] + 0.5 * (simplex[i].0[1] - simplex[0].0[1]),
                        ];
                        simplex[i] = (u, eval(&u)?);
                    }
                }
            }
        }
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
        if simplex[0].1 < best_value {
            best_value = simplex[0].1;
            best_point = chart(&simplex[0].0);
        }
        center = best_point.clone();
    }
    Ok((best_point, best_value))
}

/// Global minimisation of the adversary value over the unit sphere:
/// deterministic grid, then shrinking local refinement from the best few
/// well-separated basins.
fn min_max_over_sphere(
    plan: &MeasurementPlan,
    config: &CertifyConfig,
) -> Result<(Point, f64, BoundaryConditionTag), CertifyError> {
    if config.grid_density < 64 {
        return Err(CertifyError::DensityTooLow(config.grid_density));
    }
    let grid = sphere_grid(plan.dim(), config.grid_density, config.seed);
    let mut scored: Vec<(f64, usize)> = Vec::with_capacity(grid.len());
    for (i, nu) in grid.iter().enumerate() {
        let (v, _) = adversary_value(plan, nu, &config.search_profile)?;
        scored.push((v, i));
    }
    scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    // Multi-start: the best points at pairwise angle > 0.2 rad, up to 6.
    let mut starts: Vec<(Point, f64)> = Vec::new();
    for &(v, i) in &scored {
        let nu = &grid[i];
        if starts
            .iter()
            .all(|(s, _)| s.dot(nu).abs() < (0.2f64).cos())
        {
            starts.push((nu.clone(), v));
            if starts.len() == 6 {
                break;
            }
        }
    }
    let mut best: Option<(Point, f64)> = None;
    for (s, v) in &starts {
        let (nu, value) = refine_on_sphere(plan, s, *v, &config.search_profile)?;
        let (nu, value) = nelder_mead_on_sphere(plan, &nu, value, &config.search_profile)?;
        if best.as_ref().map_or(true, |(_, bv)| value < *bv) {
            best = Some((nu, value));
        }
    }
    let (nu, value) = best.expect("at least one start");
    let nu = canonical_unit(&nu);
    let (value_full, bc) = adversary_value(plan, &nu, &config.report_profile)?;
    Ok((nu, value.min(value_full), bc))
}

/// Minimisation of `max_j value(nu_j)` over orthonormal N-frames: the
/// obstacle margin. Coarse frame grid plus shrinking rotation refinement.
fn frame_min_max(
    plan: &MeasurementPlan,
    config: &CertifyConfig,
) -> Result<(Vec<Point>, f64), CertifyError> {
    let n = plan.dim();
    let profile = &config.search_profile;
    let frame_value = |frame: &[Point]| -> Result<f64, CertifyError> {
        let mut worst = 0.0f64;
        for nu in frame {
            let (v, _) = adversary_value(plan, nu, profile)?;
            worst = worst.max(v);
        }
        Ok(worst)
    };
    let rotate_2d = |theta: f64| -> Vec<Point> {
        vec![
            Point::from_vec(vec![theta.cos(), theta.sin()]),
            Point::from_vec(vec![-theta.sin(), theta.cos()]),
        ]
    };
    let mut best_frame;
    let mut best_value = f64::INFINITY;
    match n {
        2 => {
            best_frame = rotate_2d(0.0);
            let steps = config.grid_density.max(64);
            for k in 0..steps {
                let theta = std::f64::consts::FRAC_PI_2 * k as f64 / steps as f64;
                let frame = rotate_2d(theta);
                let v = frame_value(&frame)?;
                if v < best_value {
                    best_value = v;
                    best_frame = frame;
                }
            }
            // Shrinking refinement over the single angle.
            let mut theta_best = {
                let f = &best_frame[0];
                f[1].atan2(f[0])
            };
            let mut delta = std::f64::consts::FRAC_PI_2 / steps as f64;
            let mut budget = 4000usize;
            while delta > 1e-12 && budget > 0 {
                let mut improved = false;
                for sign in [-1.0, 1.0] {
                    budget = budget.saturating_sub(1);
                    let theta = theta_best + sign * delta;
                    let frame = rotate_2d(theta);
                    let v = frame_value(&frame)?;
                    if v < best_value - 1e-16 {
                        best_value = v;
                        best_frame = frame;
                        theta_best = theta;
                        improved = true;
                    }
                }
                if !improved {
                    delta *= 0.5;
                }
            }
        }
        _ => {
            // Coarse deterministic SO(3) grid: first axis from a Fibonacci
            // lattice, second from a circle in its orthogonal plane.
            const FRAME_DENSITY: usize = 24;
            let firsts = sphere_grid(3, FRAME_DENSITY, config.seed);
            best_frame = vec![
                Point::from_vec(vec![1.0, 0.0, 0.0]),
                Point::from_vec(vec![0.0, 1.0, 0.0]),
                Point::from_vec(vec![0.0, 0.0, 1.0]),
            ];
            for nu1 in &firsts {
                let tangents = tangent_frame(nu1);
                for k in 0..FRAME_DENSITY {
                    let theta = std::f64::consts::FRAC_PI_2 * k as f64 / FRAME_DENSITY as f64;
                    let nu2 = &tangents[0] * theta.cos() + &tangents[1] * theta.sin();
                    let nu3 = cross3(nu1, &nu2);
                    let frame = vec![nu1.clone(), nu2, nu3];
                    let v = frame_value(&frame)?;
                    if v < best_value {
                        best_value = v;
                        best_frame = frame;
                    }
                }
            }
            // Refinement: small rotations about the three frame axes.
            let mut delta = std::f64::consts::FRAC_PI_2 / FRAME_DENSITY as f64;
            let mut budget = 6000usize;
            while delta > 1e-10 && budget > 0 {
                let mut improved = false;
                for axis in 0..3 {
                    for sign in [-1.0, 1.0] {
                        budget = budget.saturating_sub(1);
                        let rot = rotation_about(&best_frame[axis], sign * delta);
                        let frame: Vec<Point> =
                            best_frame.iter().map(|v| &rot * v).collect();
                        let v = frame_value(&frame)?;
                        if v < best_value - 1e-16 {
                            best_value = v;
                            best_frame = frame;
                            improved = true;
                        }
                    }
                }
                if !improved {
                    delta *= 0.5;
                }
            }
        }
    }
    Ok((best_frame.iter().map(canonical_unit).collect(), best_value))
}

fn rotation_about(axis: &Point, angle: f64) -> DMatrix<f64> {
    let (c, s) = (angle.cos(), angle.sin());
    let u = axis / axis.norm();
    let mut m = DMatrix::zeros(3, 3);
    for i in 0..3 {
        for j in 0..3 {
            let mut v = (1.0 - c) * u[i] * u[j];
            if i == j {
                v += c;
            }
            m[(i, j)] = v;
        }
    }
    m[(0, 1)] -= s * u[2];
    m[(0, 2)] += s * u[1];
    m[(1, 0)] += s * u[2];
    m[(1, 2)] -= s * u[0];
    m[(2, 0)] -= s * u[1];
    m[(2, 1)] += s * u[0];
    m
}

fn detail_rows(
    plan: &MeasurementPlan,
    normals: &[(Point, BoundaryConditionTag)],
    profile: &ProfileSampling,
) -> Result<Vec<ModulusRow>, CertifyError> {
    let mut rows = Vec::new();
    for (nu, bc) in normals {
        for (k, wave) in plan.waves.iter().enumerate() {
            rows.push(ModulusRow {
                wave_index: k,
                bc: *bc,
                normal: nu.clone(),
                modulus: wave_modulus(*bc, wave, nu, profile)?,
            });
        }
    }
    Ok(rows)
}

/// Certification for general polyhedral scatterers: the criterion holds iff
/// no unit normal admits a boundary condition under which every wave's
/// modulus profile vanishes.
pub fn certify_general(
    plan: &MeasurementPlan,
    config: &CertifyConfig,
) -> Result<Certificate, CertifyError> {
    match plan_vanishing_pieces(plan)? {
        Some(pieces) => {
            if let Some((bc, basis)) = pieces.first() {
                let nu = canonical_unit(&Point::from_iterator(
                    plan.dim(),
                    basis.column(0).iter().cloned(),
                ));
                let details = detail_rows(plan, &[(nu.clone(), *bc)], &config.report_profile)?;
                debug_assert!(details.iter().all(|r| r.modulus <= config.vanish_threshold));
                return Ok(Certificate {
                    verdict: Verdict::CriterionFails {
                        witness: Witness { normals: vec![nu], bcs: vec![*bc] },
                    },
                    method: Method::Analytic,
                    details,
                });
            }
            // Dirichlet alone has constant modulus exactly 1 for every wave.
            let dirichlet_only = plan.allowed_bcs.len() == 1
                && plan.allowed_bcs.contains(&BoundaryConditionTag::Dirichlet);
            let (nu, margin, bc) = if dirichlet_only {
                let mut e = Point::zeros(plan.dim());
                e[0] = 1.0;
                (canonical_unit(&e), 1.0, BoundaryConditionTag::Dirichlet)
            } else {
                min_max_over_sphere(plan, config)?
            };
            let details = detail_rows(plan, &[(nu, bc)], &config.report_profile)?;
            Ok(Certificate {
                verdict: Verdict::CriterionHolds { margin },
                method: Method::Analytic,
                details,
            })
        }
        None => {
            // Sampled path (mixed elastic).
            let (nu, value, bc) = min_max_over_sphere(plan, config)?;
            let details = detail_rows(plan, &[(nu.clone(), bc)], &config.report_profile)?;
            let verdict = if value <= config.vanish_threshold {
                Verdict::CriterionFails {
                    witness: Witness { normals: vec![nu], bcs: vec![bc] },
                }
            } else {
                Verdict::CriterionHolds { margin: value }
            };
            Ok(Certificate {
                verdict,
                method: Method::Sampled,
                details,
            })
        }
    }
}

/// Certification for polyhedral obstacles: the criterion holds iff the
/// admissible vanishing directions span less than the full space, so no N
/// linearly independent ones exist.
pub fn certify_obstacle(
    plan: &MeasurementPlan,
    config: &CertifyConfig,
) -> Result<Certificate, CertifyError> {
    let n = plan.dim();
    match plan_vanishing_pieces(plan)? {
        Some(pieces) => {
            // Greedy independent normals from the union of the pieces.
            let mut chosen: Vec<(Point, BoundaryConditionTag)> = Vec::new();
            let mut stacked: Vec<Point> = Vec::new();
            for (bc, basis) in &pieces {
                for j in 0..basis.ncols() {
                    let v = Point::from_iterator(n, basis.column(j).iter().cloned());
                    if rank_with(&stacked, &v) > stacked.len() {
                        stacked.push(v.clone());
                        chosen.push((canonical_unit(&v), *bc));
                        if stacked.len() == n {
                            break;
                        }
                    }
                }
                if stacked.len() == n {
                    break;
                }
            }
            if stacked.len() == n {
                let details = detail_rows(plan, &chosen, &config.report_profile)?;
                debug_assert!(details.iter().all(|r| r.modulus <= config.vanish_threshold));
                let (normals, bcs) = chosen.into_iter().unzip();
                return Ok(Certificate {
                    verdict: Verdict::CriterionFails {
                        witness: Witness { normals, bcs },
                    },
                    method: Method::Analytic,
                    details,
                });
            }
            let (frame, margin) = frame_min_max(plan, config)?;
            let rows: Vec<(Point, BoundaryConditionTag)> = frame
                .iter()
                .map(|nu| {
                    let (_, bc) =
                        adversary_value(plan, nu, &config.report_profile).expect("validated plan");
                    (nu.clone(), bc)
                })
                .collect();
            let details = detail_rows(plan, &rows, &config.report_profile)?;
            Ok(Certificate {
                verdict: Verdict::CriterionHolds { margin },
                method: Method::Analytic,
                details,
            })
        }
        None => {
            let outcome = oracle_search(plan, config)?;
            let details = {
                let bcs_for: Vec<(Point, BoundaryConditionTag)> = outcome
                    .normals
                    .iter()
                    .map(|nu| {
                        let (_, bc) = adversary_value(plan, nu, &config.report_profile)
                            .expect("validated plan");
                        (nu.clone(), bc)
                    })
                    .collect();
                detail_rows(plan, &bcs_for, &config.report_profile)?
            };
            let verdict = if outcome.found_independent_vanishing {
                let bcs = outcome
                    .normals
                    .iter()
                    .map(|nu| {
                        adversary_value(plan, nu, &config.report_profile)
                            .map(|(_, bc)| bc)
                            .expect("validated plan")
                    })
                    .collect();
                Verdict::CriterionFails {
                    witness: Witness { normals: outcome.normals, bcs },
                }
            } else {
                Verdict::CriterionHolds { margin: outcome.worst_value }
            };
            Ok(Certificate {
                verdict,
                method: Method::Sampled,
                details,
            })
        }
    }
}

/// One-call certification dispatching on the plan's scatterer class.
pub fn certify(plan: &MeasurementPlan, config: &CertifyConfig) -> Result<Certificate, CertifyError> {
    match plan.class {
        ScattererClass::General => certify_general(plan, config),
        ScattererClass::Obstacle => certify_obstacle(plan, config),
    }
}

fn rank_with(existing: &[Point], candidate: &Point) -> usize {
    let n = candidate.len();
    let mut m = DMatrix::zeros(n, existing.len() + 1);
    for (j, v) in existing.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = v[i];
        }
    }
    for i in 0..n {
        m[(i, existing.len())] = candidate[i];
    }
    m.svd(false, false).rank(1e-6)
}

/// Outcome of the independent sampling search.
#[derive(Clone, Debug)]
pub struct OracleOutcome {
    /// The minimising normal (general) or the best frame / independent
    /// vanishing tuple (obstacle).
    pub normals: Vec<Point>,
    pub worst_value: f64,
    /// Obstacle mode: N independent normals with vanishing moduli exist.
    pub found_independent_vanishing: bool,
}

impl OracleOutcome {
    pub fn verdict_holds(&self, class: ScattererClass, threshold: f64) -> bool {
        match class {
            ScattererClass::General => self.worst_value > threshold,
            ScattererClass::Obstacle => !self.found_independent_vanishing,
        }
    }
}

fn oracle_search(
    plan: &MeasurementPlan,
    config: &CertifyConfig,
) -> Result<OracleOutcome, CertifyError> {
    match plan.class {
        ScattererClass::General => {
            let (nu, value, _) = min_max_over_sphere(plan, config)?;
            Ok(OracleOutcome {
                found_independent_vanishing: value <= config.vanish_threshold,
                normals: vec![nu],
                worst_value: value,
            })
        }
        ScattererClass::Obstacle => {
            let n = plan.dim();
            // Candidate vanishing directions: near-zero grid points, locally
            // refined and thresholded.
            let grid = sphere_grid(n, config.grid_density, config.seed);
            let mut seedlings: Vec<(Point, f64)> = Vec::new();
            for nu in &grid {
                let (v, _) = adversary_value(plan, nu, &config.search_profile)?;
                if v <= 1e-4 {
                    let fresh = !seedlings
                        .iter()
                        .any(|(s, _)| s.dot(nu).abs() > (0.05f64).cos());
                    if fresh && seedlings.len() < 64 {
                        seedlings.push((nu.clone(), v));
                    }
                }
            }
            let mut vanishing: Vec<Point> = Vec::new();
            for (s, v) in &seedlings {
                let (refined, rv) = refine_on_sphere(plan, s, *v, &config.search_profile)?;
                let (refined, rv) =
                    nelder_mead_on_sphere(plan, &refined, rv, &config.search_profile)?;
                if rv <= config.vanish_threshold
                    && !vanishing.iter().any(|u| u.dot(&refined).abs() > 1.0 - 1e-9)
                {
                    vanishing.push(canonical_unit(&refined));
                }
            }
            // Greedy independent subset.
            let mut tuple: Vec<Point> = Vec::new();
            for v in &vanishing {
                if rank_with(&tuple, v) > tuple.len() {
                    tuple.push(v.clone());
                    if tuple.len() == n {
                        break;
                    }
                }
            }
            if tuple.len() == n {
                let mut worst = 0.0f64;
                for nu in &tuple {
                    let (v, _) = adversary_value(plan, nu, &config.report_profile)?;
                    worst = worst.max(v);
                }
                return Ok(OracleOutcome {
                    normals: tuple,
                    worst_value: worst,
                    found_independent_vanishing: true,
                });
            }
            let (frame, value) = frame_min_max(plan, config)?;
            Ok(OracleOutcome {
                normals: frame,
                worst_value: value,
                found_independent_vanishing: false,
            })
        }
    }
}

/// Independent brute-force search over the deterministic sphere grid with
/// local refinement; obstacle mode restricts N-tuples to candidate vanishing
/// sets.
pub fn sampling_oracle(
    plan: &MeasurementPlan,
    grid_density: usize,
    seed: u64,
) -> Result<OracleOutcome, CertifyError> {
    if grid_density < 64 {
        return Err(CertifyError::DensityTooLow(grid_density));
    }
    let config = CertifyConfig {
        grid_density,
        seed,
        ..CertifyConfig::default()
    };
    oracle_search(plan, &config)
}
