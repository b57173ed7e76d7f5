//! Plane-wave incident fields and their boundary operators.
//!
//! Three wave families are supported: acoustic scalar waves (Helmholtz),
//! electromagnetic waves (time-harmonic Maxwell, 3D only) and elastic waves
//! (Navier). Each family pairs with two boundary conditions, and every
//! boundary condition carries a reflection operator that produces the mirror
//! solution used by the flat-point machinery.

mod field;
mod verify;

pub use field::{
    pde_residual, pde_residual_fn, reflect_field, EmPart, ResidualOperator, ScalarPart,
    SuperposedField, VectorPart,
};
pub use verify::{plane_samples, verify_reflection_principle, ReflectionReport};

use crate::geom::{cross3, Hyperplane, Point};
use crate::tol;
use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C = Complex<f64>;
pub type CVector = DVector<C>;

#[derive(Debug, Error)]
pub enum WaveError {
    #[error("direction must be a unit vector")]
    DirectionNotUnit,
    #[error("frequency must be positive")]
    BadFrequency,
    #[error("polarisation must be nonzero and orthogonal to the direction")]
    BadPolarisation,
    #[error("elastic moduli must satisfy mu > 0, lambda + 2 mu > 0, rho > 0")]
    BadElasticModuli,
    #[error("elastic coefficients must satisfy |c_p|^2 + |c_s|^2 = 1")]
    BadElasticCoefficients,
    #[error("boundary condition {bc:?} does not apply to {family:?} waves")]
    FamilyMismatch { bc: BoundaryConditionTag, family: WaveFamily },
    #[error("electromagnetic waves require dimension 3, got {0}")]
    EmNeeds3d(usize),
    #[error("dimension mismatch between wave and argument")]
    DimensionMismatch,
    #[error("normal must be the unit normal of the hyperplane")]
    NormalMismatch,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveFamily {
    Acoustic,
    Electromagnetic,
    Elastic,
}

/// The six boundary conditions: Dirichlet and Neumann for acoustic waves,
/// perfectly electric/magnetic conducting for electromagnetic waves, and the
/// third and fourth conditions for elastic waves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryConditionTag {
    Dirichlet,
    Neumann,
    PerfectElectric,
    PerfectMagnetic,
    ElasticThird,
    ElasticFourth,
}

impl BoundaryConditionTag {
    pub fn family(self) -> WaveFamily {
        match self {
            Self::Dirichlet | Self::Neumann => WaveFamily::Acoustic,
            Self::PerfectElectric | Self::PerfectMagnetic => WaveFamily::Electromagnetic,
            Self::ElasticThird | Self::ElasticFourth => WaveFamily::Elastic,
        }
    }

    pub const ALL: [BoundaryConditionTag; 6] = [
        Self::Dirichlet,
        Self::Neumann,
        Self::PerfectElectric,
        Self::PerfectMagnetic,
        Self::ElasticThird,
        Self::ElasticFourth,
    ];
}

/// Acoustic plane wave `u(x) = exp(i omega x . d)`.
#[derive(Clone, Debug)]
pub struct AcousticWave {
    pub omega: f64,
    pub direction: Point,
}

impl AcousticWave {
    pub fn new(omega: f64, direction: Point) -> Result<Self, WaveError> {
        if !(omega > 0.0) {
            return Err(WaveError::BadFrequency);
        }
        if (direction.norm() - 1.0).abs() > tol::UNIT_TOL {
            return Err(WaveError::DirectionNotUnit);
        }
        Ok(Self { omega, direction })
    }
}

/// Normalised electromagnetic plane wave with incident direction `d`,
/// polarisation `p` (nonzero, orthogonal to `d`) and `q = p x d`:
/// `E = -i omega (q x d) exp(i omega x . d)`, `H = -i omega (p x d) exp(...)`.
#[derive(Clone, Debug)]
pub struct EmWave {
    pub omega: f64,
    pub direction: Point,
    pub polarisation: Point,
}

impl EmWave {
    pub fn new(omega: f64, direction: Point, polarisation: Point) -> Result<Self, WaveError> {
        if direction.len() != 3 || polarisation.len() != 3 {
            return Err(WaveError::EmNeeds3d(direction.len()));
        }
        if !(omega > 0.0) {
            return Err(WaveError::BadFrequency);
        }
        if (direction.norm() - 1.0).abs() > tol::UNIT_TOL {
            return Err(WaveError::DirectionNotUnit);
        }
        if polarisation.norm() <= tol::UNIT_TOL
            || polarisation.dot(&direction).abs() > tol::UNIT_TOL
        {
            return Err(WaveError::BadPolarisation);
        }
        Ok(Self {
            omega,
            direction,
            polarisation,
        })
    }

    /// `q = p x d`.
    pub fn q(&self) -> Point {
        cross3(&self.polarisation, &self.direction)
    }
}

/// Elastic plane wave `c_p d exp(i omega_p d.x) + c_s q exp(i omega_s d.x)`
/// with `omega_p^2 = rho omega^2 / (lambda + 2 mu)` and
/// `omega_s^2 = rho omega^2 / mu`.
#[derive(Clone, Debug)]
pub struct ElasticWave {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
    pub omega: f64,
    pub direction: Point,
    pub transversal: Point,
    pub c_p: C,
    pub c_s: C,
}

impl ElasticWave {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda: f64,
        mu: f64,
        rho: f64,
        omega: f64,
        direction: Point,
        transversal: Point,
        c_p: C,
        c_s: C,
    ) -> Result<Self, WaveError> {
        if !(mu > 0.0) || !(lambda + 2.0 * mu > 0.0) || !(rho > 0.0) {
            return Err(WaveError::BadElasticModuli);
        }
        if !(omega > 0.0) {
            return Err(WaveError::BadFrequency);
        }
        if (direction.norm() - 1.0).abs() > tol::UNIT_TOL {
            return Err(WaveError::DirectionNotUnit);
        }
        if (transversal.norm() - 1.0).abs() > tol::UNIT_TOL
            || transversal.dot(&direction).abs() > tol::UNIT_TOL
        {
            return Err(WaveError::BadPolarisation);
        }
        if (c_p.norm_sqr() + c_s.norm_sqr() - 1.0).abs() > tol::UNIT_TOL {
            return Err(WaveError::BadElasticCoefficients);
        }
        Ok(Self {
            lambda,
            mu,
            rho,
            omega,
            direction,
            transversal,
            c_p,
            c_s,
        })
    }

    /// Pure longitudinal wave (`c_p = 1`), with a deterministic transversal
    /// direction completing the pair.
    pub fn longitudinal(
        lambda: f64,
        mu: f64,
        rho: f64,
        omega: f64,
        direction: Point,
    ) -> Result<Self, WaveError> {
        let q = orthogonal_unit(&direction)?;
        Self::new(lambda, mu, rho, omega, direction, q, C::new(1.0, 0.0), C::new(0.0, 0.0))
    }

    /// Pure transversal wave (`c_s = 1`).
    pub fn transversal(
        lambda: f64,
        mu: f64,
        rho: f64,
        omega: f64,
        direction: Point,
        transversal: Point,
    ) -> Result<Self, WaveError> {
        Self::new(
            lambda,
            mu,
            rho,
            omega,
            direction,
            transversal,
            C::new(0.0, 0.0),
            C::new(1.0, 0.0),
        )
    }

    pub fn omega_p(&self) -> f64 {
        (self.rho * self.omega * self.omega / (self.lambda + 2.0 * self.mu)).sqrt()
    }

    pub fn omega_s(&self) -> f64 {
        (self.rho * self.omega * self.omega / self.mu).sqrt()
    }

    pub fn is_pure_longitudinal(&self) -> bool {
        self.c_s.norm() <= tol::UNIT_TOL
    }

    pub fn is_pure_transversal(&self) -> bool {
        self.c_p.norm() <= tol::UNIT_TOL
    }

    pub fn is_mixed(&self) -> bool {
        !self.is_pure_longitudinal() && !self.is_pure_transversal()
    }
}

fn orthogonal_unit(direction: &Point) -> Result<Point, WaveError> {
    let plane = Hyperplane::through_point(direction.clone(), &Point::zeros(direction.len()))
        .map_err(|_| WaveError::DirectionNotUnit)?;
    Ok(plane.tangent_basis()[0].clone())
}

/// Tagged union over the three wave families.
#[derive(Clone, Debug)]
pub enum IncidentWave {
    Acoustic(AcousticWave),
    Electromagnetic(EmWave),
    Elastic(ElasticWave),
}

impl IncidentWave {
    pub fn family(&self) -> WaveFamily {
        match self {
            Self::Acoustic(_) => WaveFamily::Acoustic,
            Self::Electromagnetic(_) => WaveFamily::Electromagnetic,
            Self::Elastic(_) => WaveFamily::Elastic,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Acoustic(w) => w.direction.len(),
            Self::Electromagnetic(_) => 3,
            Self::Elastic(w) => w.direction.len(),
        }
    }

    pub fn omega(&self) -> f64 {
        match self {
            Self::Acoustic(w) => w.omega,
            Self::Electromagnetic(w) => w.omega,
            Self::Elastic(w) => w.omega,
        }
    }

    pub fn compatible_with(&self, bc: BoundaryConditionTag) -> bool {
        bc.family() == self.family()
    }
}

fn phase(k: f64, d: &Point, x: &Point) -> C {
    C::new(0.0, k * d.dot(x)).exp()
}

fn cvec(dim: usize) -> CVector {
    CVector::from_element(dim, C::new(0.0, 0.0))
}

pub(crate) fn to_complex(v: &Point) -> CVector {
    CVector::from_iterator(v.len(), v.iter().map(|&r| C::new(r, 0.0)))
}

/// Complex cross product with a real second factor.
pub(crate) fn cross3_cr(a: &CVector, b: &Point) -> CVector {
    CVector::from_vec(vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ])
}

/// Closed-form field value. Acoustic waves return a length-1 vector, EM waves
/// the stacked `(E, H)` (length 6), elastic waves the displacement (length N).
pub fn eval_field(wave: &IncidentWave, x: &Point) -> CVector {
    match wave {
        IncidentWave::Acoustic(w) => {
            CVector::from_vec(vec![phase(w.omega, &w.direction, x)])
        }
        IncidentWave::Electromagnetic(w) => {
            let q = w.q();
            let e_amp = cross3(&q, &w.direction);
            let h_amp = cross3(&w.polarisation, &w.direction);
            let ph = phase(w.omega, &w.direction, x) * C::new(0.0, -w.omega);
            let mut out = cvec(6);
            for i in 0..3 {
                out[i] = ph * e_amp[i];
                out[i + 3] = ph * h_amp[i];
            }
            out
        }
        IncidentWave::Elastic(w) => {
            let n = w.direction.len();
            let pp = phase(w.omega_p(), &w.direction, x) * w.c_p;
            let ps = phase(w.omega_s(), &w.direction, x) * w.c_s;
            let mut out = cvec(n);
            for i in 0..n {
                out[i] = pp * w.direction[i] + ps * w.transversal[i];
            }
            out
        }
    }
}

/// Stress tensor and surface traction of an elastic plane wave, from the
/// closed-form `sigma = c_p i w_p e_p (2 mu d d^T + lambda I)
/// + c_s i w_s e_s mu (d q^T + q d^T)` and `Tr = sigma nu`.
pub fn stress_and_traction(
    wave: &ElasticWave,
    x: &Point,
    nu: &Point,
) -> (DMatrix<C>, CVector) {
    let n = wave.direction.len();
    let d = &wave.direction;
    let q = &wave.transversal;
    let cp = wave.c_p * C::new(0.0, wave.omega_p()) * phase(wave.omega_p(), d, x);
    let cs = wave.c_s * C::new(0.0, wave.omega_s()) * phase(wave.omega_s(), d, x);
    let mut sigma = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    for i in 0..n {
        for j in 0..n {
            let long = 2.0 * wave.mu * d[i] * d[j] + if i == j { wave.lambda } else { 0.0 };
            let trans = wave.mu * (d[i] * q[j] + q[i] * d[j]);
            sigma[(i, j)] = cp * long + cs * trans;
        }
    }
    let traction = CVector::from_iterator(
        n,
        (0..n).map(|i| (0..n).map(|j| sigma[(i, j)] * nu[j]).sum::<C>()),
    );
    (sigma, traction)
}

/// Closed-form boundary-operator value of the incident wave at `x` with unit
/// normal `nu`, assembled per family:
/// Dirichlet `u`, Neumann `grad u . nu`, PEC `E x nu`, PMC `H x nu`,
/// elastic third `(u . nu, (Tr u)_tau)` and fourth `(u_tau, Tr u . nu)`.
pub fn eval_boundary_operator(
    bc: BoundaryConditionTag,
    wave: &IncidentWave,
    x: &Point,
    nu: &Point,
) -> Result<CVector, WaveError> {
    if !wave.compatible_with(bc) {
        return Err(WaveError::FamilyMismatch { bc, family: wave.family() });
    }
    if (nu.norm() - 1.0).abs() > 1e-9 {
        return Err(WaveError::NormalMismatch);
    }
    if nu.len() != wave.dim() {
        return Err(WaveError::DimensionMismatch);
    }
    match (bc, wave) {
        (BoundaryConditionTag::Dirichlet, IncidentWave::Acoustic(_)) => Ok(eval_field(wave, x)),
        (BoundaryConditionTag::Neumann, IncidentWave::Acoustic(w)) => {
            let v = phase(w.omega, &w.direction, x)
                * C::new(0.0, w.omega * w.direction.dot(nu));
            Ok(CVector::from_vec(vec![v]))
        }
        (BoundaryConditionTag::PerfectElectric, IncidentWave::Electromagnetic(_)) => {
            let u = eval_field(wave, x);
            let e = CVector::from_vec(vec![u[0], u[1], u[2]]);
            Ok(cross3_cr(&e, nu))
        }
        (BoundaryConditionTag::PerfectMagnetic, IncidentWave::Electromagnetic(_)) => {
            let u = eval_field(wave, x);
            let h = CVector::from_vec(vec![u[3], u[4], u[5]]);
            Ok(cross3_cr(&h, nu))
        }
        (BoundaryConditionTag::ElasticThird, IncidentWave::Elastic(w)) => {
            let n = w.direction.len();
            let ep = phase(w.omega_p(), &w.direction, x) * w.c_p;
            let es = phase(w.omega_s(), &w.direction, x) * w.c_s;
            let d_nu = w.direction.dot(nu);
            let q_nu = w.transversal.dot(nu);
            let d_tau = to_complex(&(&w.direction - nu * d_nu));
            let q_tau = to_complex(&(&w.transversal - nu * q_nu));
            let first = ep * d_nu + es * q_nu;
            let cp = ep * C::new(0.0, w.omega_p()) * (2.0 * w.mu * d_nu);
            let cs = es * C::new(0.0, w.omega_s()) * w.mu;
            let mut out = cvec(1 + n);
            out[0] = first;
            for i in 0..n {
                out[1 + i] = cp * d_tau[i] + cs * (q_nu * d_tau[i] + d_nu * q_tau[i]);
            }
            Ok(out)
        }
        (BoundaryConditionTag::ElasticFourth, IncidentWave::Elastic(w)) => {
            let n = w.direction.len();
            let ep = phase(w.omega_p(), &w.direction, x) * w.c_p;
            let es = phase(w.omega_s(), &w.direction, x) * w.c_s;
            let d_nu = w.direction.dot(nu);
            let q_nu = w.transversal.dot(nu);
            let d_tau = to_complex(&(&w.direction - nu * d_nu));
            let q_tau = to_complex(&(&w.transversal - nu * q_nu));
            let last = ep * C::new(0.0, w.omega_p()) * (2.0 * w.mu * d_nu * d_nu + w.lambda)
                + es * C::new(0.0, w.omega_s()) * (2.0 * w.mu * q_nu * d_nu);
            let mut out = cvec(n + 1);
            for i in 0..n {
                out[i] = ep * d_tau[i] + es * q_tau[i];
            }
            out[n] = last;
            Ok(out)
        }
        _ => Err(WaveError::FamilyMismatch { bc, family: wave.family() }),
    }
}

/// Modulus of the boundary operator along a hyperplane. Vector-valued
/// operators are measured by the Euclidean norm of the stacked complex
/// components.
#[derive(Clone, Debug)]
pub enum ModulusProfile {
    /// The modulus is constant on the plane (acoustic and EM waves, pure
    /// elastic waves).
    Constant(f64),
    /// Minimum over the deterministic sample of the plane outside the
    /// exclusion ball (mixed elastic waves).
    SampledMin { value: f64, argmin: Point },
}

impl ModulusProfile {
    pub fn value(&self) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::SampledMin { value, .. } => *value,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

/// Sampling policy for non-constant profiles: points along each in-plane
/// basis direction inside `B_{R + extent} \ B_R`.
#[derive(Clone, Debug)]
pub struct ProfileSampling {
    pub exclude_radius: f64,
    pub extent: f64,
    pub points_per_unit: usize,
}

impl Default for ProfileSampling {
    fn default() -> Self {
        Self {
            exclude_radius: 1.0,
            extent: 10.0,
            points_per_unit: 256,
        }
    }
}

/// Boundary-operator modulus along `plane`: constant profiles are returned in
/// closed form, mixed elastic waves are sampled deterministically.
pub fn boundary_modulus_profile(
    bc: BoundaryConditionTag,
    wave: &IncidentWave,
    plane: &Hyperplane,
    sampling: &ProfileSampling,
) -> Result<ModulusProfile, WaveError> {
    if !wave.compatible_with(bc) {
        return Err(WaveError::FamilyMismatch { bc, family: wave.family() });
    }
    if plane.dim() != wave.dim() {
        return Err(WaveError::DimensionMismatch);
    }
    let constant = match wave {
        IncidentWave::Acoustic(_) | IncidentWave::Electromagnetic(_) => true,
        IncidentWave::Elastic(w) => !w.is_mixed(),
    };
    if constant {
        // Unit-modulus exponentials make the operator norm x-independent;
        // evaluate at the foot point.
        let v = eval_boundary_operator(bc, wave, &plane.foot(), plane.normal())?;
        return Ok(ModulusProfile::Constant(v.norm()));
    }
    let foot = plane.foot();
    let nu = plane.normal().clone();
    let mut best = f64::INFINITY;
    let mut argmin = foot.clone();
    let count =
        ((sampling.extent * sampling.points_per_unit as f64).ceil() as usize).max(1);
    for basis in plane.tangent_basis() {
        for sign in [-1.0, 1.0] {
            for k in 0..count {
                let t = sampling.exclude_radius
                    + (k as f64 + 0.5) * sampling.extent / count as f64;
                let x = &foot + &basis * (sign * t);
                let v = eval_boundary_operator(bc, wave, &x, &nu)?.norm();
                if v < best {
                    best = v;
                    argmin = x;
                }
            }
        }
    }
    Ok(ModulusProfile::SampledMin { value: best, argmin })
}

/// Closed-form Helmholtz decomposition of an elastic plane wave into its
/// longitudinal and transversal parts (`c_p u_p` and `c_s u_s`).
pub fn helmholtz_decompose(wave: &ElasticWave) -> (SuperposedField, SuperposedField) {
    let base = |parts: Vec<VectorPart>| SuperposedField::Elastic {
        lambda: wave.lambda,
        mu: wave.mu,
        rho: wave.rho,
        omega: wave.omega,
        parts,
    };
    let long = base(vec![VectorPart {
        amplitude: to_complex(&wave.direction) * wave.c_p,
        wavenumber: wave.omega_p(),
        direction: wave.direction.clone(),
    }]);
    let trans = base(vec![VectorPart {
        amplitude: to_complex(&wave.transversal) * wave.c_s,
        wavenumber: wave.omega_s(),
        direction: wave.direction.clone(),
    }]);
    (long, trans)
}
