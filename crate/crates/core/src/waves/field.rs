//! Finite plane-wave superpositions: closed-form evaluation, analytic
//! gradients, the per-condition reflection operators, and finite-difference
//! residuals of the governing operator. Every field the artifact manipulates
//! is such a superposition; no PDE solver exists or is needed.

use super::{
    cross3_cr, to_complex, BoundaryConditionTag, CVector, IncidentWave, WaveError, C,
};
use crate::geom::{cross3, Hyperplane, Point};
use nalgebra::DMatrix;

/// Scalar plane-wave component `amp * exp(i omega dir . x)`.
#[derive(Clone, Debug)]
pub struct ScalarPart {
    pub amplitude: C,
    pub direction: Point,
}

/// Electromagnetic component `(E0, H0) * exp(i omega dir . x)`.
#[derive(Clone, Debug)]
pub struct EmPart {
    pub e0: CVector,
    pub h0: CVector,
    pub direction: Point,
}

/// Elastic component `amp * exp(i k dir . x)` with its own wavenumber
/// (longitudinal or transversal).
#[derive(Clone, Debug)]
pub struct VectorPart {
    pub amplitude: CVector,
    pub wavenumber: f64,
    pub direction: Point,
}

/// A finite superposition of plane waves of one family.
#[derive(Clone, Debug)]
pub enum SuperposedField {
    Acoustic {
        omega: f64,
        parts: Vec<ScalarPart>,
    },
    Electromagnetic {
        omega: f64,
        parts: Vec<EmPart>,
    },
    Elastic {
        lambda: f64,
        mu: f64,
        rho: f64,
        omega: f64,
        parts: Vec<VectorPart>,
    },
}

impl SuperposedField {
    pub fn from_incident(wave: &IncidentWave) -> SuperposedField {
        match wave {
            IncidentWave::Acoustic(w) => SuperposedField::Acoustic {
                omega: w.omega,
                parts: vec![ScalarPart {
                    amplitude: C::new(1.0, 0.0),
                    direction: w.direction.clone(),
                }],
            },
            IncidentWave::Electromagnetic(w) => {
                let q = w.q();
                let scale = C::new(0.0, -w.omega);
                SuperposedField::Electromagnetic {
                    omega: w.omega,
                    parts: vec![EmPart {
                        e0: to_complex(&cross3(&q, &w.direction)) * scale,
                        h0: to_complex(&cross3(&w.polarisation, &w.direction)) * scale,
                        direction: w.direction.clone(),
                    }],
                }
            }
            IncidentWave::Elastic(w) => SuperposedField::Elastic {
                lambda: w.lambda,
                mu: w.mu,
                rho: w.rho,
                omega: w.omega,
                parts: vec![
                    VectorPart {
                        amplitude: to_complex(&w.direction) * w.c_p,
                        wavenumber: w.omega_p(),
                        direction: w.direction.clone(),
                    },
                    VectorPart {
                        amplitude: to_complex(&w.transversal) * w.c_s,
                        wavenumber: w.omega_s(),
                        direction: w.direction.clone(),
                    },
                ],
            },
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SuperposedField::Acoustic { parts, .. } => {
                parts.first().map(|p| p.direction.len()).unwrap_or(0)
            }
            SuperposedField::Electromagnetic { .. } => 3,
            SuperposedField::Elastic { parts, .. } => {
                parts.first().map(|p| p.direction.len()).unwrap_or(0)
            }
        }
    }

    /// Length of the value vector: 1 (acoustic), 6 (EM), N (elastic).
    pub fn value_len(&self) -> usize {
        match self {
            SuperposedField::Acoustic { .. } => 1,
            SuperposedField::Electromagnetic { .. } => 6,
            SuperposedField::Elastic { .. } => self.dim(),
        }
    }

    pub fn eval(&self, x: &Point) -> CVector {
        let mut out = CVector::from_element(self.value_len(), C::new(0.0, 0.0));
        match self {
            SuperposedField::Acoustic { omega, parts } => {
                for p in parts {
                    out[0] += p.amplitude * expi(*omega * p.direction.dot(x));
                }
            }
            SuperposedField::Electromagnetic { omega, parts } => {
                for p in parts {
                    let ph = expi(*omega * p.direction.dot(x));
                    for i in 0..3 {
                        out[i] += p.e0[i] * ph;
                        out[i + 3] += p.h0[i] * ph;
                    }
                }
            }
            SuperposedField::Elastic { parts, .. } => {
                for p in parts {
                    let ph = expi(p.wavenumber * p.direction.dot(x));
                    for i in 0..out.len() {
                        out[i] += p.amplitude[i] * ph;
                    }
                }
            }
        }
        out
    }

    /// Analytic partial derivatives: `out[j]` is the derivative of the value
    /// vector in coordinate direction `j`.
    pub fn gradient(&self, x: &Point) -> Vec<CVector> {
        let dim = self.dim();
        let mut out = vec![CVector::from_element(self.value_len(), C::new(0.0, 0.0)); dim];
        match self {
            SuperposedField::Acoustic { omega, parts } => {
                for p in parts {
                    let ph = expi(*omega * p.direction.dot(x)) * p.amplitude;
                    for j in 0..dim {
                        out[j][0] += ph * C::new(0.0, *omega * p.direction[j]);
                    }
                }
            }
            SuperposedField::Electromagnetic { omega, parts } => {
                for p in parts {
                    let ph = expi(*omega * p.direction.dot(x));
                    for j in 0..dim {
                        let f = ph * C::new(0.0, *omega * p.direction[j]);
                        for i in 0..3 {
                            out[j][i] += p.e0[i] * f;
                            out[j][i + 3] += p.h0[i] * f;
                        }
                    }
                }
            }
            SuperposedField::Elastic { parts, .. } => {
                for p in parts {
                    let ph = expi(p.wavenumber * p.direction.dot(x));
                    for j in 0..dim {
                        let f = ph * C::new(0.0, p.wavenumber * p.direction[j]);
                        for i in 0..out[j].len() {
                            out[j][i] += p.amplitude[i] * f;
                        }
                    }
                }
            }
        }
        out
    }

    /// Total amplitude mass: the sum of the part amplitude norms. The
    /// natural magnitude of each term the governing operator produces, even
    /// where the parts cancel pointwise.
    pub fn amplitude_mass(&self) -> f64 {
        match self {
            SuperposedField::Acoustic { parts, .. } => {
                parts.iter().map(|p| p.amplitude.norm()).sum()
            }
            SuperposedField::Electromagnetic { parts, .. } => parts
                .iter()
                .map(|p| p.e0.norm().max(p.h0.norm()))
                .sum(),
            SuperposedField::Elastic { parts, .. } => {
                parts.iter().map(|p| p.amplitude.norm()).sum()
            }
        }
    }

    /// Concatenates two superpositions of the same family and parameters.
    pub fn add(&self, other: &SuperposedField) -> SuperposedField {
        let mut combined = self.clone();
        match (&mut combined, other) {
            (
                SuperposedField::Acoustic { parts, .. },
                SuperposedField::Acoustic { parts: o, .. },
            ) => parts.extend(o.iter().cloned()),
            (
                SuperposedField::Electromagnetic { parts, .. },
                SuperposedField::Electromagnetic { parts: o, .. },
            ) => parts.extend(o.iter().cloned()),
            (
                SuperposedField::Elastic { parts, .. },
                SuperposedField::Elastic { parts: o, .. },
            ) => parts.extend(o.iter().cloned()),
            _ => panic!("cannot add fields of different families"),
        }
        combined
    }

    /// The reflected superposition `T~(u o T_P)` in closed form: every plane
    /// wave maps to a plane wave with the mirrored direction, a phase factor
    /// from the plane offset, and the amplitude transformed per condition
    /// (acoustic: -u Dirichlet / +u Neumann; EM: +/-(-T E, T H); elastic:
    /// +/- T u). Dispersion is preserved.
    pub fn reflect(
        &self,
        bc: BoundaryConditionTag,
        plane: &Hyperplane,
    ) -> Result<SuperposedField, WaveError> {
        let nu = plane.normal();
        let c = plane.offset();
        let mirror_dir = |d: &Point| d - nu * (2.0 * d.dot(nu));
        let mirror_cvec = |v: &CVector| -> CVector {
            let vn: C = v.iter().zip(nu.iter()).map(|(a, &b)| a * b).sum();
            CVector::from_iterator(
                v.len(),
                v.iter().zip(nu.iter()).map(|(a, &b)| a - vn * b * 2.0),
            )
        };
        match self {
            SuperposedField::Acoustic { omega, parts } => {
                let sign = match bc {
                    BoundaryConditionTag::Dirichlet => -1.0,
                    BoundaryConditionTag::Neumann => 1.0,
                    _ => {
                        return Err(WaveError::FamilyMismatch {
                            bc,
                            family: super::WaveFamily::Acoustic,
                        })
                    }
                };
                Ok(SuperposedField::Acoustic {
                    omega: *omega,
                    parts: parts
                        .iter()
                        .map(|p| ScalarPart {
                            amplitude: p.amplitude
                                * expi(*omega * 2.0 * c * p.direction.dot(nu))
                                * sign,
                            direction: mirror_dir(&p.direction),
                        })
                        .collect(),
                })
            }
            SuperposedField::Electromagnetic { omega, parts } => {
                let sign = match bc {
                    BoundaryConditionTag::PerfectElectric => 1.0,
                    BoundaryConditionTag::PerfectMagnetic => -1.0,
                    _ => {
                        return Err(WaveError::FamilyMismatch {
                            bc,
                            family: super::WaveFamily::Electromagnetic,
                        })
                    }
                };
                Ok(SuperposedField::Electromagnetic {
                    omega: *omega,
                    parts: parts
                        .iter()
                        .map(|p| {
                            let ph = expi(*omega * 2.0 * c * p.direction.dot(nu)) * sign;
                            EmPart {
                                e0: -mirror_cvec(&(p.e0.clone() * ph)),
                                h0: mirror_cvec(&(p.h0.clone() * ph)),
                                direction: mirror_dir(&p.direction),
                            }
                        })
                        .collect(),
                })
            }
            SuperposedField::Elastic {
                lambda,
                mu,
                rho,
                omega,
                parts,
            } => {
                let sign = match bc {
                    BoundaryConditionTag::ElasticThird => 1.0,
                    BoundaryConditionTag::ElasticFourth => -1.0,
                    _ => {
                        return Err(WaveError::FamilyMismatch {
                            bc,
                            family: super::WaveFamily::Elastic,
                        })
                    }
                };
                Ok(SuperposedField::Elastic {
                    lambda: *lambda,
                    mu: *mu,
                    rho: *rho,
                    omega: *omega,
                    parts: parts
                        .iter()
                        .map(|p| {
                            let ph = expi(p.wavenumber * 2.0 * c * p.direction.dot(nu)) * sign;
                            VectorPart {
                                amplitude: mirror_cvec(&(p.amplitude.clone() * ph)),
                                wavenumber: p.wavenumber,
                                direction: mirror_dir(&p.direction),
                            }
                        })
                        .collect(),
                })
            }
        }
    }

    /// Replaces each part that agrees with some part of `reference` within
    /// `tolerance` by that reference part verbatim.
    ///
    /// Reflecting a mirror-symmetric superposition reproduces it up to
    /// rounding-level representation drift; piecewise evaluations across the
    /// mirror plane amplify that drift by `1/h^2`, so the drift is collapsed
    /// before gluing. A genuinely different reflection (wrong sign, wrong
    /// direction) never matches and keeps its raw parts.
    pub fn snapped_to(&self, reference: &SuperposedField, tolerance: f64) -> SuperposedField {
        let close_c = |a: C, b: C| (a - b).norm() <= tolerance * (1.0 + a.norm());
        let close_v = |a: &CVector, b: &CVector| (a - b).norm() <= tolerance * (1.0 + a.norm());
        let close_p = |a: &Point, b: &Point| (a - b).norm() <= tolerance;
        let mut out = self.clone();
        match (&mut out, reference) {
            (
                SuperposedField::Acoustic { parts, .. },
                SuperposedField::Acoustic { parts: refs, .. },
            ) => {
                for p in parts {
                    if let Some(r) = refs
                        .iter()
                        .find(|r| close_c(p.amplitude, r.amplitude) && close_p(&p.direction, &r.direction))
                    {
                        *p = r.clone();
                    }
                }
            }
            (
                SuperposedField::Electromagnetic { parts, .. },
                SuperposedField::Electromagnetic { parts: refs, .. },
            ) => {
                for p in parts {
                    if let Some(r) = refs.iter().find(|r| {
                        close_v(&p.e0, &r.e0)
                            && close_v(&p.h0, &r.h0)
                            && close_p(&p.direction, &r.direction)
                    }) {
                        *p = r.clone();
                    }
                }
            }
            (
                SuperposedField::Elastic { parts, .. },
                SuperposedField::Elastic { parts: refs, .. },
            ) => {
                for p in parts {
                    if let Some(r) = refs.iter().find(|r| {
                        (p.wavenumber - r.wavenumber).abs() <= tolerance
                            && close_v(&p.amplitude, &r.amplitude)
                            && close_p(&p.direction, &r.direction)
                    }) {
                        *p = r.clone();
                    }
                }
            }
            _ => {}
        }
        out
    }

    /// Generic boundary-operator evaluation from the value and the analytic
    /// gradient (the dual route to the per-wave closed forms in
    /// `eval_boundary_operator`).
    pub fn boundary_operator(
        &self,
        bc: BoundaryConditionTag,
        x: &Point,
        nu: &Point,
    ) -> Result<CVector, WaveError> {
        match (self, bc) {
            (SuperposedField::Acoustic { .. }, BoundaryConditionTag::Dirichlet) => {
                Ok(self.eval(x))
            }
            (SuperposedField::Acoustic { .. }, BoundaryConditionTag::Neumann) => {
                let grad = self.gradient(x);
                let v: C = grad.iter().zip(nu.iter()).map(|(g, &n)| g[0] * n).sum();
                Ok(CVector::from_vec(vec![v]))
            }
            (SuperposedField::Electromagnetic { .. }, BoundaryConditionTag::PerfectElectric) => {
                let v = self.eval(x);
                let e = CVector::from_vec(vec![v[0], v[1], v[2]]);
                Ok(cross3_cr(&e, nu))
            }
            (SuperposedField::Electromagnetic { .. }, BoundaryConditionTag::PerfectMagnetic) => {
                let v = self.eval(x);
                let h = CVector::from_vec(vec![v[3], v[4], v[5]]);
                Ok(cross3_cr(&h, nu))
            }
            (
                SuperposedField::Elastic { lambda, mu, .. },
                BoundaryConditionTag::ElasticThird | BoundaryConditionTag::ElasticFourth,
            ) => {
                let n = self.dim();
                let u = self.eval(x);
                let grad = self.gradient(x);
                // sigma = mu (grad u + grad u^T) + lambda div(u) I.
                let mut g = DMatrix::from_element(n, n, C::new(0.0, 0.0));
                for j in 0..n {
                    for i in 0..n {
                        g[(i, j)] = grad[j][i];
                    }
                }
                let div: C = (0..n).map(|i| g[(i, i)]).sum();
                let mut traction = CVector::from_element(n, C::new(0.0, 0.0));
                for i in 0..n {
                    for j in 0..n {
                        let sigma_ij = (g[(i, j)] + g[(j, i)]) * *mu
                            + if i == j { div * *lambda } else { C::new(0.0, 0.0) };
                        traction[i] += sigma_ij * nu[j];
                    }
                }
                let u_nu: C = u.iter().zip(nu.iter()).map(|(a, &b)| a * b).sum();
                let tr_nu: C = traction.iter().zip(nu.iter()).map(|(a, &b)| a * b).sum();
                let mut out = CVector::from_element(n + 1, C::new(0.0, 0.0));
                match bc {
                    BoundaryConditionTag::ElasticThird => {
                        out[0] = u_nu;
                        for i in 0..n {
                            out[1 + i] = traction[i] - tr_nu * nu[i];
                        }
                    }
                    BoundaryConditionTag::ElasticFourth => {
                        for i in 0..n {
                            out[i] = u[i] - u_nu * nu[i];
                        }
                        out[n] = tr_nu;
                    }
                    _ => unreachable!(),
                }
                Ok(out)
            }
            _ => Err(WaveError::FamilyMismatch {
                bc,
                family: match self {
                    SuperposedField::Acoustic { .. } => super::WaveFamily::Acoustic,
                    SuperposedField::Electromagnetic { .. } => super::WaveFamily::Electromagnetic,
                    SuperposedField::Elastic { .. } => super::WaveFamily::Elastic,
                },
            }),
        }
    }

    /// Central-difference residual of the family operator, maximised over the
    /// sample points.
    pub fn pde_residual(&self, points: &[Point], h: f64) -> f64 {
        pde_residual_fn(self.operator(), |x| self.eval(x), points, h)
    }

    pub fn operator(&self) -> ResidualOperator {
        match self {
            SuperposedField::Acoustic { omega, .. } => {
                ResidualOperator::Helmholtz { omega: *omega }
            }
            SuperposedField::Electromagnetic { omega, .. } => {
                ResidualOperator::Maxwell { omega: *omega }
            }
            SuperposedField::Elastic {
                lambda, mu, rho, omega, ..
            } => ResidualOperator::Navier {
                lambda: *lambda,
                mu: *mu,
                rho: *rho,
                omega: *omega,
            },
        }
    }
}

/// The three governing operators, for finite-difference residuals.
#[derive(Clone, Copy, Debug)]
pub enum ResidualOperator {
    /// `Delta u + omega^2 u`, componentwise.
    Helmholtz { omega: f64 },
    /// `(curl E - i omega H, curl H + i omega E)` on the stacked value.
    Maxwell { omega: f64 },
    /// `mu Delta u + (lambda + mu) grad(div u) + rho omega^2 u`.
    Navier { lambda: f64, mu: f64, rho: f64, omega: f64 },
}

impl ResidualOperator {
    /// Magnitude of the zeroth-order coefficient, for residual scaling.
    pub fn zeroth_order_scale(&self) -> f64 {
        match self {
            Self::Helmholtz { omega } => omega * omega,
            Self::Maxwell { omega } => *omega,
            Self::Navier { rho, omega, .. } => rho * omega * omega,
        }
    }
}

/// Max residual of the given operator applied (by central differences with
/// step `h`) to an arbitrary field evaluation closure.
pub fn pde_residual_fn(
    op: ResidualOperator,
    eval: impl Fn(&Point) -> CVector,
    points: &[Point],
    h: f64,
) -> f64 {
    let mut worst = 0.0f64;
    for x in points {
        let r = match op {
            ResidualOperator::Helmholtz { omega } => {
                let dim = x.len();
                let u = eval(x);
                let mut res = u.clone() * C::new(omega * omega, 0.0);
                for j in 0..dim {
                    let lap = second_diff(&eval, x, j, j, h, &u);
                    res += lap;
                }
                res.norm()
            }
            ResidualOperator::Maxwell { omega } => {
                let u = eval(x);
                let d = |i: usize, j: usize| first_diff_component(&eval, x, j, h, i);
                // curl E and curl H by central differences.
                let curl = |base: usize| {
                    CVector::from_vec(vec![
                        d(base + 2, 1) - d(base + 1, 2),
                        d(base, 2) - d(base + 2, 0),
                        d(base + 1, 0) - d(base, 1),
                    ])
                };
                let curl_e = curl(0);
                let curl_h = curl(3);
                let i_omega = C::new(0.0, omega);
                let mut res = 0.0f64;
                for i in 0..3 {
                    res = res.max((curl_e[i] - i_omega * u[i + 3]).norm());
                    res = res.max((curl_h[i] + i_omega * u[i]).norm());
                }
                res
            }
            ResidualOperator::Navier { lambda, mu, rho, omega } => {
                let dim = x.len();
                let u = eval(x);
                let mut res = u.clone() * C::new(rho * omega * omega, 0.0);
                for j in 0..dim {
                    res += second_diff(&eval, x, j, j, h, &u) * C::new(mu, 0.0);
                }
                // grad(div u): g_i = sum_j d_i d_j u_j.
                for i in 0..dim {
                    let mut gi = C::new(0.0, 0.0);
                    for j in 0..dim {
                        gi += second_diff_component(&eval, x, i, j, h, &u, j);
                    }
                    res[i] += gi * C::new(lambda + mu, 0.0);
                }
                res.norm()
            }
        };
        worst = worst.max(r);
    }
    worst
}

/// Public entry: residual of a superposed field over sample points.
pub fn pde_residual(field: &SuperposedField, points: &[Point], h: f64) -> f64 {
    field.pde_residual(points, h)
}

/// Reflects a finite plane-wave superposition across `plane` under the given
/// boundary condition. `nu` must be the unit normal of the plane; every
/// supported reflection operator is independent of its sign.
pub fn reflect_field(
    bc: super::BoundaryConditionTag,
    field: &SuperposedField,
    plane: &Hyperplane,
    nu: &Point,
) -> Result<SuperposedField, super::WaveError> {
    if (nu - plane.normal()).norm().min((nu + plane.normal()).norm()) > 1e-9 {
        return Err(super::WaveError::NormalMismatch);
    }
    field.reflect(bc, plane)
}

fn expi(theta: f64) -> C {
    C::new(theta.cos(), theta.sin())
}

fn shifted(x: &Point, j: usize, delta: f64) -> Point {
    let mut y = x.clone();
    y[j] += delta;
    y
}

/// Central second difference d_i d_j of the whole value vector.
fn second_diff(
    eval: &impl Fn(&Point) -> CVector,
    x: &Point,
    i: usize,
    j: usize,
    h: f64,
    u_at_x: &CVector,
) -> CVector {
    if i == j {
        let up = eval(&shifted(x, i, h));
        let dn = eval(&shifted(x, i, -h));
        (up + dn - u_at_x * C::new(2.0, 0.0)) / C::new(h * h, 0.0)
    } else {
        let pp = eval(&shifted(&shifted(x, i, h), j, h));
        let pm = eval(&shifted(&shifted(x, i, h), j, -h));
        let mp = eval(&shifted(&shifted(x, i, -h), j, h));
        let mm = eval(&shifted(&shifted(x, i, -h), j, -h));
        (pp - pm - mp + mm) / C::new(4.0 * h * h, 0.0)
    }
}

/// One component of the mixed second difference d_i d_j u_c.
fn second_diff_component(
    eval: &impl Fn(&Point) -> CVector,
    x: &Point,
    i: usize,
    j: usize,
    h: f64,
    u_at_x: &CVector,
    component: usize,
) -> C {
    if i == j {
        let up = eval(&shifted(x, i, h));
        let dn = eval(&shifted(x, i, -h));
        (up[component] + dn[component] - u_at_x[component] * 2.0) / (h * h)
    } else {
        let pp = eval(&shifted(&shifted(x, i, h), j, h));
        let pm = eval(&shifted(&shifted(x, i, h), j, -h));
        let mp = eval(&shifted(&shifted(x, i, -h), j, h));
        let mm = eval(&shifted(&shifted(x, i, -h), j, -h));
        (pp[component] - pm[component] - mp[component] + mm[component]) / (4.0 * h * h)
    }
}

/// Central first difference of component `i` in direction `j`.
fn first_diff_component(
    eval: &impl Fn(&Point) -> CVector,
    x: &Point,
    j: usize,
    h: f64,
    i: usize,
) -> C {
    let up = eval(&shifted(x, j, h));
    let dn = eval(&shifted(x, j, -h));
    (up[i] - dn[i]) / (2.0 * h)
}
