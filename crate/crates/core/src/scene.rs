//! Scene ingestion: a versioned JSON schema describing scatterers, incident
//! waves and plan parameters, validated into domain objects with errors that
//! name the offending element.

use crate::certify::{MeasurementPlan, ScattererClass};
use crate::geom::{Cell, ConvexPolytope, GeomError, HalfSpace, Hyperplane, Point, Side};
use crate::waves::{AcousticWave, BoundaryConditionTag, ElasticWave, EmWave, IncidentWave, C};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    /// Malformed JSON (carries the position) or schema violation (carries
    /// the field path in the serde message).
    #[error("scene parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported scene version {0} (expected 1)")]
    Version(u32),
    #[error("scene invariant violated at {element}: {what}")]
    Invariant { element: String, what: String },
}

fn invariant(element: impl Into<String>, what: impl std::fmt::Display) -> SceneError {
    SceneError::Invariant {
        element: element.into(),
        what: what.to_string(),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: u32,
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub scatterers: BTreeMap<String, ScattererSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub waves: Vec<WaveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plan: Option<PlanSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<TraceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceSpec>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScattererSpec {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub obstacles: Vec<ObstacleSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub screens: Vec<ScreenSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObstacleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceSpec>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HalfspaceSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
    /// "leq" keeps `normal . x <= offset`, "geq" the other side.
    pub side: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenSpec {
    /// 2D screens: the two segment endpoints.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub segment: Option<Vec<Vec<f64>>>,
    /// 3D screens: coplanar polygon vertices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<Vec<f64>>>,
    pub bc: BoundaryConditionTag,
    /// Optional distinct tags for the two sides (plus side first).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_bcs: Option<(BoundaryConditionTag, BoundaryConditionTag)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveSpec {
    pub family: String,
    pub omega: f64,
    pub direction: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarisation: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<f64>>,
    /// Complex coefficients as [re, im].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_p: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_s: Option<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    pub class: ScattererClass,
    pub allowed_bcs: Vec<BoundaryConditionTag>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_prime: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub point: Vec<f64>,
    pub plane: PlaneSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaneSpec {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vanish_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub connectivity_resolution: Option<f64>,
}

/// A validated scene: every referenced domain object constructed and checked.
#[derive(Clone, Debug)]
pub struct Scene {
    pub dimension: usize,
    pub scatterers: BTreeMap<String, crate::geom::PolyhedralScatterer>,
    pub waves: Vec<IncidentWave>,
    pub plan: Option<(ScattererClass, Vec<BoundaryConditionTag>)>,
    pub trace: Option<TraceSpec>,
    pub tolerances: ToleranceSpec,
    pub file: SceneFile,
}

impl Scene {
    /// The validated measurement plan, if the scene declares one.
    pub fn measurement_plan(&self) -> Result<Option<MeasurementPlan>, SceneError> {
        let Some((class, bcs)) = &self.plan else {
            return Ok(None);
        };
        MeasurementPlan::new(*class, bcs.iter().cloned().collect(), self.waves.clone())
            .map(Some)
            .map_err(|e| invariant("plan", e))
    }

    pub fn bounding_radius(&self) -> f64 {
        self.scatterers
            .values()
            .map(|s| s.bounding_radius())
            .fold(0.0, f64::max)
    }
}

fn point_checked(coords: &[f64], dim: usize, element: &str) -> Result<Point, SceneError> {
    if coords.len() != dim {
        return Err(invariant(
            element,
            format!("expected {dim} coordinates, got {}", coords.len()),
        ));
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(invariant(element, "coordinates must be finite"));
    }
    Ok(Point::from_vec(coords.to_vec()))
}

fn build_obstacle(
    spec: &ObstacleSpec,
    dim: usize,
    element: &str,
) -> Result<ConvexPolytope, SceneError> {
    match (&spec.vertices, &spec.halfspaces) {
        (Some(vertices), None) => {
            let points: Vec<Point> = vertices
                .iter()
                .enumerate()
                .map(|(i, v)| point_checked(v, dim, &format!("{element}.vertices[{i}]")))
                .collect::<Result<_, _>>()?;
            ConvexPolytope::from_vertices(dim, &points)
                .map_err(|e: GeomError| invariant(element, e))
        }
        (None, Some(halfspaces)) => {
            let hs: Vec<HalfSpace> = halfspaces
                .iter()
                .enumerate()
                .map(|(i, h)| {
                    let el = format!("{element}.halfspaces[{i}]");
                    let normal = point_checked(&h.normal, dim, &el)?;
                    let side = match h.side.as_str() {
                        "leq" => Side::NonPositive,
                        "geq" => Side::NonNegative,
                        other => {
                            return Err(invariant(el, format!("side must be leq or geq, got {other}")))
                        }
                    };
                    HalfSpace::from_constraint(normal, h.offset, side)
                        .map_err(|e| invariant(&el, e))
                })
                .collect::<Result<_, _>>()?;
            ConvexPolytope::from_halfspaces(dim, hs).map_err(|e| invariant(element, e))
        }
        _ => Err(invariant(
            element,
            "exactly one of `vertices` or `halfspaces` must be given",
        )),
    }
}

fn build_screen(spec: &ScreenSpec, dim: usize, element: &str) -> Result<Cell, SceneError> {
    let cell = match (dim, &spec.segment, &spec.polygon) {
        (2, Some(seg), None) => {
            if seg.len() != 2 {
                return Err(invariant(element, "segment needs exactly two endpoints"));
            }
            let a = point_checked(&seg[0], 2, element)?;
            let b = point_checked(&seg[1], 2, element)?;
            Cell::segment_2d(&a, &b, spec.bc).map_err(|e| invariant(element, e))?
        }
        (3, None, Some(poly)) => {
            let vs: Vec<Point> = poly
                .iter()
                .enumerate()
                .map(|(i, v)| point_checked(v, 3, &format!("{element}.polygon[{i}]")))
                .collect::<Result<_, _>>()?;
            Cell::polygon_3d(&vs, spec.bc).map_err(|e| invariant(element, e))?
        }
        (2, _, _) => return Err(invariant(element, "2D screens take a `segment`")),
        (3, _, _) => return Err(invariant(element, "3D screens take a `polygon`")),
        (d, _, _) => return Err(invariant(element, format!("unsupported dimension {d}"))),
    };
    Ok(match spec.side_bcs {
        Some((plus, minus)) => cell.with_side_bcs(plus, minus),
        None => cell,
    })
}

fn build_wave(spec: &WaveSpec, dim: usize, element: &str) -> Result<IncidentWave, SceneError> {
    let direction = point_checked(&spec.direction, dim, element)?;
    match spec.family.as_str() {
        "acoustic" => AcousticWave::new(spec.omega, direction)
            .map(IncidentWave::Acoustic)
            .map_err(|e| invariant(element, e)),
        "em" => {
            let p = spec
                .polarisation
                .as_ref()
                .ok_or_else(|| invariant(element, "EM waves need `polarisation`"))?;
            let p = point_checked(p, dim, element)?;
            EmWave::new(spec.omega, direction, p)
                .map(IncidentWave::Electromagnetic)
                .map_err(|e| invariant(element, e))
        }
        "elastic" => {
            let missing = |f: &str| invariant(element, format!("elastic waves need `{f}`"));
            let lambda = spec.lambda.ok_or_else(|| missing("lambda"))?;
            let mu = spec.mu.ok_or_else(|| missing("mu"))?;
            let rho = spec.rho.ok_or_else(|| missing("rho"))?;
            let q = spec.q.as_ref().ok_or_else(|| missing("q"))?;
            let q = point_checked(q, dim, element)?;
            let c_p = spec.c_p.map(|c| C::new(c[0], c[1])).unwrap_or(C::new(1.0, 0.0));
            let c_s = spec.c_s.map(|c| C::new(c[0], c[1])).unwrap_or(C::new(0.0, 0.0));
            ElasticWave::new(lambda, mu, rho, spec.omega, direction, q, c_p, c_s)
                .map(IncidentWave::Elastic)
                .map_err(|e| invariant(element, e))
        }
        other => Err(invariant(
            element,
            format!("unknown wave family `{other}` (acoustic | em | elastic)"),
        )),
    }
}

/// Parses and validates a scene from JSON text. Geometric invariants are
/// re-checked on load; in 2D the complement connectivity of every scatterer
/// is verified by grid flood fill.
pub fn parse_scene(text: &str) -> Result<Scene, SceneError> {
    let file: SceneFile = serde_json::from_str(text)?;
    if file.version != 1 {
        return Err(SceneError::Version(file.version));
    }
    let dim = file.dimension;
    if dim != 2 && dim != 3 {
        return Err(invariant("dimension", format!("must be 2 or 3, got {dim}")));
    }
    let mut scatterers = BTreeMap::new();
    for (name, spec) in &file.scatterers {
        let mut obstacles = Vec::new();
        for (i, ospec) in spec.obstacles.iter().enumerate() {
            obstacles.push(build_obstacle(
                ospec,
                dim,
                &format!("scatterers.{name}.obstacles[{i}]"),
            )?);
        }
        let mut screens = Vec::new();
        for (i, sspec) in spec.screens.iter().enumerate() {
            screens.push(build_screen(
                sspec,
                dim,
                &format!("scatterers.{name}.screens[{i}]"),
            )?);
        }
        let scatterer = crate::geom::PolyhedralScatterer::new(dim, obstacles, screens)
            .map_err(|e| invariant(format!("scatterers.{name}"), e))?;
        if dim == 2 && !scatterer.is_empty_set() {
            let res = file
                .tolerances
                .as_ref()
                .and_then(|t| t.connectivity_resolution)
                .unwrap_or_else(|| (scatterer.bounding_radius() / 40.0).clamp(1e-3, 0.1));
            let connected = crate::geom::complement_connected_2d(&scatterer, res)
                .map_err(|e| invariant(format!("scatterers.{name}"), e))?;
            if !connected {
                return Err(invariant(
                    format!("scatterers.{name}"),
                    format!("complement is not connected at resolution {res}"),
                ));
            }
        }
        scatterers.insert(name.clone(), scatterer);
    }
    let mut waves = Vec::new();
    for (i, wspec) in file.waves.iter().enumerate() {
        waves.push(build_wave(wspec, dim, &format!("waves[{i}]"))?);
    }
    let plan = match &file.plan {
        Some(p) => {
            if p.allowed_bcs.is_empty() {
                return Err(invariant("plan.allowed_bcs", "must be nonempty"));
            }
            Some((p.class, p.allowed_bcs.clone()))
        }
        None => None,
    };
    if let Some(t) = &file.trace {
        if let Some(seed) = &t.seed {
            point_checked(&seed.point, dim, "trace.seed.point")?;
            point_checked(&seed.plane.normal, dim, "trace.seed.plane.normal")?;
        }
        for name in [&t.sigma, &t.sigma_prime].into_iter().flatten() {
            if !scatterers.contains_key(name) {
                return Err(invariant("trace", format!("unknown scatterer `{name}`")));
            }
        }
    }
    let scene = Scene {
        dimension: dim,
        scatterers,
        waves,
        plan,
        trace: file.trace.clone(),
        tolerances: file.tolerances.clone().unwrap_or_default(),
        file,
    };
    // Waves and plan must be mutually consistent right at load time.
    scene.measurement_plan()?;
    Ok(scene)
}

/// Parses a trace seed against a scatterer.
pub fn seed_from_spec(
    spec: &SeedSpec,
    scatterer: &crate::geom::PolyhedralScatterer,
) -> Result<crate::trace::FlatPoint, SceneError> {
    let dim = scatterer.dim();
    let point = point_checked(&spec.point, dim, "trace.seed.point")?;
    let normal = point_checked(&spec.plane.normal, dim, "trace.seed.plane.normal")?;
    let plane = Hyperplane::new(normal, spec.plane.offset)
        .map_err(|e| invariant("trace.seed.plane", e))?;
    crate::trace::FlatPoint::new(scatterer, point, plane)
        .map_err(|e| invariant("trace.seed", e))
}
