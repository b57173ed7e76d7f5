//! Command dispatch shared by the CLI and the C API: every command takes the
//! scene text plus flags and produces a deterministic report (and SVG where
//! applicable).

use crate::certify::{sampling_oracle, CertifyConfig, MeasurementPlan, ScattererClass};
use crate::refgroup::{self, ClosureCaps, ReflectionSet};
use crate::render::{render_svg, Overlay};
use crate::report::{to_json, Report};
use crate::scene::{parse_scene, seed_from_spec, Scene, SceneError};
use crate::trace::{
    default_resolution, seed_flat_point, trace_to_reflection, SeedOutcome, TraceError,
};
use crate::geom::Hyperplane;
use crate::waves::{verify_reflection_principle, BoundaryConditionTag};
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Certify,
    CertifyObstacle,
    ReflectCheck,
    Group,
    Trace,
    Faces,
    Render,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Certify => "certify",
            Command::CertifyObstacle => "certify-obstacle",
            Command::ReflectCheck => "reflect-check",
            Command::Group => "group",
            Command::Trace => "trace",
            Command::Faces => "faces",
            Command::Render => "render",
        }
    }
}

/// Flags surfaced by the CLI; all sampling densities and iteration caps have
/// documented defaults.
#[derive(Clone, Debug)]
pub struct RunFlags {
    pub seed: u64,
    pub grid_density: usize,
    pub max_iters: usize,
    pub resolution: Option<f64>,
    pub tolerance: Option<f64>,
}

impl Default for RunFlags {
    fn default() -> Self {
        Self {
            seed: 0,
            grid_density: 256,
            max_iters: 32,
            resolution: None,
            tolerance: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("computation failed: {0}")]
    Computation(String),
}

impl RunError {
    /// Exit-code contract: 1 usage, 2 parse, 3 invariant, 4 computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Usage(_) => 1,
            RunError::Scene(SceneError::Parse(_)) => 2,
            RunError::Scene(_) => 3,
            RunError::Computation(_) => 4,
        }
    }
}

#[derive(Debug)]
pub struct RunOutput {
    pub report: Report,
    pub svg: Option<String>,
}

fn flags_value(flags: &RunFlags) -> Value {
    json!({
        "seed": flags.seed,
        "grid_density": flags.grid_density,
        "max_iters": flags.max_iters,
        "resolution": flags.resolution,
        "tolerance": flags.tolerance,
    })
}

/// Runs one command against a scene. Deterministic for fixed
/// (scene, command, flags).
pub fn run(command: Command, scene_text: &str, flags: &RunFlags) -> Result<RunOutput, RunError> {
    let scene = parse_scene(scene_text)?;
    let results = match command {
        Command::Certify => certify_results(&scene, flags, ScattererClass::General)?,
        Command::CertifyObstacle => certify_results(&scene, flags, ScattererClass::Obstacle)?,
        Command::ReflectCheck => reflect_check_results(&scene, flags)?,
        Command::Group => group_results(&scene)?,
        Command::Trace => {
            let (results, svg) = trace_results(&scene, flags)?;
            let report = Report::new(command.name(), scene_text, flags_value(flags), results);
            return Ok(RunOutput { report, svg: Some(svg) });
        }
        Command::Faces => faces_results(&scene)?,
        Command::Render => {
            let svg = render_svg(&scene, &Overlay::default()).map_err(RunError::Computation)?;
            let results = json!({ "svg_digest": crate::report::digest(&svg) });
            let report = Report::new(command.name(), scene_text, flags_value(flags), results);
            return Ok(RunOutput { report, svg: Some(svg) });
        }
    };
    let report = Report::new(command.name(), scene_text, flags_value(flags), results);
    Ok(RunOutput { report, svg: None })
}

fn certify_config(flags: &RunFlags) -> CertifyConfig {
    let mut config = CertifyConfig {
        grid_density: flags.grid_density,
        seed: flags.seed,
        ..CertifyConfig::default()
    };
    if let Some(t) = flags.tolerance {
        config.vanish_threshold = t;
    }
    config
}

fn certify_results(
    scene: &Scene,
    flags: &RunFlags,
    class: ScattererClass,
) -> Result<Value, RunError> {
    let Some((_, bcs)) = &scene.plan else {
        return Err(RunError::Usage(
            "certify needs a `plan` block in the scene".into(),
        ));
    };
    if scene.waves.is_empty() {
        return Err(RunError::Usage("certify needs at least one wave".into()));
    }
    let plan = MeasurementPlan::new(class, bcs.iter().cloned().collect(), scene.waves.clone())
        .map_err(|e| RunError::Computation(e.to_string()))?;
    let mut config = certify_config(flags);
    if let Some(t) = &scene.tolerances.vanish_threshold {
        config.vanish_threshold = *t;
    }
    // Sampled (mixed elastic) profiles exclude the ball holding the scene.
    let exclude = scene.bounding_radius() + 1.0;
    config.search_profile.exclude_radius = exclude;
    config.report_profile.exclude_radius = exclude;
    let cert = crate::certify::certify(&plan, &config)
        .map_err(|e| RunError::Computation(e.to_string()))?;
    let oracle = sampling_oracle(&plan, config.grid_density, config.seed)
        .map_err(|e| RunError::Computation(e.to_string()))?;
    Ok(json!({
        "class": class,
        "certificate": to_json::certificate(&cert),
        "oracle": {
            "worst_value": oracle.worst_value,
            "normals": oracle.normals.iter().map(to_json::point).collect::<Vec<_>>(),
            "verdict_holds": oracle.verdict_holds(class, config.vanish_threshold),
        },
        "agreement": cert.holds() == oracle.verdict_holds(class, config.vanish_threshold),
    }))
}

fn scene_hyperplanes(scene: &Scene) -> Vec<Hyperplane> {
    let mut planes: Vec<Hyperplane> = Vec::new();
    let mut push = |p: Hyperplane| {
        if !planes.iter().any(|q| q.approx_eq(&p)) {
            planes.push(p);
        }
    };
    for scatterer in scene.scatterers.values() {
        for cell in scatterer.screens() {
            push(cell.carrier().clone());
        }
        for poly in scatterer.obstacles() {
            for hs in poly.halfspaces() {
                push(hs.plane.clone());
            }
        }
    }
    planes
}

fn reflect_check_results(scene: &Scene, flags: &RunFlags) -> Result<Value, RunError> {
    if scene.waves.is_empty() {
        return Err(RunError::Usage("reflect-check needs waves".into()));
    }
    let mut planes = scene_hyperplanes(scene);
    if planes.is_empty() {
        // Deterministic fallback planes.
        let dim = scene.dimension;
        for axis in 0..dim {
            let mut n = crate::geom::Point::zeros(dim);
            n[axis] = 1.0;
            planes.push(Hyperplane::new(n, 0.3).expect("unit axis normal"));
        }
    }
    let bcs: Vec<BoundaryConditionTag> = match &scene.plan {
        Some((_, bcs)) => bcs.clone(),
        None => BoundaryConditionTag::ALL.to_vec(),
    };
    let samples = flags.grid_density.clamp(9, 100);
    let mut rows = Vec::new();
    let mut all_ok = true;
    for (wi, wave) in scene.waves.iter().enumerate() {
        for &bc in &bcs {
            if !wave.compatible_with(bc) {
                continue;
            }
            for (pi, plane) in planes.iter().enumerate() {
                let report =
                    verify_reflection_principle(bc, wave, plane, plane.normal(), samples)
                        .map_err(|e| RunError::Computation(e.to_string()))?;
                let ok = report.max_boundary_modulus < 1e-8
                    && report.max_pde_residual < 1e-6 * report.residual_scale.max(1.0)
                    && report.max_value_jump < 1e-8
                    && report.max_gradient_jump < 1e-8;
                all_ok &= ok;
                rows.push(json!({
                    "wave": wi,
                    "bc": bc,
                    "plane": pi,
                    "boundary_modulus": report.max_boundary_modulus,
                    "pde_residual": report.max_pde_residual,
                    "residual_scale": report.residual_scale,
                    "value_jump": report.max_value_jump,
                    "gradient_jump": report.max_gradient_jump,
                    "ok": ok,
                }));
            }
        }
    }
    Ok(json!({
        "planes": planes.iter().map(to_json::hyperplane).collect::<Vec<_>>(),
        "checks": rows,
        "ok": all_ok,
    }))
}

fn group_results(scene: &Scene) -> Result<Value, RunError> {
    let planes = scene_hyperplanes(scene);
    if planes.is_empty() {
        return Err(RunError::Usage(
            "group needs at least one screen or obstacle in the scene".into(),
        ));
    }
    let rs = ReflectionSet::new(scene.dimension, planes)
        .map_err(|e| RunError::Computation(e.to_string()))?;
    let (closed, group) = refgroup::closure(&rs, ClosureCaps::default())
        .map_err(|e| RunError::Computation(e.to_string()))?;
    let sectors = refgroup::sector_count(&closed).ok();
    Ok(json!({
        "input_count": rs.len(),
        "closed": to_json::reflection_set(&closed),
        "closed_count": closed.len(),
        "group": to_json::group(&group),
        "sectors": sectors,
        "normal_span_dim": refgroup::normal_span_dim(&closed),
    }))
}

fn trace_results(scene: &Scene, flags: &RunFlags) -> Result<(Value, String), RunError> {
    if scene.dimension != 2 {
        return Err(RunError::Usage("trace is 2D only".into()));
    }
    let names: Vec<&String> = scene.scatterers.keys().collect();
    let spec = scene.trace.clone().unwrap_or(crate::scene::TraceSpec {
        sigma: None,
        sigma_prime: None,
        seed: None,
    });
    let sigma_name = spec
        .sigma
        .clone()
        .or_else(|| names.first().map(|s| s.to_string()))
        .ok_or_else(|| RunError::Usage("trace needs a scatterer".into()))?;
    let sigma = scene
        .scatterers
        .get(&sigma_name)
        .ok_or_else(|| RunError::Usage(format!("unknown scatterer `{sigma_name}`")))?;

    // The seed: explicit, or derived from the (sigma, sigma') pair.
    let (scatterer, seed, seed_info) = if let Some(seed_spec) = &spec.seed {
        let fp = seed_from_spec(seed_spec, sigma)?;
        (sigma.clone(), fp, json!({ "kind": "explicit" }))
    } else {
        let prime_name = spec
            .sigma_prime
            .clone()
            .or_else(|| names.get(1).map(|s| s.to_string()))
            .ok_or_else(|| {
                RunError::Usage(
                    "trace needs either an explicit seed or two scatterers".into(),
                )
            })?;
        let sigma_prime = scene
            .scatterers
            .get(&prime_name)
            .ok_or_else(|| RunError::Usage(format!("unknown scatterer `{prime_name}`")))?;
        match seed_flat_point(sigma, sigma_prime)
            .map_err(|e| RunError::Computation(e.to_string()))?
        {
            SeedOutcome::Found { flat_point, swapped } => {
                let scatterer = if swapped { sigma_prime.clone() } else { sigma.clone() };
                (
                    scatterer,
                    flat_point,
                    json!({ "kind": "derived", "swapped": swapped,
                            "assumption": "equal measurements outside the joint scatterer" }),
                )
            }
            SeedOutcome::Identical => {
                return Err(RunError::Computation(
                    "scatterers are identical as point sets; no flat point exists".into(),
                ))
            }
        }
    };
    let resolution = flags
        .resolution
        .unwrap_or_else(|| default_resolution(&scatterer, &seed));
    match trace_to_reflection(&scatterer, &seed, flags.max_iters, resolution) {
        Ok(witness) => {
            let overlay = Overlay {
                lines: vec![witness.plane.clone()],
                steps: &witness.steps,
            };
            let svg = render_svg(scene, &overlay).map_err(RunError::Computation)?;
            let sound =
                crate::trace::witness_is_sound(&scatterer, &witness.plane, witness.escape_radius);
            let results = json!({
                "seed": seed_info,
                "resolution": resolution,
                "witness": to_json::witness(&witness),
                "witness_sound": sound,
            });
            Ok((results, svg))
        }
        Err(TraceError::Failure { reason, steps }) => Err(RunError::Computation(format!(
            "trace failed after {} step(s): {reason}",
            steps.len()
        ))),
        Err(e) => Err(RunError::Computation(e.to_string())),
    }
}

fn faces_results(scene: &Scene) -> Result<Value, RunError> {
    if scene.scatterers.is_empty() {
        return Err(RunError::Usage("faces needs at least one scatterer".into()));
    }
    let mut per_scatterer = serde_json::Map::new();
    for (name, scatterer) in &scene.scatterers {
        let complex = crate::geom::faces(scatterer)
            .map_err(|e| RunError::Scene(SceneError::Invariant {
                element: format!("scatterers.{name}"),
                what: e.to_string(),
            }))?;
        let delta = complex.min_face_distance();
        let min_svs = complex.vertex_normal_span_min_svs();
        per_scatterer.insert(
            name.clone(),
            json!({
                "counts": complex.counts(),
                "min_face_distance": if delta.is_finite() { json!(delta) } else { json!("infinite") },
                "vertex_normal_min_singular_values": min_svs,
                "vertex_normal_span_ok": min_svs.iter().all(|&s| s > crate::tol::RANK_SV_TOL),
            }),
        );
    }
    Ok(Value::Object(per_scatterer))
}
