//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! 1. Measurement-count table reproduced by the certifier.
//! 2. Analytic vs oracle agreement on randomized plans.
//! 3. Reflection-principle verification for all six boundary conditions.
//! 4. Second-order decay of the finite-difference PDE residuals.
//! 5. Reflection-group pencil suite.
//! 6. Vertex normal-span property on random 3D polytopes.
//! 7. Tracer soundness on crafted 2D scenes.
//! 8. Byte-identical CLI determinism.

use nalgebra::DVector;
use polyscat::certify::{
    certify, certify_general, certify_obstacle, sampling_oracle, CertifyConfig, MeasurementPlan,
    ScattererClass, Verdict,
};
use polyscat::geom::{
    faces, ConvexPolytope, HalfSpace, Hyperplane, PolyhedralScatterer, Side,
};
use polyscat::refgroup::{closure, sector_count, ClosureCaps, ClosureStatus, ReflectionSet};
use polyscat::trace::{trace_to_reflection, witness_is_sound, FlatPoint};
use polyscat::waves::{
    boundary_modulus_profile, verify_reflection_principle, AcousticWave, BoundaryConditionTag,
    ElasticWave, EmWave, IncidentWave, ProfileSampling, SuperposedField, C,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::time::Instant;

type Point = DVector<f64>;

fn pt(coords: &[f64]) -> Point {
    Point::from_vec(coords.to_vec())
}

fn pass(criterion: usize, detail: &str) {
    println!("PASS criterion {criterion}: {detail}");
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    loop {
        let v = Point::from_iterator(dim, (0..dim).map(|_| rng.gen_range(-1.0..1.0)));
        let n = v.norm();
        if n > 0.2 {
            return v / n;
        }
    }
}

fn random_orthogonal(rng: &mut ChaCha8Rng, d: &Point) -> Point {
    loop {
        let v = random_unit(rng, d.len());
        let mut w = &v - d * d.dot(&v);
        let n = w.norm();
        if n > 0.2 {
            w /= n;
            return w;
        }
    }
}

fn bcs(tags: &[BoundaryConditionTag]) -> BTreeSet<BoundaryConditionTag> {
    tags.iter().cloned().collect()
}

fn acoustic(omega: f64, d: &[f64]) -> IncidentWave {
    IncidentWave::Acoustic(AcousticWave::new(omega, pt(d)).unwrap())
}

fn em(omega: f64, d: &[f64], p: &[f64]) -> IncidentWave {
    IncidentWave::Electromagnetic(EmWave::new(omega, pt(d), pt(p)).unwrap())
}

fn elastic_pure(kind: char, omega: f64, d: &[f64], q: &[f64]) -> IncidentWave {
    let (c_p, c_s) = match kind {
        'p' => (C::new(1.0, 0.0), C::new(0.0, 0.0)),
        _ => (C::new(0.0, 0.0), C::new(1.0, 0.0)),
    };
    IncidentWave::Elastic(
        ElasticWave::new(2.0, 1.0, 1.0, omega, pt(d), pt(q), c_p, c_s).unwrap(),
    )
}

// ---------------------------------------------------------------------------
// Criterion 1: the measurement-count table.
// ---------------------------------------------------------------------------
#[test]
fn criterion_1_measurement_count_table() {
    let start = Instant::now();
    let config = CertifyConfig::default();
    use BoundaryConditionTag::*;
    let mut margins: Vec<(String, f64)> = Vec::new();

    let mut expect_holds = |label: &str, plan: MeasurementPlan| {
        let cert = certify(&plan, &config).expect(label);
        match cert.verdict {
            Verdict::CriterionHolds { margin } => {
                assert!(margin > 1e-9, "{label}: margin {margin} not positive");
                margins.push((label.to_string(), margin));
            }
            Verdict::CriterionFails { .. } => panic!("{label}: expected holds"),
        }
        cert
    };

    // Dirichlet, one wave: holds with margin exactly 1.
    let cert = expect_holds(
        "dirichlet 1 wave",
        MeasurementPlan::new(
            ScattererClass::General,
            bcs(&[Dirichlet]),
            vec![acoustic(2.0, &[1.0, 0.0])],
        )
        .unwrap(),
    );
    assert_eq!(cert.margin(), Some(1.0), "dirichlet margin must be exactly 1");

    // Neumann with N independent directions: holds (N = 2 and N = 3).
    expect_holds(
        "neumann 2 independent waves (2D)",
        MeasurementPlan::new(
            ScattererClass::General,
            bcs(&[Neumann]),
            vec![acoustic(2.0, &[1.0, 0.0]), acoustic(2.0, &[0.0, 1.0])],
        )
        .unwrap(),
    );
    expect_holds(
        "neumann 3 independent waves (3D)",
        MeasurementPlan::new(
            ScattererClass::General,
            bcs(&[Neumann]),
            vec![
                acoustic(2.0, &[1.0, 0.0, 0.0]),
                acoustic(2.0, &[0.0, 1.0, 0.0]),
                acoustic(2.0, &[0.0, 0.0, 1.0]),
            ],
        )
        .unwrap(),
    );

    // Neumann with fewer than N waves: fails with a verified witness.
    let plan = MeasurementPlan::new(
        ScattererClass::General,
        bcs(&[Neumann]),
        vec![acoustic(2.0, &[1.0, 0.0, 0.0]), acoustic(2.0, &[0.0, 1.0, 0.0])],
    )
    .unwrap();
    let cert = certify(&plan, &config).unwrap();
    match &cert.verdict {
        Verdict::CriterionFails { witness } => {
            let nu = &witness.normals[0];
            for (k, wave) in plan.waves.iter().enumerate() {
                let plane = Hyperplane::new(nu.clone(), 0.0).unwrap();
                let modulus = boundary_modulus_profile(
                    witness.bcs[0],
                    wave,
                    &plane,
                    &ProfileSampling::default(),
                )
                .unwrap()
                .value();
                assert!(modulus <= 1e-9, "witness wave {k} modulus {modulus}");
            }
        }
        v => panic!("neumann 2-of-3 expected failure, got {v:?}"),
    }

    // Neumann obstacle with one wave: holds.
    expect_holds(
        "neumann obstacle 1 wave (3D)",
        MeasurementPlan::new(
            ScattererClass::Obstacle,
            bcs(&[Neumann]),
            vec![acoustic(2.0, &[0.6, 0.0, 0.8])],
        )
        .unwrap(),
    );

    // PEC with two waves with independent q x d: holds.
    expect_holds(
        "pec 2 waves",
        MeasurementPlan::new(
            ScattererClass::General,
            bcs(&[PerfectElectric]),
            vec![
                em(2.0, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]),
                em(2.0, &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]),
            ],
        )
        .unwrap(),
    );

    // Mixed PEC/PMC with d1 = d2 and independent polarisations: holds.
    expect_holds(
        "mixed pec/pmc 2 waves",
        MeasurementPlan::new(
            ScattererClass::General,
            bcs(&[PerfectElectric, PerfectMagnetic]),
            vec![
                em(2.0, &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]),
                em(2.0, &[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]),
            ],
        )
        .unwrap(),
    );

    // EM obstacle with one wave: holds for PEC, PMC and mixed.
    for tags in [
        vec![PerfectElectric],
        vec![PerfectMagnetic],
        vec![PerfectElectric, PerfectMagnetic],
    ] {
        expect_holds(
            &format!("em obstacle 1 wave {tags:?}"),
            MeasurementPlan::new(
                ScattererClass::Obstacle,
                bcs(&tags),
                vec![em(2.0, &[0.0, 0.6, 0.8], &[1.0, 0.0, 0.0])],
            )
            .unwrap(),
        );
    }

    // Elastic fourth condition, one pure longitudinal wave: holds.
    expect_holds(
        "elastic fourth 1 longitudinal",
        MeasurementPlan::new(
            ScattererClass::General,
            bcs(&[ElasticFourth]),
            vec![elastic_pure('p', 3.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0])],
        )
        .unwrap(),
    );

    // Elastic third with two transversal waves (shared d, independent q):
    // holds, including with mixed third/fourth conditions.
    for tags in [vec![ElasticThird], vec![ElasticThird, ElasticFourth]] {
        expect_holds(
            &format!("elastic third 2 transversal {tags:?}"),
            MeasurementPlan::new(
                ScattererClass::General,
                bcs(&tags),
                vec![
                    elastic_pure('s', 3.0, &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]),
                    elastic_pure('s', 3.0, &[1.0, 0.0, 0.0], &[0.0, 0.0, 1.0]),
                ],
            )
            .unwrap(),
        );
    }

    // Elastic obstacle with one pure wave: holds, even mixed.
    for kind in ['p', 's'] {
        expect_holds(
            &format!("elastic obstacle 1 pure {kind} wave, mixed bcs"),
            MeasurementPlan::new(
                ScattererClass::Obstacle,
                bcs(&[ElasticThird, ElasticFourth]),
                vec![elastic_pure(kind, 3.0, &[0.6, 0.0, 0.8], &[0.0, 1.0, 0.0])],
            )
            .unwrap(),
        );
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "criterion 1 exceeded 10 s: {elapsed:?}"
    );
    for (label, margin) in &margins {
        println!("  margin {margin:.6e}  {label}");
    }
    pass(1, &format!("measurement-count table reproduced in {elapsed:?}"));
}

// ---------------------------------------------------------------------------
// Criterion 2: analytic vs oracle agreement on randomized plans.
// ---------------------------------------------------------------------------
#[test]
fn criterion_2_analytic_oracle_agreement() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let config = CertifyConfig::default(); // density 256
    let per_family = 200usize;
    let mut checked = 0usize;

    let run_plan = |plan: MeasurementPlan, family: &str, rng_tag: usize| {
        let cert = match plan.class {
            ScattererClass::General => certify_general(&plan, &config).unwrap(),
            ScattererClass::Obstacle => certify_obstacle(&plan, &config).unwrap(),
        };
        let oracle = sampling_oracle(&plan, 256, 0).unwrap();
        let oracle_holds = oracle.verdict_holds(plan.class, config.vanish_threshold);
        assert_eq!(
            cert.holds(),
            oracle_holds,
            "{family} plan {rng_tag}: verdict disagreement (margin {:?}, oracle worst {})",
            cert.margin(),
            oracle.worst_value
        );
        if let Some(margin) = cert.margin() {
            assert!(
                (margin - oracle.worst_value).abs() <= 1e-6,
                "{family} plan {rng_tag}: margins differ: {margin} vs {}",
                oracle.worst_value
            );
        }
    };

    use BoundaryConditionTag::*;
    for i in 0..per_family {
        // Acoustic family.
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let omega = rng.gen_range(0.5..5.0);
        let count = rng.gen_range(1..=dim);
        let waves: Vec<IncidentWave> = (0..count)
            .map(|_| {
                IncidentWave::Acoustic(
                    AcousticWave::new(omega, random_unit(&mut rng, dim)).unwrap(),
                )
            })
            .collect();
        let tags = match rng.gen_range(0..3) {
            0 => vec![Dirichlet],
            1 => vec![Neumann],
            _ => vec![Dirichlet, Neumann],
        };
        let class = if rng.gen_bool(0.5) {
            ScattererClass::General
        } else {
            ScattererClass::Obstacle
        };
        run_plan(
            MeasurementPlan::new(class, bcs(&tags), waves).unwrap(),
            "acoustic",
            i,
        );
        checked += 1;
    }

    for i in 0..per_family {
        // Electromagnetic family.
        let omega = rng.gen_range(0.5..4.0);
        let count = rng.gen_range(1..=3);
        let waves: Vec<IncidentWave> = (0..count)
            .map(|_| {
                let d = random_unit(&mut rng, 3);
                let p = random_orthogonal(&mut rng, &d);
                IncidentWave::Electromagnetic(EmWave::new(omega, d, p).unwrap())
            })
            .collect();
        let tags = match rng.gen_range(0..3) {
            0 => vec![PerfectElectric],
            1 => vec![PerfectMagnetic],
            _ => vec![PerfectElectric, PerfectMagnetic],
        };
        let class = if rng.gen_bool(0.5) {
            ScattererClass::General
        } else {
            ScattererClass::Obstacle
        };
        run_plan(
            MeasurementPlan::new(class, bcs(&tags), waves).unwrap(),
            "em",
            i,
        );
        checked += 1;
    }

    for i in 0..per_family {
        // Elastic family, pure waves (the analytic paths).
        let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
        let omega = rng.gen_range(1.0..4.0);
        let (lambda, mu, rho) = (
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
            rng.gen_range(0.5..2.0),
        );
        let count = rng.gen_range(1..=2);
        let waves: Vec<IncidentWave> = (0..count)
            .map(|_| {
                let d = random_unit(&mut rng, dim);
                let q = random_orthogonal(&mut rng, &d);
                let (c_p, c_s) = if rng.gen_bool(0.5) {
                    (C::new(1.0, 0.0), C::new(0.0, 0.0))
                } else {
                    (C::new(0.0, 0.0), C::new(1.0, 0.0))
                };
                IncidentWave::Elastic(
                    ElasticWave::new(lambda, mu, rho, omega, d, q, c_p, c_s).unwrap(),
                )
            })
            .collect();
        let tags = match rng.gen_range(0..3) {
            0 => vec![ElasticThird],
            1 => vec![ElasticFourth],
            _ => vec![ElasticThird, ElasticFourth],
        };
        let class = if rng.gen_bool(0.5) {
            ScattererClass::General
        } else {
            ScattererClass::Obstacle
        };
        run_plan(
            MeasurementPlan::new(class, bcs(&tags), waves).unwrap(),
            "elastic",
            i,
        );
        checked += 1;
    }

    let elapsed = start.elapsed();
    assert_eq!(checked, 3 * per_family);
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 2 exceeded 60 s: {elapsed:?}"
    );
    pass(
        2,
        &format!("{checked} randomized plans agree (verdicts and margins) in {elapsed:?}"),
    );
}

// ---------------------------------------------------------------------------
// Criterion 3: reflection-principle verification for all six conditions.
// ---------------------------------------------------------------------------
#[test]
fn criterion_3_reflection_principle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let instances = 50usize;
    let mut worst_rel_residual = 0.0f64;
    use BoundaryConditionTag::*;
    for bc in BoundaryConditionTag::ALL {
        for k in 0..instances {
            let dim = match bc {
                Dirichlet | Neumann => {
                    if k % 2 == 0 {
                        2
                    } else {
                        3
                    }
                }
                _ => 3,
            };
            let wave = match bc {
                Dirichlet | Neumann => IncidentWave::Acoustic(
                    AcousticWave::new(rng.gen_range(14.0..18.0), random_unit(&mut rng, dim))
                        .unwrap(),
                ),
                PerfectElectric | PerfectMagnetic => {
                    let d = random_unit(&mut rng, 3);
                    let p = random_orthogonal(&mut rng, &d);
                    IncidentWave::Electromagnetic(
                        EmWave::new(rng.gen_range(2.0..6.0), d, p).unwrap(),
                    )
                }
                ElasticThird | ElasticFourth => {
                    let d = random_unit(&mut rng, dim);
                    let q = random_orthogonal(&mut rng, &d);
                    // Wavenumbers large enough that the h = 1e-5 rounding
                    // floor sits below 1e-6 of the operator scale.
                    let omega = rng.gen_range(14.0..18.0);
                    let lambda = rng.gen_range(0.7..1.2);
                    let mu = rng.gen_range(0.7..1.2);
                    let rho = rng.gen_range(0.9..1.3);
                    let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                    let split = rng.gen_range(0.0..1.0f64);
                    let c_p = C::new(split.sqrt(), 0.0);
                    let c_s = C::new(0.0, (1.0 - split).sqrt())
                        * C::new(phase.cos(), phase.sin());
                    IncidentWave::Elastic(
                        ElasticWave::new(lambda, mu, rho, omega, d, q, c_p, c_s).unwrap(),
                    )
                }
            };
            let normal = random_unit(&mut rng, dim);
            let plane = Hyperplane::new(normal, rng.gen_range(-0.5..0.5)).unwrap();
            let nu = plane.normal().clone();
            let report = verify_reflection_principle(bc, &wave, &plane, &nu, 25).unwrap();
            assert!(
                report.max_boundary_modulus < 1e-8,
                "{bc:?} instance {k}: boundary modulus {}",
                report.max_boundary_modulus
            );
            let rel = report.max_pde_residual / report.residual_scale.max(1.0);
            worst_rel_residual = worst_rel_residual.max(rel);
            assert!(
                rel < 1e-6,
                "{bc:?} instance {k}: residual {} vs scale {}",
                report.max_pde_residual,
                report.residual_scale
            );
            assert!(
                report.max_value_jump < 1e-8,
                "{bc:?} instance {k}: value jump {}",
                report.max_value_jump
            );
            assert!(
                report.max_gradient_jump < 1e-8,
                "{bc:?} instance {k}: gradient jump {}",
                report.max_gradient_jump
            );
        }
    }
    println!("  worst relative residual {worst_rel_residual:.3e} (threshold 1e-6)");
    pass(3, "6 boundary conditions x 50 instances within thresholds");
}

// ---------------------------------------------------------------------------
// Criterion 4: second-order decay of the FD residuals.
// ---------------------------------------------------------------------------
#[test]
fn criterion_4_residual_order() {
    let points3 = vec![pt(&[0.31, -0.77, 0.52]), pt(&[1.21, 0.45, -0.34])];
    let points2 = vec![pt(&[0.31, -0.77]), pt(&[1.21, 0.45])];
    let steps: [f64; 3] = [1e-2, 1e-3, 1e-4];

    let slope = |residuals: &[f64]| -> f64 {
        // Least-squares slope of log10 r against log10 h.
        let xs: Vec<f64> = steps.iter().map(|h| h.log10()).collect();
        let ys: Vec<f64> = residuals.iter().map(|r| r.log10()).collect();
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };

    let fields = [
        (
            "helmholtz",
            SuperposedField::from_incident(&acoustic(10.0, &[0.6, 0.8])),
            points2.clone(),
        ),
        (
            "maxwell",
            SuperposedField::from_incident(&em(10.0, &[0.0, 0.6, 0.8], &[1.0, 0.0, 0.0])),
            points3.clone(),
        ),
        (
            "navier",
            SuperposedField::from_incident(&IncidentWave::Elastic(
                ElasticWave::new(
                    1.0,
                    1.0,
                    1.0,
                    10.0,
                    pt(&[0.6, 0.0, 0.8]),
                    pt(&[0.8, 0.0, -0.6]),
                    C::new(0.5f64.sqrt(), 0.0),
                    C::new(0.0, 0.5f64.sqrt()),
                )
                .unwrap(),
            )),
            points3,
        ),
    ];
    for (name, field, points) in &fields {
        let residuals: Vec<f64> = steps.iter().map(|&h| field.pde_residual(points, h)).collect();
        let order = slope(&residuals);
        assert!(
            (order - 2.0).abs() <= 0.2,
            "{name}: observed order {order}, residuals {residuals:?}"
        );
        println!("  {name}: order {order:.3}");
    }
    pass(4, "helmholtz/maxwell/navier residuals decay at order 2.0 +- 0.2");
}

// ---------------------------------------------------------------------------
// Criterion 5: reflection-group pencil suite.
// ---------------------------------------------------------------------------
#[test]
fn criterion_5_reflection_groups() {
    use rand::seq::SliceRandom;
    let line = |theta: f64| {
        Hyperplane::new(pt(&[-theta.sin(), theta.cos()]), 0.0).unwrap()
    };
    for m in 2..=8usize {
        let planes: Vec<Hyperplane> = (0..m)
            .map(|k| line(k as f64 * std::f64::consts::PI / m as f64))
            .collect();
        let rs = ReflectionSet::new(2, planes).unwrap();
        let (closed, group) = closure(&rs, ClosureCaps::default()).unwrap();
        assert_eq!(closed.len(), m, "pencil m={m}: closure size");
        assert_eq!(group.closure_status, ClosureStatus::Finite);
        assert_eq!(group.order(), 2 * m, "pencil m={m}: group order");
        assert_eq!(sector_count(&closed).unwrap(), 2 * m, "pencil m={m}: sectors");
    }

    // Parallel distinct pair: the equispaced family exceeds the cap.
    let rs = ReflectionSet::new(
        2,
        vec![
            Hyperplane::new(pt(&[1.0, 0.0]), 0.0).unwrap(),
            Hyperplane::new(pt(&[1.0, 0.0]), 0.7).unwrap(),
        ],
    )
    .unwrap();
    let (_, group) = closure(&rs, ClosureCaps::default()).unwrap();
    assert_eq!(group.closure_status, ClosureStatus::ExceededCap);

    // Closure is independent of input order over 20 shuffles.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut planes = vec![
        line(0.0),
        line(std::f64::consts::FRAC_PI_4),
        line(std::f64::consts::FRAC_PI_2),
    ];
    let (reference, _) = closure(
        &ReflectionSet::new(2, planes.clone()).unwrap(),
        ClosureCaps::default(),
    )
    .unwrap();
    for _ in 0..20 {
        planes.shuffle(&mut rng);
        let (closed, _) = closure(
            &ReflectionSet::new(2, planes.clone()).unwrap(),
            ClosureCaps::default(),
        )
        .unwrap();
        assert!(closed.set_eq(&reference), "closure depends on input order");
    }
    pass(5, "pencils m=2..8 close exactly; parallel pair exceeds cap; order-independent");
}

// ---------------------------------------------------------------------------
// Criterion 6: vertex normal-span property on the cube and random polytopes.
// ---------------------------------------------------------------------------
#[test]
fn criterion_6_vertex_normal_spans() {
    let mut polytopes = vec![ConvexPolytope::axis_box(&[0.0; 3], &[1.0; 3]).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    while polytopes.len() < 6 {
        let hs: Vec<HalfSpace> = (0..12)
            .map(|_| {
                let n = random_unit(&mut rng, 3);
                let c = rng.gen_range(0.6..1.4);
                HalfSpace::from_constraint(n, c, Side::NonPositive).unwrap()
            })
            .collect();
        if let Ok(poly) = ConvexPolytope::from_halfspaces(3, hs) {
            polytopes.push(poly);
        }
    }
    for (i, poly) in polytopes.into_iter().enumerate() {
        let scatterer = PolyhedralScatterer::new(3, vec![poly], vec![]).unwrap();
        let complex = faces(&scatterer).unwrap();
        let counts = complex.counts();
        // Euler characteristic of a convex 3-polytope boundary.
        assert_eq!(
            counts[0] + counts[2],
            counts[1] + 2,
            "polytope {i}: V - E + F != 2 ({counts:?})"
        );
        let svs = complex.vertex_normal_span_min_svs();
        assert!(!svs.is_empty());
        for (v, sv) in svs.iter().enumerate() {
            assert!(
                *sv > 1e-9,
                "polytope {i} vertex {v}: incident normal matrix rank-deficient (sv {sv:.3e})"
            );
        }
    }
    pass(6, "unit cube and 5 random 3D polytopes: every vertex normal matrix has rank 3");
}

// ---------------------------------------------------------------------------
// Criterion 7: tracer soundness on crafted scenes.
// ---------------------------------------------------------------------------
#[test]
fn criterion_7_tracer_soundness() {
    struct Scene {
        label: &'static str,
        scatterer: PolyhedralScatterer,
        seed_point: Point,
        seed_normal: Point,
        far: bool,
    }

    let square = |x0: f64, y0: f64, x1: f64, y1: f64| {
        ConvexPolytope::axis_box(&[x0, y0], &[x1, y1]).unwrap()
    };
    let screen = |a: [f64; 2], b: [f64; 2]| {
        polyscat::geom::Cell::segment_2d(&pt(&a), &pt(&b), BoundaryConditionTag::Dirichlet)
            .unwrap()
    };
    let obstacle = |polys: Vec<ConvexPolytope>| PolyhedralScatterer::new(2, polys, vec![]).unwrap();
    let screens = |cells: Vec<polyscat::geom::Cell>| {
        PolyhedralScatterer::new(2, vec![], cells).unwrap()
    };

    let mut scenes = vec![
        Scene {
            label: "far seed beside a square",
            scatterer: obstacle(vec![square(-0.5, -0.5, 0.5, 0.5)]),
            seed_point: pt(&[4.0, 0.0]),
            seed_normal: pt(&[0.0, 1.0]),
            far: true,
        },
        Scene {
            label: "far seed above two screens",
            scatterer: screens(vec![screen([-1.0, 0.0], [1.0, 0.0]), screen([2.0, 1.0], [3.0, 1.0])]),
            seed_point: pt(&[0.0, 5.0]),
            seed_normal: pt(&[1.0, 0.0]),
            far: true,
        },
        Scene {
            label: "far seed on a diagonal plane",
            scatterer: obstacle(vec![square(-0.6, -0.6, 0.6, 0.6)]),
            seed_point: pt(&[3.0, 3.0]),
            seed_normal: pt(&[-0.5f64.sqrt(), 0.5f64.sqrt()]),
            far: true,
        },
        Scene {
            label: "mirror pair across x = 0",
            scatterer: obstacle(vec![square(0.5, -1.0, 1.5, 1.0), square(-1.5, -1.0, -0.5, 1.0)]),
            seed_point: pt(&[0.0, 0.3]),
            seed_normal: pt(&[1.0, 0.0]),
            far: false,
        },
        Scene {
            label: "mirror pair across y = 0.5",
            scatterer: obstacle(vec![square(-1.0, 1.0, 1.0, 2.0), square(-1.0, -1.0, 1.0, 0.0)]),
            seed_point: pt(&[0.2, 0.5]),
            seed_normal: pt(&[0.0, 1.0]),
            far: false,
        },
        Scene {
            label: "mirror pair across the diagonal",
            scatterer: obstacle(vec![square(1.0, -0.5, 2.0, 0.5), {
                // The mirror image of the square across y = x.
                ConvexPolytope::from_vertices(
                    2,
                    &[pt(&[-0.5, 1.0]), pt(&[0.5, 1.0]), pt(&[0.5, 2.0]), pt(&[-0.5, 2.0])],
                )
                .unwrap()
            }]),
            seed_point: pt(&[0.4, 0.4]),
            seed_normal: pt(&[0.5f64.sqrt(), -0.5f64.sqrt()]),
            far: false,
        },
        Scene {
            label: "equal parallel screens",
            scatterer: screens(vec![screen([-2.0, 0.0], [2.0, 0.0]), screen([-2.0, 2.0], [2.0, 2.0])]),
            seed_point: pt(&[0.0, 1.0]),
            seed_normal: pt(&[0.0, 1.0]),
            far: false,
        },
        Scene {
            label: "four squares, quadrant symmetric",
            scatterer: obstacle(vec![
                square(0.5, 0.5, 1.5, 1.5),
                square(-1.5, 0.5, -0.5, 1.5),
                square(0.5, -1.5, 1.5, -0.5),
                square(-1.5, -1.5, -0.5, -0.5),
            ]),
            seed_point: pt(&[0.0, 0.1]),
            seed_normal: pt(&[1.0, 0.0]),
            far: false,
        },
        Scene {
            label: "mirror screens with a vertical mirror",
            scatterer: screens(vec![screen([0.5, -1.0], [0.5, 1.0]), screen([-0.5, -1.0], [-0.5, 1.0])]),
            seed_point: pt(&[0.0, 0.0]),
            seed_normal: pt(&[1.0, 0.0]),
            far: false,
        },
        Scene {
            label: "offset long/short screens, multi-iteration",
            scatterer: screens(vec![
                screen([-4.0, 0.0], [4.0, 0.0]),
                screen([-1.0, 2.0], [1.0, 2.0]),
                screen([-4.0, 0.0], [-4.0, 2.0]),
                screen([4.0, 0.0], [4.0, 2.0]),
            ]),
            seed_point: pt(&[0.0, 1.0]),
            seed_normal: pt(&[0.0, 1.0]),
            far: false,
        },
        Scene {
            label: "L-pair symmetric across x = 0",
            scatterer: obstacle(vec![
                square(0.5, 0.0, 2.5, 1.0),
                square(0.5, 1.0, 1.5, 2.0),
                square(-2.5, 0.0, -0.5, 1.0),
                square(-1.5, 1.0, -0.5, 2.0),
            ]),
            seed_point: pt(&[0.0, 0.5]),
            seed_normal: pt(&[1.0, 0.0]),
            far: false,
        },
    ];

    assert!(scenes.len() >= 10, "corpus must have at least 10 scenes");
    let mut multi_iteration_seen = false;
    for scene in scenes.drain(..) {
        let plane = Hyperplane::through_point(scene.seed_normal.clone(), &scene.seed_point)
            .unwrap();
        let seed = FlatPoint::new(&scene.scatterer, scene.seed_point.clone(), plane).unwrap();
        let resolution = 0.05;
        let witness = trace_to_reflection(&scene.scatterer, &seed, 32, resolution)
            .unwrap_or_else(|e| panic!("{}: {e}", scene.label));
        assert!(
            witness_is_sound(&scene.scatterer, &witness.plane, witness.escape_radius),
            "{}: witness fails the exact line-minus-ball check",
            scene.label
        );
        if scene.far {
            assert_eq!(
                witness.steps.len(),
                1,
                "{}: far seeds must terminate in exactly one iteration",
                scene.label
            );
            assert!(witness.steps[0].region.far_criterion);
        }
        if witness.steps.len() > 1 {
            multi_iteration_seen = true;
        }
        // Halved resolution reproduces the same witness line within 1e-6 in
        // (angle, offset).
        let fine = trace_to_reflection(&scene.scatterer, &seed, 32, resolution / 2.0)
            .unwrap_or_else(|e| panic!("{} at halved resolution: {e}", scene.label));
        let angle = {
            let dot = witness
                .plane
                .normal()
                .dot(fine.plane.normal())
                .clamp(-1.0, 1.0);
            dot.abs().acos()
        };
        let offset = (witness.plane.offset() - fine.plane.offset()).abs();
        assert!(
            angle <= 1e-6 && offset <= 1e-6,
            "{}: witness drifted between resolutions (angle {angle:.2e}, offset {offset:.2e})",
            scene.label
        );
        println!(
            "  {}: witness offset {:.4}, iterations {}, escape radius {:.3}",
            scene.label,
            witness.plane.offset(),
            witness.steps.len(),
            witness.escape_radius
        );
    }
    assert!(
        multi_iteration_seen,
        "corpus must exercise a bounded first region (>= 2 iterations)"
    );
    pass(7, ">= 10 crafted scenes: sound witnesses, far seeds in 1 iteration, stable under refinement");
}

// ---------------------------------------------------------------------------
// Criterion 8: byte-identical CLI determinism.
// ---------------------------------------------------------------------------
#[test]
fn criterion_8_cli_determinism() {
    use std::process::Command;
    let bin = env!("CARGO_BIN_EXE_polyscat");
    let dir = std::env::temp_dir().join(format!("polyscat_accept_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let certify_scene = r#"{
        "version": 1,
        "dimension": 2,
        "scatterers": { "sigma": { "obstacles": [ { "vertices": [[0,0],[1,0],[1,1],[0,1]] } ] } },
        "waves": [
            { "family": "acoustic", "omega": 2.0, "direction": [1, 0] },
            { "family": "acoustic", "omega": 2.0, "direction": [0, 1] }
        ],
        "plan": { "class": "general", "allowed_bcs": ["neumann"] }
    }"#;
    let group_scene = r#"{
        "version": 1,
        "dimension": 2,
        "scatterers": { "mirrors": { "screens": [
            { "segment": [[0.2,0],[1,0]], "bc": "dirichlet" },
            { "segment": [[0.2,0.2],[1,1]], "bc": "dirichlet" }
        ] } }
    }"#;
    let trace_scene = r#"{
        "version": 1,
        "dimension": 2,
        "scatterers": { "pair": { "obstacles": [
            { "vertices": [[0.5,-1],[1.5,-1],[1.5,1],[0.5,1]] },
            { "vertices": [[-1.5,-1],[-0.5,-1],[-0.5,1],[-1.5,1]] }
        ] } },
        "trace": { "sigma": "pair", "seed": { "point": [0, 0.3], "plane": { "normal": [1, 0], "offset": 0 } } }
    }"#;
    let render_scene = certify_scene;

    let cases: Vec<(&str, &str, Vec<&str>)> = vec![
        ("certify", certify_scene, vec!["certify", "--grid-density", "128"]),
        ("group", group_scene, vec!["group"]),
        ("trace", trace_scene, vec!["trace", "--resolution", "0.05"]),
        ("render", render_scene, vec!["render"]),
    ];

    for (name, scene, args) in cases {
        let scene_path = dir.join(format!("{name}.json"));
        std::fs::write(&scene_path, scene).unwrap();
        let mut outputs = Vec::new();
        for round in 0..2 {
            let svg_path = dir.join(format!("{name}_{round}.svg"));
            let mut cmd = Command::new(bin);
            cmd.args(&args)
                .arg("--scene")
                .arg(&scene_path)
                .arg("--seed")
                .arg("0");
            if name == "trace" || name == "render" {
                cmd.arg("--svg").arg(&svg_path);
            }
            let output = cmd.output().expect("run CLI");
            assert!(
                output.status.success(),
                "{name} round {round} failed: {}",
                String::from_utf8_lossy(&output.stderr)
            );
            let svg = if name == "trace" || name == "render" {
                std::fs::read(&svg_path).unwrap()
            } else {
                Vec::new()
            };
            outputs.push((output.stdout, svg));
        }
        assert_eq!(
            outputs[0].0, outputs[1].0,
            "{name}: stdout differs between runs"
        );
        assert_eq!(outputs[0].1, outputs[1].1, "{name}: SVG differs between runs");
    }
    let _ = std::fs::remove_dir_all(&dir);
    pass(8, "certify/group/trace/render byte-identical across two runs");
}
