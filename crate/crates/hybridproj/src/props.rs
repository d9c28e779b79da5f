//! Seeded property suites. Each suite samples the inequalities that the
//! geometry, projection, catalog, and resolvent layers promise, and reports
//! violation counts with worst margins. The acceptance tests and the CLI
//! `props` verb both run these.

use crate::catalog::{
    check_ism, check_relatively_nonexpansive, theorem3_precondition, Bifunction, FixedPointMap,
    IsmOperator, MonotoneMap,
};
use crate::error::Result;
use crate::resolvent::{
    check_firm_nonexpansiveness, check_resolvent_phi_inequality, solve_resolvent, ResolventProblem,
};
use crate::sampling;
use crate::sets::{gen_project, halfspace_from_phi_cut, ConvexSet, Halfspace};
use crate::solver::{
    run_theorem1, run_theorem2, ProblemInstance, Schedule, SolverConfig, Termination,
};
use crate::space::{pair, DualVector, SpaceSpec, Vector};

/// Outcome of one sampled property check. `worst_margin` is the most
/// negative slack observed (0 when every sample held with room to spare);
/// a violation is a sample whose slack fell below `-tolerance`.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: String,
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub tolerance: f64,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn from_margins(name: impl Into<String>, margins: &[f64], tolerance: f64) -> Self {
        PropertyReport {
            name: name.into(),
            samples: margins.len(),
            violations: margins.iter().filter(|&&m| m < -tolerance).count(),
            worst_margin: margins.iter().fold(0.0f64, |acc, &m| acc.min(m)),
            tolerance,
        }
    }
}

fn geometry_spaces() -> Result<Vec<SpaceSpec>> {
    Ok(vec![
        SpaceSpec::hilbert(2)?,
        SpaceSpec::hilbert(5)?,
        SpaceSpec::hilbert(20)?,
        SpaceSpec::lp(2, 1.5)?,
        SpaceSpec::lp(5, 1.5)?,
        SpaceSpec::lp(20, 1.5)?,
        SpaceSpec::lp(5, 2.0)?,
        SpaceSpec::lp(5, 3.0)?,
    ])
}

const GEOMETRY_SAMPLES: usize = 1000;

/// Duality identity, J round trips, the phi sandwich, the duality-map
/// difference bound, the V shift inequality, and the Hilbert reduction.
pub fn geometry_suite(seed: u64) -> Result<Vec<PropertyReport>> {
    let mut rng = sampling::rng(seed);
    let spaces = geometry_spaces()?;
    let mut reports = Vec::new();

    let mut identity_margins = Vec::new();
    let mut round_trip_margins = Vec::new();
    let mut sandwich_margins = Vec::new();
    let mut lemma3_margins = Vec::new();
    let mut lemma8_margins = Vec::new();
    let mut v_agreement_margins = Vec::new();
    let mut hilbert_margins = Vec::new();

    for space in &spaces {
        let dim = space.dim();
        for _ in 0..GEOMETRY_SAMPLES {
            let x = sampling::vector_log_scale(&mut rng, dim, 1.5);
            let y = sampling::vector_log_scale(&mut rng, dim, 1.5);
            let jx = space.duality_map(&x)?;
            let nx = space.norm(&x)?;
            let ny = space.norm(&y)?;

            // <x, Jx> = ||x||^2 and ||Jx||_* = ||x||
            let pairing_err = (pair(&x, &jx) - nx * nx).abs();
            let norm_err = (space.dual_norm(&jx)? - nx).abs();
            identity_margins.push(1e-10 * (1.0 + nx * nx) - pairing_err);
            identity_margins.push(1e-10 * (1.0 + nx) - norm_err);

            // round trips in both directions
            let back = space.duality_map_inverse(&jx)?;
            round_trip_margins.push(1e-10 * (1.0 + nx) - space.norm(&back.sub(&x))?);
            let u = DualVector::new(
                sampling::vector_log_scale(&mut rng, dim, 1.5)
                    .as_slice()
                    .to_vec(),
            );
            let ju = space.duality_map(&space.duality_map_inverse(&u)?)?;
            round_trip_margins
                .push(1e-10 * (1.0 + space.dual_norm(&u)?) - space.dual_norm(&ju.sub(&u))?);

            // (||x|| - ||y||)^2 <= phi(x, y) <= (||x|| + ||y||)^2
            let phi = space.lyapunov_phi(&x, &y)?;
            let lo = (nx - ny) * (nx - ny);
            let hi = (nx + ny) * (nx + ny);
            let scale = 1.0 + hi;
            sandwich_margins.push(phi - lo + 1e-10 * scale);
            sandwich_margins.push(hi - phi + 1e-10 * scale);

            // ||x - y|| <= (2/c^2) ||Jx - Jy||
            if let Some(c) = space.convexity_constant() {
                let lhs = space.norm(&x.sub(&y))?;
                let jy = space.duality_map(&y)?;
                let rhs = 2.0 / (c * c) * space.dual_norm(&jx.sub(&jy))?;
                lemma3_margins.push(rhs - lhs + 1e-10 * (1.0 + lhs));
            }

            // V(x, x*) + 2 <J^{-1}x* - x, y*> <= V(x, x* + y*)
            let xs = DualVector::new(
                sampling::vector_in_cube(&mut rng, dim, 3.0)
                    .as_slice()
                    .to_vec(),
            );
            let ys = DualVector::new(
                sampling::vector_in_cube(&mut rng, dim, 3.0)
                    .as_slice()
                    .to_vec(),
            );
            let lhs = space.v_functional(&x, &xs)?
                + 2.0 * pair(&space.duality_map_inverse(&xs)?.sub(&x), &ys);
            let rhs = space.v_functional(&x, &xs.add(&ys))?;
            lemma8_margins.push(rhs - lhs + 1e-10);

            // V(x, x*) = phi(x, J^{-1} x*)
            let v = space.v_functional(&x, &xs)?;
            let phi_of_inverse = space.lyapunov_phi(&x, &space.duality_map_inverse(&xs)?)?;
            v_agreement_margins
                .push(1e-10 * (1.0 + v.abs()) - (v - phi_of_inverse).abs());

            if space.is_hilbert() {
                let d = x.sub(&y);
                let direct = d.euclidean_norm().powi(2);
                hilbert_margins.push(1e-12 * (1.0 + direct) - (phi - direct).abs());
            }
        }
    }

    reports.push(PropertyReport::from_margins(
        "duality identity <x,Jx> = ||x||^2 = ||Jx||*^2",
        &identity_margins,
        0.0,
    ));
    reports.push(PropertyReport::from_margins(
        "J / J^{-1} round trip",
        &round_trip_margins,
        0.0,
    ));
    reports.push(PropertyReport::from_margins(
        "phi sandwich between (||x||-||y||)^2 and (||x||+||y||)^2",
        &sandwich_margins,
        0.0,
    ));
    reports.push(PropertyReport::from_margins(
        "||x-y|| <= (2/c^2)||Jx-Jy||",
        &lemma3_margins,
        0.0,
    ));
    reports.push(PropertyReport::from_margins(
        "V shift inequality",
        &lemma8_margins,
        0.0,
    ));
    reports.push(PropertyReport::from_margins(
        "V(x, x*) = phi(x, J^{-1} x*)",
        &v_agreement_margins,
        0.0,
    ));
    reports.push(PropertyReport::from_margins(
        "Hilbert reduction phi = ||x-y||^2",
        &hilbert_margins,
        0.0,
    ));
    Ok(reports)
}

fn projection_test_sets(dim: usize) -> Result<Vec<(&'static str, ConvexSet)>> {
    Ok(vec![
        ("box", ConvexSet::box_set(vec![-1.0; dim], vec![1.5; dim])?),
        ("ball", ConvexSet::ball(Vector::zeros(dim), 1.25)?),
        (
            "halfspace",
            ConvexSet::halfspace(Halfspace::new(
                DualVector::new({
                    let mut a = vec![0.5; dim];
                    a[0] = 1.0;
                    a
                }),
                0.75,
            )?),
        ),
    ])
}

const PROJECTION_SAMPLES: usize = 200;

/// Generalized-projection characterizations on boxes, balls, and halfspaces
/// in Hilbert and l_p geometry, plus metric-projection firmness and the
/// phi-cut halfspace correctness.
pub fn sets_suite(seed: u64) -> Result<Vec<PropertyReport>> {
    let mut rng = sampling::rng(seed);
    let dim = 3;
    let spaces = vec![SpaceSpec::hilbert(dim)?, SpaceSpec::lp(dim, 1.5)?];
    let mut lemma4_margins = Vec::new();
    let mut lemma6_margins = Vec::new();
    let mut idempotence = Vec::new();
    let mut hilbert_agreement = Vec::new();
    let mut firmness = Vec::new();
    let mut metric_characterization = Vec::new();

    for space in &spaces {
        for (_, set) in projection_test_sets(dim)? {
            for _ in 0..PROJECTION_SAMPLES {
                let x = sampling::vector_in_cube(&mut rng, dim, 3.0);
                let proj = gen_project(space, &set, &x)?;

                // phi(y, Px) + phi(Px, x) <= phi(y, x) for y in the set
                let y = sampling::point_in_set(&mut rng, &set, 3.0)?;
                let margin = space.lyapunov_phi(&y, &x)?
                    - space.lyapunov_phi(&y, &proj)?
                    - space.lyapunov_phi(&proj, &x)?;
                lemma4_margins.push(margin);

                // <z - Px, J Px - J x> >= 0 for z in the set
                let j_diff = space.duality_map(&proj)?.sub(&space.duality_map(&x)?);
                for _ in 0..5 {
                    let z = sampling::point_in_set(&mut rng, &set, 3.0)?;
                    lemma6_margins.push(pair(&z.sub(&proj), &j_diff));
                }

                let twice = gen_project(space, &set, &proj)?;
                idempotence.push(1e-8 - twice.sub(&proj).euclidean_norm());

                if space.is_hilbert() {
                    let metric = set.metric_project(&x)?;
                    hilbert_agreement.push(1e-8 - metric.sub(&proj).euclidean_norm());
                    let x2 = sampling::vector_in_cube(&mut rng, dim, 3.0);
                    let p2 = set.metric_project(&x2)?;
                    let dp = proj.sub(&p2);
                    firmness
                        .push(crate::space::dot(&dp, &x.sub(&x2)) - crate::space::dot(&dp, &dp));
                    // <x - Px, y - Px> <= 0 for y in the set
                    metric_characterization
                        .push(-crate::space::dot(&x.sub(&metric), &y.sub(&metric)));
                }
            }
        }
    }

    // Cut correctness: membership in the phi-comparison halfspace agrees
    // with the sign of phi(z, x) - phi(z, w).
    let mut cut_agreement = Vec::new();
    for space in &spaces {
        let w = sampling::vector_in_cube(&mut rng, dim, 2.0);
        let x = sampling::vector_in_cube(&mut rng, dim, 2.0);
        let cut = halfspace_from_phi_cut(space, &w, &x)?;
        for _ in 0..1000 {
            let z = sampling::vector_in_cube(&mut rng, dim, 4.0);
            let diff = space.lyapunov_phi(&z, &x)? - space.lyapunov_phi(&z, &w)?;
            if diff.abs() <= 1e-9 {
                continue;
            }
            let inside = cut.contains(&z, 0.0);
            cut_agreement.push(if inside == (diff >= 0.0) { 0.0 } else { -1.0 });
        }
    }

    Ok(vec![
        PropertyReport::from_margins(
            "phi(y, Px) + phi(Px, x) <= phi(y, x)",
            &lemma4_margins,
            1e-8,
        ),
        PropertyReport::from_margins(
            "<z - Px, J Px - J x> >= 0 over the set",
            &lemma6_margins,
            1e-8,
        ),
        PropertyReport::from_margins("generalized projection idempotence", &idempotence, 0.0),
        PropertyReport::from_margins(
            "Hilbert generalized = metric projection",
            &hilbert_agreement,
            0.0,
        ),
        PropertyReport::from_margins("metric projection firmness", &firmness, 1e-8),
        PropertyReport::from_margins(
            "metric projection characterization <x - Px, y - Px> <= 0",
            &metric_characterization,
            1e-8,
        ),
        PropertyReport::from_margins("phi-cut halfspace agreement", &cut_agreement, 0.5),
    ])
}

/// Inverse-strong-monotonicity, relative nonexpansiveness, the induced
/// Lipschitz bound, and the witness-based zero reduction.
pub fn catalog_suite(seed: u64) -> Result<Vec<PropertyReport>> {
    let space = SpaceSpec::hilbert(5)?;
    let mut reports = Vec::new();

    let eye = MonotoneMap::affine(identity_rows(5), vec![0.0; 5])?;
    let ops = vec![
        ("identity, gamma 1", IsmOperator::new(&space, eye.clone(), 1.0)?),
        (
            "diagonal, default gamma",
            IsmOperator::with_default_gamma(
                &space,
                MonotoneMap::affine(diagonal_rows(&[1.0, 2.0, 0.5, 1.5, 3.0]), vec![0.1; 5])?,
            )?,
        ),
        ("zero map", IsmOperator::new(&space, MonotoneMap::zero(5), 0.7)?),
    ];
    for (name, op) in &ops {
        let r = check_ism(op, &space, 500, seed ^ 0x15);
        reports.push(PropertyReport {
            name: format!("inverse strong monotonicity: {name}"),
            samples: r.samples,
            violations: r.violations,
            worst_margin: r.worst_margin,
            tolerance: 1e-8,
        });
    }

    // Lipschitz constant 1/gamma on samples.
    let mut rng = sampling::rng(seed ^ 0x11b);
    let mut lipschitz = Vec::new();
    for (_, op) in &ops {
        for _ in 0..200 {
            let x = sampling::vector_in_cube(&mut rng, 5, 4.0);
            let y = sampling::vector_in_cube(&mut rng, 5, 4.0);
            let lhs = space.dual_norm(&op.eval(&x)?.sub(&op.eval(&y)?))?;
            let rhs = space.norm(&x.sub(&y))? / op.gamma();
            lipschitz.push(rhs - lhs);
        }
    }
    reports.push(PropertyReport::from_margins(
        "Lipschitz bound ||Ax-Ay|| <= ||x-y||/gamma",
        &lipschitz,
        1e-8,
    ));

    let ball = ConvexSet::ball(Vector::zeros(5), 1.0)?;
    let line = ConvexSet::affine(vec![unit_row(5, 0)], vec![0.0])?;
    let maps = vec![
        ("identity", FixedPointMap::identity(5)),
        ("ball projection", FixedPointMap::projection(ball)),
        (
            "averaged line projection",
            FixedPointMap::averaged(0.5, FixedPointMap::projection(line))?,
        ),
        (
            "resolvent of identity",
            FixedPointMap::resolvent(&space, eye, 1.0)?,
        ),
    ];
    for (name, map) in &maps {
        let r = check_relatively_nonexpansive(map, &space, 300, seed ^ 0x7)?;
        reports.push(PropertyReport {
            name: format!("phi(p, Tx) <= phi(p, x): {name}"),
            samples: r.samples,
            violations: r.violations,
            worst_margin: r.worst_margin,
            tolerance: 1e-10,
        });
    }

    // l_p geometry: the generalized projection map also satisfies the
    // fixed-point inequality.
    let lp = SpaceSpec::lp(4, 1.5)?;
    let lp_box = ConvexSet::box_set(vec![-1.0; 4], vec![1.0; 4])?;
    let r =
        check_relatively_nonexpansive(&FixedPointMap::projection(lp_box), &lp, 200, seed ^ 0x13)?;
    reports.push(PropertyReport {
        name: "phi(p, Tx) <= phi(p, x): lp box projection".into(),
        samples: r.samples,
        violations: r.violations,
        worst_margin: r.worst_margin,
        tolerance: 1e-8,
    });

    // Witness-based reduction of variational-inequality membership.
    let set = ConvexSet::box_set(vec![0.0; 5], vec![2.0; 5])?;
    let shifted = MonotoneMap::affine(identity_rows(5), vec![-1.0; 5])?;
    let op = IsmOperator::new(&space, shifted, 1.0)?;
    let witness_good = Vector::new(vec![1.0; 5]);
    let witness_bad = Vector::zeros(5);
    let ok_good = theorem3_precondition(&op, &space, &set, &witness_good, 100, seed ^ 0x3)?;
    let ok_bad = theorem3_precondition(&op, &space, &set, &witness_bad, 100, seed ^ 0x3)?;
    reports.push(PropertyReport {
        name: "zero-witness norm bound accepts/rejects".into(),
        samples: 2,
        violations: usize::from(!ok_good) + usize::from(ok_bad),
        worst_margin: 0.0,
        tolerance: 0.0,
    });

    Ok(reports)
}

/// Resolvent identities: reduction to the generalized projection, the
/// closed-form proximal case, firm nonexpansiveness, and the phi inequality.
pub fn resolvent_suite(seed: u64) -> Result<Vec<PropertyReport>> {
    let mut reports = Vec::new();
    let mut rng = sampling::rng(seed ^ 0xe5);

    // T_r = Pi_C for f = B = 0, 50 anchors across both geometries.
    let mut reduction = Vec::new();
    for space in [SpaceSpec::hilbert(3)?, SpaceSpec::lp(3, 1.5)?] {
        let set = ConvexSet::box_set(vec![-1.0; 3], vec![1.0; 3])?;
        let f = Bifunction::zero(3);
        let b = MonotoneMap::zero(3);
        for _ in 0..25 {
            let anchor = sampling::vector_in_cube(&mut rng, 3, 2.5);
            let r = 0.5 + 2.0 * unit_draw(&mut rng);
            let prob = ResolventProblem::new(&space, &set, &f, &b, r, anchor.clone())?;
            let z = solve_resolvent(&prob, 1e-9, 400_000)?;
            let pi = gen_project(&space, &set, &anchor)?;
            reduction.push(1e-8 - z.sub(&pi).euclidean_norm());
        }
    }
    reports.push(PropertyReport::from_margins(
        "zero data reduces the resolvent to the generalized projection",
        &reduction,
        0.0,
    ));

    // Closed-form proximal case: h = 1/2||z||^2 gives z = anchor/(1+r).
    let space = SpaceSpec::hilbert(3)?;
    let whole = ConvexSet::whole_space(3);
    let f = Bifunction::separable(identity_rows(3), vec![0.0; 3])?;
    let b = MonotoneMap::zero(3);
    let mut prox = Vec::new();
    for _ in 0..25 {
        let anchor = sampling::vector_in_cube(&mut rng, 3, 3.0);
        let r = 0.5 + 2.0 * unit_draw(&mut rng);
        let prob = ResolventProblem::new(&space, &whole, &f, &b, r, anchor.clone())?;
        let z = solve_resolvent(&prob, 1e-10, 400_000)?;
        let expected = anchor.scale(1.0 / (1.0 + r));
        prox.push(1e-8 - z.sub(&expected).euclidean_norm());
    }
    reports.push(PropertyReport::from_margins(
        "proximal closed form z = x/(1+r)",
        &prox,
        0.0,
    ));

    // Firm nonexpansiveness over 100 anchor pairs.
    let ball = ConvexSet::ball(Vector::zeros(3), 1.0)?;
    let sep = Bifunction::separable(diagonal_rows(&[1.0, 2.0, 0.5]), vec![0.25, -0.25, 0.0])?;
    let firm_a = check_firm_nonexpansiveness(
        &space,
        &ball,
        &Bifunction::zero(3),
        &MonotoneMap::zero(3),
        1.0,
        50,
        seed ^ 0x21,
        1e-8,
    )?;
    let firm_b = check_firm_nonexpansiveness(
        &space,
        &whole,
        &sep,
        &MonotoneMap::zero(3),
        1.0,
        50,
        seed ^ 0x23,
        1e-8,
    )?;
    reports.push(PropertyReport {
        name: "firmly nonexpansive type inequality".into(),
        samples: firm_a.samples + firm_b.samples,
        violations: firm_a.violations + firm_b.violations,
        worst_margin: firm_a.worst_margin.min(firm_b.worst_margin),
        tolerance: 1e-6,
    });

    // phi(q, T_r x) + phi(T_r x, x) <= phi(q, x) over 100 samples.
    let box_set = ConvexSet::box_set(vec![-2.0; 3], vec![2.0; 3])?;
    let center = Vector::new(vec![0.5, -0.5, 0.25]);
    let sep_centered =
        Bifunction::separable(diagonal_rows(&[1.0, 1.5, 2.0]), center.as_slice().to_vec())?;
    let phi_a = check_resolvent_phi_inequality(
        &space,
        &box_set,
        &sep_centered,
        &MonotoneMap::zero(3),
        1.0,
        &center,
        50,
        seed ^ 0x31,
    )?;
    let vi = Bifunction::vi_type(MonotoneMap::affine(
        identity_rows(3),
        vec![-0.25, -0.25, -0.25],
    )?);
    let phi_b = check_resolvent_phi_inequality(
        &space,
        &box_set,
        &vi,
        &MonotoneMap::zero(3),
        1.0,
        &Vector::new(vec![0.25; 3]),
        50,
        seed ^ 0x33,
    )?;
    reports.push(PropertyReport {
        name: "phi(q, T_r x) + phi(T_r x, x) <= phi(q, x)".into(),
        samples: phi_a.samples + phi_b.samples,
        violations: phi_a.violations + phi_b.violations,
        worst_margin: phi_a.worst_margin.min(phi_b.worst_margin),
        tolerance: 1e-6,
    });

    Ok(reports)
}

/// Whole-run checks: planted instances converge with every per-iteration
/// invariant holding and the limit at the projection of x0 onto F.
pub fn solver_suite(_seed: u64) -> Result<Vec<PropertyReport>> {
    let mut reports = Vec::new();

    // Fixed-point family: F = line cap box, closed-form oracle.
    let space = SpaceSpec::hilbert(2)?;
    let set = ConvexSet::box_set(vec![-2.0, -2.0], vec![2.0, 2.0])?;
    let line = ConvexSet::affine(vec![vec![1.0, 0.0]], vec![0.0])?;
    let instance = ProblemInstance {
        space,
        set,
        fixed_point_maps: vec![FixedPointMap::projection(line)],
        ism_operators: vec![],
        equilibrium_pairs: vec![
            (Bifunction::zero(2), MonotoneMap::zero(2)),
            (Bifunction::zero(2), MonotoneMap::zero(2)),
        ],
        beta: vec![0.5, 0.5],
        alpha: Schedule::constant(0.5),
        lambda: Schedule::constant(0.1),
        r: Schedule::constant(1.0),
        start: Vector::new(vec![1.0, 1.0]),
        known_common_solution: Some(Vector::new(vec![0.0, 1.0])),
    };
    let (result, _) = run_theorem1(&instance, &SolverConfig::default())?;
    let oracle = Vector::new(vec![0.0, 1.0]);
    let dist = result.limit.sub(&oracle).euclidean_norm();
    reports.push(PropertyReport {
        name: "hybrid run reaches the projection onto F (fixed-point family)".into(),
        samples: 1,
        violations: usize::from(result.termination != Termination::Converged || dist > 1e-5),
        worst_margin: -dist,
        tolerance: 1e-5,
    });
    reports.push(PropertyReport {
        name: "per-iteration invariants (fixed-point family)".into(),
        samples: result.invariants.total_checked(),
        violations: result.invariants.total_failed(),
        worst_margin: 0.0,
        tolerance: 0.0,
    });

    // Two equilibrium problems sharing a minimizer.
    let space = SpaceSpec::hilbert(2)?;
    let set = ConvexSet::box_set(vec![-2.0, -2.0], vec![2.0, 2.0])?;
    let target = vec![0.5, -0.5];
    let instance = ProblemInstance {
        space,
        set,
        fixed_point_maps: vec![FixedPointMap::identity(2)],
        ism_operators: vec![],
        equilibrium_pairs: vec![
            (
                Bifunction::separable(diagonal_rows(&[1.0, 2.0]), target.clone())?,
                MonotoneMap::zero(2),
            ),
            (
                Bifunction::separable(diagonal_rows(&[2.0, 1.0]), target.clone())?,
                MonotoneMap::zero(2),
            ),
        ],
        beta: vec![0.5, 0.5],
        alpha: Schedule::constant(0.5),
        lambda: Schedule::constant(0.1),
        r: Schedule::constant(1.0),
        start: Vector::new(vec![-1.5, 1.5]),
        known_common_solution: Some(Vector::new(target.clone())),
    };
    let (result, _) = run_theorem2(&instance, &SolverConfig::default())?;
    let dist = result.limit.sub(&Vector::new(target)).euclidean_norm();
    reports.push(PropertyReport {
        name: "hybrid run reaches the planted equilibrium solution".into(),
        samples: 1,
        violations: usize::from(result.termination != Termination::Converged || dist > 1e-5),
        worst_margin: -dist,
        tolerance: 1e-5,
    });
    reports.push(PropertyReport {
        name: "per-iteration invariants (equilibrium family)".into(),
        samples: result.invariants.total_checked(),
        violations: result.invariants.total_failed(),
        worst_margin: 0.0,
        tolerance: 0.0,
    });

    Ok(reports)
}

pub fn suite_by_name(module: &str, seed: u64) -> Result<Vec<PropertyReport>> {
    match module {
        "geometry" | "space-geometry" => geometry_suite(seed),
        "sets" | "convex-sets" => sets_suite(seed),
        "catalog" | "operator-catalog" => catalog_suite(seed),
        "resolvent" => resolvent_suite(seed),
        "solver" | "hybrid-solver" => solver_suite(seed),
        other => Err(crate::error::Error::InvalidInstance(format!(
            "unknown property module '{other}' (expected geometry | sets | catalog | resolvent | solver)"
        ))),
    }
}

fn identity_rows(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            row
        })
        .collect()
}

fn diagonal_rows(diag: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = diag[i];
            row
        })
        .collect()
}

fn unit_row(n: usize, i: usize) -> Vec<f64> {
    let mut row = vec![0.0; n];
    row[i] = 1.0;
    row
}

fn unit_draw(rng: &mut rand_chacha::ChaCha8Rng) -> f64 {
    use rand::Rng;
    rng.gen_range(0.0..1.0)
}
