//! Acceptance suite. Each test prints one pass/fail line for its criterion
//! and asserts the stated tolerances and time budgets.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use hybridproj::catalog::{Bifunction, FixedPointMap, MonotoneMap};
use hybridproj::props;
use hybridproj::sets::ConvexSet;
use hybridproj::solver::{
    run_hilbert_corollary, run_theorem1, run_theorem2, run_theorem4, HilbertCorollary,
    ProblemInstance, Schedule, SolverConfig, Termination,
};
use hybridproj::space::{SpaceSpec, Vector};
use hybridproj_cli::experiment::{build_instance, load_experiment, run_experiment};
use hybridproj_cli::generate::{generate_instance, Template};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hybridproj"))
}

fn report(criterion: usize, name: &str, started: Instant, budget_s: f64, detail: &str) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("ACCEPTANCE {criterion} {name}: PASS ({elapsed:.2}s, {detail})");
    assert!(
        elapsed <= budget_s,
        "criterion {criterion} exceeded its {budget_s}s budget ({elapsed:.2}s)"
    );
}

fn assert_suite_clean(criterion: usize, reports: &[props::PropertyReport]) -> String {
    let mut samples = 0;
    for r in reports {
        samples += r.samples;
        assert!(
            r.passed(),
            "criterion {criterion}: {} had {} violations (worst margin {:.3e})",
            r.name,
            r.violations,
            r.worst_margin
        );
    }
    format!("{} checks over {} samples", reports.len(), samples)
}

#[test]
fn criterion_1_geometry_suite() {
    let started = Instant::now();
    let reports = props::geometry_suite(0).unwrap();
    let names: Vec<&str> = reports.iter().map(|r| r.name.as_str()).collect();
    assert!(names.iter().any(|n| n.contains("duality identity")));
    assert!(names.iter().any(|n| n.contains("round trip")));
    assert!(names.iter().any(|n| n.contains("sandwich")));
    assert!(names.iter().any(|n| n.contains("2/c^2")));
    assert!(names.iter().any(|n| n.contains("V shift")));
    let detail = assert_suite_clean(1, &reports);
    report(1, "geometry suite", started, 1.0, &detail);
}

#[test]
fn criterion_2_projection_suite() {
    let started = Instant::now();
    let reports = props::sets_suite(0).unwrap();
    let detail = assert_suite_clean(2, &reports);
    report(2, "projection suite", started, 5.0, &detail);
}

#[test]
fn criterion_3_resolvent_suite() {
    let started = Instant::now();
    let reports = props::resolvent_suite(0).unwrap();
    let detail = assert_suite_clean(3, &reports);
    report(3, "resolvent suite", started, 10.0, &detail);
}

#[test]
fn criterion_4_hybrid_end_to_end() {
    let started = Instant::now();
    let config = SolverConfig::default();
    let mut total_iters = 0usize;
    for seed in 0..20u64 {
        let file = generate_instance(Template::FullTheorem1, seed).unwrap();
        let instance = build_instance(&file).unwrap();
        let p_star = instance
            .known_common_solution
            .clone()
            .expect("generated instances plant a solution");
        let (result, _) = run_theorem1(&instance, &config).unwrap();
        assert_eq!(
            result.termination,
            Termination::Converged,
            "seed {seed}: {:?}",
            result.failure_message
        );
        assert!(result.iterations <= 10_000);
        assert!(
            result.residuals.max() <= 1e-6,
            "seed {seed}: residual {:.3e}",
            result.residuals.max()
        );
        assert!(
            result.invariants.all_passed(),
            "seed {seed}: {:?}",
            result.invariants.first_failure()
        );
        total_iters += result.iterations;
        // The planted families pin F to a single point, so the projection of
        // x0 onto F is the plant itself.
        if seed < 5 {
            let dist = result.limit.sub(&p_star).euclidean_norm();
            assert!(dist <= 1e-5, "seed {seed}: limit misses the plant by {dist:.3e}");
        }
    }
    report(
        4,
        "hybrid end-to-end",
        started,
        60.0,
        &format!("20 planted instances, {total_iters} total iterations"),
    );
}

/// Planted Hilbert configuration with nonzero bifunctions and perturbations
/// but no operator family.
fn gep_no_operator_instance() -> (ProblemInstance, Vector) {
    let n = 3;
    let space = SpaceSpec::hilbert(n).unwrap();
    let p_star = Vector::new(vec![0.4, -0.3, 0.2]);
    let set = ConvexSet::box_set(vec![-2.0; n], vec![2.0; n]).unwrap();
    let diag = |values: &[f64]| -> Vec<Vec<f64>> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut row = vec![0.0; values.len()];
                row[i] = *v;
                row
            })
            .collect()
    };
    let instance = ProblemInstance {
        space,
        set,
        fixed_point_maps: vec![FixedPointMap::identity(n)],
        ism_operators: vec![],
        equilibrium_pairs: vec![
            (
                Bifunction::separable(diag(&[1.0, 2.0, 1.0]), p_star.as_slice().to_vec()).unwrap(),
                MonotoneMap::quadratic_gradient(diag(&[0.5, 1.0, 1.5]), p_star.as_slice().to_vec())
                    .unwrap(),
            ),
            (
                Bifunction::separable(diag(&[2.0, 1.0, 1.5]), p_star.as_slice().to_vec()).unwrap(),
                MonotoneMap::zero(n),
            ),
        ],
        beta: vec![0.5, 0.5],
        alpha: Schedule::constant(0.5),
        lambda: Schedule::constant(0.1),
        r: Schedule::constant(1.0),
        start: Vector::new(vec![-1.0, 1.5, -1.2]),
        known_common_solution: Some(p_star.clone()),
    };
    (instance, p_star)
}

#[test]
fn criterion_5_variant_agreement_and_corollaries() {
    let started = Instant::now();
    let config = SolverConfig::default();

    // q = 2 finite-family run matches the two-problem run iterate by iterate.
    let file = generate_instance(Template::FullTheorem1, 0).unwrap();
    let instance = build_instance(&file).unwrap();
    let (r1, t1) = run_theorem1(&instance, &config).unwrap();
    let (r4, t4) = run_theorem4(&instance, &config).unwrap();
    assert_eq!(r1.iterations, r4.iterations);
    for (a, b) in t1.rows.iter().zip(&t4.rows) {
        assert!(a.x.sub(&b.x).euclidean_norm() <= 1e-9);
    }
    assert!(r1.limit.sub(&r4.limit).euclidean_norm() <= 1e-9);

    // Hilbert fast path agrees with the generic path on 5 seeds.
    for seed in 0..5u64 {
        let file = generate_instance(Template::FullTheorem1, seed).unwrap();
        let instance = build_instance(&file).unwrap();
        let (rg, tg) = run_theorem1(&instance, &config).unwrap();
        let (rf, tf) =
            run_hilbert_corollary(&instance, &config, HilbertCorollary::Eq41).unwrap();
        assert_eq!(rg.iterations, rf.iterations, "seed {seed}");
        for (a, b) in tg.rows.iter().zip(&tf.rows) {
            assert!(
                a.x.sub(&b.x).euclidean_norm() <= 1e-9,
                "seed {seed} step {}",
                a.n
            );
        }
        assert!(rg.limit.sub(&rf.limit).euclidean_norm() <= 1e-9);
    }

    // Corollary configurations converge with residuals at tolerance.
    let two_ep = build_instance(&generate_instance(Template::TwoEp, 1).unwrap()).unwrap();
    let two_vi = build_instance(&generate_instance(Template::TwoVi, 1).unwrap()).unwrap();
    let mut corollary_runs = 0;
    for (name, result) in [
        ("pure equilibrium pair", run_theorem2(&two_ep, &config).unwrap().0),
        ("pure variational pair", run_theorem2(&two_vi, &config).unwrap().0),
        (
            "Hilbert full configuration",
            run_hilbert_corollary(&instance, &config, HilbertCorollary::Eq41)
                .unwrap()
                .0,
        ),
        (
            "Hilbert equilibrium+perturbation",
            {
                let (gep_instance, p_star) = gep_no_operator_instance();
                let (result, _) =
                    run_hilbert_corollary(&gep_instance, &config, HilbertCorollary::Eq42).unwrap();
                assert!(result.limit.sub(&p_star).euclidean_norm() <= 1e-5);
                result
            },
        ),
        (
            "Hilbert variational pair",
            run_hilbert_corollary(&two_vi, &config, HilbertCorollary::Eq43)
                .unwrap()
                .0,
        ),
        (
            "Hilbert equilibrium pair",
            run_hilbert_corollary(&two_ep, &config, HilbertCorollary::Eq44)
                .unwrap()
                .0,
        ),
    ] {
        assert_eq!(
            result.termination,
            Termination::Converged,
            "{name}: {:?}",
            result.failure_message
        );
        assert!(
            result.residuals.max() <= 1e-6,
            "{name}: residual {:.3e}",
            result.residuals.max()
        );
        corollary_runs += 1;
    }

    report(
        5,
        "variant agreement and corollary configurations",
        started,
        60.0,
        &format!("5 fast-path agreements, {corollary_runs} corollary runs"),
    );
}

#[test]
fn criterion_6_lp_end_to_end() {
    let started = Instant::now();
    let n = 3;
    let space = SpaceSpec::lp(n, 1.5).unwrap();
    let p_star = Vector::new(vec![0.3, -0.2, 0.1]);
    let set = ConvexSet::box_set(vec![-1.0; n], vec![1.0; n]).unwrap();
    let t_ball = ConvexSet::ball(p_star.clone(), 0.5).unwrap();
    let diag = |values: &[f64]| -> Vec<Vec<f64>> {
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let mut row = vec![0.0; values.len()];
                row[i] = *v;
                row
            })
            .collect()
    };
    let instance = ProblemInstance {
        space,
        set,
        fixed_point_maps: vec![FixedPointMap::projection(t_ball)],
        ism_operators: vec![],
        equilibrium_pairs: vec![
            (
                Bifunction::separable(diag(&[1.0, 2.0, 1.0]), p_star.as_slice().to_vec()).unwrap(),
                MonotoneMap::zero(n),
            ),
            (
                Bifunction::separable(diag(&[2.0, 1.0, 1.5]), p_star.as_slice().to_vec()).unwrap(),
                MonotoneMap::zero(n),
            ),
        ],
        beta: vec![0.5, 0.5],
        alpha: Schedule::constant(0.5),
        lambda: Schedule::constant(0.1),
        r: Schedule::constant(1.0),
        start: Vector::new(vec![-0.8, 0.9, -0.6]),
        known_common_solution: Some(p_star.clone()),
    };
    let config = SolverConfig {
        tol: 1e-5,
        ..SolverConfig::default()
    };
    let (result, _) = run_theorem2(&instance, &config).unwrap();
    assert_eq!(
        result.termination,
        Termination::Converged,
        "{:?}",
        result.failure_message
    );
    assert!(
        result.residuals.max() <= 1e-5,
        "residual {:.3e}",
        result.residuals.max()
    );
    assert!(
        result.invariants.all_passed(),
        "{:?}",
        result.invariants.first_failure()
    );
    report(
        6,
        "lp end-to-end",
        started,
        30.0,
        &format!(
            "{} iterations, limit within {:.2e} of the plant",
            result.iterations,
            result.limit.sub(&p_star).euclidean_norm()
        ),
    );
}

#[test]
fn criterion_7_baselines_and_regression_guard() {
    let started = Instant::now();

    for name in ["affine_zero_baseline8.json", "affine_zero_baseline9.json"] {
        let spec = load_experiment(&data(name)).unwrap();
        let outcome = run_experiment(&spec).unwrap();
        let trace = outcome.baseline.expect("baseline runners emit a trace");
        let dists: Vec<f64> = trace
            .rows
            .iter()
            .map(|r| r.distance_to_solution.expect("plant recorded"))
            .collect();
        assert!(!dists.is_empty());
        for (i, pair) in dists.windows(2).enumerate() {
            assert!(
                pair[1] <= pair[0] + 1e-12,
                "{name}: distance increased at step {i}"
            );
        }
        assert!(dists.last().unwrap() < &dists[0]);
    }

    // Regression guard: the hybrid runner must not need more iterations than
    // the committed reference trace for the same instance.
    let reference = std::fs::read_to_string(data("affine_zero_hybrid_reference.trace.csv")).unwrap();
    let reference_iters = reference.lines().count().saturating_sub(1);
    let spec = load_experiment(&data("affine_zero_hybrid.json")).unwrap();
    let outcome = run_experiment(&spec).unwrap();
    let result = outcome.result.expect("hybrid run");
    assert_eq!(result.termination, Termination::Converged);
    assert!(
        result.iterations <= reference_iters,
        "hybrid needed {} iterations, reference has {reference_iters}",
        result.iterations
    );

    report(
        7,
        "baseline comparison and regression guard",
        started,
        10.0,
        &format!(
            "monotone baselines; hybrid {} <= reference {reference_iters} iterations",
            result.iterations
        ),
    );
}

#[test]
fn criterion_8_determinism_and_cli_contract() {
    let started = Instant::now();
    let dir = tempfile::tempdir().unwrap();

    // Identical bytes across repeated runs of the same file and seed.
    let instance_path = dir.path().join("instance.json");
    assert!(bin()
        .args(["gen", "--template", "two-ep", "--seed", "5", "--out"])
        .arg(&instance_path)
        .status()
        .unwrap()
        .success());
    let mut artifacts = Vec::new();
    for run in 0..2 {
        let trace = dir.path().join(format!("t{run}.csv"));
        let status = bin()
            .arg("run")
            .arg(&instance_path)
            .arg("--trace")
            .arg(&trace)
            .arg("--quiet")
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        artifacts.push((
            std::fs::read(&trace).unwrap(),
            std::fs::read(instance_path.with_extension("summary.txt")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0], artifacts[1], "artifacts differ across runs");

    // Exit code 2 for validation errors with a named condition.
    let base = std::fs::read_to_string(data("affine_zero_hybrid.json")).unwrap();
    let bad = base.replace("\"beta\": [0.5, 0.5]", "\"beta\": [0.3, 0.3]");
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, bad).unwrap();
    let out = bin().arg("run").arg(&bad_path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta must sum to 1"));

    // Exit code 3 for solver failures (injected infeasible cut).
    let injected = base.replace(
        "\"max_iters\": 10000",
        "\"max_iters\": 10000, \"inject_infeasible_cut_at\": 1",
    );
    let inj_path = dir.path().join("infeasible.json");
    std::fs::write(&inj_path, injected).unwrap();
    let out = bin()
        .arg("run")
        .arg(&inj_path)
        .arg("--trace")
        .arg(dir.path().join("i.csv"))
        .arg("--quiet")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    report(
        8,
        "determinism and CLI contract",
        started,
        5.0,
        "byte-identical reruns; exit codes 0/2/3",
    );
}
