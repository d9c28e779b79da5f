//! Oracle verification and output emission: trace CSV, summary key=value
//! text, and the common-solution-set oracle report.

use std::fmt::Write as _;
use std::path::Path;

use hybridproj::sets::ConvexSet;
use hybridproj::solver::{
    BaselineTrace, IterationTrace, ProblemInstance, SolverResult, Termination,
};
use hybridproj::space::{SpaceSpec, Vector};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    ClosedForm,
    QpOnExplicitF,
    BruteForceGrid,
}

impl OracleMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            OracleMethod::ClosedForm => "closed-form",
            OracleMethod::QpOnExplicitF => "QP-on-explicit-F",
            OracleMethod::BruteForceGrid => "brute-force-grid",
        }
    }
}

/// Independent check of the solver limit against the exactly described
/// common solution set, when one exists.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub f_description: String,
    pub point: Option<Vector>,
    pub method: Option<OracleMethod>,
    pub distance_to_limit: Option<f64>,
}

/// Assemble the exact family solution sets. `None` when any family lacks an
/// exact description.
fn exact_family_sets(instance: &ProblemInstance) -> Option<Vec<ConvexSet>> {
    let mut sets = vec![instance.set.clone()];
    for t in &instance.fixed_point_maps {
        sets.push(t.fixed_set());
    }
    for a in &instance.ism_operators {
        sets.push(a.zero_set()?.clone());
    }
    for (f, b) in &instance.equilibrium_pairs {
        sets.push(f.gep_solution_set(b, &instance.set)?);
    }
    Some(sets)
}

pub fn compute_oracle(instance: &ProblemInstance, limit: &Vector) -> Result<OracleReport> {
    let d = instance.fixed_point_maps.len();
    let m = instance.ism_operators.len();
    let q = instance.equilibrium_pairs.len();
    let shape = format!(
        "{d} fixed-point set(s), {m} operator zero set(s), {q} equilibrium solution set(s) over C"
    );

    let sets = match exact_family_sets(instance) {
        Some(sets) => sets,
        None => {
            return Ok(OracleReport {
                f_description: format!("{shape}; no exact description for some family"),
                point: None,
                method: None,
                distance_to_limit: None,
            });
        }
    };

    // A point member pins the whole intersection.
    if let Some(p) = sets.iter().find_map(|s| s.as_point()) {
        let consistent = sets.iter().all(|s| s.contains(&p, 1e-7));
        if consistent {
            return Ok(OracleReport {
                f_description: format!("{shape}; F pinned to a single point"),
                distance_to_limit: Some(limit.sub(&p).euclidean_norm()),
                point: Some(p),
                method: Some(OracleMethod::ClosedForm),
            });
        }
        return Ok(OracleReport {
            f_description: format!("{shape}; point candidate violates another family set"),
            point: None,
            method: None,
            distance_to_limit: None,
        });
    }

    // Need a certified-nonempty intersection to project onto.
    let witness = match &instance.known_common_solution {
        Some(p) => p.clone(),
        None => {
            return Ok(OracleReport {
                f_description: format!("{shape}; no witness to certify the intersection"),
                point: None,
                method: None,
                distance_to_limit: None,
            });
        }
    };
    // A failed oracle never fails the run; it degrades to "no oracle".
    let unavailable = |reason: String| OracleReport {
        f_description: format!("{shape}; {reason}"),
        point: None,
        method: None,
        distance_to_limit: None,
    };
    let intersection = match ConvexSet::intersection(sets, witness) {
        Ok(set) => set,
        Err(e) => return Ok(unavailable(format!("intersection not certified ({e})"))),
    };

    if instance.space.is_hilbert() {
        let point = match intersection.metric_project(&instance.start) {
            Ok(p) => p,
            Err(e) => return Ok(unavailable(format!("oracle projection failed ({e})"))),
        };
        return Ok(OracleReport {
            f_description: format!("{shape}; explicit intersection"),
            distance_to_limit: Some(limit.sub(&point).euclidean_norm()),
            point: Some(point),
            method: Some(OracleMethod::QpOnExplicitF),
        });
    }

    // l_p: pattern search on phi(., x0) over the explicit intersection using
    // only function values and Euclidean projections, independent of the
    // solver's gradient path.
    let point = match pattern_search_phi(&instance.space, &intersection, &instance.start) {
        Ok(p) => p,
        Err(e) => return Ok(unavailable(format!("oracle search failed ({e})"))),
    };
    Ok(OracleReport {
        f_description: format!("{shape}; explicit intersection"),
        distance_to_limit: Some(limit.sub(&point).euclidean_norm()),
        point: Some(point),
        method: Some(OracleMethod::BruteForceGrid),
    })
}

fn pattern_search_phi(space: &SpaceSpec, set: &ConvexSet, anchor: &Vector) -> Result<Vector> {
    let project = |z: &Vector| {
        set.metric_project(z)
            .map_err(|e| HarnessError::Solver(e.to_string()))
    };
    let phi = |z: &Vector| {
        space
            .lyapunov_phi(z, anchor)
            .map_err(|e| HarnessError::Solver(e.to_string()))
    };
    let mut z = project(anchor)?;
    let mut best = phi(&z)?;
    let dim = space.dim();
    let mut h = 0.5;
    while h > 1e-10 {
        let mut improved = false;
        for i in 0..dim {
            for sign in [1.0, -1.0] {
                let mut trial = z.as_slice().to_vec();
                trial[i] += sign * h;
                let trial = project(&Vector::new(trial))?;
                let value = phi(&trial)?;
                if value < best - 1e-15 * (1.0 + best.abs()) {
                    z = trial;
                    best = value;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(z)
}

fn fmt_coords(v: &Vector) -> String {
    v.as_slice()
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Trace CSV, one row per iteration. Header is part of the interface.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let mut out = String::from(
        "n,x,phi_x0,step_norm,max_T_residual,max_A_residual,max_gep_residual,cut_feasible,invariants_ok\n",
    );
    for row in &trace.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.n,
            fmt_coords(&row.x),
            row.phi_x0,
            row.step_norm,
            row.max_t_residual(),
            row.max_a_residual(),
            row.max_gep_residual(),
            row.cut_feasible,
            row.invariants_ok
        );
    }
    out
}

/// Baseline traces carry the iterate, update size, and distance to the
/// known solution when one was provided.
pub fn baseline_csv(trace: &BaselineTrace) -> String {
    let mut out = String::from("n,x,step_norm,distance_to_solution\n");
    for row in &trace.rows {
        let dist = row
            .distance_to_solution
            .map(|d| d.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.n,
            fmt_coords(&row.x),
            row.step_norm,
            dist
        );
    }
    out
}

/// Line-oriented key=value summary.
pub fn summary_text(
    runner: &str,
    result: &SolverResult,
    trace: &IterationTrace,
    oracle: &OracleReport,
    exit_code: i32,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "runner={runner}");
    let _ = writeln!(out, "termination={}", result.termination.as_str());
    let _ = writeln!(out, "iterations={}", result.iterations);
    let _ = writeln!(out, "limit={}", fmt_coords(&result.limit));
    let _ = writeln!(out, "step_norm={}", result.residuals.step_norm);
    let _ = writeln!(out, "max_T_residual={}", result.residuals.fixed_point);
    let _ = writeln!(out, "max_A_residual={}", result.residuals.ism);
    let _ = writeln!(out, "max_gep_residual={}", result.residuals.gep);
    if let Some(row) = trace.rows.last() {
        let _ = writeln!(out, "phi_x0_final={}", row.phi_x0);
    }
    if let Some(msg) = &result.failure_message {
        let _ = writeln!(out, "failure={msg}");
    }
    let _ = writeln!(out, "unchecked_maps={}", trace.has_unchecked_maps);
    let _ = writeln!(
        out,
        "invariants_checked={}",
        result.invariants.total_checked()
    );
    let _ = writeln!(out, "invariants_failed={}", result.invariants.total_failed());
    for (idx, (name, passed, failed)) in result.invariants.iter().enumerate() {
        let _ = writeln!(
            out,
            "invariant_{idx}={name}: {passed} passed, {failed} failed"
        );
    }
    let _ = writeln!(out, "oracle_f={}", oracle.f_description);
    if let Some(method) = oracle.method {
        let _ = writeln!(out, "oracle_method={}", method.as_str());
    }
    if let Some(p) = &oracle.point {
        let _ = writeln!(out, "oracle_point={}", fmt_coords(p));
    }
    if let Some(d) = oracle.distance_to_limit {
        let _ = writeln!(out, "oracle_distance={d}");
    }
    let _ = writeln!(out, "exit_code={exit_code}");
    out
}

pub fn baseline_summary_text(runner: &str, trace: &BaselineTrace, exit_code: i32) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "runner={runner}");
    let _ = writeln!(out, "iterations={}", trace.rows.len());
    if let Some(row) = trace.rows.last() {
        let _ = writeln!(out, "limit={}", fmt_coords(&row.x));
        let _ = writeln!(out, "step_norm={}", row.step_norm);
        if let Some(d) = row.distance_to_solution {
            let _ = writeln!(out, "distance_to_solution={d}");
        }
    }
    let _ = writeln!(out, "exit_code={exit_code}");
    out
}

pub fn write_text(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)?;
    Ok(())
}

/// One-line render of a run for the console.
pub fn console_line(path: &str, result: &SolverResult, oracle: &OracleReport) -> String {
    let oracle_part = match oracle.distance_to_limit {
        Some(d) => format!(", oracle distance {d:.3e}"),
        None => String::new(),
    };
    format!(
        "{path}: {} in {} iterations (worst residual {:.3e}{oracle_part})",
        result.termination.as_str(),
        result.iterations,
        max_residual(result)
    )
}

fn max_residual(result: &SolverResult) -> f64 {
    result.residuals.max()
}

pub fn termination_exit(t: Termination, invariants_ok: bool) -> i32 {
    if t == Termination::Converged && invariants_ok {
        crate::EXIT_OK
    } else {
        crate::EXIT_SOLVER
    }
}
