//! Problem-definition files and experiment execution.
//!
//! A problem file is a JSON document with top-level keys `space`, `set`,
//! `families`, `schedules`, `start`, `runner`, and optional
//! `known_common_solution`, `anchor`, `config`, `outputs`. Matrices are
//! row-major arrays of arrays; schedules are `{"const": v}` or
//! `{"list": [...]}` with last-value extension.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hybridproj::catalog::{Bifunction, FixedPointMap, IsmOperator, MonotoneMap};
use hybridproj::sets::{ConvexSet, Halfspace};
use hybridproj::solver::{
    run_baseline_iiduka_takahashi, run_baseline_takahashi_toyoda, run_hilbert_corollary,
    run_theorem1, run_theorem2, run_theorem4, BaselineTrace, HilbertCorollary, IterationTrace,
    ProblemInstance, Schedule, SolverConfig, SolverResult, Termination,
};
use hybridproj::space::{DualVector, SpaceSpec, Vector};

use crate::report::{compute_oracle, OracleReport};
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentFile {
    pub space: SpaceJson,
    pub set: SetJson,
    pub families: FamiliesJson,
    #[serde(default)]
    pub schedules: SchedulesJson,
    pub start: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_common_solution: Option<Vec<f64>>,
    /// Anchor point for the anchored baseline scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<Vec<f64>>,
    pub runner: String,
    #[serde(default)]
    pub config: ConfigJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<OutputsJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceJson {
    pub kind: String,
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SetJson {
    WholeSpace {
        dim: usize,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
    Halfspace {
        normal: Vec<f64>,
        offset: f64,
    },
    Affine {
        rows: Vec<Vec<f64>>,
        rhs: Vec<f64>,
    },
    Intersection {
        members: Vec<SetJson>,
        witness: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MapJson {
    Zero { dim: usize },
    Affine { matrix: Vec<Vec<f64>>, offset: Vec<f64> },
    QuadraticGradient { hessian: Vec<Vec<f64>>, center: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum FixedPointJson {
    Identity { dim: usize },
    Projection { target: SetJson },
    Averaged { weight: f64, inner: Box<FixedPointJson> },
    Resolvent { map: MapJson, r: f64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsmJson {
    pub map: MapJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum BifunctionJson {
    Zero { dim: usize },
    ViType { operator: MapJson },
    Separable { hessian: Vec<Vec<f64>>, center: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumPairJson {
    pub bifunction: BifunctionJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<MapJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamiliesJson {
    #[serde(default)]
    pub fixed_point: Vec<FixedPointJson>,
    #[serde(default)]
    pub ism: Vec<IsmJson>,
    pub equilibrium: Vec<EquilibriumPairJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleJson {
    Const {
        #[serde(rename = "const")]
        value: f64,
    },
    List {
        list: Vec<f64>,
    },
}

impl ScheduleJson {
    fn to_schedule(&self) -> Result<Schedule> {
        Ok(match self {
            ScheduleJson::Const { value } => Schedule::constant(*value),
            ScheduleJson::List { list } => Schedule::list(list.clone())
                .map_err(|e| HarnessError::Validation(e.to_string()))?,
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SchedulesJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ScheduleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ScheduleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<ScheduleJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<f64>>,
    /// Second weight schedule of the anchored baseline.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_n: Option<ScheduleJson>,
}

fn default_tol() -> f64 {
    1e-6
}

fn default_max_iters() -> usize {
    10_000
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfigJson {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_true")]
    pub invariant_checks: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_cap: Option<usize>,
    /// Test hook: inject a contradictory cut pair at the given iteration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_infeasible_cut_at: Option<usize>,
}

impl Default for ConfigJson {
    fn default() -> Self {
        ConfigJson {
            tol: default_tol(),
            max_iters: default_max_iters(),
            seed: 0,
            invariant_checks: true,
            cut_cap: None,
            inject_infeasible_cut_at: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct OutputsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_path: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunnerKind {
    Theorem1,
    Theorem2,
    Theorem4,
    Corollary41,
    Corollary42,
    Corollary43,
    Corollary44,
    Baseline8,
    Baseline9,
}

impl RunnerKind {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "theorem1" => RunnerKind::Theorem1,
            "theorem2" => RunnerKind::Theorem2,
            "theorem4" => RunnerKind::Theorem4,
            "corollary41" => RunnerKind::Corollary41,
            "corollary42" => RunnerKind::Corollary42,
            "corollary43" => RunnerKind::Corollary43,
            "corollary44" => RunnerKind::Corollary44,
            "baseline8" => RunnerKind::Baseline8,
            "baseline9" => RunnerKind::Baseline9,
            other => {
                return Err(HarnessError::Validation(format!(
                    "unknown runner '{other}' (expected theorem1 | theorem2 | theorem4 | \
                     corollary41..corollary44 | baseline8 | baseline9)"
                )))
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RunnerKind::Theorem1 => "theorem1",
            RunnerKind::Theorem2 => "theorem2",
            RunnerKind::Theorem4 => "theorem4",
            RunnerKind::Corollary41 => "corollary41",
            RunnerKind::Corollary42 => "corollary42",
            RunnerKind::Corollary43 => "corollary43",
            RunnerKind::Corollary44 => "corollary44",
            RunnerKind::Baseline8 => "baseline8",
            RunnerKind::Baseline9 => "baseline9",
        }
    }

    pub fn is_baseline(&self) -> bool {
        matches!(self, RunnerKind::Baseline8 | RunnerKind::Baseline9)
    }
}

/// A fully validated experiment ready to run.
pub struct ExperimentSpec {
    pub instance: ProblemInstance,
    pub runner: RunnerKind,
    pub config: ConfigJson,
    pub trace_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
    pub anchor: Option<Vector>,
    pub baseline_beta: Option<Schedule>,
}

pub fn build_space(json: &SpaceJson) -> Result<SpaceSpec> {
    let space = match json.kind.as_str() {
        "hilbert" => SpaceSpec::hilbert(json.dim),
        "lp" => {
            let p = json.p.ok_or_else(|| {
                HarnessError::Validation("lp spaces need an exponent field 'p'".into())
            })?;
            match json.c {
                Some(c) => SpaceSpec::lp_with_constant(json.dim, p, c),
                None => SpaceSpec::lp(json.dim, p),
            }
        }
        other => {
            return Err(HarnessError::Validation(format!(
                "unknown space kind '{other}' (expected hilbert | lp)"
            )))
        }
    };
    space.map_err(|e| HarnessError::Validation(e.to_string()))
}

pub fn build_set(json: &SetJson) -> Result<ConvexSet> {
    let set = match json {
        SetJson::WholeSpace { dim } => Ok(ConvexSet::whole_space(*dim)),
        SetJson::Box { lower, upper } => ConvexSet::box_set(lower.clone(), upper.clone()),
        SetJson::Ball { center, radius } => {
            ConvexSet::ball(Vector::new(center.clone()), *radius)
        }
        SetJson::Halfspace { normal, offset } => {
            Halfspace::new(DualVector::new(normal.clone()), *offset).map(ConvexSet::halfspace)
        }
        SetJson::Affine { rows, rhs } => ConvexSet::affine(rows.clone(), rhs.clone()),
        SetJson::Intersection { members, witness } => {
            let built: Result<Vec<ConvexSet>> = members.iter().map(build_set).collect();
            ConvexSet::intersection(built?, Vector::new(witness.clone()))
        }
    };
    set.map_err(|e| HarnessError::Validation(e.to_string()))
}

pub fn build_map(json: &MapJson) -> Result<MonotoneMap> {
    let map = match json {
        MapJson::Zero { dim } => Ok(MonotoneMap::zero(*dim)),
        MapJson::Affine { matrix, offset } => MonotoneMap::affine(matrix.clone(), offset.clone()),
        MapJson::QuadraticGradient { hessian, center } => {
            MonotoneMap::quadratic_gradient(hessian.clone(), center.clone())
        }
    };
    map.map_err(|e| HarnessError::Validation(e.to_string()))
}

fn build_fixed_point(json: &FixedPointJson, space: &SpaceSpec) -> Result<FixedPointMap> {
    Ok(match json {
        FixedPointJson::Identity { dim } => FixedPointMap::identity(*dim),
        FixedPointJson::Projection { target } => FixedPointMap::projection(build_set(target)?),
        FixedPointJson::Averaged { weight, inner } => {
            FixedPointMap::averaged(*weight, build_fixed_point(inner, space)?)
                .map_err(|e| HarnessError::Validation(e.to_string()))?
        }
        FixedPointJson::Resolvent { map, r } => {
            FixedPointMap::resolvent(space, build_map(map)?, *r)
                .map_err(|e| HarnessError::Validation(e.to_string()))?
        }
    })
}

fn build_bifunction(json: &BifunctionJson) -> Result<Bifunction> {
    Ok(match json {
        BifunctionJson::Zero { dim } => Bifunction::zero(*dim),
        BifunctionJson::ViType { operator } => Bifunction::vi_type(build_map(operator)?),
        BifunctionJson::Separable { hessian, center } => {
            Bifunction::separable(hessian.clone(), center.clone())
                .map_err(|e| HarnessError::Validation(e.to_string()))?
        }
    })
}

pub fn build_instance(file: &ExperimentFile) -> Result<ProblemInstance> {
    let space = build_space(&file.space)?;
    let set = build_set(&file.set)?;

    let mut fixed_point_maps = Vec::new();
    for t in &file.families.fixed_point {
        fixed_point_maps.push(build_fixed_point(t, &space)?);
    }
    if fixed_point_maps.is_empty() {
        fixed_point_maps.push(FixedPointMap::identity(space.dim()));
    }

    let mut ism_operators = Vec::new();
    for entry in &file.families.ism {
        let map = build_map(&entry.map)?;
        let op = match entry.gamma {
            Some(g) => IsmOperator::new(&space, map, g),
            None => IsmOperator::with_default_gamma(&space, map),
        }
        .map_err(|e| HarnessError::Validation(e.to_string()))?;
        ism_operators.push(op);
    }

    let mut equilibrium_pairs = Vec::new();
    for pair in &file.families.equilibrium {
        let f = build_bifunction(&pair.bifunction)?;
        let b = match &pair.perturbation {
            Some(map) => build_map(map)?,
            None => MonotoneMap::zero(space.dim()),
        };
        equilibrium_pairs.push((f, b));
    }

    let q = equilibrium_pairs.len();
    let beta = file
        .schedules
        .beta
        .clone()
        .unwrap_or_else(|| vec![1.0 / q.max(1) as f64; q]);

    let alpha = match &file.schedules.alpha {
        Some(s) => s.to_schedule()?,
        None => Schedule::constant(0.5),
    };
    let r = match &file.schedules.r {
        Some(s) => s.to_schedule()?,
        None => Schedule::constant(1.0),
    };
    let lambda = match &file.schedules.lambda {
        Some(s) => s.to_schedule()?,
        None => {
            // Default: the midpoint style 0.45 * (c^2 gamma / 2).
            let gamma = ism_operators
                .iter()
                .map(|op| op.gamma())
                .fold(f64::INFINITY, f64::min);
            if ism_operators.is_empty() {
                Schedule::constant(0.1)
            } else {
                let c = space
                    .require_convexity_constant()
                    .map_err(|e| HarnessError::Validation(e.to_string()))?;
                Schedule::constant(0.45 * c * c * gamma / 2.0)
            }
        }
    };

    Ok(ProblemInstance {
        space,
        set,
        fixed_point_maps,
        ism_operators,
        equilibrium_pairs,
        beta,
        alpha,
        lambda,
        r,
        start: Vector::new(file.start.clone()),
        known_common_solution: file
            .known_common_solution
            .as_ref()
            .map(|p| Vector::new(p.clone())),
    })
}

/// Parse and fully validate a problem file; every instance invariant is
/// checked eagerly.
pub fn load_experiment(path: &Path) -> Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let file: ExperimentFile = serde_json::from_str(&text)
        .map_err(|e| HarnessError::Validation(format!("{}: {e}", path.display())))?;
    let runner = RunnerKind::parse(&file.runner)?;
    let instance = build_instance(&file)?;
    instance
        .validate()
        .map_err(|e| HarnessError::Validation(e.to_string()))?;

    if matches!(
        runner,
        RunnerKind::Corollary41
            | RunnerKind::Corollary42
            | RunnerKind::Corollary43
            | RunnerKind::Corollary44
            | RunnerKind::Baseline8
            | RunnerKind::Baseline9
    ) && !instance.space.is_hilbert()
    {
        return Err(HarnessError::Validation(format!(
            "runner {} requires a Hilbert space",
            runner.as_str()
        )));
    }
    if matches!(runner, RunnerKind::Theorem1) && !instance.ism_operators.is_empty() {
        instance
            .space
            .require_convexity_constant()
            .map_err(|e| HarnessError::Validation(e.to_string()))?;
    }
    if runner.is_baseline() && instance.ism_operators.is_empty() {
        return Err(HarnessError::Validation(
            "baseline runners need one operator in families.ism".into(),
        ));
    }
    let anchor = file.anchor.as_ref().map(|a| Vector::new(a.clone()));
    if matches!(runner, RunnerKind::Baseline9) && anchor.is_none() {
        return Err(HarnessError::Validation(
            "the anchored baseline needs a top-level 'anchor' point".into(),
        ));
    }
    let baseline_beta = match &file.schedules.beta_n {
        Some(s) => Some(s.to_schedule()?),
        None => None,
    };
    if matches!(runner, RunnerKind::Baseline9) && baseline_beta.is_none() {
        return Err(HarnessError::Validation(
            "the anchored baseline needs a 'beta_n' schedule".into(),
        ));
    }

    let (trace_path, summary_path) = match &file.outputs {
        Some(out) => (
            out.trace_path.as_ref().map(PathBuf::from),
            out.summary_path.as_ref().map(PathBuf::from),
        ),
        None => (None, None),
    };

    Ok(ExperimentSpec {
        instance,
        runner,
        config: file.config.clone(),
        trace_path,
        summary_path,
        anchor,
        baseline_beta,
    })
}

/// Everything a run produced: hybrid results carry a solver result, oracle
/// report and trace; baselines carry their own trace.
pub struct ExperimentOutcome {
    pub result: Option<SolverResult>,
    pub trace: Option<IterationTrace>,
    pub baseline: Option<BaselineTrace>,
    pub oracle: Option<OracleReport>,
    pub exit_code: i32,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutcome> {
    let config = SolverConfig {
        tol: spec.config.tol,
        max_iters: spec.config.max_iters,
        invariant_checks: spec.config.invariant_checks,
        cut_cap: spec.config.cut_cap,
        inject_infeasible_cut_at: spec.config.inject_infeasible_cut_at,
    };
    let instance = &spec.instance;

    if spec.runner.is_baseline() {
        let s_map = &instance.fixed_point_maps[0];
        let a_op = &instance.ism_operators[0];
        let known = instance.known_common_solution.as_ref();
        let trace = match spec.runner {
            RunnerKind::Baseline8 => run_baseline_takahashi_toyoda(
                &instance.space,
                &instance.set,
                s_map,
                a_op,
                &instance.alpha,
                &instance.lambda,
                &instance.start,
                config.max_iters,
                known,
            ),
            RunnerKind::Baseline9 => run_baseline_iiduka_takahashi(
                &instance.space,
                &instance.set,
                s_map,
                a_op,
                spec.anchor.as_ref().expect("validated at load"),
                &instance.alpha,
                spec.baseline_beta.as_ref().expect("validated at load"),
                &instance.lambda,
                &instance.start,
                config.max_iters,
                known,
            ),
            _ => unreachable!(),
        }
        .map_err(|e| HarnessError::Validation(e.to_string()))?;
        return Ok(ExperimentOutcome {
            result: None,
            trace: None,
            baseline: Some(trace),
            oracle: None,
            exit_code: crate::EXIT_OK,
        });
    }

    let run = match spec.runner {
        RunnerKind::Theorem1 => run_theorem1(instance, &config),
        RunnerKind::Theorem2 => run_theorem2(instance, &config),
        RunnerKind::Theorem4 => run_theorem4(instance, &config),
        RunnerKind::Corollary41 => run_hilbert_corollary(instance, &config, HilbertCorollary::Eq41),
        RunnerKind::Corollary42 => run_hilbert_corollary(instance, &config, HilbertCorollary::Eq42),
        RunnerKind::Corollary43 => run_hilbert_corollary(instance, &config, HilbertCorollary::Eq43),
        RunnerKind::Corollary44 => run_hilbert_corollary(instance, &config, HilbertCorollary::Eq44),
        RunnerKind::Baseline8 | RunnerKind::Baseline9 => unreachable!(),
    };
    let (result, trace) = run.map_err(|e| HarnessError::Validation(e.to_string()))?;

    let oracle = compute_oracle(instance, &result.limit)?;
    let invariants_ok = !config.invariant_checks || result.invariants.all_passed();
    let exit_code = if result.termination == Termination::Converged && invariants_ok {
        crate::EXIT_OK
    } else {
        crate::EXIT_SOLVER
    };

    Ok(ExperimentOutcome {
        result: Some(result),
        trace: Some(trace),
        baseline: None,
        oracle: Some(oracle),
        exit_code,
    })
}
