//! Outer hybrid projection iterations. Each step composes the inverse-
//! strongly-monotone step, the fixed-point relaxation, and the equilibrium
//! resolvents, then cuts the feasible region with the halfspace
//! {z : phi(z, w_n) <= phi(z, x_n)} and projects the anchor x_0 onto the
//! shrunken set. Mann-type comparison baselines live here as well.

use std::collections::BTreeMap;

use crate::catalog::{Bifunction, FixedPointMap, IsmOperator, MonotoneMap};
use crate::error::{Error, Result};
use crate::resolvent::{solve_resolvent, ResolventProblem};
use crate::sets::{halfspace_from_phi_cut, project_onto_shrunk_set, ConvexSet, Halfspace};
use crate::space::{DualVector, SpaceSpec, Vector};

/// Scalar schedule: a constant or an explicit list extended by its last value.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Const(f64),
    List(Vec<f64>),
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Const(value)
    }

    pub fn list(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInstance("schedule list must be nonempty".into()));
        }
        Ok(Schedule::List(values))
    }

    pub fn at(&self, n: usize) -> f64 {
        match self {
            Schedule::Const(v) => *v,
            Schedule::List(values) => *values
                .get(n)
                .unwrap_or_else(|| values.last().expect("list schedules are nonempty")),
        }
    }

    /// (min, max) over the first `horizon` values (covers the whole list).
    pub fn bounds(&self, horizon: usize) -> (f64, f64) {
        match self {
            Schedule::Const(v) => (*v, *v),
            Schedule::List(values) => {
                let n = horizon.max(values.len());
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..n {
                    let v = self.at(i);
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
                (lo, hi)
            }
        }
    }
}

/// Horizon over which schedule invariants are checked eagerly.
pub const SCHEDULE_HORIZON: usize = 1000;

/// A full problem instance for the hybrid runners.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub space: SpaceSpec,
    pub set: ConvexSet,
    pub fixed_point_maps: Vec<FixedPointMap>,
    pub ism_operators: Vec<IsmOperator>,
    pub equilibrium_pairs: Vec<(Bifunction, MonotoneMap)>,
    pub beta: Vec<f64>,
    pub alpha: Schedule,
    pub lambda: Schedule,
    pub r: Schedule,
    pub start: Vector,
    pub known_common_solution: Option<Vector>,
}

impl ProblemInstance {
    /// Smallest inverse-strong-monotonicity constant across the A family.
    pub fn gamma_min(&self) -> Option<f64> {
        self.ism_operators
            .iter()
            .map(|op| op.gamma())
            .fold(None, |acc, g| Some(acc.map_or(g, |a: f64| a.min(g))))
    }

    /// The step-size cap c^2 gamma / 2 (only defined when m >= 1).
    pub fn lambda_cap(&self) -> Result<Option<f64>> {
        match self.gamma_min() {
            None => Ok(None),
            Some(gamma) => {
                let c = self.space.require_convexity_constant()?;
                Ok(Some(c * c * gamma / 2.0))
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.space.dim();
        if self.fixed_point_maps.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one fixed-point map is required".into(),
            ));
        }
        if self.equilibrium_pairs.is_empty() {
            return Err(Error::InvalidInstance(
                "at least one equilibrium pair is required".into(),
            ));
        }
        if self.set.dim() != dim || self.start.len() != dim {
            return Err(Error::InvalidInstance(
                "constraint set and start point must match the space dimension".into(),
            ));
        }
        for t in &self.fixed_point_maps {
            if t.dim() != dim {
                return Err(Error::InvalidInstance(
                    "fixed-point map dimension mismatch".into(),
                ));
            }
        }
        for a in &self.ism_operators {
            if a.dim() != dim {
                return Err(Error::InvalidInstance("operator dimension mismatch".into()));
            }
        }
        for (f, b) in &self.equilibrium_pairs {
            if f.dim() != dim || b.dim() != dim {
                return Err(Error::InvalidInstance(
                    "equilibrium pair dimension mismatch".into(),
                ));
            }
        }

        if self.beta.len() != self.equilibrium_pairs.len() {
            return Err(Error::InvalidInstance(format!(
                "beta must have one weight per equilibrium pair (got {} weights for {} pairs)",
                self.beta.len(),
                self.equilibrium_pairs.len()
            )));
        }
        if self.beta.iter().any(|&b| !(b > 0.0)) {
            return Err(Error::InvalidInstance(
                "beta weights must be strictly positive".into(),
            ));
        }
        let beta_sum: f64 = self.beta.iter().sum();
        if (beta_sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInstance(format!(
                "beta must sum to 1 (got {beta_sum})"
            )));
        }

        let mut alpha_floor = f64::INFINITY;
        for n in 0..SCHEDULE_HORIZON {
            let a = self.alpha.at(n);
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidInstance(format!(
                    "alpha schedule must stay in (0, 1) (alpha_{n} = {a})"
                )));
            }
            alpha_floor = alpha_floor.min(a * (1.0 - a));
        }
        if !(alpha_floor > 0.0) {
            return Err(Error::InvalidInstance(
                "alpha schedule violates liminf alpha_n (1 - alpha_n) > 0".into(),
            ));
        }

        let (r_min, _) = self.r.bounds(SCHEDULE_HORIZON);
        if !(r_min > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "r schedule must stay bounded away from zero (min r_n = {r_min})"
            )));
        }

        if !self.ism_operators.is_empty() {
            let cap = self
                .lambda_cap()?
                .expect("gamma_min is present when the A family is nonempty");
            let (a, b) = self.lambda.bounds(SCHEDULE_HORIZON);
            if !(a > 0.0) {
                return Err(Error::InvalidInstance(format!(
                    "lambda schedule must stay positive (min lambda_n = {a})"
                )));
            }
            if b >= cap {
                return Err(Error::InvalidInstance(format!(
                    "lambda schedule exceeds c^2*gamma/2 (bound {cap:.6e}, max lambda_n = {b:.6e})"
                )));
            }
        }

        if !self.set.contains(&self.start, 1e-8) {
            return Err(Error::InvalidInstance("start point x0 must lie in C".into()));
        }
        if let Some(p) = &self.known_common_solution {
            if p.len() != dim {
                return Err(Error::InvalidInstance(
                    "known common solution dimension mismatch".into(),
                ));
            }
            if !self.set.contains(p, 1e-6) {
                return Err(Error::InvalidInstance(
                    "known common solution must lie in C".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn has_unchecked_maps(&self) -> bool {
        self.fixed_point_maps.iter().any(|t| !t.is_checked())
    }
}

/// Runner configuration.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iters: usize,
    pub invariant_checks: bool,
    /// Keep only the last K cuts when set. Dropping cuts voids the
    /// monotonicity invariants, so this is off by default.
    pub cut_cap: Option<usize>,
    /// Test hook: append a contradictory cut pair at the given iteration.
    pub inject_infeasible_cut_at: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-6,
            max_iters: 10_000,
            invariant_checks: true,
            cut_cap: None,
            inject_infeasible_cut_at: None,
        }
    }
}

/// How a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    InfeasibleCut,
    InnerFailure,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::InfeasibleCut => "infeasible_cut",
            Termination::InnerFailure => "inner_failure",
        }
    }
}

/// Residuals of the common-solution conditions at a point.
#[derive(Debug, Clone, Copy, Default)]
pub struct ResidualBundle {
    pub step_norm: f64,
    pub fixed_point: f64,
    pub ism: f64,
    pub gep: f64,
}

impl ResidualBundle {
    pub fn max(&self) -> f64 {
        self.step_norm.max(self.fixed_point).max(self.ism).max(self.gep)
    }
}

/// Pass/fail counters per named per-iteration invariant.
#[derive(Debug, Clone, Default)]
pub struct InvariantChecks {
    counters: BTreeMap<String, (usize, usize)>,
    first_failure: Option<String>,
}

impl InvariantChecks {
    fn record(&mut self, name: &str, ok: bool, detail: &dyn Fn() -> String) {
        let entry = self.counters.entry(name.to_string()).or_insert((0, 0));
        if ok {
            entry.0 += 1;
        } else {
            entry.1 += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(format!("{name}: {}", detail()));
            }
        }
    }

    pub fn all_passed(&self) -> bool {
        self.counters.values().all(|(_, fails)| *fails == 0)
    }

    pub fn total_checked(&self) -> usize {
        self.counters.values().map(|(p, f)| p + f).sum()
    }

    pub fn total_failed(&self) -> usize {
        self.counters.values().map(|(_, f)| f).sum()
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.first_failure.as_deref()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize, usize)> {
        self.counters.iter().map(|(k, (p, f))| (k.as_str(), *p, *f))
    }
}

/// One recorded iteration.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub n: usize,
    /// Iterate entering the step.
    pub x: Vector,
    pub z: Vector,
    pub y: Vector,
    pub resolvent_points: Vec<Vector>,
    pub w: Vector,
    pub cut: Halfspace,
    /// phi(x_n, x_0).
    pub phi_x0: f64,
    pub step_norm: f64,
    pub t_residuals: Vec<f64>,
    pub a_residuals: Vec<f64>,
    pub gep_residuals: Vec<f64>,
    pub cut_feasible: bool,
    pub invariants_ok: bool,
}

impl TraceRow {
    pub fn max_t_residual(&self) -> f64 {
        self.t_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_a_residual(&self) -> f64 {
        self.a_residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_gep_residual(&self) -> f64 {
        self.gep_residuals.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Default)]
pub struct IterationTrace {
    pub rows: Vec<TraceRow>,
    pub has_unchecked_maps: bool,
}

#[derive(Debug, Clone)]
pub struct SolverResult {
    pub limit: Vector,
    pub iterations: usize,
    pub termination: Termination,
    pub residuals: ResidualBundle,
    pub invariants: InvariantChecks,
    pub failure_message: Option<String>,
}

/// Which composition arithmetic the engine uses. The Hilbert fast path
/// avoids duality-map evaluations entirely; results must agree with the
/// generic path to well below 1e-9 per iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PathKind {
    Generic,
    HilbertFast,
}

/// Mutable solver state: the iterate and the accumulated cuts.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub n: usize,
    pub x: Vector,
    pub cuts: Vec<Halfspace>,
}

impl SolverState {
    pub fn initial(instance: &ProblemInstance) -> Self {
        SolverState {
            n: 0,
            x: instance.start.clone(),
            cuts: Vec::new(),
        }
    }
}

/// Inner tolerances are kept two orders tighter than the outer tolerance.
fn resolvent_tolerance(config: &SolverConfig) -> f64 {
    (config.tol * 1e-2).clamp(1e-12, 1e-8)
}

const RESOLVENT_MAX_ITERS: usize = 400_000;

struct StepProducts {
    z: Vector,
    y: Vector,
    resolvent_points: Vec<Vector>,
    w: Vector,
    cut: Halfspace,
    x_next: Vector,
}

fn engine_step(
    instance: &ProblemInstance,
    config: &SolverConfig,
    path: PathKind,
    state: &SolverState,
) -> Result<StepProducts> {
    let space = &instance.space;
    let n = state.n;
    let x = &state.x;
    let alpha = instance.alpha.at(n);
    let r_n = instance.r.at(n);
    let inner_tol = resolvent_tolerance(config);

    // z_n: inverse-strongly-monotone step projected back onto C.
    let m = instance.ism_operators.len();
    let z = if m == 0 {
        x.clone()
    } else {
        let lambda = instance.lambda.at(n);
        let op = &instance.ism_operators[n % m];
        let ax = op.eval(x)?;
        let moved = match path {
            PathKind::Generic => {
                let jx = space.duality_map(x)?;
                space.duality_map_inverse(&jx.axpy(-lambda, &ax))?
            }
            PathKind::HilbertFast => x.axpy(-lambda, &ax.into_primal()),
        };
        crate::sets::gen_project(space, &instance.set, &moved)?
    };

    // y_n: dual-space relaxation toward the cyclically selected map.
    let d = instance.fixed_point_maps.len();
    let t_map = &instance.fixed_point_maps[n % d];
    let tz = t_map.eval(space, &z)?;
    let y = match path {
        PathKind::Generic => space.dual_combination(&[(alpha, x), (1.0 - alpha, &tz)])?,
        PathKind::HilbertFast => x.scale(alpha).axpy(1.0 - alpha, &tz),
    };

    // Resolvent subproblems anchored at y_n.
    let mut resolvent_points = Vec::with_capacity(instance.equilibrium_pairs.len());
    for (f, b) in &instance.equilibrium_pairs {
        let prob = ResolventProblem::new(space, &instance.set, f, b, r_n, y.clone())?;
        resolvent_points.push(solve_resolvent(&prob, inner_tol, RESOLVENT_MAX_ITERS)?);
    }

    // w_n: beta-weighted dual average of the resolvent outputs.
    let w = match path {
        PathKind::Generic => {
            let terms: Vec<(f64, &Vector)> = instance
                .beta
                .iter()
                .zip(&resolvent_points)
                .map(|(b, u)| (*b, u))
                .collect();
            space.dual_combination(&terms)?
        }
        PathKind::HilbertFast => {
            let mut acc = Vector::zeros(space.dim());
            for (b, u) in instance.beta.iter().zip(&resolvent_points) {
                acc = acc.axpy(*b, u);
            }
            acc
        }
    };

    let cut = halfspace_from_phi_cut(space, &w, x)?;
    let mut cuts = state.cuts.clone();
    cuts.push(cut.clone());
    if let Some(cap) = config.cut_cap {
        if cuts.len() > cap {
            let drop = cuts.len() - cap;
            cuts.drain(..drop);
        }
    }
    if config.inject_infeasible_cut_at == Some(n) {
        let dim = space.dim();
        let mut e1 = vec![0.0; dim];
        e1[0] = 1.0;
        let mut neg_e1 = vec![0.0; dim];
        neg_e1[0] = -1.0;
        cuts.push(Halfspace::new(DualVector::new(e1), -1e6)?);
        cuts.push(Halfspace::new(DualVector::new(neg_e1), -1e6)?);
    }

    let x_next = project_onto_shrunk_set(space, &instance.set, &cuts, &instance.start)?;

    Ok(StepProducts {
        z,
        y,
        resolvent_points,
        w,
        cut,
        x_next,
    })
}

/// One iteration of the main scheme, exposed for state-level tests.
pub fn step_theorem1(
    instance: &ProblemInstance,
    config: &SolverConfig,
    state: &SolverState,
) -> Result<SolverState> {
    let products = engine_step(instance, config, PathKind::Generic, state)?;
    let mut cuts = state.cuts.clone();
    cuts.push(products.cut);
    Ok(SolverState {
        n: state.n + 1,
        x: products.x_next,
        cuts,
    })
}

/// Residuals of every family condition at x (r fixed for the GEP solves).
fn family_residuals(
    instance: &ProblemInstance,
    config: &SolverConfig,
    x: &Vector,
    r_n: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let space = &instance.space;
    let mut t_res = Vec::with_capacity(instance.fixed_point_maps.len());
    for t in &instance.fixed_point_maps {
        let tx = t.eval(space, x)?;
        t_res.push(space.norm(&tx.sub(x))?);
    }
    let mut a_res = Vec::with_capacity(instance.ism_operators.len());
    for a in &instance.ism_operators {
        a_res.push(space.dual_norm(&a.eval(x)?)?);
    }
    let mut gep_res = Vec::with_capacity(instance.equilibrium_pairs.len());
    let inner_tol = resolvent_tolerance(config);
    for (f, b) in &instance.equilibrium_pairs {
        let prob = ResolventProblem::new(space, &instance.set, f, b, r_n, x.clone())?;
        let tx = solve_resolvent(&prob, inner_tol, RESOLVENT_MAX_ITERS)?;
        gep_res.push(space.norm(&tx.sub(x))?);
    }
    Ok((t_res, a_res, gep_res))
}

fn run_engine(
    instance: &ProblemInstance,
    config: &SolverConfig,
    path: PathKind,
) -> Result<(SolverResult, IterationTrace)> {
    instance.validate()?;
    if !instance.ism_operators.is_empty() {
        // The z-line step bound needs the 2-uniform-convexity constant.
        instance.space.require_convexity_constant()?;
    }

    let space = &instance.space;
    let x0 = &instance.start;
    let planted = instance.known_common_solution.as_ref();
    let lambda_max = instance.lambda.bounds(SCHEDULE_HORIZON).1;

    let mut state = SolverState::initial(instance);
    let mut trace = IterationTrace {
        rows: Vec::new(),
        has_unchecked_maps: instance.has_unchecked_maps(),
    };
    let mut invariants = InvariantChecks::default();
    let mut prev_phi_x0 = 0.0f64; // phi(x_0, x_0)
    let mut termination = Termination::MaxIters;
    let mut failure_message = None;
    // Residuals of the iterate entering the loop; refreshed from the new
    // iterate each step so the stopping rule sees the prospective limit.
    let mut current_res = match family_residuals(instance, config, &state.x, instance.r.at(0)) {
        Ok(v) => Some(v),
        Err(e) => {
            termination = Termination::InnerFailure;
            failure_message = Some(e.to_string());
            None
        }
    };

    while state.n < config.max_iters && current_res.is_some() {
        let n = state.n;
        let (t_res, a_res, gep_res) = current_res.clone().expect("checked by the loop guard");

        let products = match engine_step(instance, config, path, &state) {
            Ok(p) => p,
            Err(e @ Error::Infeasible(_)) => {
                termination = Termination::InfeasibleCut;
                failure_message = Some(e.to_string());
                break;
            }
            Err(e) => {
                termination = Termination::InnerFailure;
                failure_message = Some(e.to_string());
                break;
            }
        };

        let step_norm = space.norm(&products.x_next.sub(&state.x))?;
        let phi_x0 = space.lyapunov_phi(&state.x, x0)?;

        let mut row_ok = true;
        if config.invariant_checks {
            let scale = 1.0 + phi_x0.abs();
            if config.cut_cap.is_none() {
                let next_phi = space.lyapunov_phi(&products.x_next, x0)?;
                let ok = next_phi >= prev_phi_x0 - 1e-8 * scale;
                invariants.record("phi(x_n, x_0) nondecreasing", ok, &|| {
                    format!("phi dropped below {prev_phi_x0:.12e} at step {n}")
                });
                row_ok &= ok;
                prev_phi_x0 = prev_phi_x0.max(next_phi);
            }

            // Membership of the new iterate in the shrunken set.
            let mut all_cuts = state.cuts.clone();
            all_cuts.push(products.cut.clone());
            let gap = crate::sets::ShrunkProjector::from_parts(&instance.set, &all_cuts)?
                .feasibility_gap(&products.x_next);
            let ok = gap <= 1e-6;
            invariants.record("x_{n+1} in C_{n+1}", ok, &|| {
                format!("feasibility gap {gap:.3e} at step {n}")
            });
            row_ok &= ok;

            if let Some(p) = planted {
                let phi_p_x = space.lyapunov_phi(p, &state.x)?;
                let phi_p_z = space.lyapunov_phi(p, &products.z)?;
                let phi_p_w = space.lyapunov_phi(p, &products.w)?;
                let ok_z = phi_p_z <= phi_p_x + 1e-8;
                invariants.record("phi(p, z_n) <= phi(p, x_n)", ok_z, &|| {
                    format!("{phi_p_z:.12e} > {phi_p_x:.12e} at step {n}")
                });
                let ok_w = phi_p_w <= phi_p_x + 1e-8;
                invariants.record("phi(p, w_n) <= phi(p, x_n)", ok_w, &|| {
                    format!("{phi_p_w:.12e} > {phi_p_x:.12e} at step {n}")
                });
                row_ok &= ok_z && ok_w;
            }

            if !instance.ism_operators.is_empty() {
                let c = space
                    .require_convexity_constant()
                    .expect("validated on entry");
                let i = n % instance.ism_operators.len();
                let bound = 4.0 * lambda_max * lambda_max / (c * c) * a_res[i] * a_res[i];
                let phi_xz = space.lyapunov_phi(&state.x, &products.z)?;
                let ok = phi_xz <= bound + 1e-8;
                invariants.record(
                    "phi(x_n, z_n) <= (4b^2/c^2) ||A x_n||^2",
                    ok,
                    &|| format!("{phi_xz:.12e} > {bound:.12e} at step {n}"),
                );
                row_ok &= ok;
            }
        }

        trace.rows.push(TraceRow {
            n,
            x: state.x.clone(),
            z: products.z,
            y: products.y,
            resolvent_points: products.resolvent_points,
            w: products.w,
            cut: products.cut.clone(),
            phi_x0,
            step_norm,
            t_residuals: t_res.clone(),
            a_residuals: a_res.clone(),
            gep_residuals: gep_res.clone(),
            cut_feasible: true,
            invariants_ok: row_ok,
        });

        let mut next_cuts = std::mem::take(&mut state.cuts);
        next_cuts.push(products.cut);
        if let Some(cap) = config.cut_cap {
            if next_cuts.len() > cap {
                let drop = next_cuts.len() - cap;
                next_cuts.drain(..drop);
            }
        }
        state = SolverState {
            n: n + 1,
            x: products.x_next,
            cuts: next_cuts,
        };

        // Residuals at the new iterate decide convergence.
        current_res = match family_residuals(instance, config, &state.x, instance.r.at(state.n)) {
            Ok(v) => Some(v),
            Err(e) => {
                termination = Termination::InnerFailure;
                failure_message = Some(e.to_string());
                None
            }
        };
        if let Some((t, a, g)) = &current_res {
            let worst_family = t
                .iter()
                .chain(a.iter())
                .chain(g.iter())
                .copied()
                .fold(0.0, f64::max);
            if step_norm <= config.tol && worst_family <= config.tol {
                termination = Termination::Converged;
                break;
            }
        }
    }

    // Residual bundle at the limit point.
    let residuals = match &current_res {
        Some((t, a, g)) => ResidualBundle {
            step_norm: trace.rows.last().map_or(0.0, |row| row.step_norm),
            fixed_point: t.iter().copied().fold(0.0, f64::max),
            ism: a.iter().copied().fold(0.0, f64::max),
            gep: g.iter().copied().fold(0.0, f64::max),
        },
        None => ResidualBundle::default(),
    };

    let result = SolverResult {
        limit: state.x,
        iterations: state.n,
        termination,
        residuals,
        invariants,
        failure_message,
    };
    Ok((result, trace))
}

/// Main scheme: two generalized equilibrium problems, a finite family of
/// fixed-point maps, and a finite family of inverse-strongly-monotone
/// operators in a 2-uniformly convex geometry.
pub fn run_theorem1(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<(SolverResult, IterationTrace)> {
    if instance.equilibrium_pairs.len() != 2 {
        return Err(Error::InvalidInstance(
            "this runner takes exactly two equilibrium pairs".into(),
        ));
    }
    run_engine(instance, config, PathKind::Generic)
}

/// Variant without the inverse-strongly-monotone family (z_n = x_n); valid
/// in any supported geometry, including l_p with p > 2.
pub fn run_theorem2(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<(SolverResult, IterationTrace)> {
    if !instance.ism_operators.is_empty() {
        return Err(Error::InvalidInstance(
            "this runner requires an empty operator family".into(),
        ));
    }
    if instance.equilibrium_pairs.len() != 2 {
        return Err(Error::InvalidInstance(
            "this runner takes exactly two equilibrium pairs".into(),
        ));
    }
    run_engine(instance, config, PathKind::Generic)
}

/// Finite-family variant: q >= 1 equilibrium pairs with a beta-weighted
/// dual average.
pub fn run_theorem4(
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<(SolverResult, IterationTrace)> {
    run_engine(instance, config, PathKind::Generic)
}

/// Hilbert-space corollary configurations (identity duality map, metric
/// projections, nearest-point programs).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HilbertCorollary {
    /// Full scheme with operator and equilibrium families.
    Eq41,
    /// No operator family.
    Eq42,
    /// Pure variational inequalities: every bifunction is zero.
    Eq43,
    /// Pure equilibrium problems: every perturbation is zero.
    Eq44,
}

pub fn run_hilbert_corollary(
    instance: &ProblemInstance,
    config: &SolverConfig,
    which: HilbertCorollary,
) -> Result<(SolverResult, IterationTrace)> {
    if !instance.space.is_hilbert() {
        return Err(Error::InvalidInstance(
            "the Hilbert fast path requires a Hilbert space".into(),
        ));
    }
    if instance.equilibrium_pairs.len() != 2 {
        return Err(Error::InvalidInstance(
            "this runner takes exactly two equilibrium pairs".into(),
        ));
    }
    match which {
        HilbertCorollary::Eq41 => {}
        HilbertCorollary::Eq42 => {
            if !instance.ism_operators.is_empty() {
                return Err(Error::InvalidInstance(
                    "this configuration requires an empty operator family".into(),
                ));
            }
        }
        HilbertCorollary::Eq43 => {
            if !instance.ism_operators.is_empty() {
                return Err(Error::InvalidInstance(
                    "this configuration requires an empty operator family".into(),
                ));
            }
            if instance.equilibrium_pairs.iter().any(|(f, _)| !f.is_zero()) {
                return Err(Error::InvalidInstance(
                    "this configuration requires zero bifunctions".into(),
                ));
            }
        }
        HilbertCorollary::Eq44 => {
            if !instance.ism_operators.is_empty() {
                return Err(Error::InvalidInstance(
                    "this configuration requires an empty operator family".into(),
                ));
            }
            if instance.equilibrium_pairs.iter().any(|(_, b)| !b.is_zero()) {
                return Err(Error::InvalidInstance(
                    "this configuration requires zero perturbations".into(),
                ));
            }
        }
    }
    run_engine(instance, config, PathKind::HilbertFast)
}

/// One row of a Mann-type baseline trace.
#[derive(Debug, Clone)]
pub struct BaselineRow {
    pub n: usize,
    pub x: Vector,
    pub step_norm: f64,
    pub distance_to_solution: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct BaselineTrace {
    pub rows: Vec<BaselineRow>,
}

/// x_{n+1} = alpha_n x_n + (1 - alpha_n) S P_C(x_n - lambda_n A x_n).
/// Comparison baseline; no convergence guarantee is enforced.
#[allow(clippy::too_many_arguments)]
pub fn run_baseline_takahashi_toyoda(
    space: &SpaceSpec,
    set: &ConvexSet,
    s_map: &FixedPointMap,
    a_op: &IsmOperator,
    alpha: &Schedule,
    lambda: &Schedule,
    x0: &Vector,
    iterations: usize,
    known_solution: Option<&Vector>,
) -> Result<BaselineTrace> {
    if !space.is_hilbert() {
        return Err(Error::InvalidInstance(
            "baselines are Hilbert-space schemes".into(),
        ));
    }
    space.check_dim(set.dim())?;
    space.check_dim(x0.len())?;
    let mut x = x0.clone();
    let mut rows = Vec::with_capacity(iterations);
    for n in 0..iterations {
        let a_n = alpha.at(n);
        let l_n = lambda.at(n);
        let ax = a_op.eval(&x)?;
        let z = set.metric_project(&x.axpy(-l_n, &ax.into_primal()))?;
        let sz = s_map.eval(space, &z)?;
        let x_next = x.scale(a_n).axpy(1.0 - a_n, &sz);
        rows.push(BaselineRow {
            n,
            x: x.clone(),
            step_norm: x_next.sub(&x).euclidean_norm(),
            distance_to_solution: known_solution.map(|p| x.sub(p).euclidean_norm()),
        });
        x = x_next;
    }
    Ok(BaselineTrace { rows })
}

/// x_{n+1} = alpha_n u + beta_n x_n + gamma_n S P_C(x_n - lambda_n A x_n)
/// with gamma_n = 1 - alpha_n - beta_n.
#[allow(clippy::too_many_arguments)]
pub fn run_baseline_iiduka_takahashi(
    space: &SpaceSpec,
    set: &ConvexSet,
    s_map: &FixedPointMap,
    a_op: &IsmOperator,
    anchor: &Vector,
    alpha: &Schedule,
    beta: &Schedule,
    lambda: &Schedule,
    x0: &Vector,
    iterations: usize,
    known_solution: Option<&Vector>,
) -> Result<BaselineTrace> {
    if !space.is_hilbert() {
        return Err(Error::InvalidInstance(
            "baselines are Hilbert-space schemes".into(),
        ));
    }
    space.check_dim(set.dim())?;
    space.check_dim(x0.len())?;
    space.check_dim(anchor.len())?;
    for n in 0..iterations.min(SCHEDULE_HORIZON) {
        let g = 1.0 - alpha.at(n) - beta.at(n);
        if !(g > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "convex-combination weights require alpha_n + beta_n < 1 (step {n})"
            )));
        }
    }
    let mut x = x0.clone();
    let mut rows = Vec::with_capacity(iterations);
    for n in 0..iterations {
        let a_n = alpha.at(n);
        let b_n = beta.at(n);
        let g_n = 1.0 - a_n - b_n;
        let l_n = lambda.at(n);
        let ax = a_op.eval(&x)?;
        let z = set.metric_project(&x.axpy(-l_n, &ax.into_primal()))?;
        let sz = s_map.eval(space, &z)?;
        let x_next = anchor.scale(a_n).axpy(b_n, &x).axpy(g_n, &sz);
        rows.push(BaselineRow {
            n,
            x: x.clone(),
            step_norm: x_next.sub(&x).euclidean_norm(),
            distance_to_solution: known_solution.map(|p| x.sub(p).euclidean_norm()),
        });
        x = x_next;
    }
    Ok(BaselineTrace { rows })
}
