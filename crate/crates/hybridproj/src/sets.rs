//! Closed convex sets: membership, Euclidean metric projection, generalized
//! projection, and projection onto a base set shrunk by accumulated
//! halfspace cuts.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::qp::PolyhedralProjector;
use crate::space::{dot, pair, DualVector, SpaceSpec, Vector};

/// {z : <z, normal> <= offset}; a zero normal with offset >= 0 is the whole
/// space.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    normal: DualVector,
    offset: f64,
}

impl Halfspace {
    pub fn new(normal: DualVector, offset: f64) -> Result<Self> {
        if !normal.is_finite() || !offset.is_finite() {
            return Err(Error::InvalidSet("halfspace with non-finite data".into()));
        }
        if normal.euclidean_norm() == 0.0 && offset < 0.0 {
            return Err(Error::InvalidSet(
                "halfspace with zero normal requires a nonnegative offset".into(),
            ));
        }
        Ok(Halfspace { normal, offset })
    }

    pub fn whole_space(dim: usize) -> Self {
        Halfspace {
            normal: DualVector::zeros(dim),
            offset: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &DualVector {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn is_whole_space(&self) -> bool {
        self.normal.euclidean_norm() == 0.0
    }

    /// Euclidean distance to the halfspace (0 inside).
    pub fn distance(&self, x: &Vector) -> f64 {
        let norm = self.normal.euclidean_norm();
        if norm == 0.0 {
            return 0.0;
        }
        ((pair(x, &self.normal) - self.offset) / norm).max(0.0)
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    pub fn euclidean_project(&self, x: &Vector) -> Vector {
        let norm2 = dot(
            &self.normal.clone().into_primal(),
            &self.normal.clone().into_primal(),
        );
        if norm2 == 0.0 {
            return x.clone();
        }
        let excess = pair(x, &self.normal) - self.offset;
        if excess <= 0.0 {
            return x.clone();
        }
        let t = excess / norm2;
        Vector::new(
            x.as_slice()
                .iter()
                .zip(self.normal.as_slice())
                .map(|(v, a)| v - t * a)
                .collect(),
        )
    }
}

/// {z : A z = b}, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSet {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
}

impl AffineSet {
    fn matrix(&self) -> DMatrix<f64> {
        let m = self.rows.len();
        let n = self.rows[0].len();
        DMatrix::from_fn(m, n, |i, j| self.rows[i][j])
    }

    fn project(&self, x: &Vector) -> Vector {
        let a = self.matrix();
        let residual = DVector::from_fn(self.rows.len(), |i, _| {
            dot_slices(&self.rows[i], x.as_slice()) - self.rhs[i]
        });
        let svd = a.svd(true, true);
        let sigma_max = svd.singular_values.iter().fold(0.0f64, |m, v| m.max(*v));
        let step = svd
            .solve(&residual, 1e-13 * (1.0 + sigma_max))
            .expect("SVD solve is infallible with computed factors");
        Vector::new(
            x.as_slice()
                .iter()
                .zip(step.iter())
                .map(|(v, s)| v - s)
                .collect(),
        )
    }
}

/// Closed convex constraint sets.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSet {
    WholeSpace {
        dim: usize,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Ball {
        center: Vector,
        radius: f64,
    },
    Halfspace(Halfspace),
    Affine(AffineSet),
    /// Nonemptiness is certified by the witness supplied at construction.
    Intersection {
        members: Vec<ConvexSet>,
        witness: Vector,
    },
}

impl ConvexSet {
    pub fn whole_space(dim: usize) -> Self {
        ConvexSet::WholeSpace { dim }
    }

    pub fn box_set(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidSet("box bounds must have equal nonzero length".into()));
        }
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() || l > u {
                return Err(Error::InvalidSet(format!(
                    "box requires lower <= upper per coordinate (got [{l}, {u}])"
                )));
            }
        }
        Ok(ConvexSet::Box { lower, upper })
    }

    /// Degenerate box holding exactly one point.
    pub fn point(x: Vector) -> Self {
        ConvexSet::Box {
            lower: x.as_slice().to_vec(),
            upper: x.as_slice().to_vec(),
        }
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidSet("ball requires finite center and radius >= 0".into()));
        }
        Ok(ConvexSet::Ball { center, radius })
    }

    pub fn halfspace(h: Halfspace) -> Self {
        ConvexSet::Halfspace(h)
    }

    pub fn affine(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> Result<Self> {
        if rows.is_empty() || rows.len() != rhs.len() {
            return Err(Error::InvalidSet("affine set needs matching rows and rhs".into()));
        }
        let n = rows[0].len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSet("affine rows must share a positive length".into()));
        }
        let set = AffineSet { rows, rhs };
        // Nonempty iff rhs is in the range of the row matrix.
        let origin = Vector::zeros(n);
        let proj = set.project(&origin);
        let worst = set
            .rows
            .iter()
            .zip(&set.rhs)
            .map(|(row, b)| (dot_slices(row, proj.as_slice()) - b).abs())
            .fold(0.0f64, f64::max);
        let scale = 1.0 + set.rhs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if worst > 1e-8 * scale {
            return Err(Error::InvalidSet(format!(
                "affine system is inconsistent (residual {worst:.3e}); the set is empty"
            )));
        }
        Ok(ConvexSet::Affine(set))
    }

    pub fn intersection(members: Vec<ConvexSet>, witness: Vector) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidSet("intersection needs at least one member".into()));
        }
        let dim = members[0].dim();
        for m in &members {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        if witness.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: witness.len(),
            });
        }
        for (i, m) in members.iter().enumerate() {
            if !m.contains(&witness, 1e-8) {
                return Err(Error::InvalidSet(format!(
                    "intersection witness violates member {i}"
                )));
            }
        }
        Ok(ConvexSet::Intersection { members, witness })
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::WholeSpace { dim } => *dim,
            ConvexSet::Box { lower, .. } => lower.len(),
            ConvexSet::Ball { center, .. } => center.len(),
            ConvexSet::Halfspace(h) => h.dim(),
            ConvexSet::Affine(a) => a.rows[0].len(),
            ConvexSet::Intersection { members, .. } => members[0].dim(),
        }
    }

    /// The single member when the set is degenerate (a point box or a
    /// zero-radius ball).
    pub fn as_point(&self) -> Option<Vector> {
        match self {
            ConvexSet::Box { lower, upper } if lower.iter().zip(upper).all(|(l, u)| l == u) => {
                Some(Vector::new(lower.clone()))
            }
            ConvexSet::Ball { center, radius } if *radius == 0.0 => Some(center.clone()),
            _ => None,
        }
    }

    /// Euclidean distance from x to the set.
    pub fn euclidean_distance(&self, x: &Vector) -> Result<f64> {
        Ok(match self {
            ConvexSet::WholeSpace { .. } => 0.0,
            ConvexSet::Box { lower, upper } => x
                .as_slice()
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| {
                    let d = (l - v).max(v - u).max(0.0);
                    d * d
                })
                .sum::<f64>()
                .sqrt(),
            ConvexSet::Ball { center, radius } => (x.sub(center).euclidean_norm() - radius).max(0.0),
            ConvexSet::Halfspace(h) => h.distance(x),
            ConvexSet::Affine(_) | ConvexSet::Intersection { .. } => {
                self.metric_project(x)?.sub(x).euclidean_norm()
            }
        })
    }

    /// True iff x lies within Euclidean distance `tol` of the set.
    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        match self.euclidean_distance(x) {
            Ok(d) => d <= tol,
            Err(_) => false,
        }
    }

    /// Euclidean metric projection P_C.
    pub fn metric_project(&self, x: &Vector) -> Result<Vector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            ConvexSet::WholeSpace { .. } => x.clone(),
            ConvexSet::Box { lower, upper } => Vector::new(
                x.as_slice()
                    .iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(v, (l, u))| v.max(*l).min(*u))
                    .collect(),
            ),
            ConvexSet::Ball { center, radius } => {
                let d = x.sub(center);
                let n = d.euclidean_norm();
                if n <= *radius {
                    x.clone()
                } else {
                    center.axpy(*radius / n, &d)
                }
            }
            ConvexSet::Halfspace(h) => h.euclidean_project(x),
            ConvexSet::Affine(a) => a.project(x),
            ConvexSet::Intersection { .. } => {
                return ShrunkProjector::from_parts(self, &[])?.euclidean_project(x);
            }
        })
    }

    /// Flatten into linear rows and balls for the structured projector.
    fn accumulate(&self, proj: &mut ShrunkProjector) -> Result<()> {
        match self {
            ConvexSet::WholeSpace { .. } => {}
            ConvexSet::Box { lower, upper } => {
                let n = lower.len();
                for i in 0..n {
                    if upper[i].is_finite() {
                        let mut row = vec![0.0; n];
                        row[i] = 1.0;
                        proj.poly.push_ineq(row, upper[i])?;
                    }
                    if lower[i].is_finite() {
                        let mut row = vec![0.0; n];
                        row[i] = -1.0;
                        proj.poly.push_ineq(row, -lower[i])?;
                    }
                }
            }
            ConvexSet::Ball { center, radius } => {
                proj.balls.push((center.clone(), *radius));
            }
            ConvexSet::Halfspace(h) => {
                if !h.is_whole_space() {
                    proj.poly.push_ineq(h.normal.as_slice().to_vec(), h.offset)?;
                }
            }
            ConvexSet::Affine(a) => {
                for (row, b) in a.rows.iter().zip(&a.rhs) {
                    proj.poly.push_eq(row.clone(), *b)?;
                }
            }
            ConvexSet::Intersection { members, .. } => {
                for m in members {
                    m.accumulate(proj)?;
                }
            }
        }
        Ok(())
    }
}

/// The generalized projection: the unique minimizer of phi(., y) over the
/// set. Coincides with the metric projection in Hilbert space.
pub fn gen_project(space: &SpaceSpec, set: &ConvexSet, y: &Vector) -> Result<Vector> {
    space.check_dim(y.len())?;
    space.check_dim(set.dim())?;
    if space.is_hilbert() {
        return set.metric_project(y);
    }
    let start = set.metric_project(y)?;
    minimize_phi_over(space, y, start, |z| set.metric_project(z))
}

/// Generalized projection of x0 onto base ∩ cuts. Hilbert reduces to a
/// nearest-point program over the flattened constraints; l_p runs projected
/// gradient descent on phi(., x0).
pub fn project_onto_shrunk_set(
    space: &SpaceSpec,
    base: &ConvexSet,
    cuts: &[Halfspace],
    x0: &Vector,
) -> Result<Vector> {
    space.check_dim(x0.len())?;
    space.check_dim(base.dim())?;
    let projector = ShrunkProjector::from_parts(base, cuts)?;
    if space.is_hilbert() {
        return projector.euclidean_project(x0);
    }
    let start = projector.euclidean_project(x0)?;
    minimize_phi_over(space, x0, start, |z| projector.euclidean_project(z))
}

/// The set {z : phi(z, w) <= phi(z, x)} rewritten as a halfspace; the
/// quadratic terms cancel, leaving 2<z, Jx - Jw> <= ||x||^2 - ||w||^2.
pub fn halfspace_from_phi_cut(space: &SpaceSpec, w: &Vector, x: &Vector) -> Result<Halfspace> {
    space.check_dim(w.len())?;
    space.check_dim(x.len())?;
    let jx = space.duality_map(x)?;
    let jw = space.duality_map(w)?;
    let normal = jx.sub(&jw).scale(2.0);
    let nx = space.norm(x)?;
    let nw = space.norm(w)?;
    let offset = nx * nx - nw * nw;
    let scale = 1.0 + jx.euclidean_norm() + jw.euclidean_norm();
    if normal.euclidean_norm() <= 1e-13 * scale {
        // w and x are numerically identical; the cut carries no information.
        return Ok(Halfspace::whole_space(space.dim()));
    }
    Halfspace::new(normal, offset)
}

/// First-order residual target for generalized projections, scaled by the
/// anchor magnitude.
fn gen_projection_tolerance(anchor_norm: f64) -> f64 {
    1e-10 * (1.0 + anchor_norm)
}

const PGD_MAX_ITERS: usize = 100_000;
const PGD_RESIDUAL_EVERY: usize = 4;
const PGD_MEMORY: usize = 10;

/// Spectral projected gradient on z -> phi(z, anchor) over the set implied
/// by `project`: Barzilai-Borwein step lengths with a nonmonotone Armijo
/// line search. The p-norm gradient is continuous but not Lipschitz at
/// coordinate zeros for p < 2; spectral steps recover instantly after the
/// line search collapses there, where multiplicative step growth crawls.
/// Requires a feasible start.
fn minimize_phi_over<P>(
    space: &SpaceSpec,
    anchor: &Vector,
    start: Vector,
    project: P,
) -> Result<Vector>
where
    P: Fn(&Vector) -> Result<Vector>,
{
    let j_anchor = space.duality_map(anchor)?;
    let objective = |z: &Vector| -> Result<f64> {
        let nz = space.norm(z)?;
        Ok(nz * nz - 2.0 * pair(z, &j_anchor))
    };
    let gradient = |z: &Vector| -> Result<Vector> {
        Ok(space.duality_map(z)?.sub(&j_anchor).scale(2.0).into_primal())
    };

    let tol = gen_projection_tolerance(anchor.euclidean_norm());
    let mut z = start;
    let mut fz = objective(&z)?;
    let mut g = gradient(&z)?;
    let mut eta = 1.0f64;
    let mut residual = f64::INFINITY;
    let mut recent_f: Vec<f64> = vec![fz];

    for iter in 0..PGD_MAX_ITERS {
        if iter % PGD_RESIDUAL_EVERY == 0 {
            let mapped = project(&z.axpy(-1.0, &g))?;
            residual = z.sub(&mapped).euclidean_norm();
            if residual <= tol {
                return Ok(z);
            }
        }

        let f_ref = recent_f.iter().fold(f64::NEG_INFINITY, |m, &v| m.max(v));
        let mut accepted = None;
        let mut step_len = eta;
        for _ in 0..80 {
            let trial = project(&z.axpy(-step_len, &g))?;
            let d = trial.sub(&z);
            let slope = dot(&g, &d);
            let f_trial = objective(&trial)?;
            if f_trial <= f_ref + 1e-4 * slope + 1e-15 * (1.0 + f_ref.abs()) {
                accepted = Some((trial, f_trial));
                break;
            }
            step_len *= 0.5;
            if step_len < 1e-18 {
                break;
            }
        }
        let (next, f_next) = accepted.ok_or_else(|| {
            Error::ProjectionFailure("generalized projection line search collapsed".into())
        })?;

        let s = next.sub(&z);
        let g_next = gradient(&next)?;
        let v = g_next.sub(&g);
        let sv = dot(&s, &v);
        let ss = dot(&s, &s);
        eta = if sv > 1e-30 {
            (ss / sv).clamp(1e-12, 1e12)
        } else {
            (step_len * 2.0).clamp(1e-12, 1e12)
        };

        let moved = ss.sqrt();
        z = next;
        fz = f_next;
        g = g_next;
        recent_f.push(fz);
        if recent_f.len() > PGD_MEMORY {
            recent_f.remove(0);
        }

        if moved <= 1e-16 * (1.0 + z.euclidean_norm()) {
            let mapped = project(&z.axpy(-1.0, &g))?;
            residual = z.sub(&mapped).euclidean_norm();
            if residual <= tol.max(1e-8) {
                return Ok(z);
            }
        }
    }
    if residual <= 1e-8 {
        Ok(z)
    } else {
        Err(Error::IterationCap(format!(
            "generalized projection (first-order residual {residual:.3e})"
        )))
    }
}

/// Flattened representation of base ∩ cuts: linear rows plus balls.
pub(crate) struct ShrunkProjector {
    poly: PolyhedralProjector,
    balls: Vec<(Vector, f64)>,
}

impl ShrunkProjector {
    pub fn from_parts(base: &ConvexSet, cuts: &[Halfspace]) -> Result<Self> {
        let mut projector = ShrunkProjector {
            poly: PolyhedralProjector::new(base.dim()),
            balls: Vec::new(),
        };
        base.accumulate(&mut projector)?;
        for cut in cuts {
            if !cut.is_whole_space() {
                projector
                    .poly
                    .push_ineq(cut.normal.as_slice().to_vec(), cut.offset)?;
            }
        }
        Ok(projector)
    }

    /// Max normalized constraint violation (0 inside the set).
    pub fn feasibility_gap(&self, x: &Vector) -> f64 {
        let mut gap = self.poly.max_violation(x.as_slice());
        for (center, radius) in &self.balls {
            gap = gap.max((x.sub(center).euclidean_norm() - radius).max(0.0));
        }
        gap
    }

    pub fn euclidean_project(&self, x: &Vector) -> Result<Vector> {
        if self.balls.is_empty() {
            return self.poly.project(x);
        }
        if self.poly.is_empty() && self.balls.len() == 1 {
            let (center, radius) = &self.balls[0];
            let d = x.sub(center);
            let n = d.euclidean_norm();
            return Ok(if n <= *radius {
                x.clone()
            } else {
                center.axpy(*radius / n, &d)
            });
        }
        self.dykstra_mixed(x)
    }

    /// Dykstra alternation between the polyhedral part and each ball.
    fn dykstra_mixed(&self, x0: &Vector) -> Result<Vector> {
        let n_sets = self.balls.len() + usize::from(!self.poly.is_empty());
        let scale = 1.0 + x0.euclidean_norm();
        let tol = 1e-10 * scale;
        let max_sweeps = 50_000;
        let mut x = x0.clone();
        let mut corrections = vec![Vector::zeros(x0.len()); n_sets];
        let mut best_gap = f64::INFINITY;
        let mut stagnant = 0usize;

        for sweep in 0..max_sweeps {
            let x_prev = x.clone();
            let mut slot = 0;
            if !self.poly.is_empty() {
                let y = x.add(&corrections[slot]);
                let x_new = self.poly.project(&y)?;
                corrections[slot] = y.sub(&x_new);
                x = x_new;
                slot += 1;
            }
            for (center, radius) in &self.balls {
                let y = x.add(&corrections[slot]);
                let d = y.sub(center);
                let norm = d.euclidean_norm();
                let x_new = if norm <= *radius {
                    y.clone()
                } else {
                    center.axpy(*radius / norm, &d)
                };
                corrections[slot] = y.sub(&x_new);
                x = x_new;
                slot += 1;
            }
            let gap = self.feasibility_gap(&x);
            let moved = x.sub(&x_prev).euclidean_norm();
            if gap <= tol && moved <= tol {
                return Ok(x);
            }
            if gap < best_gap * (1.0 - 1e-12) {
                best_gap = gap;
                stagnant = 0;
            } else {
                stagnant += 1;
            }
            if sweep > 200 && stagnant > 500 && best_gap > 1e6 * tol {
                return Err(Error::Infeasible(format!(
                    "mixed Dykstra stalled with violation {best_gap:.3e}"
                )));
            }
        }
        let gap = self.feasibility_gap(&x);
        if gap <= 100.0 * tol {
            Ok(x)
        } else {
            Err(Error::IterationCap("mixed Dykstra projection".into()))
        }
    }
}

fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
