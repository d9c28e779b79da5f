//! Catalog of concrete monotone operators, inverse-strongly-monotone
//! operators, relatively nonexpansive maps, and bifunctions. Every entry
//! carries an exact solution-set description where one exists, so solver
//! limits can be checked against independent oracles.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sampling;
use crate::sets::{gen_project, ConvexSet};
use crate::space::{pair, DualVector, SpaceSpec, Vector};

/// Monotone map E -> E*: zero or affine x -> Qx + q with (Q + Q^T)/2 PSD.
#[derive(Debug, Clone)]
pub enum MonotoneMap {
    Zero { dim: usize },
    Affine { matrix: DMatrix<f64>, offset: DualVector },
}

impl MonotoneMap {
    pub fn zero(dim: usize) -> Self {
        MonotoneMap::Zero { dim }
    }

    /// x -> Qx + q. The symmetric part of Q must be PSD (checked by its
    /// smallest eigenvalue at construction).
    pub fn affine(matrix: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let n = offset.len();
        if n == 0 || matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidOperator(
                "affine map needs a square matrix matching the offset length".into(),
            ));
        }
        let q = DMatrix::from_fn(n, n, |i, j| matrix[i][j]);
        let sym = (&q + q.transpose()) * 0.5;
        let eigs = sym.symmetric_eigenvalues();
        let min_eig = eigs.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        if min_eig < -1e-10 {
            return Err(Error::InvalidOperator(format!(
                "affine map is not monotone: smallest symmetric eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(MonotoneMap::Affine {
            matrix: q,
            offset: DualVector::new(offset),
        })
    }

    /// Gradient of the convex quadratic z -> 1/2 <z - center, H (z - center)>,
    /// i.e. the affine map z -> H z - H center.
    pub fn quadratic_gradient(hessian: Vec<Vec<f64>>, center: Vec<f64>) -> Result<Self> {
        let n = center.len();
        let offset: Vec<f64> = (0..n)
            .map(|i| -dot_slices(&hessian[i], &center))
            .collect();
        Self::affine(hessian, offset)
    }

    pub fn dim(&self) -> usize {
        match self {
            MonotoneMap::Zero { dim } => *dim,
            MonotoneMap::Affine { offset, .. } => offset.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, MonotoneMap::Zero { .. })
    }

    pub fn eval(&self, x: &Vector) -> Result<DualVector> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(match self {
            MonotoneMap::Zero { dim } => DualVector::zeros(*dim),
            MonotoneMap::Affine { matrix, offset } => {
                let xv = DVector::from_column_slice(x.as_slice());
                let out = matrix * xv;
                DualVector::new(
                    out.iter()
                        .zip(offset.as_slice())
                        .map(|(a, b)| a + b)
                        .collect(),
                )
            }
        })
    }

    /// Largest eigenvalue of the symmetric part (0 for the zero map).
    pub fn symmetric_spectral_max(&self) -> f64 {
        match self {
            MonotoneMap::Zero { .. } => 0.0,
            MonotoneMap::Affine { matrix, .. } => {
                let sym = (matrix + matrix.transpose()) * 0.5;
                sym.symmetric_eigenvalues()
                    .iter()
                    .fold(0.0f64, |m, v| m.max(*v))
            }
        }
    }

    /// Exact zero set {x : Qx = -q} when consistent; the whole space for the
    /// zero map; `None` when the map has no zeros.
    pub fn zero_set(&self) -> Option<ConvexSet> {
        match self {
            MonotoneMap::Zero { dim } => Some(ConvexSet::whole_space(*dim)),
            MonotoneMap::Affine { matrix, offset } => {
                let rows: Vec<Vec<f64>> = (0..matrix.nrows())
                    .map(|i| matrix.row(i).iter().copied().collect())
                    .collect();
                let rhs: Vec<f64> = offset.as_slice().iter().map(|v| -v).collect();
                ConvexSet::affine(rows, rhs).ok()
            }
        }
    }

    /// Smallest eigenvalue of the symmetric part.
    pub fn symmetric_spectral_min(&self) -> f64 {
        match self {
            MonotoneMap::Zero { .. } => 0.0,
            MonotoneMap::Affine { matrix, .. } => {
                let sym = (matrix + matrix.transpose()) * 0.5;
                sym.symmetric_eigenvalues()
                    .iter()
                    .fold(f64::INFINITY, |m, v| m.min(*v))
            }
        }
    }

    /// The unique zero of a strongly monotone affine map, when that is what
    /// this map is.
    pub fn unique_zero(&self) -> Option<Vector> {
        match self {
            MonotoneMap::Zero { .. } => None,
            MonotoneMap::Affine { matrix, offset } => {
                if self.symmetric_spectral_min() <= 1e-10 {
                    return None;
                }
                let rhs = DVector::from_fn(offset.len(), |i, _| -offset[i]);
                matrix
                    .clone()
                    .lu()
                    .solve(&rhs)
                    .map(|z| Vector::new(z.iter().copied().collect()))
            }
        }
    }
}

/// gamma-inverse strongly monotone operator together with its constant and,
/// when known, its exact zero set.
#[derive(Debug, Clone)]
pub struct IsmOperator {
    map: MonotoneMap,
    gamma: f64,
    zero_set: Option<ConvexSet>,
}

const ISM_VALIDATION_SAMPLES: usize = 200;

impl IsmOperator {
    /// gamma must lie in (0, 1]; the inequality
    /// <x-y, Ax-Ay> >= gamma ||Ax-Ay||^2 is validated by sampling.
    pub fn new(space: &SpaceSpec, map: MonotoneMap, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::InvalidOperator(format!(
                "inverse-strong-monotonicity constant must lie in (0, 1] (got {gamma})"
            )));
        }
        space.check_dim(map.dim())?;
        let zero_set = map.zero_set();
        let op = IsmOperator { map, gamma, zero_set };
        let report = check_ism(&op, space, ISM_VALIDATION_SAMPLES, 0x15a_5eed);
        if report.violations > 0 {
            return Err(Error::InvalidOperator(format!(
                "operator failed the sampled inverse-strong-monotonicity check with gamma = {gamma} \
                 (worst margin {:.3e})",
                report.worst_margin
            )));
        }
        Ok(op)
    }

    /// Default constant 1/lambda_max((Q+Q^T)/2) clipped into (0, 1].
    pub fn with_default_gamma(space: &SpaceSpec, map: MonotoneMap) -> Result<Self> {
        let lam = map.symmetric_spectral_max();
        let gamma = if lam > 0.0 { (1.0 / lam).min(1.0) } else { 1.0 };
        Self::new(space, map, gamma)
    }

    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn zero_set(&self) -> Option<&ConvexSet> {
        self.zero_set.as_ref()
    }

    pub fn eval(&self, x: &Vector) -> Result<DualVector> {
        self.map.eval(x)
    }

    pub fn dim(&self) -> usize {
        self.map.dim()
    }
}

/// Margin report from a sampled inequality check.
#[derive(Debug, Clone, Copy)]
pub struct MarginReport {
    pub samples: usize,
    pub violations: usize,
    /// Most negative observed margin (0 when every margin was nonnegative).
    pub worst_margin: f64,
}

impl MarginReport {
    fn from_margins(margins: &[f64], tol: f64) -> Self {
        MarginReport {
            samples: margins.len(),
            violations: margins.iter().filter(|&&m| m < -tol).count(),
            worst_margin: margins.iter().fold(0.0f64, |m, v| m.min(*v)),
        }
    }
}

/// Sampled check of <x-y, Ax-Ay> - gamma ||Ax-Ay||^2 >= 0.
pub fn check_ism(op: &IsmOperator, space: &SpaceSpec, samples: usize, seed: u64) -> MarginReport {
    let mut rng = sampling::rng(seed);
    let mut margins = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sampling::vector_log_scale(&mut rng, space.dim(), 1.5);
        let y = sampling::vector_log_scale(&mut rng, space.dim(), 1.5);
        let ax = match op.eval(&x) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let ay = op.eval(&y).expect("dims already checked");
        let diff = ax.sub(&ay);
        let dn = space.dual_norm(&diff).expect("dims already checked");
        let margin = pair(&x.sub(&y), &diff) - op.gamma() * dn * dn;
        margins.push(margin);
    }
    MarginReport::from_margins(&margins, 1e-8)
}

type CustomMap = Arc<dyn Fn(&Vector) -> Result<Vector> + Send + Sync>;

/// Relatively nonexpansive (quasi-nonexpansive in Hilbert space) map from
/// the catalog, carrying an exact fixed-point set.
#[derive(Clone)]
pub enum FixedPointMap {
    Identity {
        dim: usize,
    },
    /// Generalized projection onto the target (metric projection in Hilbert
    /// space); fixed set is the target itself.
    Projection {
        target: ConvexSet,
    },
    /// Dual-space average t*Jx + (1-t)*J(inner x) pulled back through J^{-1}.
    Averaged {
        identity_weight: f64,
        inner: Box<FixedPointMap>,
    },
    /// (I + rM)^{-1}, Hilbert space only.
    Resolvent {
        map: MonotoneMap,
        r: f64,
        fixed_set: ConvexSet,
    },
    /// Arbitrary user map; its relative nonexpansiveness is NOT verified.
    Unchecked {
        eval: CustomMap,
        claimed_fixed_set: ConvexSet,
    },
}

impl fmt::Debug for FixedPointMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPointMap::Identity { dim } => write!(f, "Identity({dim})"),
            FixedPointMap::Projection { target } => write!(f, "Projection({target:?})"),
            FixedPointMap::Averaged { identity_weight, inner } => {
                write!(f, "Averaged({identity_weight}, {inner:?})")
            }
            FixedPointMap::Resolvent { r, .. } => write!(f, "Resolvent(r = {r})"),
            FixedPointMap::Unchecked { .. } => write!(f, "Unchecked"),
        }
    }
}

impl FixedPointMap {
    pub fn identity(dim: usize) -> Self {
        FixedPointMap::Identity { dim }
    }

    pub fn projection(target: ConvexSet) -> Self {
        FixedPointMap::Projection { target }
    }

    pub fn averaged(identity_weight: f64, inner: FixedPointMap) -> Result<Self> {
        if !(identity_weight > 0.0 && identity_weight < 1.0) {
            return Err(Error::InvalidOperator(format!(
                "averaging weight must lie in (0, 1) (got {identity_weight})"
            )));
        }
        Ok(FixedPointMap::Averaged {
            identity_weight,
            inner: Box::new(inner),
        })
    }

    /// Resolvent (I + rM)^{-1} of a monotone map with nonempty zero set.
    /// Restricted to Hilbert space.
    pub fn resolvent(space: &SpaceSpec, map: MonotoneMap, r: f64) -> Result<Self> {
        if !space.is_hilbert() {
            return Err(Error::Unsupported(
                "the resolvent fixed-point map is only available in Hilbert space".into(),
            ));
        }
        if !(r > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "resolvent parameter must be positive (got {r})"
            )));
        }
        space.check_dim(map.dim())?;
        let fixed_set = map.zero_set().ok_or_else(|| {
            Error::InvalidOperator("resolvent requires a map with a nonempty zero set".into())
        })?;
        Ok(FixedPointMap::Resolvent { map, r, fixed_set })
    }

    /// Accept an arbitrary map without verification; runs carrying such maps
    /// are flagged in traces.
    pub fn unchecked_custom(eval: CustomMap, claimed_fixed_set: ConvexSet) -> Self {
        FixedPointMap::Unchecked {
            eval,
            claimed_fixed_set,
        }
    }

    pub fn is_checked(&self) -> bool {
        match self {
            FixedPointMap::Unchecked { .. } => false,
            FixedPointMap::Averaged { inner, .. } => inner.is_checked(),
            _ => true,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            FixedPointMap::Identity { dim } => *dim,
            FixedPointMap::Projection { target } => target.dim(),
            FixedPointMap::Averaged { inner, .. } => inner.dim(),
            FixedPointMap::Resolvent { map, .. } => map.dim(),
            FixedPointMap::Unchecked { claimed_fixed_set, .. } => claimed_fixed_set.dim(),
        }
    }

    /// Exact fixed-point set description.
    pub fn fixed_set(&self) -> ConvexSet {
        match self {
            FixedPointMap::Identity { dim } => ConvexSet::whole_space(*dim),
            FixedPointMap::Projection { target } => target.clone(),
            FixedPointMap::Averaged { inner, .. } => inner.fixed_set(),
            FixedPointMap::Resolvent { fixed_set, .. } => fixed_set.clone(),
            FixedPointMap::Unchecked { claimed_fixed_set, .. } => claimed_fixed_set.clone(),
        }
    }

    pub fn eval(&self, space: &SpaceSpec, x: &Vector) -> Result<Vector> {
        space.check_dim(x.len())?;
        match self {
            FixedPointMap::Identity { .. } => Ok(x.clone()),
            FixedPointMap::Projection { target } => gen_project(space, target, x),
            FixedPointMap::Averaged { identity_weight, inner } => {
                let t = *identity_weight;
                let tx = inner.eval(space, x)?;
                if space.is_hilbert() {
                    Ok(x.scale(t).axpy(1.0 - t, &tx))
                } else {
                    space.dual_combination(&[(t, x), (1.0 - t, &tx)])
                }
            }
            FixedPointMap::Resolvent { map, r, .. } => {
                if !space.is_hilbert() {
                    return Err(Error::Unsupported(
                        "the resolvent fixed-point map is only available in Hilbert space".into(),
                    ));
                }
                resolvent_of_monotone(map, *r, x)
            }
            FixedPointMap::Unchecked { eval, .. } => eval(x),
        }
    }
}

/// Solve (I + rM) z = x for affine or zero M.
fn resolvent_of_monotone(map: &MonotoneMap, r: f64, x: &Vector) -> Result<Vector> {
    match map {
        MonotoneMap::Zero { .. } => Ok(x.clone()),
        MonotoneMap::Affine { matrix, offset } => {
            let n = map.dim();
            let system = DMatrix::identity(n, n) + matrix * r;
            let rhs = DVector::from_fn(n, |i, _| x[i] - r * offset[i]);
            let solved = system
                .lu()
                .solve(&rhs)
                .ok_or_else(|| Error::InvalidOperator("singular resolvent system".into()))?;
            Ok(Vector::new(solved.iter().copied().collect()))
        }
    }
}

/// Sampled check of phi(p, Tx) <= phi(p, x) for p in the fixed set.
pub fn check_relatively_nonexpansive(
    map: &FixedPointMap,
    space: &SpaceSpec,
    samples: usize,
    seed: u64,
) -> Result<MarginReport> {
    let fixed = map.fixed_set();
    let mut rng = sampling::rng(seed);
    let mut margins = Vec::with_capacity(samples);
    for _ in 0..samples {
        let p = sampling::point_in_set(&mut rng, &fixed, 2.0)?;
        let x = sampling::vector_in_cube(&mut rng, space.dim(), 3.0);
        let tx = map.eval(space, &x)?;
        let margin = space.lyapunov_phi(&p, &x)? - space.lyapunov_phi(&p, &tx)?;
        margins.push(margin);
    }
    Ok(MarginReport::from_margins(&margins, 1e-10))
}

/// Bifunction families satisfying (A1)-(A4) by construction, each exposing
/// the monotone operator that represents its first-order behavior.
#[derive(Debug, Clone)]
pub enum Bifunction {
    Zero { dim: usize },
    /// f(x, y) = <Gx, y - x> for a monotone G.
    ViType { operator: MonotoneMap },
    /// f(x, y) = h(y) - h(x) for h(z) = 1/2 <z - center, H (z - center)>.
    Separable { hessian: DMatrix<f64>, center: Vector },
}

impl Bifunction {
    pub fn zero(dim: usize) -> Self {
        Bifunction::Zero { dim }
    }

    pub fn vi_type(operator: MonotoneMap) -> Self {
        Bifunction::ViType { operator }
    }

    pub fn separable(hessian: Vec<Vec<f64>>, center: Vec<f64>) -> Result<Self> {
        let n = center.len();
        if n == 0 || hessian.len() != n || hessian.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidOperator(
                "separable bifunction needs a square Hessian matching the center".into(),
            ));
        }
        let h = DMatrix::from_fn(n, n, |i, j| hessian[i][j]);
        let asym = (&h - h.transpose()).norm();
        if asym > 1e-10 * (1.0 + h.norm()) {
            return Err(Error::InvalidOperator("separable Hessian must be symmetric".into()));
        }
        let min_eig = h
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, v| m.min(*v));
        if min_eig < -1e-10 {
            return Err(Error::InvalidOperator(format!(
                "separable Hessian is not PSD (smallest eigenvalue {min_eig:.3e})"
            )));
        }
        Ok(Bifunction::Separable {
            hessian: h,
            center: Vector::new(center),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Bifunction::Zero { dim } => *dim,
            Bifunction::ViType { operator } => operator.dim(),
            Bifunction::Separable { center, .. } => center.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Bifunction::Zero { .. })
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> Result<f64> {
        if x.len() != self.dim() || y.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len().max(y.len()),
            });
        }
        Ok(match self {
            Bifunction::Zero { .. } => 0.0,
            Bifunction::ViType { operator } => pair(&y.sub(x), &operator.eval(x)?),
            Bifunction::Separable { hessian, center } => {
                let h = |z: &Vector| {
                    let d = DVector::from_fn(z.len(), |i, _| z[i] - center[i]);
                    0.5 * (hessian * &d).dot(&d)
                };
                h(y) - h(x)
            }
        })
    }

    /// The monotone operator through which the resolvent subproblem is
    /// solved: G for vi-type, grad h for separable, zero otherwise.
    pub fn representative_operator(&self) -> MonotoneMap {
        match self {
            Bifunction::Zero { dim } => MonotoneMap::zero(*dim),
            Bifunction::ViType { operator } => operator.clone(),
            Bifunction::Separable { hessian, center } => {
                let rows: Vec<Vec<f64>> = (0..hessian.nrows())
                    .map(|i| hessian.row(i).iter().copied().collect())
                    .collect();
                MonotoneMap::quadratic_gradient(rows, center.as_slice().to_vec())
                    .expect("separable Hessian was validated at construction")
            }
        }
    }

    /// Exact description of EP(f) over `set` when available.
    pub fn solution_set(&self, set: &ConvexSet) -> Option<ConvexSet> {
        match self {
            Bifunction::Zero { .. } => Some(set.clone()),
            // Over the whole space both variants reduce to the zero set of
            // the representative operator.
            _ => match set {
                ConvexSet::WholeSpace { .. } => self.representative_operator().zero_set(),
                _ => None,
            },
        }
    }

    /// Exact description of GEP(f, B) over `set` when the catalog structure
    /// pins it: planted separable minimizers with a vanishing perturbation at
    /// the center, or strictly monotone affine operators whose unique zero
    /// lies in the set.
    pub fn gep_solution_set(
        &self,
        perturbation: &MonotoneMap,
        set: &ConvexSet,
    ) -> Option<ConvexSet> {
        match self {
            Bifunction::Zero { .. } => {
                if perturbation.is_zero() {
                    Some(set.clone())
                } else {
                    let z = perturbation.unique_zero()?;
                    if set.contains(&z, 1e-9) {
                        Some(ConvexSet::point(z))
                    } else {
                        None
                    }
                }
            }
            Bifunction::Separable { hessian, center } => {
                let min_eig = hessian
                    .symmetric_eigenvalues()
                    .iter()
                    .fold(f64::INFINITY, |m, v| m.min(*v));
                if min_eig <= 1e-10 {
                    return None;
                }
                let b_center = perturbation.eval(center).ok()?;
                if b_center.euclidean_norm() > 1e-10 || !set.contains(center, 1e-9) {
                    return None;
                }
                Some(ConvexSet::point(center.clone()))
            }
            Bifunction::ViType { operator } => {
                if !perturbation.is_zero() {
                    return None;
                }
                let z = operator.unique_zero()?;
                if set.contains(&z, 1e-9) {
                    Some(ConvexSet::point(z))
                } else {
                    None
                }
            }
        }
    }
}

/// Worst margin of f(z, y) + <Bz, y - z> over a verification grid of C;
/// nonnegative margins certify GEP membership of z.
pub fn gep_membership_margin(
    f: &Bifunction,
    perturbation: &MonotoneMap,
    set: &ConvexSet,
    z: &Vector,
    rng: &mut ChaCha8Rng,
    grid_points: usize,
) -> Result<f64> {
    let bz = perturbation.eval(z)?;
    let grid = sampling::verification_grid(rng, set, grid_points, 3.0)?;
    let mut worst = f64::INFINITY;
    for y in &grid {
        let value = f.eval(z, y)? + pair(&y.sub(z), &bz);
        worst = worst.min(value);
    }
    Ok(worst)
}

/// Checks ||Ax|| <= ||Ax - A(witness)|| over samples of C. When true, zeros
/// of A over C coincide with variational-inequality solutions, so the
/// witness-based reduction applies.
pub fn theorem3_precondition(
    op: &IsmOperator,
    space: &SpaceSpec,
    set: &ConvexSet,
    witness: &Vector,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    if !set.contains(witness, 1e-8) {
        return Err(Error::InvalidOperator(
            "claimed common solution lies outside the constraint set".into(),
        ));
    }
    let a_witness = op.eval(witness)?;
    let mut rng = sampling::rng(seed);
    let mut points = vec![witness.clone()];
    points.extend(sampling::verification_grid(&mut rng, set, samples, 3.0)?);
    for x in &points {
        let ax = op.eval(x)?;
        let lhs = space.dual_norm(&ax)?;
        let rhs = space.dual_norm(&ax.sub(&a_witness))?;
        if lhs > rhs + 1e-10 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hilbert2() -> SpaceSpec {
        SpaceSpec::hilbert(2).unwrap()
    }

    #[test]
    fn ism_identity_has_no_violations() {
        let space = hilbert2();
        let op = IsmOperator::new(
            &space,
            MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap(),
            1.0,
        )
        .unwrap();
        let report = check_ism(&op, &space, 500, 7);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn ism_diagonal_margin_oracle() {
        // Margin for diag(1,2) with gamma = 0.5 decomposes per coordinate as
        // q_i d_i^2 - gamma q_i^2 d_i^2 with q_i in {1, 2}; both coefficients
        // are nonnegative, so no sample can violate.
        for q in [1.0f64, 2.0] {
            assert!(q - 0.5 * q * q >= 0.0);
        }
        let space = hilbert2();
        let op = IsmOperator::new(
            &space,
            MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0]).unwrap(),
            0.5,
        )
        .unwrap();
        let report = check_ism(&op, &space, 500, 7);
        assert_eq!(report.violations, 0);
    }

    #[test]
    fn ism_zero_map_any_gamma() {
        let space = hilbert2();
        let op = IsmOperator::new(&space, MonotoneMap::zero(2), 0.7).unwrap();
        let report = check_ism(&op, &space, 200, 7);
        assert_eq!(report.violations, 0);
        assert_eq!(report.worst_margin, 0.0);
    }

    #[test]
    fn ism_rejects_bad_gamma() {
        let space = hilbert2();
        // diag(1,2) is not 1-inverse-strongly monotone: margin for q = 2 is
        // 2 d^2 - 4 d^2 < 0.
        let map = MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0]).unwrap();
        assert!(IsmOperator::new(&space, map, 1.0).is_err());
    }

    #[test]
    fn default_gamma_is_inverse_spectral_max() {
        let space = hilbert2();
        let map = MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.0, 0.0]).unwrap();
        let op = IsmOperator::with_default_gamma(&space, map).unwrap();
        assert!((op.gamma() - 0.5).abs() < 1e-12);
        let zero = IsmOperator::with_default_gamma(&space, MonotoneMap::zero(2)).unwrap();
        assert!((zero.gamma() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn psd_check_rejects_indefinite() {
        assert!(MonotoneMap::affine(vec![vec![-1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]).is_err());
        // rotation matrix: skew part is fine, symmetric part is zero
        assert!(MonotoneMap::affine(vec![vec![0.0, -1.0], vec![1.0, 0.0]], vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn lipschitz_from_inverse_strong_monotonicity() {
        let space = hilbert2();
        let map = MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 2.0]], vec![0.5, -0.25]).unwrap();
        let op = IsmOperator::with_default_gamma(&space, map).unwrap();
        let mut rng = sampling::rng(11);
        for _ in 0..200 {
            let x = sampling::vector_in_cube(&mut rng, 2, 5.0);
            let y = sampling::vector_in_cube(&mut rng, 2, 5.0);
            let lhs = space.dual_norm(&op.eval(&x).unwrap().sub(&op.eval(&y).unwrap())).unwrap();
            let rhs = space.norm(&x.sub(&y)).unwrap() / op.gamma();
            assert!(lhs <= rhs + 1e-8);
        }
    }

    #[test]
    fn fixed_point_maps_hold_r2() {
        let space = hilbert2();
        let id = FixedPointMap::identity(2);
        let r = check_relatively_nonexpansive(&id, &space, 100, 3).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.worst_margin, 0.0);

        let ball = ConvexSet::ball(Vector::zeros(2), 1.0).unwrap();
        let proj = FixedPointMap::projection(ball);
        let r = check_relatively_nonexpansive(&proj, &space, 200, 3).unwrap();
        assert_eq!(r.violations, 0, "worst margin {:.3e}", r.worst_margin);

        let line = ConvexSet::affine(vec![vec![1.0, 0.0]], vec![0.0]).unwrap();
        let avg = FixedPointMap::averaged(0.5, FixedPointMap::projection(line)).unwrap();
        let r = check_relatively_nonexpansive(&avg, &space, 200, 3).unwrap();
        assert_eq!(r.violations, 0, "worst margin {:.3e}", r.worst_margin);
    }

    #[test]
    fn resolvent_map_in_hilbert_only() {
        let lp = SpaceSpec::lp(2, 1.5).unwrap();
        let map = MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.0, 0.0]).unwrap();
        assert!(FixedPointMap::resolvent(&lp, map.clone(), 1.0).is_err());

        let space = hilbert2();
        let res = FixedPointMap::resolvent(&space, map, 1.0).unwrap();
        // (I + I)^{-1} x = x / 2
        let out = res.eval(&space, &Vector::from(&[2.0, -4.0][..])).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-12 && (out[1] + 2.0).abs() < 1e-12);
        let r = check_relatively_nonexpansive(&res, &space, 200, 3).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn bifunction_axioms_on_samples() {
        let sep = Bifunction::separable(vec![vec![2.0, 0.0], vec![0.0, 1.0]], vec![0.5, -0.5]).unwrap();
        let vi = Bifunction::vi_type(
            MonotoneMap::affine(vec![vec![1.0, 0.5], vec![-0.5, 1.0]], vec![0.1, 0.2]).unwrap(),
        );
        let mut rng = sampling::rng(5);
        for f in [&sep, &vi] {
            for _ in 0..200 {
                let x = sampling::vector_in_cube(&mut rng, 2, 3.0);
                let y = sampling::vector_in_cube(&mut rng, 2, 3.0);
                assert_eq!(f.eval(&x, &x).unwrap(), 0.0);
                assert!(f.eval(&x, &y).unwrap() + f.eval(&y, &x).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn separable_solution_set_is_center() {
        let sep = Bifunction::separable(vec![vec![2.0, 0.0], vec![0.0, 1.0]], vec![0.5, -0.5]).unwrap();
        let whole = ConvexSet::whole_space(2);
        let sol = sep.solution_set(&whole).unwrap();
        assert!(sol.contains(&Vector::from(&[0.5, -0.5][..]), 1e-9));
        assert!(!sol.contains(&Vector::from(&[0.0, 0.0][..]), 1e-3));
    }

    #[test]
    fn vi_solution_membership_via_grid() {
        // VI for A(x) = x - (0.25, 0.25) over the unit box solves at (0.25, 0.25).
        let set = ConvexSet::box_set(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let g = MonotoneMap::affine(
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![-0.25, -0.25],
        )
        .unwrap();
        let f = Bifunction::vi_type(g.clone());
        let mut rng = sampling::rng(9);
        let margin = gep_membership_margin(
            &f,
            &MonotoneMap::zero(2),
            &set,
            &Vector::from(&[0.25, 0.25][..]),
            &mut rng,
            200,
        )
        .unwrap();
        assert!(margin >= -1e-8, "margin {margin:.3e}");
        let bad = gep_membership_margin(
            &f,
            &MonotoneMap::zero(2),
            &set,
            &Vector::from(&[0.9, 0.9][..]),
            &mut rng,
            200,
        )
        .unwrap();
        assert!(bad < -1e-3);
    }

    #[test]
    fn theorem3_examples() {
        let space = hilbert2();
        let set = ConvexSet::box_set(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap();
        let zero_op = IsmOperator::new(&space, MonotoneMap::zero(2), 0.5).unwrap();
        let w = Vector::from(&[1.0, 1.0][..]);
        assert!(theorem3_precondition(&zero_op, &space, &set, &w, 100, 13).unwrap());

        // A x = x - (1,1): the witness (1,1) is a zero, so the bound holds.
        let map = MonotoneMap::affine(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![-1.0, -1.0]).unwrap();
        let op = IsmOperator::with_default_gamma(&space, map).unwrap();
        assert!(theorem3_precondition(&op, &space, &set, &w, 100, 13).unwrap());

        // Witness (0,0) has A(witness) = (-1,-1) != 0, so x = witness violates.
        let w0 = Vector::zeros(2);
        assert!(!theorem3_precondition(&op, &space, &set, &w0, 100, 13).unwrap());

        // Witness outside C errors.
        let outside = Vector::from(&[-1.0, 0.0][..]);
        assert!(theorem3_precondition(&op, &space, &set, &outside, 10, 13).is_err());
    }

    #[test]
    fn unchecked_maps_are_flagged() {
        let id: CustomMap = Arc::new(|x: &Vector| Ok(x.clone()));
        let map = FixedPointMap::unchecked_custom(id, ConvexSet::whole_space(2));
        assert!(!map.is_checked());
        assert!(FixedPointMap::identity(2).is_checked());
    }
}
