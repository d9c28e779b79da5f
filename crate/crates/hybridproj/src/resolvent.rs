//! The regularized equilibrium subproblem: given a bifunction f, a monotone
//! perturbation B, a regularization r > 0 and an anchor x, find z in C with
//!
//!   f(z, y) + <Bx, y - z> + (1/r) <y - z, Jz - Jx> >= 0   for all y in C.
//!
//! For catalog bifunctions this is equivalent to the variational inequality
//! <M(z), y - z> >= 0 over C with M(z) = G(z) + Bx + (1/r)(Jz - Jx), where G
//! is the representative operator (direct for vi-type; first-order optimality
//! of a convex h for the separable family). The solution is the fixed point
//! of z -> P_C(z - s M(z)), which holds in every geometry because the
//! pairing is the standard dot product.

use crate::catalog::{Bifunction, MarginReport, MonotoneMap};
use crate::error::{Error, Result};
use crate::sampling;
use crate::sets::ConvexSet;
use crate::space::{pair, DualVector, SpaceSpec, Vector};

/// One resolvent subproblem instance.
#[derive(Debug, Clone)]
pub struct ResolventProblem<'a> {
    pub space: &'a SpaceSpec,
    pub set: &'a ConvexSet,
    pub bifunction: &'a Bifunction,
    pub perturbation: &'a MonotoneMap,
    pub r: f64,
    pub anchor: Vector,
}

impl<'a> ResolventProblem<'a> {
    pub fn new(
        space: &'a SpaceSpec,
        set: &'a ConvexSet,
        bifunction: &'a Bifunction,
        perturbation: &'a MonotoneMap,
        r: f64,
        anchor: Vector,
    ) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "resolvent regularization must be positive (got {r})"
            )));
        }
        space.check_dim(set.dim())?;
        space.check_dim(bifunction.dim())?;
        space.check_dim(perturbation.dim())?;
        space.check_dim(anchor.len())?;
        Ok(ResolventProblem {
            space,
            set,
            bifunction,
            perturbation,
            r,
            anchor,
        })
    }

    /// B(anchor) - (1/r) J(anchor): the z-independent part of M.
    fn vi_constant(&self) -> Result<DualVector> {
        let b_anchor = self.perturbation.eval(&self.anchor)?;
        let j_anchor = self.space.duality_map(&self.anchor)?;
        Ok(b_anchor.axpy(-1.0 / self.r, &j_anchor))
    }

    /// Margin of the defining inequality at z against a single y.
    pub fn inequality_value(&self, z: &Vector, y: &Vector) -> Result<f64> {
        let b_anchor = self.perturbation.eval(&self.anchor)?;
        let jz = self.space.duality_map(z)?;
        let j_anchor = self.space.duality_map(&self.anchor)?;
        let d = y.sub(z);
        Ok(self.bifunction.eval(z, y)?
            + pair(&d, &b_anchor)
            + pair(&d, &jz.sub(&j_anchor)) / self.r)
    }

    /// Worst margin of the defining inequality over a verification grid of C
    /// (box extreme points plus projected random interior points).
    pub fn certificate_margin(&self, z: &Vector, interior: usize, seed: u64) -> Result<f64> {
        let mut rng = sampling::rng(seed);
        let grid = sampling::verification_grid(&mut rng, self.set, interior, 3.0)?;
        let mut worst = f64::INFINITY;
        for y in &grid {
            worst = worst.min(self.inequality_value(z, y)?);
        }
        Ok(worst)
    }
}

const CERTIFICATE_INTERIOR_POINTS: usize = 200;
const CERTIFICATE_SEED: u64 = 0x7e50;
const CONTRACTION_WINDOW: usize = 10;
const MAX_HALVINGS_BEFORE_EXTRAGRADIENT: usize = 3;

/// Solves the subproblem to a certified margin: the defining inequality is
/// checked on a verification grid after the inner iteration converges, and
/// the inner tolerance is tightened (twice) if the certificate fails.
pub fn solve_resolvent(prob: &ResolventProblem, tol: f64, max_iters: usize) -> Result<Vector> {
    let g = prob.bifunction.representative_operator();
    let constant = prob.vi_constant()?;
    let mut inner_tol = (tol * 1e-2).max(1e-13);
    let start = prob.set.metric_project(&prob.anchor)?;

    for _attempt in 0..3 {
        let z = vi_fixed_point(prob, &g, &constant, &start, inner_tol, max_iters)?;
        let margin = prob.certificate_margin(&z, CERTIFICATE_INTERIOR_POINTS, CERTIFICATE_SEED)?;
        if margin >= -tol {
            return Ok(z);
        }
        inner_tol *= 1e-2;
        if inner_tol < 1e-15 {
            return Err(Error::ResolventFailure(format!(
                "certificate margin {margin:.3e} below -{tol:.1e} at the tightest inner tolerance"
            )));
        }
    }
    Err(Error::ResolventFailure(
        "defining-inequality certificate failed after tightening".into(),
    ))
}

/// Projected fixed-point iteration z -> P_C(z - s M(z)) with adaptive step
/// halving; switches to the extragradient form after repeated halvings fail
/// to restore contraction.
fn vi_fixed_point(
    prob: &ResolventProblem,
    g: &MonotoneMap,
    constant: &DualVector,
    start: &Vector,
    tol: f64,
    max_iters: usize,
) -> Result<Vector> {
    let space = prob.space;
    let m_eval = |z: &Vector| -> Result<Vector> {
        let jz = space.duality_map(z)?;
        Ok(g.eval(z)?
            .add(constant)
            .axpy(1.0 / prob.r, &jz)
            .into_primal())
    };

    // Operator scale drives the initial step: r / (1 + r * |G|) shrinks the
    // step when the bifunction part dominates the (1/r) J term.
    let g_scale = g.symmetric_spectral_max();
    let mut s = (prob.r / (1.0 + prob.r * (1.0 + g_scale))).min(1.0);
    let mut z = start.clone();
    let mut extragradient = false;
    let mut halvings = 0usize;
    let mut recent_steps: Vec<f64> = Vec::with_capacity(CONTRACTION_WINDOW + 1);
    let scale = 1.0 + prob.anchor.euclidean_norm();

    for iter in 0..max_iters {
        let mz = m_eval(&z)?;
        let z_next = if extragradient {
            let z_bar = prob.set.metric_project(&z.axpy(-s, &mz))?;
            let m_bar = m_eval(&z_bar)?;
            prob.set.metric_project(&z.axpy(-s, &m_bar))?
        } else {
            prob.set.metric_project(&z.axpy(-s, &mz))?
        };
        let step = z_next.sub(&z).euclidean_norm();

        // Convergence: fixed-point residual of the projected step.
        if step <= tol * s.max(1e-6) * scale || iter % 5 == 4 {
            let residual = z
                .sub(&prob.set.metric_project(&z.axpy(-s, &mz))?)
                .euclidean_norm()
                / s;
            if residual <= tol * scale {
                return Ok(z);
            }
        }

        recent_steps.push(step);
        if recent_steps.len() > CONTRACTION_WINDOW {
            let old = recent_steps.remove(0);
            if step > old * 0.9999 && step > tol * s * scale {
                // Not contracting at this step size.
                s *= 0.5;
                halvings += 1;
                recent_steps.clear();
                if !extragradient && halvings > MAX_HALVINGS_BEFORE_EXTRAGRADIENT {
                    extragradient = true;
                    halvings = 0;
                }
                if s < 1e-14 {
                    return Err(Error::ResolventFailure(
                        "inner step collapsed without contraction; the regularization is too \
                         large for this operator"
                            .into(),
                    ));
                }
            }
        }
        z = z_next;
    }

    let mz = m_eval(&z)?;
    let residual = z
        .sub(&prob.set.metric_project(&z.axpy(-s, &mz))?)
        .euclidean_norm()
        / s;
    if residual <= tol * scale * 10.0 {
        Ok(z)
    } else {
        Err(Error::IterationCap(format!(
            "resolvent fixed-point iteration (residual {residual:.3e})"
        )))
    }
}

/// Sampled check of the firmly-nonexpansive-type inequality
/// <T x - T y, J T x - J T y> <= <T x - T y, Jx - Jy>.
#[allow(clippy::too_many_arguments)]
pub fn check_firm_nonexpansiveness(
    space: &SpaceSpec,
    set: &ConvexSet,
    bifunction: &Bifunction,
    perturbation: &MonotoneMap,
    r: f64,
    pairs: usize,
    seed: u64,
    solve_tol: f64,
) -> Result<MarginReport> {
    let mut rng = sampling::rng(seed);
    let mut margins = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let x = sampling::vector_in_cube(&mut rng, space.dim(), 2.0);
        let y = sampling::vector_in_cube(&mut rng, space.dim(), 2.0);
        let px = ResolventProblem::new(space, set, bifunction, perturbation, r, x.clone())?;
        let py = ResolventProblem::new(space, set, bifunction, perturbation, r, y.clone())?;
        let tx = solve_resolvent(&px, solve_tol, 200_000)?;
        let ty = solve_resolvent(&py, solve_tol, 200_000)?;
        let d = tx.sub(&ty);
        let lhs = pair(&d, &space.duality_map(&tx)?.sub(&space.duality_map(&ty)?));
        let rhs = pair(&d, &space.duality_map(&x)?.sub(&space.duality_map(&y)?));
        margins.push(rhs - lhs);
    }
    Ok(MarginReport {
        samples: margins.len(),
        violations: margins.iter().filter(|&&m| m < -1e-6).count(),
        worst_margin: margins.iter().fold(0.0f64, |m, v| m.min(*v)),
    })
}

/// Sampled check of phi(q, T_r x) + phi(T_r x, x) <= phi(q, x) for a point q
/// in the exact solution set.
#[allow(clippy::too_many_arguments)]
pub fn check_resolvent_phi_inequality(
    space: &SpaceSpec,
    set: &ConvexSet,
    bifunction: &Bifunction,
    perturbation: &MonotoneMap,
    r: f64,
    q: &Vector,
    samples: usize,
    seed: u64,
) -> Result<MarginReport> {
    let mut rng = sampling::rng(seed);
    let mut margins = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = sampling::vector_in_cube(&mut rng, space.dim(), 2.0);
        let problem = ResolventProblem::new(space, set, bifunction, perturbation, r, x.clone())?;
        let tx = solve_resolvent(&problem, 1e-8, 200_000)?;
        let margin =
            space.lyapunov_phi(q, &x)? - space.lyapunov_phi(q, &tx)? - space.lyapunov_phi(&tx, &x)?;
        margins.push(margin);
    }
    Ok(MarginReport {
        samples: margins.len(),
        violations: margins.iter().filter(|&&m| m < -1e-6).count(),
        worst_margin: margins.iter().fold(0.0f64, |m, v| m.min(*v)),
    })
}
