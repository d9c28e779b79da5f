//! Nearest-point projection onto polyhedra {z : Ez = d, Gz <= h} by the dual
//! active-set method of Goldfarb and Idnani specialized to an identity
//! Hessian, with a Dykstra fallback. Dual feasibility (mu >= 0) is an
//! invariant of the method rather than an after-the-fact check, and a
//! violated constraint whose normal is a nonpositive combination of the
//! working set yields a genuine Farkas certificate of infeasibility.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::space::Vector;

#[derive(Debug, Clone)]
pub(crate) struct PolyhedralProjector {
    dim: usize,
    eq: Vec<(Vec<f64>, f64)>,
    ineq: Vec<(Vec<f64>, f64)>,
}

impl PolyhedralProjector {
    pub fn new(dim: usize) -> Self {
        PolyhedralProjector {
            dim,
            eq: Vec::new(),
            ineq: Vec::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.eq.is_empty() && self.ineq.is_empty()
    }

    /// Rows are stored with unit normals; this keeps the subspace solves
    /// well scaled when cut normals shrink near convergence.
    pub fn push_eq(&mut self, normal: Vec<f64>, rhs: f64) -> Result<()> {
        debug_assert_eq!(normal.len(), self.dim);
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            if rhs.abs() > 0.0 {
                return Err(Error::Infeasible(
                    "equality row with zero normal and nonzero right-hand side".into(),
                ));
            }
            return Ok(());
        }
        self.eq
            .push((normal.iter().map(|v| v / norm).collect(), rhs / norm));
        Ok(())
    }

    pub fn push_ineq(&mut self, normal: Vec<f64>, rhs: f64) -> Result<()> {
        debug_assert_eq!(normal.len(), self.dim);
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            if rhs < 0.0 {
                return Err(Error::Infeasible(
                    "inequality row with zero normal and negative right-hand side".into(),
                ));
            }
            return Ok(());
        }
        self.ineq
            .push((normal.iter().map(|v| v / norm).collect(), rhs / norm));
        Ok(())
    }

    /// Max constraint violation at z (rows carry unit normals, so this is a
    /// Euclidean distance scale).
    pub fn max_violation(&self, z: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (a, b) in &self.eq {
            worst = worst.max((dot(a, z) - b).abs());
        }
        for (a, b) in &self.ineq {
            worst = worst.max(dot(a, z) - b);
        }
        worst
    }

    pub fn project(&self, x0: &Vector) -> Result<Vector> {
        let x = x0.as_slice();
        debug_assert_eq!(x.len(), self.dim);
        let scale = 1.0 + x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let feas_tol = 1e-10 * scale;
        if self.max_violation(x) <= feas_tol {
            return Ok(x0.clone());
        }
        match self.goldfarb_idnani(x, feas_tol) {
            Ok(z) => Ok(Vector::new(z)),
            Err(e @ Error::Infeasible(_)) => Err(e),
            Err(first_err) => match self.dykstra_project(x, feas_tol) {
                Ok(z) => Ok(Vector::new(z)),
                Err(Error::Infeasible(msg)) => Err(Error::Infeasible(msg)),
                Err(_) => Err(first_err),
            },
        }
    }

    /// Dual active-set projection. The working set always contains the
    /// equality rows (sign-free multipliers, never dropped); inequality rows
    /// enter through full steps and leave through the ratio test.
    fn goldfarb_idnani(&self, x0: &[f64], feas_tol: f64) -> Result<Vec<f64>> {
        let n = self.dim;
        let m = self.ineq.len();

        // Start from the projection onto the equality subspace.
        let mut x: Vec<f64> = x0.to_vec();
        if !self.eq.is_empty() {
            let k = self.eq.len();
            let a = DMatrix::from_fn(k, n, |i, j| self.eq[i].0[j]);
            let rhs = DVector::from_fn(k, |i, _| dot(&self.eq[i].0, x0) - self.eq[i].1);
            let svd = a.clone().svd(true, true);
            let sigma_max = svd.singular_values.iter().fold(0.0f64, |mx, v| mx.max(*v));
            let step = svd
                .solve(&rhs, 1e-12 * (1.0 + sigma_max))
                .map_err(|e| Error::ProjectionFailure(format!("equality presolve: {e}")))?;
            for (xi, si) in x.iter_mut().zip(step.iter()) {
                *xi -= si;
            }
            let eq_residual = self
                .eq
                .iter()
                .map(|(a, b)| (dot(a, &x) - b).abs())
                .fold(0.0f64, f64::max);
            if eq_residual > 1e-7 * (1.0 + sigma_max) {
                return Err(Error::Infeasible(format!(
                    "equality rows are inconsistent (residual {eq_residual:.3e})"
                )));
            }
        }

        let mut active: Vec<usize> = Vec::new();
        let mut mu: Vec<f64> = Vec::new();
        let mut budget = 200 * (m + n + 2) + 1000;

        loop {
            // Most violated inactive inequality.
            let mut p = None;
            let mut worst = feas_tol;
            for (j, (a, b)) in self.ineq.iter().enumerate() {
                if active.contains(&j) {
                    continue;
                }
                let v = dot(a, &x) - b;
                if v > worst {
                    worst = v;
                    p = Some(j);
                }
            }
            let p = match p {
                None => return Ok(x),
                Some(j) => j,
            };
            let a_p = &self.ineq[p].0;
            let b_p = self.ineq[p].1;
            let mut mu_p = 0.0f64;

            loop {
                budget = budget.saturating_sub(1);
                if budget == 0 {
                    return Err(Error::IterationCap("dual active-set projection".into()));
                }

                let (d, r_active) = self.step_directions(&active, a_p)?;
                let dn2 = dot(&d, &d);

                // Ratio test over active inequality multipliers.
                let mut t1 = f64::INFINITY;
                let mut k_drop = None;
                for (pos, (&m_k, &r_k)) in mu.iter().zip(&r_active).enumerate() {
                    if r_k > 1e-12 {
                        let ratio = m_k / r_k;
                        if ratio < t1 {
                            t1 = ratio;
                            k_drop = Some(pos);
                        }
                    }
                }

                if dn2 <= 1e-16 {
                    // The violated normal lies in the span of the working
                    // set. With no blocking row this is a Farkas certificate.
                    match k_drop {
                        None => {
                            return Err(Error::Infeasible(format!(
                                "constraint violated by {worst:.3e} is implied infeasible by \
                                 the working set"
                            )));
                        }
                        Some(pos) => {
                            for (m_k, r_k) in mu.iter_mut().zip(&r_active) {
                                *m_k -= t1 * r_k;
                            }
                            mu_p += t1;
                            active.remove(pos);
                            mu.remove(pos);
                            continue;
                        }
                    }
                }

                let s_now = dot(a_p, &x) - b_p;
                if s_now <= feas_tol * 0.5 {
                    if mu_p > 0.0 {
                        active.push(p);
                        mu.push(mu_p);
                    }
                    break;
                }
                let t2 = s_now / dn2;
                let t = t1.min(t2);
                for (xi, di) in x.iter_mut().zip(&d) {
                    *xi -= t * di;
                }
                mu_p += t;
                for (m_k, r_k) in mu.iter_mut().zip(&r_active) {
                    *m_k -= t * r_k;
                }
                if t2 <= t1 {
                    active.push(p);
                    mu.push(mu_p);
                    break;
                }
                let pos = k_drop.expect("t1 finite implies a blocking row");
                active.remove(pos);
                mu.remove(pos);
            }
        }
    }

    /// d: component of the candidate normal orthogonal to the working-set
    /// span; r: coefficients of its projection on the active inequality
    /// normals (equality coefficients are not returned; those rows never
    /// leave the working set).
    fn step_directions(&self, active: &[usize], a_p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let k = self.eq.len() + active.len();
        let n = self.dim;
        if k == 0 {
            return Ok((a_p.to_vec(), Vec::new()));
        }
        let mut cols: Vec<&Vec<f64>> = self.eq.iter().map(|(a, _)| a).collect();
        cols.extend(active.iter().map(|&j| &self.ineq[j].0));
        let n_mat = DMatrix::from_fn(n, k, |i, j| cols[j][i]);
        let target = DVector::from_column_slice(a_p);
        let svd = n_mat.clone().svd(true, true);
        let sigma_max = svd.singular_values.iter().fold(0.0f64, |mx, v| mx.max(*v));
        let r = svd
            .solve(&target, 1e-12 * (1.0 + sigma_max))
            .map_err(|e| Error::ProjectionFailure(format!("working-set solve: {e}")))?;
        let residual = &target - &n_mat * &r;
        let d: Vec<f64> = residual.iter().copied().collect();
        let r_active: Vec<f64> = r.iter().skip(self.eq.len()).copied().collect();
        Ok((d, r_active))
    }

    fn dykstra_project(&self, x0: &[f64], feas_tol: f64) -> Result<Vec<f64>> {
        let k = self.eq.len() + self.ineq.len();
        let max_sweeps = 2_000_000 / k.max(1) + 20_000;
        let mut x = x0.to_vec();
        let mut corrections = vec![vec![0.0; self.dim]; k];
        let mut best_gap = f64::INFINITY;
        let mut stagnant = 0usize;

        for sweep in 0..max_sweeps {
            let x_prev = x.clone();
            for (slot, (a, b, is_eq)) in self
                .eq
                .iter()
                .map(|(a, b)| (a, b, true))
                .chain(self.ineq.iter().map(|(a, b)| (a, b, false)))
                .enumerate()
            {
                let y: Vec<f64> = x.iter().zip(&corrections[slot]).map(|(v, c)| v + c).collect();
                let x_new = project_row(&y, a, *b, is_eq);
                for i in 0..self.dim {
                    corrections[slot][i] = y[i] - x_new[i];
                }
                x = x_new;
            }
            let gap = self.max_violation(&x);
            let moved: f64 = x
                .iter()
                .zip(&x_prev)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if gap <= feas_tol && moved <= feas_tol * 1e-2 {
                return Ok(x);
            }
            if gap < best_gap * (1.0 - 1e-12) {
                best_gap = gap;
                stagnant = 0;
            } else {
                stagnant += 1;
            }
            if sweep > 200 && stagnant > 2000 && best_gap > 1e6 * feas_tol {
                return Err(Error::Infeasible(format!(
                    "alternating projections stalled with violation {best_gap:.3e}"
                )));
            }
        }
        // A feasible but non-converged iterate is not the projection; refuse
        // to return it.
        let gap = self.max_violation(&x);
        if gap > 1e6 * feas_tol {
            Err(Error::Infeasible(format!(
                "alternating projections terminated with violation {gap:.3e}"
            )))
        } else {
            Err(Error::IterationCap("Dykstra polyhedral projection".into()))
        }
    }
}

fn project_row(y: &[f64], a: &[f64], b: f64, is_eq: bool) -> Vec<f64> {
    let aa = dot(a, a);
    let ay = dot(a, y);
    if !is_eq && ay <= b {
        return y.to_vec();
    }
    let t = (ay - b) / aa;
    y.iter().zip(a).map(|(v, ai)| v - t * ai).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projects_onto_quadrant() {
        let mut p = PolyhedralProjector::new(2);
        p.push_ineq(vec![-1.0, 0.0], 0.0).unwrap();
        p.push_ineq(vec![0.0, -1.0], 0.0).unwrap();
        let z = p.project(&Vector::from(&[-1.0, -1.0][..])).unwrap();
        assert!((z[0]).abs() < 1e-12 && (z[1]).abs() < 1e-12);
    }

    #[test]
    fn respects_equalities() {
        let mut p = PolyhedralProjector::new(2);
        p.push_eq(vec![1.0, 1.0], 2.0).unwrap();
        let z = p.project(&Vector::from(&[0.0, 0.0][..])).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_equality_and_inequality() {
        // project (0,0) onto {z1 + z2 = 2, z1 <= 0.5}: optimum (0.5, 1.5)
        let mut p = PolyhedralProjector::new(2);
        p.push_eq(vec![1.0, 1.0], 2.0).unwrap();
        p.push_ineq(vec![1.0, 0.0], 0.5).unwrap();
        let z = p.project(&Vector::from(&[0.0, 0.0][..])).unwrap();
        assert!((z[0] - 0.5).abs() < 1e-10 && (z[1] - 1.5).abs() < 1e-10, "{:?}", z.as_slice());
    }

    #[test]
    fn redundant_rows_are_harmless() {
        let mut p = PolyhedralProjector::new(2);
        for _ in 0..4 {
            p.push_ineq(vec![1.0, 0.0], 1.0).unwrap();
            p.push_ineq(vec![2.0, 0.0], 2.0).unwrap();
        }
        let z = p.project(&Vector::from(&[3.0, 0.5][..])).unwrap();
        assert!((z[0] - 1.0).abs() < 1e-10);
        assert!((z[1] - 0.5).abs() < 1e-10);
    }

    #[test]
    fn nearly_parallel_cuts() {
        // A thin wedge: the projection must satisfy both rows, not stall.
        let mut p = PolyhedralProjector::new(2);
        let eps = 1e-6;
        p.push_ineq(vec![1.0, 0.0], 0.0).unwrap();
        p.push_ineq(vec![(1.0f64 + eps * eps).sqrt().recip(), eps], -0.5).unwrap();
        let z = p.project(&Vector::from(&[2.0, 1.0][..])).unwrap();
        assert!(p.max_violation(z.as_slice()) <= 1e-9);
    }

    #[test]
    fn detects_infeasible_pair() {
        let mut p = PolyhedralProjector::new(2);
        p.push_ineq(vec![1.0, 0.0], -1.0).unwrap(); // z1 <= -1
        p.push_ineq(vec![-1.0, 0.0], -2.0).unwrap(); // z1 >= 2
        let err = p.project(&Vector::from(&[0.0, 0.0][..])).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }

    #[test]
    fn zero_normal_rows() {
        let mut p = PolyhedralProjector::new(2);
        p.push_ineq(vec![0.0, 0.0], 1.0).unwrap(); // vacuous
        assert!(p.push_ineq(vec![0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn inconsistent_equalities_detected() {
        let mut p = PolyhedralProjector::new(2);
        p.push_eq(vec![1.0, 0.0], 0.0).unwrap();
        p.push_eq(vec![1.0, 0.0], 1.0).unwrap();
        let err = p.project(&Vector::from(&[0.0, 0.0][..])).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)), "{err}");
    }
}
