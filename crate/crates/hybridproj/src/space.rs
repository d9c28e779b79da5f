//! Geometry of the ambient space: norms, duality mappings, and the Lyapunov
//! functional phi for Hilbert and finite-dimensional l_p spaces.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A point of the primal space E (coordinates over R^n).
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

/// An element of the dual space E*; paired with primal points through the
/// standard dot product.
#[derive(Debug, Clone, PartialEq)]
pub struct DualVector(Vec<f64>);

macro_rules! coord_impls {
    ($t:ident) => {
        impl $t {
            pub fn new(coords: Vec<f64>) -> Self {
                $t(coords)
            }

            pub fn zeros(dim: usize) -> Self {
                $t(vec![0.0; dim])
            }

            pub fn len(&self) -> usize {
                self.0.len()
            }

            pub fn is_empty(&self) -> bool {
                self.0.is_empty()
            }

            pub fn as_slice(&self) -> &[f64] {
                &self.0
            }

            pub fn iter(&self) -> std::slice::Iter<'_, f64> {
                self.0.iter()
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }

            /// self + t * other
            pub fn axpy(&self, t: f64, other: &Self) -> Self {
                $t(self
                    .0
                    .iter()
                    .zip(&other.0)
                    .map(|(a, b)| a + t * b)
                    .collect())
            }

            pub fn add(&self, other: &Self) -> Self {
                self.axpy(1.0, other)
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.axpy(-1.0, other)
            }

            pub fn scale(&self, t: f64) -> Self {
                $t(self.0.iter().map(|a| a * t).collect())
            }

            pub fn euclidean_norm(&self) -> f64 {
                self.0.iter().map(|a| a * a).sum::<f64>().sqrt()
            }
        }

        impl From<Vec<f64>> for $t {
            fn from(coords: Vec<f64>) -> Self {
                $t(coords)
            }
        }

        impl From<&[f64]> for $t {
            fn from(coords: &[f64]) -> Self {
                $t(coords.to_vec())
            }
        }

        impl std::ops::Index<usize> for $t {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

coord_impls!(Vector);
coord_impls!(DualVector);

impl Vector {
    /// Reinterpret as a dual element (the coordinate pairing is the dot
    /// product, so this is a plain relabeling).
    pub fn into_dual(self) -> DualVector {
        DualVector(self.0)
    }
}

impl DualVector {
    pub fn into_primal(self) -> Vector {
        Vector(self.0)
    }
}

/// Duality pairing <x, u> (standard dot product).
pub fn pair(x: &Vector, u: &DualVector) -> f64 {
    x.0.iter().zip(&u.0).map(|(a, b)| a * b).sum()
}

/// Euclidean inner product of two primal points.
pub fn dot(x: &Vector, y: &Vector) -> f64 {
    x.0.iter().zip(&y.0).map(|(a, b)| a * b).sum()
}

/// The geometry family of the ambient space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpaceKind {
    Hilbert,
    Lp { p: f64 },
}

/// Finite-dimensional space specification: Hilbert or l_p on R^n, together
/// with the 2-uniform-convexity constant c used by the step-size bound and
/// the norm-of-difference inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    kind: SpaceKind,
    dim: usize,
    /// Only meaningful for Hilbert (c = 1) and l_p with 1 < p <= 2.
    c: Option<f64>,
}

/// Samples used by the construction-time check of the duality-map
/// difference inequality.
const CONVEXITY_VALIDATION_SAMPLES: usize = 200;

impl SpaceSpec {
    pub fn hilbert(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dim must be at least 1".into()));
        }
        Ok(SpaceSpec {
            kind: SpaceKind::Hilbert,
            dim,
            c: Some(1.0),
        })
    }

    /// l_p space with the default convexity constant sqrt(p - 1) for
    /// 1 < p <= 2 (validated by sampling); no constant is carried for p > 2.
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if p <= 2.0 {
            Self::lp_with_constant(dim, p, (p - 1.0).sqrt())
        } else {
            Self::build_lp(dim, p, None)
        }
    }

    /// l_p space with a user-supplied 2-uniform-convexity constant,
    /// admissible only for 1 < p <= 2.
    pub fn lp_with_constant(dim: usize, p: f64, c: f64) -> Result<Self> {
        if p > 2.0 {
            return Err(Error::InvalidSpace(format!(
                "convexity constant is only meaningful for p <= 2 (got p = {p})"
            )));
        }
        Self::build_lp(dim, p, Some(c))
    }

    fn build_lp(dim: usize, p: f64, c: Option<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dim must be at least 1".into()));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidSpace(format!(
                "lp exponent must satisfy p > 1 (got {p})"
            )));
        }
        if let Some(c) = c {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::InvalidSpace(format!(
                    "convexity constant must lie in (0, 1] (got {c})"
                )));
            }
        }
        let space = SpaceSpec {
            kind: SpaceKind::Lp { p },
            dim,
            c,
        };
        space.validate_convexity_constant()?;
        Ok(space)
    }

    /// Sampling check of ||x - y|| <= (2/c^2) ||Jx - Jy|| for the configured c.
    fn validate_convexity_constant(&self) -> Result<()> {
        let c = match self.c {
            Some(c) => c,
            None => return Ok(()),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_c0de);
        let factor = 2.0 / (c * c);
        for _ in 0..CONVEXITY_VALIDATION_SAMPLES {
            let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
            let x = Vector::new((0..self.dim).map(|_| rng.gen_range(-1.0..1.0) * scale).collect());
            let y = Vector::new((0..self.dim).map(|_| rng.gen_range(-1.0..1.0) * scale).collect());
            let lhs = self.norm(&x.sub(&y))?;
            let rhs = factor * self.dual_norm(&self.duality_map(&x)?.sub(&self.duality_map(&y)?))?;
            if lhs > rhs + 1e-10 * (1.0 + lhs) {
                return Err(Error::InvalidSpace(format!(
                    "convexity constant c = {c} failed the sampled duality-map difference bound \
                     (||x-y|| = {lhs:.6e} > (2/c^2)||Jx-Jy|| = {rhs:.6e})"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn is_hilbert(&self) -> bool {
        matches!(self.kind, SpaceKind::Hilbert)
    }

    pub fn exponent(&self) -> Option<f64> {
        match self.kind {
            SpaceKind::Hilbert => None,
            SpaceKind::Lp { p } => Some(p),
        }
    }

    /// The dual exponent q with 1/p + 1/q = 1.
    fn dual_exponent(&self) -> Option<f64> {
        self.exponent().map(|p| p / (p - 1.0))
    }

    /// 2-uniform-convexity constant; `None` for l_p with p > 2.
    pub fn convexity_constant(&self) -> Option<f64> {
        self.c
    }

    /// Hilbert spaces and l_p with 1 < p <= 2 carry a convexity constant.
    pub fn is_two_uniformly_convex(&self) -> bool {
        self.c.is_some()
    }

    /// Returns c or a configuration error for geometries without one.
    pub fn require_convexity_constant(&self) -> Result<f64> {
        self.c.ok_or_else(|| {
            Error::Unsupported(
                "a 2-uniformly convex space (Hilbert or l_p with 1 < p <= 2) is required here"
                    .into(),
            )
        })
    }

    pub fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: len,
            })
        } else {
            Ok(())
        }
    }

    /// Primal norm: ||x||_2 for Hilbert, ||x||_p for l_p.
    pub fn norm(&self, x: &Vector) -> Result<f64> {
        self.check_dim(x.len())?;
        Ok(match self.kind {
            SpaceKind::Hilbert => x.euclidean_norm(),
            SpaceKind::Lp { p } => p_norm(x.as_slice(), p),
        })
    }

    /// Dual norm: ||u||_2 for Hilbert, ||u||_q for l_p.
    pub fn dual_norm(&self, u: &DualVector) -> Result<f64> {
        self.check_dim(u.len())?;
        Ok(match self.dual_exponent() {
            None => u.euclidean_norm(),
            Some(q) => p_norm(u.as_slice(), q),
        })
    }

    /// The normalized duality map J. Identity in Hilbert space; in l_p,
    /// Jx = ||x||^(2-p) y with y_i = x_i |x_i|^(p-2), extended by 0 at x_i = 0.
    pub fn duality_map(&self, x: &Vector) -> Result<DualVector> {
        self.check_dim(x.len())?;
        Ok(match self.kind {
            SpaceKind::Hilbert => DualVector::new(x.as_slice().to_vec()),
            SpaceKind::Lp { p } => DualVector::new(power_map(x.as_slice(), p)),
        })
    }

    /// J^{-1}, computed as the duality map of the dual l_q space.
    pub fn duality_map_inverse(&self, u: &DualVector) -> Result<Vector> {
        self.check_dim(u.len())?;
        Ok(match self.dual_exponent() {
            None => Vector::new(u.as_slice().to_vec()),
            Some(q) => Vector::new(power_map(u.as_slice(), q)),
        })
    }

    /// Lyapunov functional phi(x, y) = ||x||^2 - 2<x, Jy> + ||y||^2.
    /// Reduces to ||x - y||^2 in Hilbert space.
    pub fn lyapunov_phi(&self, x: &Vector, y: &Vector) -> Result<f64> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        match self.kind {
            // The expanded form cancels badly near x == y; Hilbert has the
            // exact difference form.
            SpaceKind::Hilbert => {
                let d = x.sub(y);
                Ok(dot(&d, &d))
            }
            SpaceKind::Lp { .. } => {
                let jy = self.duality_map(y)?;
                let nx = self.norm(x)?;
                let ny = self.norm(y)?;
                Ok((nx * nx - 2.0 * pair(x, &jy) + ny * ny).max(0.0))
            }
        }
    }

    /// V(x, x*) = ||x||^2 - 2<x, x*> + ||x*||^2 = phi(x, J^{-1} x*).
    pub fn v_functional(&self, x: &Vector, u: &DualVector) -> Result<f64> {
        self.check_dim(x.len())?;
        self.check_dim(u.len())?;
        match self.kind {
            SpaceKind::Hilbert => {
                let d: Vec<f64> = x
                    .as_slice()
                    .iter()
                    .zip(u.as_slice())
                    .map(|(a, b)| a - b)
                    .collect();
                Ok(d.iter().map(|v| v * v).sum())
            }
            SpaceKind::Lp { .. } => {
                let nx = self.norm(x)?;
                let nu = self.dual_norm(u)?;
                Ok((nx * nx - 2.0 * pair(x, u) + nu * nu).max(0.0))
            }
        }
    }

    /// Dual-space convex combination pulled back to the primal space:
    /// J^{-1}(sum_k weights_k J points_k).
    pub fn dual_combination(&self, terms: &[(f64, &Vector)]) -> Result<Vector> {
        let mut acc = DualVector::zeros(self.dim);
        for (weight, point) in terms {
            acc = acc.axpy(*weight, &self.duality_map(point)?);
        }
        self.duality_map_inverse(&acc)
    }
}

fn p_norm(coords: &[f64], p: f64) -> f64 {
    // hypot-style scaling keeps powf in range for very large/small entries
    let amax = coords.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if amax == 0.0 {
        return 0.0;
    }
    let sum: f64 = coords.iter().map(|v| (v.abs() / amax).powf(p)).sum();
    amax * sum.powf(1.0 / p)
}

/// Coordinates of the l_p duality map: ||x||^(2-p) * x_i |x_i|^(p-2),
/// with the 0 * |0|^(p-2) convention resolved to 0.
fn power_map(coords: &[f64], p: f64) -> Vec<f64> {
    let n = p_norm(coords, p);
    if n == 0.0 {
        return vec![0.0; coords.len()];
    }
    let scale = n.powf(2.0 - p);
    coords
        .iter()
        .map(|&v| {
            if v == 0.0 {
                0.0
            } else {
                scale * v.signum() * v.abs().powf(p - 1.0)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(coords: &[f64]) -> Vector {
        Vector::from(coords)
    }

    fn dv(coords: &[f64]) -> DualVector {
        DualVector::from(coords)
    }

    #[test]
    fn hilbert_norm_is_euclidean() {
        let space = SpaceSpec::hilbert(2).unwrap();
        assert_eq!(space.norm(&v(&[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(space.norm(&v(&[0.0, 0.0])).unwrap(), 0.0);
    }

    #[test]
    fn lp_norm_p3() {
        let space = SpaceSpec::lp(2, 3.0).unwrap();
        let expected = 2f64.powf(1.0 / 3.0);
        assert!((space.norm(&v(&[1.0, 1.0])).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn dual_norm_p3_is_q_norm() {
        let space = SpaceSpec::lp(2, 3.0).unwrap();
        // q = 1.5, ||(1,1)||_q = 2^(2/3)
        let expected = 2f64.powf(2.0 / 3.0);
        assert!((space.dual_norm(&dv(&[1.0, 1.0])).unwrap() - expected).abs() < 1e-14);
        assert_eq!(space.dual_norm(&dv(&[0.0, 0.0])).unwrap(), 0.0);
        let h = SpaceSpec::hilbert(2).unwrap();
        assert_eq!(h.dual_norm(&dv(&[3.0, 4.0])).unwrap(), 5.0);
    }

    #[test]
    fn duality_map_hilbert_identity() {
        let space = SpaceSpec::hilbert(2).unwrap();
        let x = v(&[2.0, -1.0]);
        assert_eq!(space.duality_map(&x).unwrap().as_slice(), x.as_slice());
        assert_eq!(
            space.duality_map_inverse(&dv(&[1.0, 2.0])).unwrap().as_slice(),
            &[1.0, 2.0]
        );
    }

    #[test]
    fn duality_map_p3_example() {
        let space = SpaceSpec::lp(2, 3.0).unwrap();
        let x = v(&[1.0, 1.0]);
        let jx = space.duality_map(&x).unwrap();
        let expected = 2f64.powf(-1.0 / 3.0);
        assert!((jx[0] - expected).abs() < 1e-14);
        assert!((jx[1] - expected).abs() < 1e-14);
        // <x, Jx> = ||x||^2 = 2^(2/3)
        let nx = space.norm(&x).unwrap();
        assert!((pair(&x, &jx) - nx * nx).abs() < 1e-14);
    }

    #[test]
    fn duality_map_single_coordinate_fixed() {
        for p in [1.3, 1.5, 2.0, 3.0, 4.5] {
            let space = SpaceSpec::lp(2, p).unwrap();
            let jx = space.duality_map(&v(&[2.0, 0.0])).unwrap();
            assert!((jx[0] - 2.0).abs() < 1e-13, "p = {p}: {:?}", jx.as_slice());
            assert_eq!(jx[1], 0.0);
        }
    }

    #[test]
    fn duality_map_inverse_round_trip() {
        let space = SpaceSpec::lp(2, 3.0).unwrap();
        let u = dv(&[2f64.powf(-1.0 / 3.0), 2f64.powf(-1.0 / 3.0)]);
        let x = space.duality_map_inverse(&u).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13);
        assert!((x[1] - 1.0).abs() < 1e-13);
        let back = space.duality_map(&x).unwrap();
        assert!((back[0] - u[0]).abs() < 1e-13);
        // zero maps to zero
        let zero = space.duality_map_inverse(&dv(&[0.0, 0.0])).unwrap();
        assert_eq!(zero.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn phi_examples() {
        let h = SpaceSpec::hilbert(2).unwrap();
        assert!((h.lyapunov_phi(&v(&[3.0, 0.0]), &v(&[0.0, 4.0])).unwrap() - 25.0).abs() < 1e-14);

        let lp = SpaceSpec::lp(2, 1.5).unwrap();
        assert_eq!(lp.lyapunov_phi(&v(&[1.0, 1.0]), &v(&[1.0, 1.0])).unwrap(), 0.0);
        // disjoint supports: <x, Jy> = 0 and both norms are 1
        assert!((lp.lyapunov_phi(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn v_functional_examples() {
        let h = SpaceSpec::hilbert(2).unwrap();
        assert!((h.v_functional(&v(&[1.0, 0.0]), &dv(&[0.0, 1.0])).unwrap() - 2.0).abs() < 1e-14);

        let lp = SpaceSpec::lp(2, 3.0).unwrap();
        let x = v(&[1.0, 1.0]);
        let jx = lp.duality_map(&x).unwrap();
        assert!(lp.v_functional(&x, &jx).unwrap() < 1e-13);
        let expected = 2f64.powf(2.0 / 3.0);
        assert!((lp.v_functional(&x, &dv(&[0.0, 0.0])).unwrap() - expected).abs() < 1e-13);
    }

    #[test]
    fn invalid_constructions_rejected() {
        assert!(SpaceSpec::hilbert(0).is_err());
        assert!(SpaceSpec::lp(2, 1.0).is_err());
        assert!(SpaceSpec::lp(2, 0.5).is_err());
        assert!(SpaceSpec::lp_with_constant(2, 1.5, 0.0).is_err());
        assert!(SpaceSpec::lp_with_constant(2, 1.5, 1.5).is_err());
        assert!(SpaceSpec::lp_with_constant(2, 3.0, 0.5).is_err());
    }

    #[test]
    fn dimension_mismatch_reported() {
        let space = SpaceSpec::hilbert(3).unwrap();
        assert!(matches!(
            space.norm(&v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        ));
        assert!(space.lyapunov_phi(&v(&[1.0, 2.0, 3.0]), &v(&[1.0])).is_err());
    }

    #[test]
    fn p_greater_two_has_no_constant() {
        let space = SpaceSpec::lp(2, 3.0).unwrap();
        assert!(space.convexity_constant().is_none());
        assert!(!space.is_two_uniformly_convex());
        assert!(space.require_convexity_constant().is_err());
        let space = SpaceSpec::lp(2, 1.5).unwrap();
        assert!((space.convexity_constant().unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
