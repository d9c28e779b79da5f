//! Seeded sampling helpers shared by the property suites and the
//! construction-time validation checks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::sets::ConvexSet;
use crate::space::Vector;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform vector in [-scale, scale]^dim.
pub fn vector_in_cube(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Vector {
    Vector::new((0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
}

/// Vector with log-uniform magnitude, exercising several orders of magnitude.
pub fn vector_log_scale(rng: &mut ChaCha8Rng, dim: usize, decades: f64) -> Vector {
    let scale = 10f64.powf(rng.gen_range(-decades..decades));
    vector_in_cube(rng, dim, scale)
}

/// A point of `set`, produced by metrically projecting a random draw.
pub fn point_in_set(rng: &mut ChaCha8Rng, set: &ConvexSet, scale: f64) -> Result<Vector> {
    let raw = vector_in_cube(rng, set.dim(), scale);
    set.metric_project(&raw)
}

/// Verification grid over `set`: box extreme points (all corners when
/// affordable, random corners otherwise) plus projected random draws.
pub fn verification_grid(
    rng: &mut ChaCha8Rng,
    set: &ConvexSet,
    interior: usize,
    scale: f64,
) -> Result<Vec<Vector>> {
    let mut points = Vec::new();
    if let ConvexSet::Box { lower, upper } = set {
        let n = lower.len();
        if n <= 10 {
            for mask in 0..(1usize << n) {
                let corner: Vec<f64> = (0..n)
                    .map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                    .collect();
                points.push(Vector::new(corner));
            }
        } else {
            for _ in 0..1024 {
                let corner: Vec<f64> = (0..n)
                    .map(|i| if rng.gen_bool(0.5) { upper[i] } else { lower[i] })
                    .collect();
                points.push(Vector::new(corner));
            }
        }
    }
    for _ in 0..interior {
        points.push(point_in_set(rng, set, scale)?);
    }
    Ok(points)
}
