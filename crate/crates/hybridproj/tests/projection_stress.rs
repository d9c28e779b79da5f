//! Adversarial stress for the cut projector: bundles of nearly parallel
//! halfspaces are exactly what the outer iteration accumulates near
//! convergence. The checks are solver-independent: explicit feasibility and
//! the variational characterization of the nearest point against boundary
//! points found by bisection along random rays.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hybridproj::sampling;
use hybridproj::sets::{project_onto_shrunk_set, ConvexSet, Halfspace};
use hybridproj::space::{pair, DualVector, SpaceSpec, Vector};

struct RandomPolyhedron {
    cuts: Vec<Halfspace>,
    interior: Vector,
}

/// Halfspaces all containing `interior` with positive slack; most normals
/// cluster around a common direction to mimic accumulated cuts.
fn random_polyhedron(rng: &mut ChaCha8Rng, dim: usize) -> RandomPolyhedron {
    let interior = sampling::vector_in_cube(rng, dim, 1.0);
    let base_dir = sampling::vector_in_cube(rng, dim, 1.0);
    let count = rng.gen_range(5..60);
    let mut cuts = Vec::with_capacity(count);
    for k in 0..count {
        let jitter = if k % 4 == 0 { 1.0 } else { 1e-4 };
        let wobble = sampling::vector_in_cube(rng, dim, jitter);
        let normal = base_dir.add(&wobble);
        if normal.euclidean_norm() < 1e-9 {
            continue;
        }
        let normal = DualVector::new(normal.as_slice().to_vec());
        let slack = rng.gen_range(1e-6..1.0f64);
        let offset = pair(&interior, &normal) + slack * normal.euclidean_norm();
        cuts.push(Halfspace::new(normal, offset).unwrap());
    }
    RandomPolyhedron { cuts, interior }
}

fn feasibility_gap(poly: &RandomPolyhedron, z: &Vector) -> f64 {
    poly.cuts
        .iter()
        .map(|h| h.distance(z))
        .fold(0.0f64, f64::max)
}

/// Farthest feasible point from `interior` along `direction`, by bisection
/// on the explicit constraint margins.
fn ray_boundary_point(poly: &RandomPolyhedron, direction: &Vector) -> Vector {
    let mut lo = 0.0f64;
    let mut hi = 64.0f64;
    let at = |t: f64| poly.interior.axpy(t, direction);
    if feasibility_gap(poly, &at(hi)) <= 0.0 {
        return at(hi);
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if feasibility_gap(poly, &at(mid)) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(lo)
}

#[test]
fn nearest_point_variational_characterization() {
    let mut rng = sampling::rng(0xdeed);
    let space_cache: Vec<SpaceSpec> = (2..=8).map(|d| SpaceSpec::hilbert(d).unwrap()).collect();
    for trial in 0..50 {
        let dim = rng.gen_range(2..=8usize);
        let space = &space_cache[dim - 2];
        let poly = random_polyhedron(&mut rng, dim);
        let whole = ConvexSet::whole_space(dim);
        let x0 = sampling::vector_in_cube(&mut rng, dim, 5.0);

        let z = project_onto_shrunk_set(space, &whole, &poly.cuts, &x0)
            .unwrap_or_else(|e| panic!("trial {trial}: projection failed: {e}"));
        let scale = 1.0 + x0.euclidean_norm();
        let gap = feasibility_gap(&poly, &z);
        assert!(gap <= 1e-9 * scale, "trial {trial}: feasibility gap {gap:.3e}");

        // <x0 - z, y - z> <= 0 for feasible y separates z as the projection.
        let mut candidates = vec![poly.interior.clone()];
        for _ in 0..10 {
            let direction = sampling::vector_in_cube(&mut rng, dim, 1.0);
            candidates.push(ray_boundary_point(&poly, &direction));
        }
        let residual_dir = x0.sub(&z);
        for (i, y) in candidates.iter().enumerate() {
            let inner = hybridproj::space::dot(&residual_dir, &y.sub(&z));
            assert!(
                inner <= 1e-7 * scale * scale,
                "trial {trial}, candidate {i}: characterization margin {inner:.3e}"
            );
        }
    }
}

#[test]
fn lp_shrunk_projection_minimizes_phi() {
    let mut rng = sampling::rng(0xfeed);
    for trial in 0..10 {
        let dim = rng.gen_range(2..=4usize);
        let space = SpaceSpec::lp(dim, 1.5).unwrap();
        let poly = random_polyhedron(&mut rng, dim);
        let whole = ConvexSet::whole_space(dim);
        let x0 = sampling::vector_in_cube(&mut rng, dim, 3.0);

        let z = project_onto_shrunk_set(&space, &whole, &poly.cuts, &x0)
            .unwrap_or_else(|e| panic!("trial {trial}: projection failed: {e}"));
        let scale = 1.0 + x0.euclidean_norm();
        assert!(feasibility_gap(&poly, &z) <= 1e-8 * scale);

        // No sampled feasible point does better in phi(., x0).
        let phi_z = space.lyapunov_phi(&z, &x0).unwrap();
        let mut candidates = vec![poly.interior.clone()];
        for _ in 0..10 {
            let direction = sampling::vector_in_cube(&mut rng, dim, 1.0);
            candidates.push(ray_boundary_point(&poly, &direction));
        }
        for (i, y) in candidates.iter().enumerate() {
            let phi_y = space.lyapunov_phi(y, &x0).unwrap();
            assert!(
                phi_z <= phi_y + 1e-7 * (1.0 + phi_y),
                "trial {trial}, candidate {i}: phi {phi_z:.9} > {phi_y:.9}"
            );
        }
    }
}
