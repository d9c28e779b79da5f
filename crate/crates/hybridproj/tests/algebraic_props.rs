//! Property tests for the algebraic identities of the geometry layer.

use proptest::prelude::*;

use hybridproj::sets::halfspace_from_phi_cut;
use hybridproj::space::{pair, SpaceSpec, Vector};

fn space_strategy(dim: usize) -> impl Strategy<Value = SpaceSpec> {
    prop_oneof![
        Just(SpaceSpec::hilbert(dim).unwrap()),
        Just(SpaceSpec::lp(dim, 1.5).unwrap()),
        Just(SpaceSpec::lp(dim, 2.0).unwrap()),
        Just(SpaceSpec::lp(dim, 3.0).unwrap()),
    ]
}

fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-50.0..50.0f64, dim)
}

proptest! {
    #[test]
    fn duality_identity_and_round_trip(
        space in space_strategy(4),
        x in coords(4),
    ) {
        let x = Vector::new(x);
        let jx = space.duality_map(&x).unwrap();
        let nx = space.norm(&x).unwrap();
        prop_assert!((pair(&x, &jx) - nx * nx).abs() <= 1e-10 * (1.0 + nx * nx));
        prop_assert!((space.dual_norm(&jx).unwrap() - nx).abs() <= 1e-10 * (1.0 + nx));
        let back = space.duality_map_inverse(&jx).unwrap();
        prop_assert!(space.norm(&back.sub(&x)).unwrap() <= 1e-10 * (1.0 + nx));
    }

    #[test]
    fn norm_absolute_homogeneity(
        space in space_strategy(4),
        x in coords(4),
        t in -20.0..20.0f64,
    ) {
        let x = Vector::new(x);
        let lhs = space.norm(&x.scale(t)).unwrap();
        let rhs = t.abs() * space.norm(&x).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
    }

    #[test]
    fn phi_cut_membership_matches_phi_comparison(
        space in space_strategy(3),
        w in coords(3),
        x in coords(3),
        z in coords(3),
    ) {
        let w = Vector::new(w);
        let x = Vector::new(x);
        let z = Vector::new(z);
        let cut = halfspace_from_phi_cut(&space, &w, &x).unwrap();
        let diff = space.lyapunov_phi(&z, &x).unwrap() - space.lyapunov_phi(&z, &w).unwrap();
        let scale = 1.0 + diff.abs();
        // Skip the tolerance band where roundoff decides the sign.
        if diff.abs() > 1e-9 * scale {
            prop_assert_eq!(cut.contains(&z, 0.0), diff >= 0.0);
        }
    }

    #[test]
    fn phi_is_nonnegative_and_zero_on_the_diagonal(
        space in space_strategy(4),
        x in coords(4),
        y in coords(4),
    ) {
        let x = Vector::new(x);
        let y = Vector::new(y);
        prop_assert!(space.lyapunov_phi(&x, &y).unwrap() >= 0.0);
        let self_phi = space.lyapunov_phi(&x, &x).unwrap();
        let nx = space.norm(&x).unwrap();
        prop_assert!(self_phi <= 1e-10 * (1.0 + nx * nx));
    }
}
