//! Hybrid projection solvers for common-solution problems: finding a point
//! that is simultaneously a fixed point of finitely many relatively
//! nonexpansive maps, a zero of finitely many inverse-strongly-monotone
//! operators, and a solution of finitely many generalized equilibrium
//! problems, over Hilbert and finite-dimensional l_p geometries.
//!
//! The outer iteration accumulates halfspace cuts {z : phi(z, w_n) <=
//! phi(z, x_n)} and projects the fixed anchor x_0 onto their running
//! intersection with the constraint set, which forces strong convergence to
//! the generalized projection of x_0 onto the common solution set.
//!
//! Module map:
//! - [`space`]: norms, duality mappings, the Lyapunov functional phi and V.
//! - [`sets`]: convex sets, metric/generalized projections, halfspace cuts.
//! - [`catalog`]: concrete operators and bifunctions with exact solution sets.
//! - [`resolvent`]: the regularized equilibrium subproblem T_r.
//! - [`solver`]: the outer hybrid iterations, Hilbert fast path, baselines.
//! - [`props`]: seeded property suites used by tests and the CLI.

pub mod catalog;
pub mod error;
pub mod props;
pub mod resolvent;
pub mod sets;
pub mod solver;
pub mod space;

mod qp;
pub mod sampling;

pub use error::{Error, Result};
