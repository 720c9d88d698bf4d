//! Finite Blaschke products acting as multiplication operators on the
//! Hardy, Bergman and Dirichlet spaces of the unit disc.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: polynomials, truncated power series with tail bounds, roots.
//! * [`blaschke`]: evaluation, Taylor data, critical points and composition.
//! * [`spaces`]: weighted coefficient spaces, kernels and quadrature.
//! * [`operators`]: truncated multiplication operators, adjoints,
//!   finite sections of candidate reducing subspaces and the commutant probe.
//! * [`classify`]: structural tests and the reducing-subspace classification.
//! * [`harness`]: verification suite, instance generation, JSON reports.

pub mod blaschke;
pub mod classify;
pub mod error;
pub mod harness;
pub mod operators;
pub mod series;
pub mod spaces;

pub use blaschke::BlaschkeProduct;
pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use spaces::{CoeffVector, SpaceKind};
