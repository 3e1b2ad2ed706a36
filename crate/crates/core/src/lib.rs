//! Orbit closures in finite-type quiver representation spaces.
//!
//! The crate classifies orbits for the A_n and D4 quiver families, builds
//! the associated Kempf collapsings (flag-variety base plus homogeneous
//! bundle), decides crepancy both symbolically and through closed-form
//! criteria, and evaluates the numerical invariants of the resulting
//! orbital degeneracy loci with an exact Bott-localization engine.
//!
//! Everything is exact: rank computations run over arbitrary-precision
//! rationals and localization sums are assembled from integer torus
//! weights, so an equality in a test is an equality on the nose.

pub mod arith;
pub mod chow;
pub mod error;
pub mod odl;
pub mod oracle;
pub mod orbit;
pub mod quiver;
pub mod resolution;
pub mod sweeps;

pub use error::{Error, Result};
pub use orbit::{Decomposition, MatrixTuple, OrbitInvariants};
pub use quiver::{CaseTag, DimVector, Quiver};
