//! Error estimators for adaptive quadrature, the drivers that use them, and a
//! Monte Carlo harness that measures how often each estimator is right.
//!
//! The crate is organised bottom-up:
//!
//! - [`rules`]: fixed interpolatory rules on `[-1, 1]` and their application.
//! - [`legendre`]: orthonormal Legendre coefficient machinery (interpolation,
//!   sub-interval transforms, Newton polynomials, norms).
//! - [`estimators`]: eight local error estimators behind one trait.
//! - [`drivers`]: recursive and heap-based adaptive integration.
//! - [`testbed`]: randomized test integrands with closed-form integrals.
//! - [`bench`]: false-positive / false-negative tables and convergence
//!   experiments, run in parallel when the `parallel` feature is enabled.

pub mod bench;
pub mod drivers;
pub mod error;
pub mod estimators;
pub mod legendre;
pub mod rules;
pub mod testbed;

pub use error::{QuadError, Result};
