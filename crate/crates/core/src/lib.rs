//! Exact and brute-force tools for discriminating many copies of the extremal
//! `d×d` Werner states under LOCC and PPT measurements.
//!
//! * [`werner`]: instances, the single-copy POVM and the closed-form error.
//! * [`symmetric`]: the `Q` matrix and PPT feasibility over the `A_k` basis.
//! * [`lp`]: the primal program, exact simplex, dual certificate and gaps.
//! * [`dense`]: floating-point ground truth built from explicit matrices.
//! * [`chernoff`]: classical and quantum Chernoff distances.
//! * [`protocol`]: seeded Monte Carlo of the one-way measurement protocol.

pub mod chernoff;
pub mod dense;
pub mod error;
pub mod lp;
pub mod protocol;
pub mod rational;
pub mod symmetric;
pub mod werner;

pub use error::{Error, Result};
pub use rational::ExactScalar;
