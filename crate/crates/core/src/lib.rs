//! Quantitative toolkit for invariant Harnack machinery on the Grushin plane.
//!
//! The crate is organized around six capabilities:
//!
//! - [`quasimetric`]: empirical estimators for quasi-triangle constants,
//!   Hölder defects of a quasi-distance, and doubling/ring/reverse-doubling
//!   behaviour of ball measures;
//! - [`geometry`]: exact closed forms for the Grushin gauge, the kernels
//!   `rho`/`sigma`, their sublevel regions, metric boxes, dilations, and
//!   box-sandwich structure constants;
//! - [`engine`]: the deterministic constant calculus that turns double-ball
//!   and critical-density constants into power-decay and Harnack constants;
//! - [`barriers`]: the explicit ring barrier built from `sigma^alpha`,
//!   including case-wise constants and a subsolution verifier;
//! - [`solver`]: a finite-difference Dirichlet solver for the degenerate
//!   operator `a11 u_x1x1 + a22 x1^2 u_x2x2 + 2 a12 x1 u_x1x2 = x1^2 f`;
//! - [`harness`]: measurable checks (double ball, critical density, power
//!   decay, Harnack quotients, weighted maximum principle) over solver
//!   output, plus the reporting suite behind the CLI.

pub mod barriers;
pub mod engine;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod quasimetric;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::Point2;
