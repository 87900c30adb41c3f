//! Projection onto capped rotated second-order cones and solvers built on it.
//!
//! The central object is the set
//!
//! ```text
//! X = { (x, y, z) : ||x||^2 <= y*z,  y >= 0,  0 <= z <= u }
//! ```
//!
//! where `x` is a block vector, `y` and `z` are scalars, and `u > 0` caps `z`.
//! [`projection`] computes the exact Euclidean projection onto `X` by case
//! analysis (the generic case reduces to a quartic equation, solved by
//! [`roots`]). [`oracle`] provides an independent grid-search solver of the
//! same problem for validation, plus feasible-point sampling and optimality
//! certificates. [`model`] defines the perspective-relaxed sparse regression
//! objective whose feasible set is a Cartesian product of such cones, and
//! [`solvers`] minimizes it with projected gradient and FISTA, both with
//! constant and backtracking step rules. [`encode`] prepares tabular data
//! (dummy encoding and interaction features) for the regression model.

pub mod encode;
pub mod error;
pub mod model;
pub mod oracle;
pub mod projection;
pub mod roots;
pub mod solvers;

pub use error::{Error, Result};
pub use projection::{CappedRsoc, ProjectionCase, ProjectionResult, RsocVector};
