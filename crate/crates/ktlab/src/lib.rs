//! Numerical laboratory for decay rates of bounded C0-semigroups.
//!
//! The library builds the quantitative objects that relate resolvent growth
//! on the imaginary axis to the decay of ||T(t) A R(1,A)||: minimal
//! dominating functions and their right-inverses, the measure functional
//! calculus mu_hat(T), and a battery of numerical rate checks on exactly
//! solvable operator families.

pub mod dominating;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod operators;
pub mod runner;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{C64, CMatrix};
pub use measures::BoundedMeasure;
pub use operators::{DiagonalOperator, MatrixOperator, OperatorModel};
