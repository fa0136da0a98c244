//! Scalar tower shared by all verification kernels.

pub mod linalg;
pub mod rational;
pub mod scalar;

pub use rational::Rational;
pub use scalar::{dual_partial, BaseKind, Dual, Scalar};
