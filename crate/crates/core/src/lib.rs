//! Verification kernels for the lattice Schwarzian KdV equation.
//!
//! The crate builds exact solutions of the quad equation, checks its Lax
//! pair and consistency around the cube, derives Lie point symmetries
//! from sampled determining equations, and validates the catalog of
//! generalized and master symmetries together with the Miura link to the
//! Volterra lattice. Identity checks run over arbitrary-precision
//! rationals; flow integration runs over `f64`.
//!
//! `no_std` compatible (requires `alloc`); IO, file formats, and the CLI
//! live in the companion `lskdv-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;

pub mod consistency;
pub mod flows;
pub mod hierarchy;
pub mod lattice;
pub mod lax;
pub mod numerics;
pub mod sampling;
pub mod symmetry;

pub use error::Error;

pub type Result<T> = core::result::Result<T, Error>;
