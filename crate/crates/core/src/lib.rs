//! Relativistic frames, boosts, spin transport and observer charts in flat spacetime.

// `!(x > tol)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod frenet;
pub mod lorentz;
pub mod minkowski;
pub mod numerics;
pub mod observer;
pub mod rotation;
pub mod sampling;
pub mod selftest;
pub mod spin;
pub mod worldline;

pub use error::{Error, Result};
