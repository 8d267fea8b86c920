//! Power-sum decomposition of homogeneous polynomials.
//!
//! Decomposes P(x) = sum_t A_t(x)^{3D} (degree-K components A_t) back into
//! its components via pseudorandom coordinate restrictions, subspace
//! intersection, desymmetrization, order-3 tensor decomposition, and D-th
//! roots, plus an empirical probe suite for the rank and singular-value
//! structure the method relies on.

pub mod error;
pub mod harness;
pub mod jennrich;
pub mod pipeline;
pub mod polyring;
pub mod probes;
pub mod restrictions;
pub mod roots;
pub mod subspace;

pub use error::{Error, Result};
