//! Pseudorandom restriction families over GF(p) and the aggregation of
//! restricted desymmetrized tensors into the global one.
//!
//! Two aggregation modes exist. "paper" enumerates the exact hash family
//! (all non-constant degree <= k-1 polynomials over GF(q)), averages the
//! zero-embedded restricted tensors, and divides out the exactly known
//! inclusion probabilities; it is used for identity validation at tiny n,
//! since the family has q^k - q members. "cover" uses a greedy covering
//! family of fixed-size subsets and averages each entry over the members
//! that observe it; it is exact in the noiseless case and is the default
//! for end-to-end runs.

pub mod aggregate;
pub mod cover;
pub mod family;
pub mod gf;

pub use aggregate::{
    aggregate_cover, aggregate_paper, correction_rational, correction_value, CoverDiagnostics,
    RestrictedTensor,
};
pub use cover::{cover_family, CoverFamily};
pub use family::{FamilySubsets, HashFamily};
pub use gf::{is_prime, next_prime};
