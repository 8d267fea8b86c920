//! Instance generation, the end-to-end decompose driver, component matching,
//! deterministic randomness streams, and the CLI file formats.

pub mod driver;
pub mod instance;
pub mod io;
pub mod matching;
pub mod rng;

pub use driver::{decompose, default_ell, AggMode, DecomposeOptions, Decomposition};
pub use instance::{generate, GenParams, Instance, Smoothing};
pub use matching::{match_components, MatchReport};
pub use rng::{stream_rng, subset_salt};
