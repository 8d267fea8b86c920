//! Crate-wide error type.
//!
//! Stage failures carry a label so the driver can report which pipeline
//! stage failed; the CLI maps variants onto its exit codes.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),

    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("degree capacity exceeded: requested degree {requested} > cap {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("rank deficiency: {0}")]
    RankDeficient(String),

    #[error("weak subspace intersection after {retries} retries (lambda_m = {lambda_m:.6})")]
    WeakIntersection { lambda_m: f64, retries: usize },

    #[error("desymmetrization matrix rank below m_3: sigma_min = {sigma_min:.3e}")]
    DesymRank { sigma_min: f64 },

    #[error("eigenvalue collision persisted after {retries} retries")]
    EigenCollision { retries: usize },

    #[error("complex eigenvalues beyond tolerance: max imaginary fraction {imag_frac:.3e}")]
    ComplexEigenvalues { imag_frac: f64 },

    #[error("scale recovery residual {residual:.3e} suggests rank overestimate")]
    ScaleResidual { residual: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("root verification failed: residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    RootVerification { residual: f64, threshold: f64 },

    #[error("field size {0} is not prime (enable padding or pick a prime)")]
    UnsupportedField(u64),

    #[error("coverage failure: {0}")]
    Coverage(String),

    #[error("precision: {0}")]
    Precision(String),

    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
