//! Quadrature drivers, variational experiments, file formats and the CLI for
//! the Kähler curvature laboratory.
//!
//! The pointwise mathematics (jets, curvature, invariants, pairings) lives in
//! `kforge-core`; this crate supplies everything that needs an operating
//! system: parallel grid sweeps, finite-difference derivatives of action
//! integrals, JSON reports and the `kforge` binary.

pub mod cli;
pub mod jetfile;
pub mod quadrature;
pub mod report;
pub mod variation;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("model error: {0}")]
    Model(kforge_core::models::ModelError),
    #[error("jet error: {0}")]
    Jet(kforge_core::jets::JetError),
    #[error("pairing error: {0}")]
    Transgress(kforge_core::transgress::TransgressError),
    #[error("pattern error: {0}")]
    Pattern(kforge_core::patterns::PatternError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("jet file: {0}")]
    JetFile(String),
}

impl From<kforge_core::models::ModelError> for LabError {
    fn from(e: kforge_core::models::ModelError) -> Self {
        LabError::Model(e)
    }
}
impl From<kforge_core::jets::JetError> for LabError {
    fn from(e: kforge_core::jets::JetError) -> Self {
        LabError::Jet(e)
    }
}
impl From<kforge_core::transgress::TransgressError> for LabError {
    fn from(e: kforge_core::transgress::TransgressError) -> Self {
        LabError::Transgress(e)
    }
}
impl From<kforge_core::patterns::PatternError> for LabError {
    fn from(e: kforge_core::patterns::PatternError) -> Self {
        LabError::Pattern(e)
    }
}

/// Build the global rayon pool honoring the `KFORGE_THREADS` cap. Safe to
/// call more than once; only the first call wins.
pub fn init_threads() {
    if let Ok(v) = std::env::var("KFORGE_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}
