//! Conley–Zehnder indices, their semicontinuous extensions and mean indices.

pub mod cz;
pub mod profile;
pub mod random;

use thiserror::Error;

pub use cz::{cz_index_sampled, SymplecticPath};
pub use profile::{
    check_dynamical_convexity, index_triple, support_interval, write_index_table, ConvexityReport,
    ConvexityWitness, IndexTriple, IterateIndices, IterationProfile, RotationNumber,
};
pub use random::random_profile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("endpoint is degenerate: eigenvalue within {distance:.3e} of 1")]
    DegenerateEndpoint { distance: f64 },
    #[error("sampling too coarse at sample {sample}: phase increment {increment:.3} exceeds pi/2")]
    SamplingTooCoarse { sample: usize, increment: f64 },
    #[error("path does not start at the identity (residual {residual:.3e})")]
    NotIdentityStart { residual: f64 },
    #[error("sample {sample} is not symplectic (residual {residual:.3e})")]
    NotSymplectic { sample: usize, residual: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty path")]
    EmptyPath,
    #[error("index computation did not return an integer ({value})")]
    NonIntegral { value: f64 },
    #[error("eigenvalue solver failed to converge")]
    EigenSolverFailed,
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
}
