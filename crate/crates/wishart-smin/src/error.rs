//! Crate error type.

use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Error, Debug)]
pub enum Error {
    /// Invalid ensemble or operation parameters (precondition violation).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An exact self-check failed; the offending quantity is described.
    /// This indicates an internal inconsistency and aborts the construction
    /// that detected it.
    #[error("exact identity check failed: {0}")]
    IdentityCheck(String),

    /// The iterative Hermitian eigensolver did not converge for one draw.
    #[error("eigensolver failed to converge on draw {draw}")]
    Eigensolver { draw: usize },

    /// A numerical pipeline produced an unusable value (NaN/∞ or an
    /// out-of-tolerance invariant).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Matrix/vector shape mismatch in the kicked-tops pipeline.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Malformed textual input (sample files, grid specs, rationals).
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
