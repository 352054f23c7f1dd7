use alloc::string::String;
use alloc::vec::Vec;

use crate::lattice::LatticeIndex;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("enumeration would produce about {estimate} points, cap is {cap}")]
    Resource { estimate: f64, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two computations that must agree did not. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    /// Fixed-point iteration exceeded its step cap.
    #[error("iteration did not reach a fixed point after {} steps", visited.len())]
    Divergence { visited: Vec<LatticeIndex> },

    /// Iteration left the domain.
    #[error("orbit left the domain after {} steps", visited.len())]
    Escaped {
        visited: Vec<LatticeIndex>,
        image: LatticeIndex,
    },
}

pub type Result<T> = core::result::Result<T, Error>;
