//! Per-sample random substreams.
//!
//! Every sample draws from its own ChaCha8 stream keyed by `(seed, purpose)`
//! with stream id equal to the sample index. A sample's values therefore
//! depend only on `(seed, purpose, index)`, never on how samples are split
//! across workers.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Separates the streams used by different estimators under one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Offset = 1,
    DomainPoint = 2,
    Margin = 3,
}

pub struct Substream(ChaCha8Rng);

impl Substream {
    pub fn new(seed: u64, purpose: Purpose, index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&(purpose as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(index);
        Self(rng)
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
