//! Seeded generator streams.
//!
//! Every stochastic stage of a run draws from its own ChaCha8 stream derived from
//! the run seed, so adding draws to one stage never shifts another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Stream identifiers for the stages of a pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Drivers = 1,
    Dynamics = 2,
    Mixing = 3,
    Ica = 4,
    Clustering = 5,
}

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stage_rng(seed: u64, stage: Stage) -> Rng {
    stream(seed, stage as u64)
}

pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
