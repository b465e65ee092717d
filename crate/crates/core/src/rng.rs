use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent, reproducible random streams derived from one user seed.
///
/// Each consumer in a pipeline draws from its own ChaCha stream so adding
/// draws in one stage never shifts the numbers seen by another.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub(crate) enum Stream {
    Source = 1,
    Signal = 2,
    Idler = 3,
    Splitter = 4,
    Dark = 5,
    Clicks = 6,
    Latency = 7,
}

pub(crate) fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

/// Stream for the `index`-th sub-task of a pipeline stage.
pub(crate) fn indexed_rng(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(stream as u64);
    rng
}
