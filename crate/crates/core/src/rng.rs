//! Deterministic, splittable random streams.
//!
//! A stream is keyed by `(seed, index)`: the seed picks the ChaCha key and the
//! index picks the ChaCha stream. Monte Carlo trial `i` always draws from
//! `stream(seed, i)`, so results do not depend on how trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
