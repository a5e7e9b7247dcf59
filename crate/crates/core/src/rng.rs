//! Reproducible random streams for chunked parallel sampling.
//!
//! The sample index space `0..samples` is cut into chunks of
//! [`CHUNK_SIZE`]. Chunk `k` of a run seeded with `seed` draws from
//! ChaCha8 keyed by `seed` (expanded through `seed_from_u64`) on stream
//! number `k`. The mapping depends only on `(seed, k)`, never on the number
//! of worker threads or on scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK_SIZE: u64 = 1 << 16;

pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Number of chunks and the length of each.
pub fn chunks(samples: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let count = samples.div_ceil(CHUNK_SIZE) as usize;
    (0..count).into_par_iter().map(move |k| {
        let k = k as u64;
        let start = k * CHUNK_SIZE;
        (k, CHUNK_SIZE.min(samples - start))
    })
}

/// Runs `body` on every chunk in parallel and sums the integer tallies it
/// returns. Tallies are integers, so the total does not depend on the
/// order in which chunks finish.
pub fn tally<const K: usize, F>(seed: u64, samples: u64, body: F) -> [u64; K]
where
    F: Fn(&mut ChaCha8Rng, u64) -> [u64; K] + Sync,
{
    chunks(samples)
        .map(|(k, len)| {
            let mut rng = chunk_rng(seed, k);
            body(&mut rng, len)
        })
        .reduce(
            || [0; K],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}
