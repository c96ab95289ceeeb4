//! Counter-based random streams.
//!
//! Every stream is a ChaCha8 generator whose key comes from the master seed and whose
//! stream id is a splitmix hash of a path such as `(replica, atom)`. Results therefore
//! do not depend on which worker ran which replica.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn path_id(path: &[u64]) -> u64 {
    path.iter()
        .fold(0x6a09_e667_f3bc_c908, |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Independent stream for `(seed, path...)`.
pub fn stream(seed: u64, path: &[u64]) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_id(path));
    rng
}

/// Stream for one replica of an experiment.
pub fn replica_stream(seed: u64, replica: u64) -> StreamRng {
    stream(seed, &[replica])
}
