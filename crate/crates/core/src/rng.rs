//! Seed plumbing: every random draw in the pipeline descends from one master
//! seed through fixed stream derivation, so runs are reproducible regardless
//! of thread count or stage order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 step; the standard seed-expansion finalizer.
fn splitmix64_next(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent RNG for (`master_seed`, `stream`, `index`).
///
/// `stream` names the consumer (e.g. "split", "cv-rep"); `index` separates
/// repeated uses within one consumer (e.g. the CV repetition number).
pub fn stream_rng(master_seed: u64, stream: &str, index: u64) -> ChaCha8Rng {
    // FNV-1a over the stream name gives a stable consumer tag.
    let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in stream.as_bytes() {
        tag ^= u64::from(b);
        tag = tag.wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut state = master_seed
        ^ tag.rotate_left(17)
        ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64_next(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
