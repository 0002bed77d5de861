//! Named, indexable random substreams.
//!
//! Every random draw in the toolkit comes from `substream(root, tag, idx)`.
//! The generator is ChaCha8 (counter based); the key mixes the root seed,
//! the stream name and the index path, so draws never depend on the order
//! in which parallel workers run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv(tag: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derive a 64-bit key for (root, tag, idx...).
pub fn derive(root: u64, tag: &str, idx: &[u64]) -> u64 {
    let mut k = splitmix(root ^ fnv(tag));
    for &i in idx {
        k = splitmix(k ^ splitmix(i.wrapping_add(0x5851_f42d_4c95_7f2d)));
    }
    k
}

pub fn substream(root: u64, tag: &str, idx: &[u64]) -> Rng {
    let key = derive(root, tag, idx);
    let mut seed = [0u8; 32];
    let mut k = key;
    for chunk in seed.chunks_mut(8) {
        k = splitmix(k);
        chunk.copy_from_slice(&k.to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
