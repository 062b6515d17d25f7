//! Seeded random streams.
//!
//! Every consumer of randomness in a scenario gets its own ChaCha stream,
//! derived from the scenario seed and a fixed label. Adding a consumer never
//! shifts the draws seen by another one.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub const TRAJECTORY: &str = "trajectory";
pub const U_UAV_MOTION: &str = "u-uav-motion";
pub const SHAKE: &str = "shake";
pub const OBSERVATION: &str = "observation";
pub const OPTIMIZER: &str = "optimizer";
pub const BEAMOPT: &str = "beamopt";

/// FNV-1a; stable across platforms and releases.
fn label_hash(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, label: &str) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(label_hash(label));
    rng
}

/// Sub-stream for the `index`-th repetition of a labelled consumer.
pub fn indexed_stream(seed: u64, label: &str, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng.set_stream(label_hash(label));
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_seed_and_label_repeat() {
        let a: Vec<u64> = stream(7, SHAKE).random_iter().take(8).collect();
        let b: Vec<u64> = stream(7, SHAKE).random_iter().take(8).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn labels_are_disjoint() {
        let a: Vec<u64> = stream(7, SHAKE).random_iter().take(8).collect();
        let b: Vec<u64> = stream(7, OBSERVATION).random_iter().take(8).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn indexed_streams_differ() {
        let a: u64 = indexed_stream(1, OPTIMIZER, 0).random();
        let b: u64 = indexed_stream(1, OPTIMIZER, 1).random();
        assert_ne!(a, b);
    }
}
