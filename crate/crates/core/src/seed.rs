//! Sub-seed derivation.
//!
//! Every stage draws from its own generator seeded by
//! `derive(root, stage, index)`, a SplitMix64 mix of the three words, so a
//! stage can be rerun in isolation and still see the same stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub mod stage {
    pub const KMEANS: u64 = 1;
    pub const PQ: u64 = 2;
    pub const ITQ: u64 = 3;
    pub const SYNTH: u64 = 4;
    pub const TRAIN_PAIRS: u64 = 5;
    pub const SAMPLE: u64 = 6;
    pub const ASSIGNER: u64 = 7;
    pub const SUBSAMPLE: u64 = 8;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(root: u64, stage: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(root) ^ stage) ^ index)
}

pub fn rng(root: u64, stage: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(root, stage, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stages_do_not_collide() {
        let a = derive(7, stage::KMEANS, 0);
        let b = derive(7, stage::PQ, 0);
        let c = derive(7, stage::KMEANS, 1);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive(7, stage::KMEANS, 0));
    }
}
