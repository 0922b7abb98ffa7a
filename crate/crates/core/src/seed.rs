//! Seed splitting.
//!
//! Every derived seed is `splitmix64(master ^ splitmix64(stream) ^ splitmix64(splitmix64(index)))`.
//! Trials, episodes and pilot runs use distinct streams, so a trial's data
//! depends only on the master seed and its own index, never on execution order.

/// One round of the SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for item `index` of `stream` under `master`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(stream) ^ splitmix64(splitmix64(index)))
}

/// Named streams used by the harness.
pub mod stream {
    pub const CALIBRATION: u64 = 1;
    pub const TEST: u64 = 2;
    pub const TRIAL: u64 = 3;
    pub const PILOT: u64 = 4;
    pub const TRUTH: u64 = 5;
}
