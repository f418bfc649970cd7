//! Counter-based deterministic random source.
//!
//! Every tree label is a pure function of `(seed, trial, side, node, level)`,
//! so the sampling order, the worker count and the scheduler cannot change
//! any draw. The mixer is the splitmix64 finalizer applied after each
//! absorbed coordinate.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn absorb(state: u64, value: u64) -> u64 {
    mix(state ^ value.wrapping_mul(GOLDEN).wrapping_add(GOLDEN))
}

/// Uniform draw in `[0, 1)` keyed by the node coordinates.
#[inline]
pub fn node_uniform(seed: u64, trial: u64, side: u8, node: u64, level: u32) -> f64 {
    let mut h = mix(seed ^ GOLDEN);
    h = absorb(h, trial);
    h = absorb(h, side as u64);
    h = absorb(h, node);
    h = absorb(h, level as u64);
    // Top 53 bits to a double in [0, 1).
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
