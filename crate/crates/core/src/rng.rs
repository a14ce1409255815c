//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, stream, counter)`, so a simulation
//! produces the same numbers no matter how agents are scheduled across
//! threads. Engine streams are indexed by agent and counters by step.

use std::f64::consts::PI;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent child seed, e.g. one per bootstrap replicate.
#[inline]
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    mix64(mix64(seed.wrapping_add(GOLDEN)) ^ index.wrapping_mul(GOLDEN).wrapping_add(0x632B_E59B_D9B4_E019))
}

#[inline]
fn block(seed: u64, stream: u64, counter: u64) -> u64 {
    let k = mix64(seed.wrapping_add(GOLDEN));
    let k = mix64(k ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    mix64(k ^ counter.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7).wrapping_add(GOLDEN))
}

#[inline]
fn to_open_unit(x: u64) -> f64 {
    // (0, 1]
    ((x >> 11) + 1) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform on (0, 1].
#[inline]
pub fn uniform(seed: u64, stream: u64, counter: u64) -> f64 {
    to_open_unit(mix64(block(seed, stream, counter) ^ 1))
}

/// Two independent standard normals via Box–Muller.
#[inline]
pub fn normal_pair(seed: u64, stream: u64, counter: u64) -> (f64, f64) {
    let b = block(seed, stream, counter);
    let u1 = to_open_unit(mix64(b ^ 1));
    let u2 = to_open_unit(mix64(b ^ 2));
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (2.0 * PI * u2).sin_cos();
    (r * c, r * s)
}

/// One standard normal (the cosine branch of [`normal_pair`]).
#[inline]
pub fn normal(seed: u64, stream: u64, counter: u64) -> f64 {
    let b = block(seed, stream, counter);
    let u1 = to_open_unit(mix64(b ^ 1));
    let u2 = to_open_unit(mix64(b ^ 2));
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}
