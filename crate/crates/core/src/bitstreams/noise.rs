//! Counter-based SplitMix64.
//!
//! Word `w` (0-based) of the stream for `seed` is
//! `mix(seed + (w + 1) * 0x9E3779B97F4A7C15)` with wrapping arithmetic, where
//! `mix` is the SplitMix64 finaliser:
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z =  z ^ (z >> 31)
//! ```
//!
//! This is exactly the sequence produced by iterating the reference
//! SplitMix64 generator from state `seed`, but every word is addressable
//! directly, so bit `j` of a noise stream never depends on earlier reads.

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

/// The `word`-th (0-based) 64-bit output for `seed`.
#[inline]
pub fn splitmix_word(seed: u64, word: u64) -> u64 {
    mix64(seed.wrapping_add(word.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Bit `j` (1-based) of the noise stream, most significant bit of each word first.
#[inline]
pub fn noise_bit(seed: u64, j: usize) -> u8 {
    let idx = (j - 1) as u64;
    let word = splitmix_word(seed, idx / 64);
    ((word >> (63 - idx % 64)) & 1) as u8
}

/// Uniform draw in `[0, 1)` from the top 53 bits of word `index`.
#[inline]
pub fn unit_draw(seed: u64, index: u64) -> f64 {
    (splitmix_word(seed, index) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
