//! Hexadecimal digits of pi by digit extraction, and a prime sieve for the
//! prime-indexed subsequence.
//!
//! The series is evaluated in 128-bit fixed point (fractions modulo 1 live in
//! a wrapping `u128`), so the accumulated truncation error is a few times `n`
//! units of 2^-128. A digit is only returned when the computed fraction is
//! provably away from a digit boundary.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest hexadecimal position `bbp_hex_digit` accepts.
pub const MAX_HEX_POSITION: u64 = 10_000_000;

fn pow_mod(base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut acc: u128 = 1;
    let mut b = (base % modulus) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// `num / den` as a 128-bit binary fraction, for `num < den`.
fn fraction(num: u64, den: u64) -> u128 {
    debug_assert!(num < den);
    let den = den as u128;
    let scaled = (num as u128) << 64;
    let hi = scaled / den;
    let lo = ((scaled % den) << 64) / den;
    (hi << 64) | lo
}

/// frac(sum_k 16^(d-k) / (8k + j)) in 128-bit fixed point.
fn series(d: u64, j: u64) -> u128 {
    let mut sum: u128 = 0;
    for k in 0..=d {
        let m = 8 * k + j;
        sum = sum.wrapping_add(fraction(pow_mod(16, d - k, m), m));
    }
    // Tail: 16^-(k-d) / m shrinks by 16 per step; 32 steps exhaust 128 bits.
    for step in 1..=32u32 {
        let k = d + step as u64;
        let m = (8 * k + j) as u128;
        // 2^128 / (16^step * m) == 2^(128 - 4 step) / m
        let term = (1u128 << (128 - 4 * step)) / m;
        if term == 0 {
            break;
        }
        sum = sum.wrapping_add(term);
    }
    sum
}

/// The `n`-th hexadecimal digit (1-based) of the fractional part of pi.
///
/// Valid for `1 <= n <= MAX_HEX_POSITION`.
pub fn bbp_hex_digit(n: u64) -> Result<u8> {
    if n == 0 || n > MAX_HEX_POSITION {
        return Err(Error::PrecisionRange {
            position: n,
            max: MAX_HEX_POSITION,
        });
    }
    let d = n - 1;
    let s1 = series(d, 1);
    let s4 = series(d, 4);
    let s5 = series(d, 5);
    let s6 = series(d, 6);
    let x = s1
        .wrapping_mul(4)
        .wrapping_sub(s4.wrapping_mul(2))
        .wrapping_sub(s5)
        .wrapping_sub(s6);

    // Every term is truncated downward by < 1 ulp; 4*S1 - 2*S4 - S5 - S6 is
    // therefore within 4 * (terms per series) ulps of the true value.
    let slack = 4 * (n as u128 + 40);
    let below = x & ((1u128 << 124) - 1);
    if below < slack || (1u128 << 124) - below <= slack {
        return Err(Error::PrecisionRange {
            position: n,
            max: MAX_HEX_POSITION,
        });
    }
    Ok((x >> 124) as u8)
}

/// Hex digits `1..=count` of pi's fractional part.
pub fn pi_hex_digits(count: usize) -> Result<Vec<u8>> {
    (1..=count as u64)
        .into_par_iter()
        .map(bbp_hex_digit)
        .collect()
}

/// Bit `j` (1-based) of pi's binary fraction.
pub fn pi_bit(j: usize) -> Result<u8> {
    let digit = bbp_hex_digit(((j - 1) / 4 + 1) as u64)?;
    Ok((digit >> (3 - (j - 1) % 4)) & 1)
}

/// Bits `1..=n` of pi's binary fraction.
pub fn pi_bits(n: usize) -> Result<Vec<u8>> {
    let digits = pi_hex_digits(n.div_ceil(4))?;
    Ok(digits
        .iter()
        .flat_map(|d| (0..4).map(move |k| (d >> (3 - k)) & 1))
        .take(n)
        .collect())
}

/// The first `count` primes.
pub fn first_primes(count: usize) -> Vec<usize> {
    if count == 0 {
        return Vec::new();
    }
    // p_n < n (ln n + ln ln n) for n >= 6.
    let limit = if count < 6 {
        15
    } else {
        let n = count as f64;
        (n * (n.ln() + n.ln().ln())).ceil() as usize + 1
    };
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::with_capacity(count);
    for i in 2..=limit {
        if composite[i] {
            continue;
        }
        primes.push(i);
        if primes.len() == count {
            break;
        }
        let mut m = i * i;
        while m <= limit {
            composite[m] = true;
            m += i;
        }
    }
    primes
}

/// The `j`-th prime, 1-based.
pub fn nth_prime(j: usize) -> usize {
    first_primes(j)[j - 1]
}
