use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use predlab::bitstreams::{bbp_hex_digit, first_primes, make_rule_stream, pi_bit, pi_hex_digits, MAX_HEX_POSITION};

const GOLDEN: &str = include_str!("golden/pi_hex_1000.txt");

/// `floor(atan(1/x) * 2^bits)` by the alternating Gregory series, with a
/// few guard bits dropped at the end.
fn atan_inv(x: u32, bits: u64) -> BigUint {
    let scale = BigUint::one() << (bits + 32);
    let x2 = BigUint::from(x * x);
    let mut power = &scale / x;
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    let mut k = 0u32;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            pos += term;
        } else {
            neg += term;
        }
        power /= &x2;
        k += 1;
    }
    (pos - neg) >> 32
}

/// First `n` hex digits of pi's fraction via Machin's formula.
fn machin_hex(n: usize) -> Vec<u8> {
    let bits = 4 * n as u64 + 64;
    let pi = (atan_inv(5, bits) * 16u32) - (atan_inv(239, bits) * 4u32);
    let fraction = pi - (BigUint::from(3u32) << bits);
    let shifted = fraction >> 64;
    let mut digits = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let d: BigUint = (&shifted >> (4 * i)) & BigUint::from(15u32);
        digits.push(d.to_u8().unwrap());
    }
    digits
}

fn golden_digits() -> Vec<u8> {
    GOLDEN.chars().filter(|c| c.is_ascii_hexdigit()).map(|c| c.to_digit(16).unwrap() as u8).collect()
}

#[test]
fn golden_file_agrees_with_machin_oracle() {
    let golden = golden_digits();
    assert_eq!(golden.len(), 1000);
    assert_eq!(machin_hex(1000), golden);
}

#[test]
fn bbp_matches_digits_1_to_1000() {
    let golden = golden_digits();
    let computed = pi_hex_digits(1000).unwrap();
    assert_eq!(computed, golden);
    for (n, &d) in golden.iter().enumerate().step_by(97) {
        assert_eq!(bbp_hex_digit(n as u64 + 1).unwrap(), d);
    }
}

#[test]
fn bbp_deep_digits_agree_with_machin() {
    let oracle = machin_hex(10_010);
    for n in [2_000u64, 5_000, 9_999, 10_000] {
        assert_eq!(bbp_hex_digit(n).unwrap(), oracle[n as usize - 1], "digit {n}");
    }
    assert!(MAX_HEX_POSITION >= 10_000);
}

#[test]
fn pi_binary_is_the_hex_expansion_msb_first() {
    let golden = golden_digits();
    for j in 1..=400usize {
        let d = golden[(j - 1) / 4];
        let expected = (d >> (3 - (j - 1) % 4)) & 1;
        assert_eq!(pi_bit(j).unwrap(), expected, "bit {j}");
    }
}

fn trial_division_primes(count: usize) -> Vec<usize> {
    let mut primes = Vec::with_capacity(count);
    let mut candidate = 2;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= candidate).all(|&p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

#[test]
fn prime_index_stream_matches_independent_sieve() {
    let primes = trial_division_primes(1000);
    assert_eq!(first_primes(1000), primes);
    let pi = make_rule_stream("pi-binary").unwrap();
    let stream = make_rule_stream("pi-prime-index").unwrap();
    let got = stream.prefix(1000).unwrap();
    for (j, &p) in primes.iter().enumerate() {
        assert_eq!(got.bits()[j], pi.bit(p).unwrap(), "j={}", j + 1);
    }
}
