//! Finite bit strings and lazily evaluated infinite bit streams.
//!
//! Streams are value descriptors: bit `j` (1-based) is a pure function of the
//! stream's kind, parameters and `j`. They stand in for the hidden parameter
//! of an experiment (a seed `x_1 x_2 x_3 ...`) and for the computable
//! reference sequences used as outcome scripts.
//!
//! File-backed streams read raw bytes, most significant bit first within each
//! byte.

mod noise;
mod pi;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use noise::{mix64, noise_bit, splitmix_word, unit_draw, GOLDEN_GAMMA};
pub use pi::{
    bbp_hex_digit, first_primes, nth_prime, pi_bit, pi_bits, pi_hex_digits, MAX_HEX_POSITION,
};

/// A finite sequence of bits, each stored as `0` or `1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidArgument(format!(
                "bit {} has value {}, expected 0 or 1",
                pos + 1,
                bits[pos]
            )));
        }
        Ok(Self(bits))
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        Self(bits.into_iter().map(u8::from).collect())
    }

    /// Big-endian binary representation of `value` in exactly `width` bits.
    pub fn from_uint(value: u64, width: usize) -> Self {
        Self(
            (0..width)
                .rev()
                .map(|i| if i < 64 { ((value >> i) & 1) as u8 } else { 0 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<u8> {
        self.0
    }

    /// Bit `j`, 1-based.
    pub fn get(&self, j: usize) -> Option<u8> {
        j.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn last(&self) -> Option<u8> {
        self.0.last().copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(u8::from(bit));
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b == 0 { "0" } else { "1" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString(\"{self}\")")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::InvalidArgument(format!(
                    "`{other}` is not a bit in `{s}`"
                ))),
            })
            .collect::<Result<Vec<u8>>>()
            .map(Self)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Computable reference sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Concatenated binary numerals 1, 10, 11, 100, ...
    ChampernowneBinary,
    /// Binary fraction of pi: 0010 0100 0011 1111 ...
    PiBinary,
    /// Bits of `PiBinary` at the prime positions 2, 3, 5, 7, 11, ...
    PiPrimeIndex,
    Constant(u8),
    /// 0, 1, 0, 1, ...
    Alternating,
}

impl Rule {
    /// Parses a rule identifier: `champernowne-binary`, `pi-binary`,
    /// `pi-prime-index`, `alternating`, `constant(0)` / `constant(1)`.
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        Ok(match id {
            "champernowne-binary" => Rule::ChampernowneBinary,
            "pi-binary" => Rule::PiBinary,
            "pi-prime-index" => Rule::PiPrimeIndex,
            "alternating" => Rule::Alternating,
            "constant(0)" | "constant-0" => Rule::Constant(0),
            "constant(1)" | "constant-1" => Rule::Constant(1),
            _ => return Err(Error::UnknownRule(id.to_string())),
        })
    }

    pub fn id(&self) -> String {
        match self {
            Rule::ChampernowneBinary => "champernowne-binary".into(),
            Rule::PiBinary => "pi-binary".into(),
            Rule::PiPrimeIndex => "pi-prime-index".into(),
            Rule::Constant(b) => format!("constant({b})"),
            Rule::Alternating => "alternating".into(),
        }
    }

    fn bit(&self, j: usize) -> Result<u8> {
        Ok(match *self {
            Rule::ChampernowneBinary => champernowne_bit(j),
            Rule::PiBinary => pi_bit(j)?,
            Rule::PiPrimeIndex => pi_bit(nth_prime(j))?,
            Rule::Constant(b) => b,
            Rule::Alternating => ((j - 1) % 2) as u8,
        })
    }

    fn prefix(&self, n: usize) -> Result<Vec<u8>> {
        match *self {
            Rule::PiBinary => pi_bits(n),
            Rule::PiPrimeIndex => {
                let primes = first_primes(n);
                let bits = pi_bits(primes.last().copied().unwrap_or(0))?;
                Ok(primes.iter().map(|&p| bits[p - 1]).collect())
            }
            _ => (1..=n).map(|j| self.bit(j)).collect(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Bit `j` of the concatenation of the binary numerals 1, 10, 11, 100, ...
fn champernowne_bit(j: usize) -> u8 {
    let mut offset = (j - 1) as u128;
    let mut width: u32 = 1;
    loop {
        // There are 2^(width-1) numerals of `width` bits.
        let block = (width as u128) << (width - 1);
        if offset < block {
            let number = (1u128 << (width - 1)) + offset / width as u128;
            let pos = (offset % width as u128) as u32;
            return ((number >> (width - 1 - pos)) & 1) as u8;
        }
        offset -= block;
        width += 1;
    }
}

/// Raw bytes backing a file stream.
#[derive(Clone, PartialEq, Eq)]
pub struct FileBits {
    path: PathBuf,
    bytes: Arc<[u8]>,
    total_bits: usize,
}

impl fmt::Debug for FileBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FileBits")
            .field("path", &self.path)
            .field("total_bits", &self.total_bits)
            .finish()
    }
}

/// An infinite (or, when file-backed, bounded) reproducible bit source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BitStream {
    Periodic { prefix: BitString, cycle: BitString },
    Rule(Rule),
    SeededNoise { seed: u64 },
    File(FileBits),
}

impl BitStream {
    pub fn periodic(prefix: BitString, cycle: BitString) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidArgument(
                "periodic stream needs a non-empty cycle".into(),
            ));
        }
        Ok(BitStream::Periodic { prefix, cycle })
    }

    /// The finite string `bits` followed by zeros forever.
    pub fn zero_padded(bits: BitString) -> Self {
        BitStream::Periodic {
            prefix: bits,
            cycle: BitString(vec![0]),
        }
    }

    pub fn constant(bit: u8) -> Self {
        BitStream::Rule(Rule::Constant(bit & 1))
    }

    /// A stream over raw bytes, limited to the first `total_bits` bits.
    pub fn from_bytes(
        bytes: Vec<u8>,
        total_bits: Option<usize>,
        path: impl Into<PathBuf>,
    ) -> Result<Self> {
        let available = bytes.len() * 8;
        let total_bits = total_bits.unwrap_or(available);
        if total_bits > available {
            return Err(Error::InvalidArgument(format!(
                "total_bits {total_bits} exceeds the {available} bits present"
            )));
        }
        Ok(BitStream::File(FileBits {
            path: path.into(),
            bytes: bytes.into(),
            total_bits,
        }))
    }

    /// Loads a file-backed stream; every bit of the file is readable.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_bytes(bytes, None, path)
    }

    /// Number of readable bits, `None` for infinite streams.
    pub fn total_bits(&self) -> Option<usize> {
        match self {
            BitStream::File(f) => Some(f.total_bits),
            _ => None,
        }
    }

    /// Bit `j`, 1-based.
    pub fn bit(&self, j: usize) -> Result<u8> {
        if j == 0 {
            return Err(Error::InvalidArgument("bit positions are 1-based".into()));
        }
        match self {
            BitStream::Periodic { prefix, cycle } => Ok(if j <= prefix.len() {
                prefix.0[j - 1]
            } else {
                cycle.0[(j - prefix.len() - 1) % cycle.len()]
            }),
            BitStream::Rule(rule) => rule.bit(j),
            BitStream::SeededNoise { seed } => Ok(noise_bit(*seed, j)),
            BitStream::File(f) => {
                if j > f.total_bits {
                    return Err(Error::StreamExhausted {
                        requested: j,
                        available: f.total_bits,
                    });
                }
                let i = j - 1;
                Ok((f.bytes[i / 8] >> (7 - i % 8)) & 1)
            }
        }
    }

    /// Bits `1..=n`.
    pub fn prefix(&self, n: usize) -> Result<BitString> {
        if let Some(total) = self.total_bits() {
            if n > total {
                return Err(Error::StreamExhausted {
                    requested: n,
                    available: total,
                });
            }
        }
        match self {
            BitStream::Rule(rule) => rule.prefix(n).map(BitString),
            _ => (1..=n)
                .map(|j| self.bit(j))
                .collect::<Result<Vec<u8>>>()
                .map(BitString),
        }
    }

    /// Bits `lo..=hi`.
    pub fn window(&self, lo: usize, hi: usize) -> Result<BitString> {
        (lo..=hi)
            .map(|j| self.bit(j))
            .collect::<Result<Vec<u8>>>()
            .map(BitString)
    }

    pub fn describe(&self) -> String {
        match self {
            BitStream::Periodic { prefix, cycle } => format!("periodic({prefix}|{cycle})"),
            BitStream::Rule(r) => r.id(),
            BitStream::SeededNoise { seed } => format!("seeded-noise({seed})"),
            BitStream::File(f) => format!("file({})", f.path.display()),
        }
    }
}

/// Bits `1..=n` of `stream`.
pub fn prefix(stream: &BitStream, n: usize) -> Result<BitString> {
    stream.prefix(n)
}

pub fn make_rule_stream(rule_id: &str) -> Result<BitStream> {
    Rule::parse(rule_id).map(BitStream::Rule)
}

pub fn make_seeded_noise_stream(seed: u64) -> BitStream {
    BitStream::SeededNoise { seed }
}

/// Sequential reader over a stream.
#[derive(Clone, Debug)]
pub struct BitCursor {
    stream: BitStream,
    next: usize,
}

impl BitCursor {
    pub fn new(stream: BitStream) -> Self {
        Self { stream, next: 1 }
    }

    /// Index of the next unread bit.
    pub fn position(&self) -> usize {
        self.next
    }

    pub fn stream(&self) -> &BitStream {
        &self.stream
    }

    pub fn next_bit(&mut self) -> Result<u8> {
        let bit = self.stream.bit(self.next)?;
        self.next += 1;
        Ok(bit)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    /// Champernowne oracle: format the numerals and concatenate.
    fn champernowne_oracle(n: usize) -> String {
        let mut s = String::new();
        let mut i = 1u64;
        while s.len() < n {
            s.push_str(&format!("{i:b}"));
            i += 1;
        }
        s.truncate(n);
        s
    }

    #[test]
    fn periodic_prefix() {
        let s = BitStream::periodic(bs(""), bs("01")).unwrap();
        assert_eq!(s.prefix(5).unwrap().to_string(), "01010");
        assert_eq!(s.prefix(0).unwrap(), BitString::new());
    }

    #[test]
    fn periodic_needs_cycle() {
        assert!(BitStream::periodic(bs("1"), bs("")).is_err());
    }

    #[test]
    fn periodic_with_prefix_follows_formula() {
        let prefix = bs("110");
        let cycle = bs("01101");
        let s = BitStream::periodic(prefix.clone(), cycle.clone()).unwrap();
        for j in 1..100 {
            let expected = if j <= prefix.len() {
                prefix.get(j).unwrap()
            } else {
                cycle.get((j - prefix.len() - 1) % cycle.len() + 1).unwrap()
            };
            assert_eq!(s.bit(j).unwrap(), expected);
        }
    }

    #[test]
    fn champernowne_prefix() {
        let s = make_rule_stream("champernowne-binary").unwrap();
        assert_eq!(s.prefix(11).unwrap().to_string(), "11011100101");
        assert_eq!(
            s.prefix(5000).unwrap().to_string(),
            champernowne_oracle(5000)
        );
    }

    #[test]
    fn constant_and_alternating() {
        let s = make_rule_stream("constant(0)").unwrap();
        assert_eq!(s.prefix(4).unwrap().bits(), &[0, 0, 0, 0]);
        let a = make_rule_stream("alternating").unwrap();
        assert_eq!(a.prefix(6).unwrap().to_string(), "010101");
    }

    #[test]
    fn pi_streams() {
        let pi = make_rule_stream("pi-binary").unwrap();
        assert_eq!(pi.prefix(8).unwrap().bits(), &[0, 0, 1, 0, 0, 1, 0, 0]);
        let pp = make_rule_stream("pi-prime-index").unwrap();
        assert_eq!(pp.prefix(4).unwrap().bits(), &[0, 1, 0, 0]);
        for j in 1..=4 {
            assert_eq!(pp.bit(j).unwrap(), pp.prefix(4).unwrap().get(j).unwrap());
        }
    }

    #[test]
    fn unknown_rule() {
        assert!(matches!(
            make_rule_stream("e-binary"),
            Err(Error::UnknownRule(_))
        ));
    }

    #[test]
    fn noise_is_reproducible() {
        let s = make_seeded_noise_stream(42);
        assert_eq!(s.bit(1).unwrap(), s.bit(1).unwrap());
        assert_eq!(make_seeded_noise_stream(7).prefix(16).unwrap().len(), 16);
        let a = make_seeded_noise_stream(1).prefix(64).unwrap();
        let b = make_seeded_noise_stream(2).prefix(64).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn file_stream_is_msb_first_and_bounded() {
        let s = BitStream::from_bytes(vec![0b1010_0000, 0xFF], Some(12), "mem").unwrap();
        assert_eq!(s.prefix(12).unwrap().to_string(), "101000001111");
        assert!(matches!(
            s.bit(13),
            Err(Error::StreamExhausted {
                requested: 13,
                available: 12
            })
        ));
        assert!(matches!(s.prefix(13), Err(Error::StreamExhausted { .. })));
    }

    #[test]
    fn file_stream_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bits.bin");
        std::fs::write(&path, [0x80u8]).unwrap();
        let s = BitStream::from_file(&path).unwrap();
        assert_eq!(s.total_bits(), Some(8));
        assert_eq!(s.prefix(8).unwrap().to_string(), "10000000");
    }

    #[test]
    fn bitstring_parsing() {
        assert!("012".parse::<BitString>().is_err());
        assert!(BitString::from_bits(vec![0, 2]).is_err());
        assert_eq!(BitString::from_uint(5, 4).to_string(), "0101");
        assert_eq!(bs("110").get(0), None);
        assert_eq!(bs("110").get(3), Some(0));
    }

    #[test]
    fn cursor_reads_in_order() {
        let mut c = BitCursor::new(make_rule_stream("champernowne-binary").unwrap());
        let bits: Vec<u8> = (0..5).map(|_| c.next_bit().unwrap()).collect();
        assert_eq!(bits, vec![1, 1, 0, 1, 1]);
        assert_eq!(c.position(), 6);
    }
}
