//! Sequence diagnostics: eventual periodicity and finite-prefix normality.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floyd's tortoise-and-hare on the orbit `x0, f(x0), f(f(x0)), ...`.
///
/// Returns `(mu, lambda)`: the orbit enters its cycle at step `mu` and the
/// cycle has length `lambda`. The orbit must be eventually periodic.
pub fn floyd_cycle<T, F>(x0: T, f: F) -> (usize, usize)
where
    T: PartialEq + Clone,
    F: Fn(&T) -> T,
{
    let mut tortoise = f(&x0);
    let mut hare = f(&f(&x0));
    while tortoise != hare {
        tortoise = f(&tortoise);
        hare = f(&f(&hare));
    }

    let mut mu = 0;
    tortoise = x0;
    while tortoise != hare {
        tortoise = f(&tortoise);
        hare = f(&hare);
        mu += 1;
    }

    let mut lambda = 1;
    hare = f(&tortoise);
    while tortoise != hare {
        hare = f(&hare);
        lambda += 1;
    }
    (mu, lambda)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub found: bool,
    pub transient: usize,
    pub period: usize,
    pub bound: usize,
}

/// Smallest `(transient, period)` describing `seq[..bound]` as eventually
/// periodic.
///
/// A candidate is valid when `seq[i] == seq[i + period]` for every
/// `transient <= i < bound - period` and at least two full periods follow the
/// transient. Among valid candidates the one with the smallest
/// `transient + period` wins, ties going to the shorter period; so if the
/// sequence really is eventually periodic with `t + 2p <= bound`, the report
/// satisfies `transient + period <= t + p`.
pub fn detect_cycle(seq: &[u8], bound: usize) -> Result<CycleReport> {
    if bound < 2 || seq.len() < bound {
        return Err(Error::InvalidArgument(format!(
            "cycle detection needs 2 <= bound <= length, got bound {bound} for length {}",
            seq.len()
        )));
    }
    let s = &seq[..bound];
    let mut best: Option<(usize, usize)> = None;
    for period in 1..=bound / 2 {
        if let Some((t, p)) = best {
            if period >= t + p {
                break;
            }
        }
        let transient = (0..bound - period)
            .rev()
            .find(|&i| s[i] != s[i + period])
            .map_or(0, |i| i + 1);
        if bound - transient < 2 * period {
            continue;
        }
        let better = match best {
            None => true,
            Some((t, p)) => transient + period < t + p,
        };
        if better {
            best = Some((transient, period));
        }
    }
    Ok(match best {
        Some((transient, period)) => CycleReport {
            found: true,
            transient,
            period,
            bound,
        },
        None => CycleReport {
            found: false,
            transient: 0,
            period: 0,
            bound,
        },
    })
}

/// Frequencies of the `floor(n / block_len)` non-overlapping blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockFrequencies {
    pub block_len: usize,
    pub blocks: usize,
    /// Indexed by the block read as a big-endian integer.
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
}

impl BlockFrequencies {
    /// Frequency of the block written as a bit string, e.g. `"01"`.
    pub fn of(&self, block: &str) -> Option<f64> {
        if block.len() != self.block_len {
            return None;
        }
        usize::from_str_radix(block, 2)
            .ok()
            .map(|i| self.frequencies[i])
    }
}

fn check_bits(seq: &[u8]) -> Result<()> {
    match seq.iter().position(|&b| b > 1) {
        None => Ok(()),
        Some(i) => Err(Error::InvalidArgument(format!(
            "element {} is {}, not a bit",
            i + 1,
            seq[i]
        ))),
    }
}

pub fn block_frequencies(seq: &[u8], block_len: usize) -> Result<BlockFrequencies> {
    if block_len == 0 || block_len > 24 {
        return Err(Error::InvalidArgument(format!(
            "block length must be in 1..=24, got {block_len}"
        )));
    }
    if seq.len() < block_len {
        return Err(Error::InsufficientLength {
            len: seq.len(),
            max_block: block_len,
            min_blocks: 1,
        });
    }
    check_bits(seq)?;
    let mut counts = vec![0u64; 1 << block_len];
    for chunk in seq.chunks_exact(block_len) {
        let v = chunk.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
        counts[v] += 1;
    }
    let blocks = seq.len() / block_len;
    let frequencies = counts.iter().map(|&c| c as f64 / blocks as f64).collect();
    Ok(BlockFrequencies {
        block_len,
        blocks,
        counts,
        frequencies,
    })
}

/// Default tolerance `sqrt(l * log2(n) / n)` for block length `l` over `n` bits.
pub fn normality_threshold(block_len: usize, n: usize) -> f64 {
    let n = n as f64;
    (block_len as f64 * n.log2() / n).sqrt()
}

/// Minimum number of blocks of the longest length.
pub const MIN_BLOCKS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNormality {
    pub block_len: usize,
    pub frequencies: Vec<f64>,
    pub max_deviation: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalityReport {
    pub n: usize,
    pub max_block: usize,
    pub per_block: Vec<BlockNormality>,
    pub pass: bool,
}

impl NormalityReport {
    pub fn first_failure(&self) -> Option<usize> {
        self.per_block.iter().find(|b| !b.pass).map(|b| b.block_len)
    }
}

/// Checks every block length `1..=max_block`: the largest deviation of a
/// block frequency from `2^-l` must not exceed [`normality_threshold`].
pub fn borel_normality_check(seq: &[u8], max_block: usize) -> Result<NormalityReport> {
    if max_block == 0 {
        return Err(Error::InvalidArgument(
            "max block length must be at least 1".into(),
        ));
    }
    let n = seq.len();
    if n / max_block < MIN_BLOCKS {
        return Err(Error::InsufficientLength {
            len: n,
            max_block,
            min_blocks: MIN_BLOCKS,
        });
    }
    let per_block = (1..=max_block)
        .map(|l| {
            let freq = block_frequencies(seq, l)?;
            let expected = 1.0 / (1u64 << l) as f64;
            let max_deviation = freq
                .frequencies
                .iter()
                .map(|f| (f - expected).abs())
                .fold(0.0, f64::max);
            let threshold = normality_threshold(l, n);
            Ok(BlockNormality {
                block_len: l,
                frequencies: freq.frequencies,
                max_deviation,
                threshold,
                pass: max_deviation <= threshold,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pass = per_block.iter().all(|b| b.pass);
    Ok(NormalityReport {
        n,
        max_block,
        per_block,
        pass,
    })
}

/// Reads bits from CSV text.
///
/// A trials dump (header containing `outcome`) yields its `outcome` column.
/// Otherwise every field is a bit, row by row, after an optional header row
/// whose first field is not `0` or `1`.
pub fn parse_bits_csv(text: &str) -> Result<Vec<u8>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = reader.records().enumerate().peekable();
    let mut column = None;
    if let Some((_, Ok(first))) = records.peek() {
        if let Some(i) = first.iter().position(|f| f == "outcome") {
            column = Some(i);
            records.next();
        } else if first.get(0).is_some_and(|f| f != "0" && f != "1") {
            records.next();
        }
    }
    let mut bits = Vec::new();
    for (row, record) in records {
        let record = record.map_err(|e| Error::Parse {
            line: row + 1,
            message: e.to_string(),
        })?;
        let fields: Vec<&str> = match column {
            Some(i) => vec![record.get(i).unwrap_or("")],
            None => record.iter().filter(|f| !f.is_empty()).collect(),
        };
        for f in fields {
            match f {
                "0" => bits.push(0),
                "1" => bits.push(1),
                other => {
                    return Err(Error::Parse {
                        line: row + 1,
                        message: format!("`{other}` is not a bit"),
                    })
                }
            }
        }
    }
    Ok(bits)
}
