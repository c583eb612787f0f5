//! Order-0 static modeling: symbol counts, probabilities and empirical entropy.

use crate::error::{Error, Result};

/// Size of the byte alphabet every level operates on.
pub const ALPHABET_SIZE: usize = 256;

/// Occurrence counts for each byte value.
#[derive(Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: [u64; ALPHABET_SIZE],
    total: u64,
}

impl std::fmt::Debug for FrequencyTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let nonzero: Vec<(u8, u64)> = self.iter_present().collect();
        f.debug_struct("FrequencyTable")
            .field("total", &self.total)
            .field("counts", &nonzero)
            .finish()
    }
}

impl Default for FrequencyTable {
    fn default() -> Self {
        Self {
            counts: [0; ALPHABET_SIZE],
            total: 0,
        }
    }
}

/// Summary of a frequency table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphabetStats {
    pub distinct_symbols: usize,
    pub entropy_bits: f64,
}

impl FrequencyTable {
    pub fn from_counts(counts: [u64; ALPHABET_SIZE]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; ALPHABET_SIZE] {
        &self.counts
    }

    pub fn count(&self, symbol: u8) -> u64 {
        self.counts[symbol as usize]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// `counts[symbol] / total`, or `None` for an empty table.
    pub fn probability(&self, symbol: u8) -> Option<f64> {
        (self.total > 0).then(|| self.counts[symbol as usize] as f64 / self.total as f64)
    }

    pub fn distinct_symbols(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// `(symbol, count)` for every symbol with a nonzero count, in symbol order.
    pub fn iter_present(&self) -> impl Iterator<Item = (u8, u64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(s, &c)| (s as u8, c))
    }

    pub fn entropy_bits_per_symbol(&self) -> Result<f64> {
        entropy_bits_per_symbol(self)
    }

    pub fn stats(&self) -> Result<AlphabetStats> {
        Ok(AlphabetStats {
            distinct_symbols: self.distinct_symbols(),
            entropy_bits: self.entropy_bits_per_symbol()?,
        })
    }
}

/// Counts byte occurrences in `stream`.
pub fn count_frequencies(stream: &[u8]) -> FrequencyTable {
    // Four interleaved tables break the store-to-load dependency on runs.
    let mut lanes = [[0u32; ALPHABET_SIZE]; 4];
    let mut counts = [0u64; ALPHABET_SIZE];
    for block in stream.chunks(1 << 30) {
        let mut quads = block.chunks_exact(4);
        for q in &mut quads {
            lanes[0][q[0] as usize] += 1;
            lanes[1][q[1] as usize] += 1;
            lanes[2][q[2] as usize] += 1;
            lanes[3][q[3] as usize] += 1;
        }
        for &b in quads.remainder() {
            lanes[0][b as usize] += 1;
        }
        for (s, c) in counts.iter_mut().enumerate() {
            *c += lanes.iter().map(|l| l[s] as u64).sum::<u64>();
        }
        lanes = [[0u32; ALPHABET_SIZE]; 4];
    }
    FrequencyTable::from_counts(counts)
}

/// Shannon entropy of the empirical distribution in bits per symbol.
pub fn entropy_bits_per_symbol(table: &FrequencyTable) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let total = table.total() as f64;
    let h: f64 = table
        .iter_present()
        .map(|(_, c)| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    Ok(if h <= 0.0 { 0.0 } else { h })
}
