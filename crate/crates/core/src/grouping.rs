//! Super-letter formation.
//!
//! Symbols are sorted by ascending probability and carved greedily into
//! power-of-two sized groups. A candidate group of `M` symbols is accepted
//! when its relative redundancy
//!
//! ```text
//! Δ = (L − H) / H,   L = p_s·(log2 M − log2 p_s),   H = −Σ p_i·log2 p_i
//! ```
//!
//! does not exceed the threshold. `L` is the ideal cost of coding the group
//! as one super-letter followed by a fixed `log2 M`-bit suffix and `H` is the
//! ideal cost of coding its members individually. At most 16 super-letters
//! are allowed so that two super-letter indices pack into one byte.

use crate::error::{Error, Result};
use crate::model::{FrequencyTable, ALPHABET_SIZE};

/// Largest super-letter alphabet that still pairs into a byte (16² = 256).
pub const MAX_SUPER_LETTERS: usize = 16;

/// Largest suffix width for a byte alphabet.
pub const MAX_SUFFIX_BITS: u8 = 8;

/// Threshold defaults: initial value, additive retry step and retry budget.
pub const DEFAULT_T_DELTA: f64 = 0.01;
pub const DEFAULT_T_DELTA_STEP: f64 = 0.005;
pub const DEFAULT_MAX_RETRIES: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct SuperLetter {
    pub index: u8,
    pub suffix_bits: u8,
    /// Member symbols; a symbol's suffix index is its position here.
    pub members: Vec<u8>,
    /// Combined probability of the members. Diagnostic only; zero when the
    /// table was rebuilt from a container header.
    pub aggregate_prob: f64,
}

impl SuperLetter {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Where a symbol lives: its super-letter and its fixed-width suffix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolCode {
    pub super_letter: u8,
    pub suffix_index: u8,
    pub suffix_bits: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupingTable {
    super_letters: Vec<SuperLetter>,
    per_symbol: [Option<SymbolCode>; ALPHABET_SIZE],
    t_delta_used: f64,
}

impl GroupingTable {
    /// Builds a table from explicit `(suffix_bits, members)` descriptors,
    /// validating sizes and disjointness. Used by the decoder.
    pub fn from_descriptors(descriptors: Vec<(u8, Vec<u8>)>) -> Result<Self> {
        if descriptors.is_empty() || descriptors.len() > MAX_SUPER_LETTERS {
            return Err(Error::malformed(format!(
                "super-letter count {} outside 1..=16",
                descriptors.len()
            )));
        }
        let mut per_symbol = [None; ALPHABET_SIZE];
        let mut super_letters = Vec::with_capacity(descriptors.len());
        for (index, (suffix_bits, members)) in descriptors.into_iter().enumerate() {
            if suffix_bits > MAX_SUFFIX_BITS {
                return Err(Error::malformed(format!(
                    "suffix width {suffix_bits} exceeds 8"
                )));
            }
            if members.len() != 1usize << suffix_bits {
                return Err(Error::malformed(format!(
                    "super-letter {index} has {} members but suffix width {suffix_bits}",
                    members.len()
                )));
            }
            for (pos, &sym) in members.iter().enumerate() {
                let slot = &mut per_symbol[sym as usize];
                if slot.is_some() {
                    return Err(Error::malformed(format!("symbol {sym:#04x} listed twice")));
                }
                *slot = Some(SymbolCode {
                    super_letter: index as u8,
                    suffix_index: pos as u8,
                    suffix_bits,
                });
            }
            super_letters.push(SuperLetter {
                index: index as u8,
                suffix_bits,
                members,
                aggregate_prob: 0.0,
            });
        }
        Ok(Self {
            super_letters,
            per_symbol,
            t_delta_used: 0.0,
        })
    }

    pub fn super_letters(&self) -> &[SuperLetter] {
        &self.super_letters
    }

    pub fn n_super_letters(&self) -> usize {
        self.super_letters.len()
    }

    pub fn symbol_code(&self, symbol: u8) -> Option<SymbolCode> {
        self.per_symbol[symbol as usize]
    }

    pub fn t_delta_used(&self) -> f64 {
        self.t_delta_used
    }

    /// Total number of symbols covered by the super-letters.
    pub fn symbol_count(&self) -> usize {
        self.super_letters.iter().map(SuperLetter::size).sum()
    }
}

/// Relative redundancy Δ of coding `member_probs` as one super-letter with
/// a fixed `log2 m`-bit suffix.
pub fn group_redundancy(member_probs: &[f64], m: usize) -> Result<f64> {
    if !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    if member_probs.len() != m {
        return Err(Error::GroupSizeMismatch {
            len: member_probs.len(),
            m,
        });
    }
    if let Some(&bad) = member_probs.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
        return Err(Error::InvalidProbability(bad));
    }
    Ok(redundancy_unchecked(member_probs))
}

fn redundancy_unchecked(probs: &[f64]) -> f64 {
    let suffix_bits = probs.len().trailing_zeros() as f64;
    let p_s: f64 = probs.iter().sum();
    let h: f64 = probs.iter().map(|&p| -p * p.log2()).sum();
    if h <= 0.0 {
        return 0.0;
    }
    let l = p_s * (suffix_bits - p_s.log2());
    // Rounding can leave an equiprobable group a hair below zero.
    ((l - h) / h).max(0.0)
}

/// Runs the greedy grouping, raising the threshold by `t_delta_step` and
/// starting over whenever more than 16 super-letters result.
pub fn form_super_letters(
    table: &FrequencyTable,
    t_delta: f64,
    t_delta_step: f64,
    max_retries: u32,
) -> Result<GroupingTable> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    if !(t_delta > 0.0 && t_delta < 1.0) {
        return Err(Error::InvalidConfig("t_delta must lie in (0, 1)"));
    }
    if !(t_delta_step >= 0.0 && t_delta_step.is_finite()) {
        return Err(Error::InvalidConfig(
            "t_delta_step must be finite and non-negative",
        ));
    }

    // Ascending probability, ties by symbol value.
    let mut sorted: Vec<(u8, u64)> = table.iter_present().collect();
    sorted.sort_by_key(|&(sym, count)| (count, sym));
    let total = table.total() as f64;
    let probs: Vec<f64> = sorted.iter().map(|&(_, c)| c as f64 / total).collect();

    let mut threshold = t_delta;
    let mut last_count = 0;
    for attempt in 0..=max_retries {
        if attempt > 0 {
            threshold = t_delta + attempt as f64 * t_delta_step;
        }
        match greedy_sizes(&probs, threshold) {
            Some(sizes) => return Ok(assemble(&sorted, &probs, &sizes, threshold)),
            None => last_count = greedy_count(&probs, threshold),
        }
    }
    Err(Error::GroupingFailed {
        n_super_letters: last_count,
        threshold,
    })
}

/// Size of each group chosen by one greedy pass, or `None` once the pass
/// exceeds [`MAX_SUPER_LETTERS`].
fn greedy_sizes(probs: &[f64], threshold: f64) -> Option<Vec<usize>> {
    let mut sizes = Vec::new();
    let mut start = 0;
    while start < probs.len() {
        if sizes.len() == MAX_SUPER_LETTERS {
            return None;
        }
        let m = best_group_size(&probs[start..], threshold);
        sizes.push(m);
        start += m;
    }
    Some(sizes)
}

fn greedy_count(probs: &[f64], threshold: f64) -> usize {
    let mut count = 0;
    let mut start = 0;
    while start < probs.len() {
        start += best_group_size(&probs[start..], threshold);
        count += 1;
    }
    count
}

/// Largest power of two `M <= remaining.len()` whose leading group passes.
fn best_group_size(remaining: &[f64], threshold: f64) -> usize {
    let mut m = 1usize << (usize::BITS - 1 - remaining.len().leading_zeros());
    while m > 1 {
        if redundancy_unchecked(&remaining[..m]) <= threshold {
            return m;
        }
        m >>= 1;
    }
    1
}

fn assemble(sorted: &[(u8, u64)], probs: &[f64], sizes: &[usize], threshold: f64) -> GroupingTable {
    let mut per_symbol = [None; ALPHABET_SIZE];
    let mut super_letters = Vec::with_capacity(sizes.len());
    let mut start = 0;
    for (index, &m) in sizes.iter().enumerate() {
        let suffix_bits = m.trailing_zeros() as u8;
        let members: Vec<u8> = sorted[start..start + m].iter().map(|&(s, _)| s).collect();
        for (pos, &sym) in members.iter().enumerate() {
            per_symbol[sym as usize] = Some(SymbolCode {
                super_letter: index as u8,
                suffix_index: pos as u8,
                suffix_bits,
            });
        }
        super_letters.push(SuperLetter {
            index: index as u8,
            suffix_bits,
            members,
            aggregate_prob: probs[start..start + m].iter().sum(),
        });
        start += m;
    }
    GroupingTable {
        super_letters,
        per_symbol,
        t_delta_used: threshold,
    }
}

/// Ideal one-level cost in bits per symbol: entropy of the super-letter
/// distribution plus the average suffix width.
pub fn grouped_code_length(table: &FrequencyTable, grouping: &GroupingTable) -> Result<f64> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut sl_counts = vec![0u64; grouping.n_super_letters()];
    let mut suffix_cost = 0.0;
    let total = table.total() as f64;
    for (sym, count) in table.iter_present() {
        let code = grouping
            .symbol_code(sym)
            .ok_or(Error::UnmappedSymbol(sym))?;
        sl_counts[code.super_letter as usize] += count;
        suffix_cost += count as f64 / total * code.suffix_bits as f64;
    }
    let sl_entropy: f64 = sl_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    Ok(sl_entropy.max(0.0) + suffix_cost)
}
