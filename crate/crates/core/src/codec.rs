//! Recursive encoder and decoder.
//!
//! Each level maps every symbol to a super-letter index (4 bits) and a
//! fixed-width suffix. Suffixes go straight to a bitstream; super-letter
//! indices are packed two per byte, `(s1 << 4) | s2`, and the resulting
//! byte stream (half as long) becomes the input of the next level. The
//! recursion stops once the stream is short enough to store verbatim.
//!
//! The per-symbol work in both directions is table lookups, shifts, ORs
//! and additions. Floating point appears only in the per-level grouping.

use crate::bitio::BitSink;
use crate::container::{EncodedContainer, Level, LevelHeader};
use crate::error::{Error, Result};
use crate::grouping::{
    form_super_letters, grouped_code_length, GroupingTable, SymbolCode, DEFAULT_MAX_RETRIES,
    DEFAULT_T_DELTA, DEFAULT_T_DELTA_STEP, MAX_SUFFIX_BITS, MAX_SUPER_LETTERS,
};
use crate::model::{count_frequencies, entropy_bits_per_symbol, FrequencyTable, ALPHABET_SIZE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncoderConfig {
    pub t_delta: f64,
    pub t_delta_step: f64,
    pub max_retries: u32,
    /// Streams of at most this many bytes are stored verbatim.
    pub raw_threshold: usize,
    pub max_levels: usize,
}

impl Default for EncoderConfig {
    fn default() -> Self {
        Self {
            t_delta: DEFAULT_T_DELTA,
            t_delta_step: DEFAULT_T_DELTA_STEP,
            max_retries: DEFAULT_MAX_RETRIES,
            raw_threshold: 64,
            max_levels: 40,
        }
    }
}

impl EncoderConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_delta > 0.0 && self.t_delta < 1.0) {
            return Err(Error::InvalidConfig("t_delta must lie in (0, 1)"));
        }
        if !(self.t_delta_step >= 0.0 && self.t_delta_step.is_finite()) {
            return Err(Error::InvalidConfig(
                "t_delta_step must be finite and non-negative",
            ));
        }
        if self.raw_threshold == 0 {
            return Err(Error::InvalidConfig("raw_threshold must be at least 1"));
        }
        Ok(())
    }
}

/// Per-level diagnostics gathered while encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub stream_length: usize,
    pub distinct_symbols: usize,
    pub entropy_bits: f64,
    pub grouped_code_length: f64,
    pub t_delta_used: f64,
    pub super_letter_sizes: Vec<usize>,
    pub suffix_bits: u64,
}

impl LevelStats {
    pub fn n_super_letters(&self) -> usize {
        self.super_letter_sizes.len()
    }
}

/// Splits `stream` into its super-letter index stream and suffix bitstream.
pub fn split_streams(stream: &[u8], grouping: &GroupingTable) -> Result<(Vec<u8>, BitSink)> {
    let codes = code_table(grouping);
    let mut nibbles = Vec::with_capacity(stream.len());
    let mut suffixes = BitSink::with_capacity(stream.len());
    for &b in stream {
        let c = codes[b as usize].ok_or(Error::UnmappedSymbol(b))?;
        nibbles.push(c.super_letter);
        suffixes.push(c.suffix_index as u32, c.suffix_bits as u32);
    }
    Ok((nibbles, suffixes))
}

/// Packs 4-bit values two per byte, first value in the high nibble.
/// An odd trailing value is padded with a zero low nibble.
pub fn pair_nibbles(sl_stream: &[u8]) -> Result<Vec<u8>> {
    if let Some(&bad) = sl_stream.iter().find(|&&n| n >= 16) {
        return Err(Error::NibbleOutOfRange(bad));
    }
    let mut out = Vec::with_capacity(sl_stream.len().div_ceil(2));
    let mut pairs = sl_stream.chunks_exact(2);
    for p in &mut pairs {
        out.push((p[0] << 4) | p[1]);
    }
    if let [last] = pairs.remainder() {
        out.push(last << 4);
    }
    Ok(out)
}

/// Inverse of [`pair_nibbles`], truncated to `out_length` values.
pub fn unpair_nibbles(bytes: &[u8], out_length: usize) -> Result<Vec<u8>> {
    if out_length.div_ceil(2) != bytes.len() {
        return Err(Error::PairLengthMismatch {
            out_length,
            bytes: bytes.len(),
        });
    }
    let mut out = Vec::with_capacity(bytes.len() * 2);
    for &b in bytes {
        out.push(b >> 4);
        out.push(b & 0x0F);
    }
    out.truncate(out_length);
    Ok(out)
}

/// Packed per-symbol entry: super-letter in bits 16..20, width in 8..12, suffix in 0..8.
fn packed_codes(grouping: &GroupingTable) -> [u32; ALPHABET_SIZE] {
    let mut packed = [0u32; ALPHABET_SIZE];
    for (sym, slot) in packed.iter_mut().enumerate() {
        if let Some(c) = grouping.symbol_code(sym as u8) {
            *slot =
                (c.super_letter as u32) << 16 | (c.suffix_bits as u32) << 8 | c.suffix_index as u32;
        }
    }
    packed
}

fn code_table(grouping: &GroupingTable) -> [Option<SymbolCode>; ALPHABET_SIZE] {
    std::array::from_fn(|s| grouping.symbol_code(s as u8))
}

/// Branchless MSB-first writer for the encoder's inner loop. Each call
/// stores eight bytes at the cursor, so the buffer carries eight bytes of slack.
struct SuffixWriter {
    buf: Vec<u8>,
    pos: usize,
    acc: u64,
    pending: u32,
}

impl SuffixWriter {
    fn new(max_bits: usize) -> Self {
        Self {
            buf: vec![0; max_bits.div_ceil(8) + 8],
            pos: 0,
            acc: 0,
            pending: 0,
        }
    }

    /// Appends `n <= 24` bits.
    #[inline(always)]
    fn put(&mut self, value: u32, n: u32) {
        self.acc = (self.acc << n) | value as u64;
        self.pending += n;
        // Split shift so that pending = 0 stores zeros.
        let word = (self.acc << (63 - self.pending)) << 1;
        self.buf[self.pos..self.pos + 8].copy_from_slice(&word.to_be_bytes());
        self.pos += (self.pending >> 3) as usize;
        self.pending &= 7;
    }

    fn bit_len(&self) -> u64 {
        self.pos as u64 * 8 + self.pending as u64
    }

    fn finish(mut self) -> (Vec<u8>, u64) {
        let bits = self.bit_len();
        self.buf.truncate(bits.div_ceil(8) as usize);
        (self.buf, bits)
    }
}

struct LevelOutput {
    suffixes: SuffixWriter,
    paired: Vec<u8>,
    next_table: FrequencyTable,
}

/// Streams with fewer pairs than this skip the 2^16-entry pair table.
const PAIR_TABLE_MIN_PAIRS: usize = 1 << 14;

/// Joint code of a symbol pair: suffix bits in 0..16, their total width in
/// 16..21 and the paired super-letter byte in 24..32.
#[inline(always)]
fn joint_code(a: u32, b: u32) -> u32 {
    let width_b = (b >> 8) & 0xF;
    let suffix = ((a & 0xFF) << width_b) | (b & 0xFF);
    let width = ((a >> 8) & 0xF) + width_b;
    let byte = ((a >> 16) << 4) | (b >> 16);
    suffix | width << 16 | byte << 24
}

fn pair_table(codes: &[u32; ALPHABET_SIZE], grouping: &GroupingTable) -> Vec<u32> {
    let present: Vec<u8> = grouping
        .super_letters()
        .iter()
        .flat_map(|s| s.members.iter().copied())
        .collect();
    let mut table = vec![0u32; 1 << 16];
    for &x in &present {
        let row = &mut table[(x as usize) << 8..][..ALPHABET_SIZE];
        for &y in &present {
            row[y as usize] = joint_code(codes[x as usize], codes[y as usize]);
        }
    }
    table
}

/// Writes every whole pair of `stream`, returning the paired-byte counts in two lanes.
#[inline(always)]
fn encode_pairs(
    stream: &[u8],
    suffixes: &mut SuffixWriter,
    paired: &mut [u8],
    joint: impl Fn(u8, u8) -> u32,
) -> [[u64; ALPHABET_SIZE]; 2] {
    // Two lanes so runs of one paired value do not serialize on a single counter.
    let mut lanes = [[0u64; ALPHABET_SIZE]; 2];
    for (i, (p, out)) in stream.chunks_exact(2).zip(paired.iter_mut()).enumerate() {
        let e = joint(p[0], p[1]);
        suffixes.put(e & 0xFFFF, (e >> 16) & 0x1F);
        let byte = (e >> 24) as u8;
        *out = byte;
        lanes[i & 1][byte as usize] += 1;
    }
    lanes
}

/// One level of the encoder: suffixes into a bitstream, super-letters
/// paired straight into the next level's byte stream, whose frequencies
/// are counted on the way. Every symbol of `stream` must be mapped by
/// `grouping`.
fn encode_level(stream: &[u8], grouping: &GroupingTable) -> LevelOutput {
    let codes = packed_codes(grouping);
    let mut suffixes = SuffixWriter::new(stream.len() * MAX_SUFFIX_BITS as usize);
    let mut paired = vec![0u8; stream.len().div_ceil(2)];
    let mut lanes = if stream.len() / 2 >= PAIR_TABLE_MIN_PAIRS {
        let table = pair_table(&codes, grouping);
        encode_pairs(stream, &mut suffixes, &mut paired, |x, y| {
            table[(x as usize) << 8 | y as usize]
        })
    } else {
        encode_pairs(stream, &mut suffixes, &mut paired, |x, y| {
            joint_code(codes[x as usize], codes[y as usize])
        })
    };
    if let [.., last] = stream {
        if stream.len() % 2 == 1 {
            let a = codes[*last as usize];
            suffixes.put(a & 0xFF, (a >> 8) & 0xF);
            let byte = (a >> 12) as u8 & 0xF0;
            *paired.last_mut().expect("odd stream has a tail pair") = byte;
            lanes[0][byte as usize] += 1;
        }
    }
    let counts = std::array::from_fn(|s| lanes[0][s] + lanes[1][s]);
    LevelOutput {
        suffixes,
        paired,
        next_table: FrequencyTable::from_counts(counts),
    }
}

pub fn encode(input: &[u8], config: &EncoderConfig) -> Result<EncodedContainer> {
    encode_impl(input, config, None)
}

/// Encodes and also returns per-level diagnostics.
pub fn encode_with_stats(
    input: &[u8],
    config: &EncoderConfig,
) -> Result<(EncodedContainer, Vec<LevelStats>)> {
    let mut stats = Vec::new();
    let container = encode_impl(input, config, Some(&mut stats))?;
    Ok((container, stats))
}

fn encode_impl(
    input: &[u8],
    config: &EncoderConfig,
    mut stats: Option<&mut Vec<LevelStats>>,
) -> Result<EncodedContainer> {
    config.validate()?;
    let mut levels = Vec::new();
    let mut current: Vec<u8> = Vec::new();
    let mut stream: &[u8] = input;
    let mut table = None;

    while stream.len() > config.raw_threshold && levels.len() < config.max_levels {
        let table_here = table.take().unwrap_or_else(|| count_frequencies(stream));
        let grouping = form_super_letters(
            &table_here,
            config.t_delta,
            config.t_delta_step,
            config.max_retries,
        )?;
        debug_assert!(grouping.n_super_letters() <= MAX_SUPER_LETTERS);
        let LevelOutput {
            suffixes,
            paired,
            next_table,
        } = encode_level(stream, &grouping);
        if let Some(stats) = stats.as_deref_mut() {
            stats.push(level_stats(
                stream.len(),
                &table_here,
                &grouping,
                suffixes.bit_len(),
            )?);
        }
        let (suffix_bytes, suffix_bit_len) = suffixes.finish();
        levels.push(Level {
            header: LevelHeader::from_grouping(&grouping, stream.len() as u64),
            suffix_bit_len,
            suffix_bytes,
        });
        table = Some(next_table);
        current = paired;
        stream = &current;
    }

    let terminal_raw = if levels.is_empty() {
        input.to_vec()
    } else {
        current
    };
    Ok(EncodedContainer {
        original_length: input.len() as u64,
        levels,
        terminal_raw,
    })
}

fn level_stats(
    stream_length: usize,
    table: &FrequencyTable,
    grouping: &GroupingTable,
    suffix_bits: u64,
) -> Result<LevelStats> {
    Ok(LevelStats {
        stream_length,
        distinct_symbols: table.distinct_symbols(),
        entropy_bits: entropy_bits_per_symbol(table)?,
        grouped_code_length: grouped_code_length(table, grouping)?,
        t_delta_used: grouping.t_delta_used(),
        super_letter_sizes: grouping.super_letters().iter().map(|s| s.size()).collect(),
        suffix_bits,
    })
}

/// Suffix reader for the decoder's inner loop. Reads past the end yield
/// zero bits; the caller compares the consumed count with the recorded one.
struct SuffixReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    avail: u32,
}

impl<'a> SuffixReader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self {
            data,
            pos: 0,
            acc: 0,
            avail: 0,
        }
    }

    #[inline(always)]
    fn refill(&mut self) {
        let word = match self.data.get(self.pos..self.pos + 4) {
            Some(w) => u32::from_be_bytes([w[0], w[1], w[2], w[3]]),
            None => {
                let mut w = [0u8; 4];
                for (i, b) in w.iter_mut().enumerate() {
                    *b = self.data.get(self.pos + i).copied().unwrap_or(0);
                }
                u32::from_be_bytes(w)
            }
        };
        self.acc |= (word as u64) << (32 - self.avail);
        self.avail += 32;
        self.pos += 4;
    }

    /// Next `n <= 16` bits.
    #[inline(always)]
    fn take(&mut self, n: u32) -> u32 {
        if self.avail < 16 {
            self.refill();
        }
        // Split shift so that n = 0 yields 0.
        let v = ((self.acc >> (63 - n)) >> 1) as u32;
        self.acc <<= n;
        self.avail -= n;
        v
    }

    fn consumed(&self) -> u64 {
        self.pos as u64 * 8 - self.avail as u64
    }
}

const INVALID_PAIR: u32 = u32::MAX;

/// Rebuilds level `header`'s symbol stream from the paired stream of the
/// level below and the suffix bitstream.
fn decode_level(level: &Level, paired: &[u8]) -> Result<Vec<u8>> {
    let header = &level.header;
    let out_length = usize::try_from(header.stream_length)
        .map_err(|_| Error::malformed("stream length exceeds address space"))?;
    if out_length.div_ceil(2) != paired.len() {
        return Err(Error::PairLengthMismatch {
            out_length,
            bytes: paired.len(),
        });
    }
    if level.suffix_bytes.len() as u64 != level.suffix_bit_len.div_ceil(8) {
        return Err(Error::malformed(
            "suffix byte count disagrees with bit count",
        ));
    }
    // Validates member counts and disjointness.
    header.grouping()?;

    // Flat member table: super-letter s occupies members[base[s]..base[s] + 2^width[s]].
    let n = header.descriptors.len();
    let mut members = [0u8; ALPHABET_SIZE];
    let mut base = [0u32; 16];
    let mut width = [0u32; 16];
    let mut offset = 0;
    for (s, d) in header.descriptors.iter().enumerate() {
        base[s] = offset as u32;
        width[s] = d.suffix_bits as u32;
        members[offset..offset + d.members.len()].copy_from_slice(&d.members);
        offset += d.members.len();
    }

    // Per paired byte: base_hi | base_lo << 8 | width_lo << 16 | (width_hi + width_lo) << 20.
    let mut pair_table = [INVALID_PAIR; ALPHABET_SIZE];
    for (b, entry) in pair_table.iter_mut().enumerate() {
        let (hi, lo) = (b >> 4, b & 0xF);
        if hi < n && lo < n {
            *entry = base[hi] | base[lo] << 8 | width[lo] << 16 | (width[hi] + width[lo]) << 20;
        }
    }

    let mut bits = SuffixReader::new(&level.suffix_bytes);
    let mut out = vec![0u8; out_length];
    let (body, tail) = paired.split_at(out_length / 2);
    for (o, &b) in out.chunks_exact_mut(2).zip(body) {
        let e = pair_table[b as usize];
        if e == INVALID_PAIR {
            return Err(Error::malformed(format!(
                "super-letter pair {b:#04x} out of range"
            )));
        }
        let width_lo = (e >> 16) & 0xF;
        let v = bits.take(e >> 20);
        o[0] = members[((e & 0xFF) + (v >> width_lo)) as usize & 0xFF];
        o[1] = members[(((e >> 8) & 0xFF) + (v & ((1 << width_lo) - 1))) as usize & 0xFF];
    }
    if let [last] = tail {
        let hi = (last >> 4) as usize;
        if hi >= n {
            return Err(Error::malformed(format!(
                "super-letter index {hi} out of range"
            )));
        }
        let v = bits.take(width[hi]);
        out[out_length - 1] = members[(base[hi] + v) as usize & 0xFF];
    }
    let consumed = bits.consumed();
    if consumed != level.suffix_bit_len {
        return Err(Error::malformed(format!(
            "suffix stream holds {} bits but decoding used {consumed}",
            level.suffix_bit_len
        )));
    }
    Ok(out)
}

pub fn decode(container: &EncodedContainer) -> Result<Vec<u8>> {
    container.validate_lengths()?;
    let mut stream = container.terminal_raw.clone();
    for level in container.levels.iter().rev() {
        stream = decode_level(level, &stream)?;
    }
    if stream.len() as u64 != container.original_length {
        return Err(Error::malformed("decoded length mismatch"));
    }
    Ok(stream)
}

/// `8 × container bytes / original length`.
pub fn encoded_bits_per_symbol(container: &EncodedContainer) -> Result<f64> {
    if container.original_length == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(8.0 * container.serialized_len() as f64 / container.original_length as f64)
}

/// Encodes straight to container bytes.
pub fn compress(input: &[u8], config: &EncoderConfig) -> Result<Vec<u8>> {
    Ok(encode(input, config)?.to_bytes())
}

/// Parses container bytes and decodes them.
pub fn decompress(data: &[u8]) -> Result<Vec<u8>> {
    decode(&EncodedContainer::from_bytes(data)?)
}
