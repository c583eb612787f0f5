//! Static 32-bit range coder with carry propagation.
//!
//! Frequencies are scaled so their sum is at most 2^14, keeping every
//! present symbol at a count of at least one. The coder itself is the usual
//! low/range arrangement with a cached output byte so that carries can
//! ripple into bytes already produced.

use crate::bitio::{write_uvarint, ByteCursor};
use crate::error::{Error, Result};
use crate::model::{count_frequencies, FrequencyTable, ALPHABET_SIZE};

use super::{read_symbol_table, write_symbol_table};

pub const SCALE_BITS: u32 = 14;
pub const MAX_TOTAL: u32 = 1 << SCALE_BITS;

const TOP: u32 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulativeModel {
    freq: [u32; ALPHABET_SIZE],
    cum: [u32; ALPHABET_SIZE + 1],
}

impl CumulativeModel {
    /// Scales `table` to a total of at most [`MAX_TOTAL`].
    pub fn from_table(table: &FrequencyTable) -> Result<Self> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let total = table.total() as u128;
        let mut scaled = [0u32; ALPHABET_SIZE];
        if total <= MAX_TOTAL as u128 {
            for (s, &c) in table.counts().iter().enumerate() {
                scaled[s] = c as u32;
            }
        } else {
            for (s, &c) in table.counts().iter().enumerate() {
                if c > 0 {
                    let r = (c as u128 * MAX_TOTAL as u128 + total / 2) / total;
                    scaled[s] = r.max(1) as u32;
                }
            }
            let mut sum: u32 = scaled.iter().sum();
            while sum > MAX_TOTAL {
                // Shave the largest entry; it loses the least relative precision.
                let (s, _) = scaled
                    .iter()
                    .enumerate()
                    .max_by_key(|&(s, &f)| (f, std::cmp::Reverse(s)))
                    .expect("alphabet is non-empty");
                debug_assert!(scaled[s] > 1);
                scaled[s] -= 1;
                sum -= 1;
            }
        }
        Self::from_scaled(scaled)
    }

    /// Uses already-scaled counts verbatim.
    pub fn from_scaled(freq: [u32; ALPHABET_SIZE]) -> Result<Self> {
        let total: u64 = freq.iter().map(|&f| f as u64).sum();
        if total == 0 {
            return Err(Error::EmptyTable);
        }
        if total > MAX_TOTAL as u64 {
            return Err(Error::Corrupt("scaled model total exceeds 2^14"));
        }
        let mut cum = [0u32; ALPHABET_SIZE + 1];
        for s in 0..ALPHABET_SIZE {
            cum[s + 1] = cum[s] + freq[s];
        }
        Ok(Self { freq, cum })
    }

    pub fn total(&self) -> u32 {
        self.cum[ALPHABET_SIZE]
    }

    pub fn freq(&self, symbol: u8) -> u32 {
        self.freq[symbol as usize]
    }

    pub fn cumulative(&self) -> &[u32; ALPHABET_SIZE + 1] {
        &self.cum
    }

    pub fn scaled_counts(&self) -> [u64; ALPHABET_SIZE] {
        std::array::from_fn(|s| self.freq[s] as u64)
    }

    /// Ideal code length of `table`'s source under this model, in bits per symbol.
    pub fn cross_entropy(&self, table: &FrequencyTable) -> Option<f64> {
        let total = self.total() as f64;
        let n = table.total() as f64;
        let mut bits = 0.0;
        for (s, c) in table.iter_present() {
            let f = self.freq(s);
            if f == 0 {
                return None;
            }
            bits -= c as f64 / n * (f as f64 / total).log2();
        }
        Some(bits)
    }
}

struct Encoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl Encoder {
    fn new(capacity: usize) -> Self {
        Self {
            low: 0,
            range: u32::MAX,
            cache: 0,
            cache_size: 1,
            out: Vec::with_capacity(capacity),
        }
    }

    #[inline(always)]
    fn encode(&mut self, cum: u32, freq: u32, total: u32) {
        let r = self.range / total;
        self.low += r as u64 * cum as u64;
        self.range = r * freq;
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    #[inline(always)]
    fn shift_low(&mut self) {
        if (self.low as u32) < 0xFF00_0000 || self.low >> 32 != 0 {
            let carry = (self.low >> 32) as u8;
            let mut byte = self.cache;
            loop {
                self.out.push(byte.wrapping_add(carry));
                byte = 0xFF;
                self.cache_size -= 1;
                if self.cache_size == 0 {
                    break;
                }
            }
            self.cache = (self.low >> 24) as u8;
        }
        self.cache_size += 1;
        self.low = (self.low & 0x00FF_FFFF) << 8;
    }

    fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

struct Decoder<'a> {
    data: &'a [u8],
    pos: usize,
    code: u32,
    range: u32,
}

impl<'a> Decoder<'a> {
    fn new(data: &'a [u8]) -> Result<Self> {
        let mut d = Self {
            data,
            pos: 0,
            code: 0,
            range: u32::MAX,
        };
        for _ in 0..5 {
            d.code = (d.code << 8) | d.next_byte()? as u32;
        }
        Ok(d)
    }

    #[inline(always)]
    fn next_byte(&mut self) -> Result<u8> {
        let b = *self
            .data
            .get(self.pos)
            .ok_or(Error::Corrupt("range coder payload exhausted"))?;
        self.pos += 1;
        Ok(b)
    }

    #[inline(always)]
    fn decode(&mut self, model: &CumulativeModel, lookup: &[u8]) -> Result<u8> {
        let total = model.total();
        let r = self.range / total;
        let v = self.code / r;
        if v >= total {
            return Err(Error::Corrupt("range coder value outside model"));
        }
        let sym = lookup[v as usize];
        self.code -= r * model.cum[sym as usize];
        self.range = r * model.freq[sym as usize];
        while self.range < TOP {
            self.code = (self.code << 8) | self.next_byte()? as u32;
            self.range <<= 8;
        }
        Ok(sym)
    }
}

/// Range-codes `input` under the static model scaled from `table`.
/// Returns the bare payload; the model must travel separately.
pub fn ac_encode(input: &[u8], table: &FrequencyTable) -> Result<Vec<u8>> {
    let model = CumulativeModel::from_table(table)?;
    encode_with_model(input, &model)
}

pub fn encode_with_model(input: &[u8], model: &CumulativeModel) -> Result<Vec<u8>> {
    let total = model.total();
    let mut enc = Encoder::new(input.len() / 2 + 16);
    for &b in input {
        let f = model.freq[b as usize];
        if f == 0 {
            return Err(Error::UnmappedSymbol(b));
        }
        enc.encode(model.cum[b as usize], f, total);
    }
    Ok(enc.finish())
}

/// Decodes `len` symbols from a payload made by [`ac_encode`] with the same table.
pub fn ac_decode(payload: &[u8], table: &FrequencyTable, len: usize) -> Result<Vec<u8>> {
    let model = CumulativeModel::from_table(table)?;
    decode_with_model(payload, &model, len)
}

pub fn decode_with_model(payload: &[u8], model: &CumulativeModel, len: usize) -> Result<Vec<u8>> {
    let mut lookup = vec![0u8; model.total() as usize];
    for s in 0..ALPHABET_SIZE {
        lookup[model.cum[s] as usize..model.cum[s + 1] as usize].fill(s as u8);
    }
    // A claimed length is untrusted; cap the up-front reservation.
    let mut out = Vec::with_capacity(len.min(1 << 24));
    if len == 0 {
        return Ok(out);
    }
    let mut dec = Decoder::new(payload)?;
    for _ in 0..len {
        out.push(dec.decode(model, &lookup)?);
    }
    Ok(out)
}

/// Self-contained stream: length, scaled model and payload.
pub fn ac_compress(input: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_uvarint(&mut out, input.len() as u64);
    if input.is_empty() {
        return Ok(out);
    }
    let model = CumulativeModel::from_table(&count_frequencies(input))?;
    write_symbol_table(&mut out, &model.scaled_counts());
    out.extend_from_slice(&encode_with_model(input, &model)?);
    Ok(out)
}

pub fn ac_decompress(data: &[u8]) -> Result<Vec<u8>> {
    let mut cur = ByteCursor::new(data);
    let len =
        usize::try_from(cur.read_uvarint()?).map_err(|_| Error::Corrupt("length overflow"))?;
    if len == 0 {
        return Ok(Vec::new());
    }
    let counts = read_symbol_table(&mut cur)?;
    let mut freq = [0u32; ALPHABET_SIZE];
    for (f, &c) in freq.iter_mut().zip(&counts) {
        *f = u32::try_from(c).map_err(|_| Error::Corrupt("model count overflow"))?;
    }
    let model = CumulativeModel::from_scaled(freq)?;
    decode_with_model(cur.rest(), &model, len)
}
