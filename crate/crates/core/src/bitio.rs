//! MSB-first bit streams and LEB128-style unsigned varints.
//!
//! Bits are packed from the most significant end of each byte. Alignment
//! pads with zero bits; readers rely on recorded element or bit counts,
//! never on the padding content.

use crate::error::{Error, Result};

/// Append-only MSB-first bit writer.
#[derive(Debug, Default, Clone)]
pub struct BitSink {
    buf: Vec<u8>,
    // Pending bits, right-aligned. Only the low `pending` bits are meaningful.
    acc: u64,
    pending: u32,
}

impl BitSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bytes: usize) -> Self {
        Self {
            buf: Vec::with_capacity(bytes),
            ..Self::default()
        }
    }

    /// Appends the `n_bits` low bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u32, n_bits: u32) -> Result<()> {
        if n_bits > 32 {
            return Err(Error::WidthTooLarge(n_bits));
        }
        if n_bits < 32 && value >> n_bits != 0 {
            return Err(Error::ValueOutOfRange {
                value: value as u64,
                n_bits,
            });
        }
        self.push(value, n_bits);
        Ok(())
    }

    /// Unchecked variant of [`write_bits`](Self::write_bits) for callers
    /// that already guarantee `value < 2^n_bits` and `n_bits <= 32`.
    #[inline(always)]
    pub(crate) fn push(&mut self, value: u32, n_bits: u32) {
        debug_assert!(n_bits <= 32);
        debug_assert!(n_bits == 32 || value >> n_bits == 0);
        self.acc = (self.acc << n_bits) | value as u64;
        self.pending += n_bits;
        if self.pending >= 32 {
            self.pending -= 32;
            let word = (self.acc >> self.pending) as u32;
            self.buf.extend_from_slice(&word.to_be_bytes());
        }
    }

    /// Writes zero bits up to the next byte boundary.
    pub fn align_to_byte(&mut self) {
        let rem = (self.bit_len() % 8) as u32;
        if rem != 0 {
            self.push(0, 8 - rem);
        }
        self.flush_whole_bytes();
    }

    fn flush_whole_bytes(&mut self) {
        while self.pending >= 8 {
            self.pending -= 8;
            self.buf.push((self.acc >> self.pending) as u8);
        }
    }

    /// Number of bits written so far, excluding alignment padding not yet requested.
    pub fn bit_len(&self) -> u64 {
        self.buf.len() as u64 * 8 + self.pending as u64
    }

    /// Aligns and returns the packed bytes.
    pub fn into_bytes(mut self) -> Vec<u8> {
        self.align_to_byte();
        self.buf
    }

    /// Aligns and returns `(bytes, bit_len)` where `bit_len` excludes the padding.
    pub fn finish(self) -> (Vec<u8>, u64) {
        let bits = self.bit_len();
        (self.into_bytes(), bits)
    }
}

/// MSB-first bit reader over a byte slice, optionally limited to a bit count.
#[derive(Debug, Clone)]
pub struct BitSource<'a> {
    data: &'a [u8],
    next_byte: usize,
    // Left-aligned: the next bit to deliver is bit 63.
    acc: u64,
    avail: u32,
    remaining: u64,
}

impl<'a> BitSource<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self::with_bit_len(data, data.len() as u64 * 8)
    }

    /// Reader that refuses to deliver more than `bit_len` bits.
    /// `bit_len` is clamped to the bits actually present in `data`.
    pub fn with_bit_len(data: &'a [u8], bit_len: u64) -> Self {
        Self {
            data,
            next_byte: 0,
            acc: 0,
            avail: 0,
            remaining: bit_len.min(data.len() as u64 * 8),
        }
    }

    #[inline(always)]
    fn refill(&mut self) {
        if self.next_byte + 4 <= self.data.len() && self.avail <= 32 {
            let mut word = [0u8; 4];
            word.copy_from_slice(&self.data[self.next_byte..self.next_byte + 4]);
            self.acc |= (u32::from_be_bytes(word) as u64) << (32 - self.avail);
            self.avail += 32;
            self.next_byte += 4;
        }
        while self.avail <= 56 && self.next_byte < self.data.len() {
            self.acc |= (self.data[self.next_byte] as u64) << (56 - self.avail);
            self.avail += 8;
            self.next_byte += 1;
        }
    }

    /// Reads `n_bits` (at most 32) bits as an unsigned value.
    #[inline(always)]
    pub fn read_bits(&mut self, n_bits: u32) -> Result<u32> {
        if n_bits > 32 {
            return Err(Error::WidthTooLarge(n_bits));
        }
        if n_bits as u64 > self.remaining {
            return Err(Error::UnexpectedEof);
        }
        if n_bits == 0 {
            return Ok(0);
        }
        if n_bits > self.avail {
            self.refill();
        }
        let value = (self.acc >> (64 - n_bits)) as u32;
        self.acc <<= n_bits;
        self.avail -= n_bits;
        self.remaining -= n_bits as u64;
        Ok(value)
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        Ok(self.read_bits(1)? == 1)
    }

    /// Bits still readable under the configured limit.
    pub fn remaining_bits(&self) -> u64 {
        self.remaining
    }
}

/// Appends `value` as an unsigned varint: 7 bits per byte, least significant
/// group first, high bit set on every byte except the last.
pub fn write_uvarint(out: &mut Vec<u8>, mut value: u64) {
    while value >= 0x80 {
        out.push((value as u8) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

/// Encoded size of `value` in bytes.
pub fn uvarint_len(value: u64) -> usize {
    let bits = 64 - value.leading_zeros() as usize;
    bits.max(1).div_ceil(7)
}

/// Forward-only cursor over a byte slice used by the container parsers.
#[derive(Debug, Clone)]
pub struct ByteCursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteCursor<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    pub fn is_empty(&self) -> bool {
        self.remaining() == 0
    }

    pub fn read_u8(&mut self) -> Result<u8> {
        let b = *self.data.get(self.pos).ok_or(Error::UnexpectedEof)?;
        self.pos += 1;
        Ok(b)
    }

    pub fn read_slice(&mut self, len: usize) -> Result<&'a [u8]> {
        if len > self.remaining() {
            return Err(Error::UnexpectedEof);
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    pub fn read_uvarint(&mut self) -> Result<u64> {
        let mut value = 0u64;
        for i in 0..10 {
            let b = self.read_u8()?;
            let group = (b & 0x7F) as u64;
            // The tenth byte may only contribute the single top bit.
            if i == 9 && (b & 0x80 != 0 || group > 1) {
                return Err(Error::VarintOverflow);
            }
            value |= group << (7 * i);
            if b & 0x80 == 0 {
                return Ok(value);
            }
        }
        Err(Error::VarintOverflow)
    }

    /// Remaining unread bytes.
    pub fn rest(&self) -> &'a [u8] {
        &self.data[self.pos..]
    }
}

/// Decodes one varint from the front of `data`, returning it with its byte length.
pub fn read_uvarint(data: &[u8]) -> Result<(u64, usize)> {
    let mut cur = ByteCursor::new(data);
    let v = cur.read_uvarint()?;
    Ok((v, cur.position()))
}
