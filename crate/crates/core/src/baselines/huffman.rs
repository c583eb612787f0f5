//! Canonical Huffman coding over the byte alphabet.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bitio::{write_uvarint, BitSink, BitSource, ByteCursor};
use crate::error::{Error, Result};
use crate::model::{count_frequencies, FrequencyTable, ALPHABET_SIZE};

use super::{read_symbol_table, write_symbol_table};

pub const MAX_CODE_LEN: u8 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanCode {
    lengths: [u8; ALPHABET_SIZE],
    codes: [u64; ALPHABET_SIZE],
}

impl HuffmanCode {
    /// Assigns canonical codes: shorter codes first, ties by symbol value.
    /// A lone symbol may use length 1; otherwise the lengths must satisfy Kraft.
    pub fn from_lengths(lengths: [u8; ALPHABET_SIZE]) -> Result<Self> {
        let coded = lengths.iter().filter(|&&l| l > 0).count();
        if coded == 0 {
            return Err(Error::EmptyTable);
        }
        if lengths.iter().any(|&l| l > MAX_CODE_LEN) {
            return Err(Error::Corrupt("code length exceeds 64"));
        }
        // Kraft sum scaled by 2^64, in u128 to dodge overflow.
        let kraft: u128 = lengths
            .iter()
            .filter(|&&l| l > 0)
            .map(|&l| 1u128 << (64 - l as u32))
            .sum();
        if kraft > 1u128 << 64 {
            return Err(Error::Corrupt("code lengths violate the Kraft inequality"));
        }

        let mut order: Vec<u8> = (0..=255u8).filter(|&s| lengths[s as usize] > 0).collect();
        order.sort_by_key(|&s| (lengths[s as usize], s));
        let mut codes = [0u64; ALPHABET_SIZE];
        let mut code = 0u64;
        let mut prev_len = lengths[order[0] as usize];
        for &s in &order {
            let len = lengths[s as usize];
            code <<= len - prev_len;
            codes[s as usize] = code;
            code = code.wrapping_add(1);
            prev_len = len;
        }
        Ok(Self { lengths, codes })
    }

    pub fn lengths(&self) -> &[u8; ALPHABET_SIZE] {
        &self.lengths
    }

    pub fn length(&self, symbol: u8) -> u8 {
        self.lengths[symbol as usize]
    }

    pub fn code(&self, symbol: u8) -> u64 {
        self.codes[symbol as usize]
    }

    /// Average code length in bits per symbol for a source with `table`'s statistics.
    pub fn expected_length(&self, table: &FrequencyTable) -> Result<f64> {
        if table.is_empty() {
            return Err(Error::EmptyTable);
        }
        let mut bits = 0u128;
        for (s, c) in table.iter_present() {
            let len = self.length(s);
            if len == 0 {
                return Err(Error::UnmappedSymbol(s));
            }
            bits += c as u128 * len as u128;
        }
        Ok(bits as f64 / table.total() as f64)
    }
}

/// Minimum-redundancy code lengths via the classic two-smallest merge.
pub fn huffman_build(table: &FrequencyTable) -> Result<HuffmanCode> {
    let present: Vec<(u8, u64)> = table.iter_present().collect();
    let mut lengths = [0u8; ALPHABET_SIZE];
    match present.len() {
        0 => return Err(Error::EmptyTable),
        1 => {
            lengths[present[0].0 as usize] = 1;
            return HuffmanCode::from_lengths(lengths);
        }
        _ => {}
    }

    // Nodes 0..n are leaves; merged nodes follow. Ties pop the older node first.
    let n = present.len();
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = present
        .iter()
        .enumerate()
        .map(|(i, &(_, c))| Reverse((c, i)))
        .collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((w1, a)) = heap.pop().expect("heap has two nodes");
        let Reverse((w2, b)) = heap.pop().expect("heap has two nodes");
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((w1 + w2, next)));
        next += 1;
    }
    let root = next - 1;
    let mut depth = vec![0u32; 2 * n - 1];
    for node in (0..root).rev() {
        depth[node] = depth[parent[node]] + 1;
    }
    for (i, &(s, _)) in present.iter().enumerate() {
        let d = depth[i];
        if d > MAX_CODE_LEN as u32 {
            return Err(Error::Corrupt("Huffman tree deeper than 64"));
        }
        lengths[s as usize] = d as u8;
    }
    HuffmanCode::from_lengths(lengths)
}

fn put_code(sink: &mut BitSink, code: u64, len: u8) {
    let len = len as u32;
    if len > 32 {
        sink.push((code >> 32) as u32, len - 32);
        sink.push(code as u32, 32);
    } else {
        sink.push(code as u32, len);
    }
}

pub fn huffman_encode(input: &[u8], code: &HuffmanCode) -> Result<Vec<u8>> {
    let mut sink = BitSink::with_capacity(input.len());
    for &b in input {
        let len = code.length(b);
        if len == 0 {
            return Err(Error::UnmappedSymbol(b));
        }
        put_code(&mut sink, code.code(b), len);
    }
    Ok(sink.into_bytes())
}

/// Canonical decoding tables: for each length, the first code and where
/// its symbols start in the sorted symbol list.
struct DecodeTables {
    first: [u64; MAX_CODE_LEN as usize + 1],
    count: [u64; MAX_CODE_LEN as usize + 1],
    offset: [usize; MAX_CODE_LEN as usize + 1],
    symbols: Vec<u8>,
    max_len: u8,
}

impl DecodeTables {
    fn new(code: &HuffmanCode) -> Self {
        let mut symbols: Vec<u8> = (0..=255u8).filter(|&s| code.length(s) > 0).collect();
        symbols.sort_by_key(|&s| (code.length(s), s));
        let mut t = Self {
            first: [0; MAX_CODE_LEN as usize + 1],
            count: [0; MAX_CODE_LEN as usize + 1],
            offset: [0; MAX_CODE_LEN as usize + 1],
            max_len: symbols.last().map_or(0, |&s| code.length(s)),
            symbols,
        };
        for &s in &t.symbols {
            t.count[code.length(s) as usize] += 1;
        }
        let mut c = 0u64;
        let mut off = 0usize;
        for len in 1..=MAX_CODE_LEN as usize {
            t.first[len] = c;
            t.offset[len] = off;
            off += t.count[len] as usize;
            c = (c.wrapping_add(t.count[len])) << 1;
        }
        t
    }
}

pub fn huffman_decode(payload: &[u8], code: &HuffmanCode, len: usize) -> Result<Vec<u8>> {
    // Every code word is at least one bit long.
    if len as u64 > payload.len() as u64 * 8 {
        return Err(Error::Corrupt("Huffman payload too short for length"));
    }
    let tables = DecodeTables::new(code);
    let mut src = BitSource::new(payload);
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let mut value = 0u64;
        let mut l = 0usize;
        loop {
            let bit = src
                .read_bit()
                .map_err(|_| Error::Corrupt("Huffman payload exhausted"))?;
            value = (value << 1) | bit as u64;
            l += 1;
            if l > tables.max_len as usize {
                return Err(Error::Corrupt("invalid Huffman code"));
            }
            let rel = value.wrapping_sub(tables.first[l]);
            if rel < tables.count[l] {
                out.push(tables.symbols[tables.offset[l] + rel as usize]);
                break;
            }
        }
    }
    Ok(out)
}

/// Self-contained stream: length, symbol counts and payload. The decoder
/// rebuilds the same code from the counts.
pub fn huffman_compress(input: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_uvarint(&mut out, input.len() as u64);
    if input.is_empty() {
        return Ok(out);
    }
    let table = count_frequencies(input);
    let code = huffman_build(&table)?;
    write_symbol_table(&mut out, table.counts());
    out.extend_from_slice(&huffman_encode(input, &code)?);
    Ok(out)
}

pub fn huffman_decompress(data: &[u8]) -> Result<Vec<u8>> {
    let mut cur = ByteCursor::new(data);
    let len =
        usize::try_from(cur.read_uvarint()?).map_err(|_| Error::Corrupt("length overflow"))?;
    if len == 0 {
        return Ok(Vec::new());
    }
    let counts = read_symbol_table(&mut cur)?;
    let total = counts.iter().try_fold(0u64, |acc, &c| acc.checked_add(c));
    if total != Some(len as u64) {
        return Err(Error::Corrupt("symbol counts disagree with length"));
    }
    let code = huffman_build(&FrequencyTable::from_counts(counts))?;
    huffman_decode(cur.rest(), &code, len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256StarStar;

    fn table(pairs: &[(u8, u64)]) -> FrequencyTable {
        let mut counts = [0u64; ALPHABET_SIZE];
        for &(s, c) in pairs {
            counts[s as usize] = c;
        }
        FrequencyTable::from_counts(counts)
    }

    #[test]
    fn two_equal_symbols() {
        let h = huffman_build(&table(&[(1, 1), (2, 1)])).unwrap();
        assert_eq!((h.length(1), h.length(2)), (1, 1));
        assert_eq!((h.code(1), h.code(2)), (0, 1));
    }

    #[test]
    fn textbook_three_symbols() {
        let h = huffman_build(&table(&[(0, 1), (1, 1), (2, 2)])).unwrap();
        assert_eq!([h.length(0), h.length(1), h.length(2)], [2, 2, 1]);
        // Canonical: the 1-bit code comes first.
        assert_eq!(h.code(2), 0b0);
        assert_eq!(h.code(0), 0b10);
        assert_eq!(h.code(1), 0b11);
    }

    #[test]
    fn single_symbol_uses_one_bit() {
        let data = vec![7u8; 40];
        let h = huffman_build(&count_frequencies(&data)).unwrap();
        assert_eq!(h.length(7), 1);
        let payload = huffman_encode(&data, &h).unwrap();
        assert_eq!(payload.len(), 5);
        assert_eq!(huffman_decode(&payload, &h, data.len()).unwrap(), data);
    }

    #[test]
    fn kraft_violation_rejected() {
        let mut lengths = [0u8; ALPHABET_SIZE];
        lengths[..3].fill(1);
        assert!(HuffmanCode::from_lengths(lengths).is_err());
        assert!(HuffmanCode::from_lengths([0; ALPHABET_SIZE]).is_err());
    }

    #[test]
    fn deep_fibonacci_tree() {
        let mut fib = vec![1u64, 1];
        while fib.len() < 40 {
            let n = fib[fib.len() - 1] + fib[fib.len() - 2];
            fib.push(n);
        }
        let pairs: Vec<(u8, u64)> = fib.iter().enumerate().map(|(i, &c)| (i as u8, c)).collect();
        let t = table(&pairs);
        let h = huffman_build(&t).unwrap();
        assert_eq!(h.lengths().iter().copied().max(), Some(39));
        let data: Vec<u8> = (0..40u8).chain(0..40).collect();
        let payload = huffman_encode(&data, &h).unwrap();
        assert_eq!(huffman_decode(&payload, &h, data.len()).unwrap(), data);
    }

    #[test]
    fn random_round_trips() {
        let mut rng = Xoshiro256StarStar::seed_from_u64(17);
        for _ in 0..1000 {
            let len = rng.gen_range(0..500);
            let alphabet = rng.gen_range(1..=256u32);
            let data: Vec<u8> = (0..len)
                .map(|_| rng.gen_range(0..alphabet).min(rng.gen_range(0..alphabet)) as u8)
                .collect();
            assert_eq!(
                huffman_decompress(&huffman_compress(&data).unwrap()).unwrap(),
                data
            );
        }
    }

    #[test]
    fn absent_symbol_is_an_error() {
        let h = huffman_build(&count_frequencies(b"aab")).unwrap();
        assert_eq!(huffman_encode(b"abc", &h), Err(Error::UnmappedSymbol(b'c')));
    }
}
