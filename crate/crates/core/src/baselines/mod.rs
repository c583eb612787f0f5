//! Static order-0 reference coders: a range coder and canonical Huffman.
//!
//! Both serialize their model next to the payload so reported sizes are
//! comparable with self-contained `.rcgs` containers:
//!
//! ```text
//! uvarint  input length
//! table    256 entries; a nonzero entry is a uvarint, a zero run is 0x00
//!          followed by uvarint(run length)
//! payload  coder output
//! ```

pub mod ac;
pub mod huffman;

use crate::bitio::{write_uvarint, ByteCursor};
use crate::error::{Error, Result};
use crate::model::ALPHABET_SIZE;

/// Writes 256 values with zero runs collapsed.
pub fn write_symbol_table(out: &mut Vec<u8>, values: &[u64; ALPHABET_SIZE]) {
    let mut i = 0;
    while i < ALPHABET_SIZE {
        if values[i] == 0 {
            let run = values[i..].iter().take_while(|&&v| v == 0).count();
            out.push(0);
            write_uvarint(out, run as u64);
            i += run;
        } else {
            write_uvarint(out, values[i]);
            i += 1;
        }
    }
}

pub fn read_symbol_table(cur: &mut ByteCursor<'_>) -> Result<[u64; ALPHABET_SIZE]> {
    let mut values = [0u64; ALPHABET_SIZE];
    let mut i = 0;
    while i < ALPHABET_SIZE {
        let v = cur.read_uvarint()?;
        if v == 0 {
            let run = cur.read_uvarint()?;
            if run == 0 || run > (ALPHABET_SIZE - i) as u64 {
                return Err(Error::Corrupt("zero run overruns symbol table"));
            }
            i += run as usize;
        } else {
            values[i] = v;
            i += 1;
        }
    }
    Ok(values)
}
