//! The `.rcgs` container.
//!
//! ```text
//! magic           "RCGS"
//! version         u8 (= 1)
//! original_length uvarint
//! level_count     uvarint
//! per level:
//!   n_super_letters  u8 (1..=16)
//!   per super-letter: suffix_bits u8 (0..=8), then 2^suffix_bits member bytes
//!   stream_length    uvarint   symbols at this level before pairing
//!   suffix_bit_len   uvarint
//!   suffix bytes     ceil(suffix_bit_len / 8), MSB-first, zero padded
//! terminal_len    uvarint
//! terminal bytes  deepest paired stream, stored verbatim
//! ```
//!
//! Level `k + 1` codes the nibble-paired super-letter stream of level `k`,
//! so its `stream_length` is `ceil(stream_length_k / 2)`; the terminal
//! block has the paired length of the last level (or the whole input when
//! there are no levels).

use crate::bitio::{uvarint_len, write_uvarint, ByteCursor};
use crate::error::{Error, Result};
use crate::grouping::{GroupingTable, MAX_SUFFIX_BITS, MAX_SUPER_LETTERS};

pub const MAGIC: [u8; 4] = *b"RCGS";
pub const VERSION: u8 = 1;
pub const FILE_EXTENSION: &str = "rcgs";

/// More levels than this cannot come from a 64-bit length.
const MAX_LEVELS_ON_WIRE: u64 = 64;

/// One super-letter as transmitted: suffix width plus its members in suffix order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Descriptor {
    pub suffix_bits: u8,
    pub members: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelHeader {
    pub descriptors: Vec<Descriptor>,
    pub stream_length: u64,
}

impl LevelHeader {
    pub fn from_grouping(grouping: &GroupingTable, stream_length: u64) -> Self {
        Self {
            descriptors: grouping
                .super_letters()
                .iter()
                .map(|sl| Descriptor {
                    suffix_bits: sl.suffix_bits,
                    members: sl.members.clone(),
                })
                .collect(),
            stream_length,
        }
    }

    pub fn n_super_letters(&self) -> usize {
        self.descriptors.len()
    }

    /// Rebuilds the symbol mapping, checking member counts and disjointness.
    pub fn grouping(&self) -> Result<GroupingTable> {
        GroupingTable::from_descriptors(
            self.descriptors
                .iter()
                .map(|d| (d.suffix_bits, d.members.clone()))
                .collect(),
        )
    }

    fn serialized_len(&self) -> usize {
        1 + self
            .descriptors
            .iter()
            .map(|d| 1 + d.members.len())
            .sum::<usize>()
            + uvarint_len(self.stream_length)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub header: LevelHeader,
    pub suffix_bit_len: u64,
    pub suffix_bytes: Vec<u8>,
}

impl Level {
    fn serialized_len(&self) -> usize {
        self.header.serialized_len() + uvarint_len(self.suffix_bit_len) + self.suffix_bytes.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EncodedContainer {
    pub original_length: u64,
    pub levels: Vec<Level>,
    pub terminal_raw: Vec<u8>,
}

impl EncodedContainer {
    /// Size of [`to_bytes`](Self::to_bytes) without serializing.
    pub fn serialized_len(&self) -> usize {
        MAGIC.len()
            + 1
            + uvarint_len(self.original_length)
            + uvarint_len(self.levels.len() as u64)
            + self.levels.iter().map(Level::serialized_len).sum::<usize>()
            + uvarint_len(self.terminal_raw.len() as u64)
            + self.terminal_raw.len()
    }

    /// Bytes spent on everything except suffix payloads and the terminal block.
    pub fn header_bytes(&self) -> usize {
        self.serialized_len()
            - self.terminal_raw.len()
            - self
                .levels
                .iter()
                .map(|l| l.suffix_bytes.len())
                .sum::<usize>()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.serialized_len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        write_uvarint(&mut out, self.original_length);
        write_uvarint(&mut out, self.levels.len() as u64);
        for level in &self.levels {
            let h = &level.header;
            out.push(h.descriptors.len() as u8);
            for d in &h.descriptors {
                out.push(d.suffix_bits);
                out.extend_from_slice(&d.members);
            }
            write_uvarint(&mut out, h.stream_length);
            write_uvarint(&mut out, level.suffix_bit_len);
            out.extend_from_slice(&level.suffix_bytes);
        }
        write_uvarint(&mut out, self.terminal_raw.len() as u64);
        out.extend_from_slice(&self.terminal_raw);
        out
    }

    /// Parses and structurally validates a container.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        if data.len() < MAGIC.len() || data[..MAGIC.len()] != MAGIC {
            return Err(Error::BadMagic);
        }
        let mut cur = ByteCursor::new(&data[MAGIC.len()..]);
        let version = cur.read_u8().map_err(truncated("version"))?;
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let original_length = cur.read_uvarint().map_err(truncated("original length"))?;
        let level_count = cur.read_uvarint().map_err(truncated("level count"))?;
        if level_count > MAX_LEVELS_ON_WIRE {
            return Err(Error::malformed(format!(
                "level count {level_count} is implausible"
            )));
        }

        let mut levels = Vec::with_capacity(level_count as usize);
        for k in 0..level_count as usize {
            let n_sl = cur.read_u8().map_err(truncated("level header"))? as usize;
            if n_sl == 0 || n_sl > MAX_SUPER_LETTERS {
                return Err(Error::malformed(format!(
                    "level {k}: super-letter count {n_sl} outside 1..=16"
                )));
            }
            let mut seen = [false; 256];
            let mut descriptors = Vec::with_capacity(n_sl);
            for _ in 0..n_sl {
                let suffix_bits = cur.read_u8().map_err(truncated("descriptor"))?;
                if suffix_bits > MAX_SUFFIX_BITS {
                    return Err(Error::malformed(format!(
                        "level {k}: suffix width {suffix_bits} exceeds 8"
                    )));
                }
                let members = cur
                    .read_slice(1 << suffix_bits)
                    .map_err(truncated("descriptor members"))?
                    .to_vec();
                for &m in &members {
                    if std::mem::replace(&mut seen[m as usize], true) {
                        return Err(Error::malformed(format!(
                            "level {k}: symbol {m:#04x} appears in more than one position"
                        )));
                    }
                }
                descriptors.push(Descriptor {
                    suffix_bits,
                    members,
                });
            }
            let stream_length = cur.read_uvarint().map_err(truncated("stream length"))?;
            let suffix_bit_len = cur.read_uvarint().map_err(truncated("suffix length"))?;
            let n_bytes = usize::try_from(suffix_bit_len.div_ceil(8))
                .map_err(|_| Error::malformed("suffix stream too long"))?;
            let suffix_bytes = cur
                .read_slice(n_bytes)
                .map_err(truncated("suffix stream"))?
                .to_vec();
            levels.push(Level {
                header: LevelHeader {
                    descriptors,
                    stream_length,
                },
                suffix_bit_len,
                suffix_bytes,
            });
        }
        let terminal_len = cur.read_uvarint().map_err(truncated("terminal length"))?;
        let terminal_len = usize::try_from(terminal_len)
            .map_err(|_| Error::malformed("terminal block too long"))?;
        let terminal_raw = cur
            .read_slice(terminal_len)
            .map_err(truncated("terminal block"))?
            .to_vec();
        if !cur.is_empty() {
            return Err(Error::malformed(format!(
                "{} trailing bytes after terminal block",
                cur.remaining()
            )));
        }

        let container = Self {
            original_length,
            levels,
            terminal_raw,
        };
        container.validate_lengths()?;
        Ok(container)
    }

    /// Checks the length chain linking levels to each other and to the terminal block.
    pub fn validate_lengths(&self) -> Result<()> {
        let mut expected = self.original_length;
        for (k, level) in self.levels.iter().enumerate() {
            let len = level.header.stream_length;
            if len == 0 {
                return Err(Error::malformed(format!("level {k}: empty stream")));
            }
            if len != expected {
                return Err(Error::malformed(format!(
                    "level {k}: stream length {len}, expected {expected}"
                )));
            }
            expected = len.div_ceil(2);
        }
        if self.terminal_raw.len() as u64 != expected {
            return Err(Error::malformed(format!(
                "terminal block has {} bytes, expected {expected}",
                self.terminal_raw.len()
            )));
        }
        Ok(())
    }
}

fn truncated(what: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::UnexpectedEof => Error::malformed(format!("truncated {what}")),
        other => other,
    }
}
