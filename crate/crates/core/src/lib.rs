//! Recursive coding based on grouping of symbols.
//!
//! A static, multiplication-free entropy coder for byte streams. Each
//! level groups the alphabet into at most 16 super-letters whose members
//! are addressed by fixed-width suffixes; the super-letter indices are
//! packed two per byte and fed back into the next level until the stream
//! is short enough to store verbatim.
//!
//! ```
//! use rcgs_core::{compress, decompress, EncoderConfig};
//!
//! let data = b"abracadabra, abracadabra, abracadabra, abracadabra, abracadabra!".repeat(4);
//! let packed = compress(&data, &EncoderConfig::default()).unwrap();
//! assert_eq!(decompress(&packed).unwrap(), data);
//! ```
//!
//! The [`baselines`] module holds a static range coder and a canonical
//! Huffman coder for comparison, and [`datagen`] produces the synthetic
//! sources used by the benchmarks.

pub mod baselines;
pub mod bitio;
pub mod codec;
pub mod container;
pub mod datagen;
pub mod error;
pub mod grouping;
pub mod model;

pub use codec::{
    compress, decode, decompress, encode, encode_with_stats, encoded_bits_per_symbol, pair_nibbles,
    split_streams, unpair_nibbles, EncoderConfig, LevelStats,
};
pub use container::{Descriptor, EncodedContainer, Level, LevelHeader};
pub use datagen::{GenKind, GenSpec};
pub use error::{Error, Result};
pub use grouping::{
    form_super_letters, group_redundancy, grouped_code_length, GroupingTable, SuperLetter,
    SymbolCode,
};
pub use model::{count_frequencies, entropy_bits_per_symbol, AlphabetStats, FrequencyTable};
