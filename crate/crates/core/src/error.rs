use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("value {value} does not fit in {n_bits} bits")]
    ValueOutOfRange { value: u64, n_bits: u32 },

    #[error("bit width {0} exceeds 32")]
    WidthTooLarge(u32),

    #[error("unexpected end of input")]
    UnexpectedEof,

    #[error("varint is longer than 10 bytes or overflows 64 bits")]
    VarintOverflow,

    #[error("frequency table is empty")]
    EmptyTable,

    #[error("group size {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("group has {len} probabilities but size {m}")]
    GroupSizeMismatch { len: usize, m: usize },

    #[error("probabilities must be positive and finite, got {0}")]
    InvalidProbability(f64),

    #[error("grouping produced {n_super_letters} super-letters (max 16) at threshold {threshold}")]
    GroupingFailed {
        n_super_letters: usize,
        threshold: f64,
    },

    #[error("symbol {0:#04x} has no entry in the grouping table")]
    UnmappedSymbol(u8),

    #[error("nibble value {0} is out of range")]
    NibbleOutOfRange(u8),

    #[error("output length {out_length} is inconsistent with {bytes} paired bytes")]
    PairLengthMismatch { out_length: usize, bytes: usize },

    #[error("not an RCGS container")]
    BadMagic,

    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),

    #[error("malformed container: {0}")]
    Malformed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("empty input")]
    EmptyInput,

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("image error: {0}")]
    Image(String),

    #[error("corrupt payload: {0}")]
    Corrupt(&'static str),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}
