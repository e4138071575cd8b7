//! Lossless BWT compression with run-block tunneling.
//!
//! The pipeline builds a suffix array, takes the Burrows-Wheeler transform,
//! detects width-maximal run-blocks, removes their redundant interior
//! (tunneling) when the estimated net benefit is positive, and entropy-codes
//! the shortened BWT together with a small auxiliary marking vector. Inversion
//! walks a generalized LF-mapping with a stack to restore the original bytes
//! exactly.
//!
//! Module map:
//! - [`bwt`]: suffix array (SA-IS), forward/inverse BWT, LF-mapping, entropy
//! - [`bits`]: plain bitvector with rank/select
//! - [`blocks`]: run detection, width-maximal run-blocks, collision graph
//! - [`choice`]: block scores, benefit/tax estimators, greedy selection
//! - [`tunnel`]: the tunneling transform, generalized LF, stack inversion
//! - [`backend`]: MTF + zero-run + canonical Huffman coding, container format
//! - [`pipeline`]: end-to-end compress/decompress/stats

pub mod backend;
pub mod bits;
pub mod blocks;
pub mod bwt;
pub mod choice;
pub mod pipeline;
pub mod tunnel;

use std::fmt;

/// Symbols of the internal text alphabet: 0 is the sentinel, byte `b` is
/// stored as `b + 1`.
pub type Symbol = u16;

/// The sentinel symbol, strictly smaller than every byte symbol.
pub const SENTINEL: Symbol = 0;

/// Size of the internal text alphabet (sentinel + 256 byte values).
pub const ALPHABET: usize = 257;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a documented precondition.
    InvalidInput(String),
    /// A rank/select query outside the valid domain.
    OutOfRange(String),
    /// Estimator evaluated outside its domain (`tc >= rc`).
    EstimatorDomain(String),
    /// A block set handed to `tunnel` contains a critical collision.
    InvalidBlockSet(String),
    /// An internal structural invariant failed; indicates a bug or
    /// inconsistent inputs.
    InvariantViolation(String),
    /// Serialized data cannot be decoded. `offset` is the byte position in
    /// the input where decoding failed, when known.
    Corrupt {
        offset: Option<u64>,
        reason: String,
    },
}

impl Error {
    pub(crate) fn corrupt(reason: impl Into<String>) -> Self {
        Error::Corrupt {
            offset: None,
            reason: reason.into(),
        }
    }

    pub(crate) fn corrupt_at(offset: u64, reason: impl Into<String>) -> Self {
        Error::Corrupt {
            offset: Some(offset),
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::OutOfRange(m) => write!(f, "out of range: {m}"),
            Error::EstimatorDomain(m) => write!(f, "estimator domain: {m}"),
            Error::InvalidBlockSet(m) => write!(f, "invalid block set: {m}"),
            Error::InvariantViolation(m) => write!(f, "invariant violation: {m}"),
            Error::Corrupt {
                offset: Some(off),
                reason,
            } => write!(f, "corrupt data at byte {off}: {reason}"),
            Error::Corrupt {
                offset: None,
                reason,
            } => write!(f, "corrupt data: {reason}"),
        }
    }
}

impl std::error::Error for Error {}

/// Library-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
