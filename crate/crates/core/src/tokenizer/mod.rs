//! The mesh codec: triangle-fan patch traversal, hierarchical block-index
//! coordinates with per-patch merging, and the token vocabulary.

mod block;
mod codec;
mod patch;
pub mod stream;
mod vocab;

pub use block::{block_index, block_inverse, BlockIndex};
pub use codec::{compression_ratio, decode, encode, encode_detailed, Encoded, TokenSequence};
pub use patch::{build_patches, Patch};
pub use vocab::{vocab_size, Token, TokenClass, VocabSpec};

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TokenError {
    #[error("invalid vocabulary: {0}")]
    Vocab(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error at token {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("truncated stream at token {position}: {message}")]
    Truncated { position: usize, message: String },
    #[error("malformed stream at byte {offset}: {message}")]
    Format { offset: usize, message: String },
}
