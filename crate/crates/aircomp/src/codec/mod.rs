//! Digital codec: block partitioning, sphere-codebook quantization, sequence
//! modulation, sparse detection of the aggregated codeword histogram and
//! global-feature reconstruction.

mod blocks;
mod codebook;
mod detect;

pub use blocks::{decompose_block, encode_block, partition_features, EncodedBlock};
pub use codebook::{
    build_modulation_codebook, quantize_block, standard_training_set, train_codebook,
    train_codebook_kmeanspp, CodebookPair, ModCodebook, QuantCodebook,
};
pub use detect::{
    aggregate_oracle, detect_aggregate, reconstruct_global, SparseAggregate, SwompParams,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("codebook io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed codebook file: {0}")]
    Format(String),
}
