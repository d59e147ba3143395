//! Feature-block partitioning, norm/direction decomposition and sequence
//! encoding.

use nalgebra::DVector;
use num_complex::Complex64;

use super::codebook::ModCodebook;
use super::CodecError;

/// Splits a length-W feature vector into T = W / D blocks of length D.
pub fn partition_features(f: &[f64], d: usize) -> Result<Vec<DVector<f64>>, CodecError> {
    if d == 0 || f.len() % d != 0 {
        return Err(CodecError::Dimension(format!(
            "feature length {} is not a multiple of block length {}",
            f.len(),
            d
        )));
    }
    Ok(f.chunks_exact(d).map(DVector::from_row_slice).collect())
}

/// Splits a block into its norm and unit direction. A zero block maps to
/// norm 0 with the first canonical basis vector as direction; the encoder
/// then transmits nothing for it, so the fallback never reaches the air.
pub fn decompose_block(block: &DVector<f64>) -> (f64, DVector<f64>) {
    let norm = block.norm();
    if norm > 0.0 {
        (norm, block / norm)
    } else {
        let mut e1 = DVector::zeros(block.len());
        if !e1.is_empty() {
            e1[0] = 1.0;
        }
        (0.0, e1)
    }
}

/// One agent's encoded block: the block norm, the selected codeword index
/// and the scaled transmit sequence.
#[derive(Debug, Clone)]
pub struct EncodedBlock {
    pub norm: f64,
    pub index: usize,
    pub signal: DVector<Complex64>,
}

/// Scales the selected modulation sequence by the block norm:
/// `s = norm * p[:, index]`.
pub fn encode_block(
    norm: f64,
    index: usize,
    modulation: &ModCodebook,
) -> Result<DVector<Complex64>, CodecError> {
    if index >= modulation.size() {
        return Err(CodecError::Parameter(format!(
            "codeword index {index} out of range for codebook of size {}",
            modulation.size()
        )));
    }
    Ok(modulation.column(index) * Complex64::from(norm))
}

impl EncodedBlock {
    pub fn new(norm: f64, index: usize, modulation: &ModCodebook) -> Result<Self, CodecError> {
        Ok(Self { norm, index, signal: encode_block(norm, index, modulation)? })
    }
}
