//! Sparse detection of the aggregated codeword histogram and global-feature
//! reconstruction.
//!
//! The received sequence approximates `y = P x + noise` where `x` collects,
//! per codeword, the sum of the block norms of the agents that picked it.
//! With at most K agents, `x` has at most K nonzero entries and is
//! non-negative, so it is recovered with stagewise weak orthogonal matching
//! pursuit followed by a non-negative least-squares polish.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::blocks::EncodedBlock;
use super::codebook::{ModCodebook, QuantCodebook};
use super::CodecError;

/// Detector knobs. Defaults: weak-selection at half the best correlation per
/// stage, at most 10 stages, stop once the residual falls below `1e-6 ||y||`.
#[derive(Debug, Clone, Copy)]
pub struct SwompParams {
    pub weak_ratio: f64,
    pub max_stages: usize,
    pub residual_tol: f64,
}

impl Default for SwompParams {
    fn default() -> Self {
        Self { weak_ratio: 0.5, max_stages: 10, residual_tol: 1e-6 }
    }
}

/// Detected aggregate: non-negative codeword coefficients with at most
/// `sparsity` nonzeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseAggregate {
    x: Vec<f64>,
}

impl SparseAggregate {
    pub fn zeros(len: usize) -> Self {
        Self { x: vec![0.0; len] }
    }

    /// Builds from raw coefficients; negative entries are rejected.
    pub fn from_vec(x: Vec<f64>) -> Result<Self, CodecError> {
        if x.iter().any(|v| *v < 0.0 || !v.is_finite()) {
            return Err(CodecError::Parameter(
                "aggregate coefficients must be finite and non-negative".into(),
            ));
        }
        Ok(Self { x })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.x
    }

    pub fn nonzeros(&self) -> usize {
        self.x.iter().filter(|v| **v > 0.0).count()
    }

    /// Sum of squared differences against another aggregate.
    pub fn distance_sq(&self, other: &Self) -> f64 {
        self.x.iter().zip(&other.x).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }
}

/// Least squares `min_x ||y - P_S x||` over *real* x restricted to `support`;
/// solves the real normal equations `Re(P^H P) x = Re(P^H y)`.
fn real_least_squares(
    p: &ModCodebook,
    support: &[usize],
    y: &DVector<Complex64>,
) -> Vec<f64> {
    let s = support.len();
    let mut gram = DMatrix::<f64>::zeros(s, s);
    let mut rhs = DVector::<f64>::zeros(s);
    let mat = p.as_matrix();
    for (a, &ia) in support.iter().enumerate() {
        let col_a = mat.column(ia);
        rhs[a] = col_a.dotc(y).re;
        for (b, &ib) in support.iter().enumerate().skip(a) {
            let v = col_a.dotc(&mat.column(ib)).re;
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    let sol = gram
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .or_else(|| gram.lu().solve(&rhs))
        .unwrap_or_else(|| DVector::zeros(s));
    sol.iter().copied().collect()
}

fn residual(
    p: &ModCodebook,
    support: &[usize],
    coeffs: &[f64],
    y: &DVector<Complex64>,
) -> DVector<Complex64> {
    let mut r = y.clone();
    let mat = p.as_matrix();
    for (a, &i) in support.iter().enumerate() {
        let w = Complex64::from(-coeffs[a]);
        r.axpy(w, &mat.column(i).into_owned(), Complex64::ONE);
    }
    r
}

/// Stagewise weak orthogonal matching pursuit with non-negative polish.
///
/// Per stage every column whose correlation with the residual reaches
/// `weak_ratio` times the best one joins the support (capped at `sparsity`),
/// followed by a real least-squares refit. After the stages, negative
/// coefficients are clamped to zero and the positive support is refit once.
pub fn detect_aggregate(
    y: &DVector<Complex64>,
    p: &ModCodebook,
    sparsity: usize,
    params: &SwompParams,
) -> SparseAggregate {
    let size = p.size();
    let y_norm = y.norm();
    if y_norm == 0.0 || sparsity == 0 {
        return SparseAggregate::zeros(size);
    }
    let mat = p.as_matrix();
    let mut support: Vec<usize> = Vec::new();
    let mut in_support = vec![false; size];
    let mut coeffs: Vec<f64> = Vec::new();
    let mut r = y.clone();
    for _ in 0..params.max_stages {
        if r.norm() <= params.residual_tol * y_norm || support.len() >= sparsity {
            break;
        }
        let corr: Vec<f64> = (0..size)
            .map(|i| if in_support[i] { 0.0 } else { mat.column(i).dotc(&r).norm() })
            .collect();
        let best = corr.iter().cloned().fold(0.0f64, f64::max);
        if best <= 0.0 {
            break;
        }
        let thr = params.weak_ratio * best;
        let mut picks: Vec<usize> =
            (0..size).filter(|&i| !in_support[i] && corr[i] >= thr).collect();
        picks.sort_by(|&a, &b| corr[b].partial_cmp(&corr[a]).unwrap());
        picks.truncate(sparsity - support.len());
        if picks.is_empty() {
            break;
        }
        for i in picks {
            in_support[i] = true;
            support.push(i);
        }
        coeffs = real_least_squares(p, &support, y);
        r = residual(p, &support, &coeffs, y);
    }
    // Non-negative polish: drop negative coefficients, refit the rest once.
    if coeffs.iter().any(|c| *c < 0.0) {
        let positive: Vec<usize> = support
            .iter()
            .zip(&coeffs)
            .filter(|(_, c)| **c > 0.0)
            .map(|(i, _)| *i)
            .collect();
        support = positive;
        coeffs = if support.is_empty() { Vec::new() } else { real_least_squares(p, &support, y) };
    }
    let mut x = vec![0.0; size];
    for (a, &i) in support.iter().enumerate() {
        x[i] = coeffs[a].max(0.0);
    }
    SparseAggregate { x }
}

/// Exact aggregate of one block across agents: sums each agent's block norm
/// into the slot of its selected codeword.
pub fn aggregate_oracle(encoded: &[EncodedBlock], codebook_size: usize) -> SparseAggregate {
    let mut x = vec![0.0; codebook_size];
    for e in encoded {
        x[e.index] += e.norm;
    }
    SparseAggregate { x }
}

/// Concatenates `(1/K) Q_t x_t` over all blocks into the global feature
/// estimate.
pub fn reconstruct_global(
    aggregates: &[SparseAggregate],
    codebooks: &[&QuantCodebook],
    k: usize,
) -> Result<Vec<f64>, CodecError> {
    if aggregates.len() != codebooks.len() {
        return Err(CodecError::Dimension(format!(
            "{} aggregates vs {} codebooks",
            aggregates.len(),
            codebooks.len()
        )));
    }
    let mut out = Vec::new();
    for (agg, cb) in aggregates.iter().zip(codebooks) {
        if agg.len() != cb.size() {
            return Err(CodecError::Dimension(format!(
                "aggregate length {} vs codebook size {}",
                agg.len(),
                cb.size()
            )));
        }
        let mut block = DVector::<f64>::zeros(cb.dim());
        for (i, &w) in agg.coefficients().iter().enumerate() {
            if w != 0.0 {
                block.axpy(w, &cb.codeword(i), 1.0);
            }
        }
        block /= k as f64;
        out.extend_from_slice(block.as_slice());
    }
    Ok(out)
}
