//! Inter-agent signal-correlation matrix.

use nalgebra::DMatrix;

use super::ModelError;

/// Symmetric K x K matrix with unit diagonal and entries in [0, 1] describing
/// how correlated the agents' selected modulation sequences are.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    u: DMatrix<f64>,
}

impl CorrelationMatrix {
    /// Builds from an arbitrary symmetric estimate; clamps entries into
    /// [0, 1] and pins the diagonal to one.
    pub fn from_matrix(mut u: DMatrix<f64>) -> Result<Self, ModelError> {
        if u.nrows() != u.ncols() {
            return Err(ModelError::Dimension("correlation matrix must be square".into()));
        }
        let n = u.nrows();
        for r in 0..n {
            for c in 0..n {
                let v = 0.5 * (u[(r, c)] + u[(c, r)]);
                u[(r, c)] = v.clamp(0.0, 1.0);
                u[(c, r)] = u[(r, c)];
            }
            u[(r, r)] = 1.0;
        }
        Ok(Self { u })
    }

    pub fn identity(k: usize) -> Self {
        Self { u: DMatrix::identity(k, k) }
    }

    /// Empirical estimate `U = eps * 1 + (1 - eps) * I`.
    pub fn from_epsilon(k: usize, eps: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&eps) {
            return Err(ModelError::Parameter(format!("epsilon {eps} outside [0, 1]")));
        }
        let u = DMatrix::from_fn(k, k, |r, c| if r == c { 1.0 } else { eps });
        Ok(Self { u })
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn get(&self, k: usize, k2: usize) -> f64 {
        self.u[(k, k2)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    /// Row sums (used by the receive-beamforming right-hand side).
    pub fn row_sum(&self, k: usize) -> f64 {
        self.u.row(k).sum()
    }

    /// Is this exactly the identity (uncorrelated agents)?
    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| self.u[(r, c)] == if r == c { 1.0 } else { 0.0 }))
    }

    /// Symmetric square root via eigendecomposition, clamping tiny negative
    /// eigenvalues to zero.
    pub fn sqrt(&self) -> DMatrix<f64> {
        let eig = self.u.clone().symmetric_eigen();
        let vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
        &eig.eigenvectors * DMatrix::from_diagonal(&vals) * eig.eigenvectors.transpose()
    }
}
