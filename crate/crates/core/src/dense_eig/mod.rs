//! Symmetric eigensolver for the banded projected matrices of block Lanczos.
//!
//! A band matrix is first reduced to tridiagonal form, by Givens rotations
//! with bulge chasing when the band is narrow and by Householder reflections
//! when it is wide, and the tridiagonal problem is then solved with the
//! implicitly shifted QL iteration. The orthogonal transform is always
//! accumulated.

mod band;
mod ql;

pub use band::{tridiagonalize, SymBandMatrix, Tridiagonal};
pub use ql::tridiag_eig;

use crate::error::Result;
use crate::sparse::DenseBlock;

/// Eigenvalues in ascending order and the matching orthonormal eigenvectors
/// as columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: DenseBlock,
}

/// Full eigendecomposition `M = W diag(values) W^T` of a symmetric band matrix.
pub fn sym_band_eig(m: &SymBandMatrix) -> Result<SymEigen> {
    let Tridiagonal {
        diag,
        offdiag,
        transform,
    } = tridiagonalize(m);
    let (values, vectors) = tridiag_eig(diag, offdiag, transform)?;
    Ok(SymEigen { values, vectors })
}

/// Eigendecomposition of a dense symmetric matrix (lower triangle is read).
pub fn sym_eig_dense(m: &DenseBlock) -> Result<SymEigen> {
    let bw = m.nrows().saturating_sub(1);
    sym_band_eig(&SymBandMatrix::from_dense(m, bw))
}
