//! Interior eigenvalues of large sparse symmetric matrices.
//!
//! The solver targets all eigenpairs in a user interval `[alpha, beta]`. It
//! builds a Chebyshev polynomial approximating the indicator of the interval,
//! runs block Lanczos with full reorthogonalization on the filtered operator,
//! and recovers eigenpairs of `A` from the converged Ritz subspace.
//!
//! ```
//! use cheblanczos::{filtered_lanczos, LanczosConfig, SparseSymMatrix};
//!
//! let diag: Vec<f64> = (0..200).map(|i| i as f64 / 10.0).collect();
//! let a = SparseSymMatrix::from_diagonal(&diag);
//! let res = filtered_lanczos(&a, 4.95, 6.05, &LanczosConfig::default()).unwrap();
//! assert!(res.converged);
//! assert_eq!(res.eigenvalues.len(), 11);
//! ```

pub mod dense_eig;
pub mod error;
pub mod filter;
pub mod lanczos;
pub mod sparse;

pub use error::{Error, Result};
pub use filter::{build_filter, ChebyshevFilter, DegreeChoice, DegreeRule, SpectralBounds};
pub use lanczos::{
    estimate_spectral_bounds, filtered_lanczos, plain_lanczos, EigenResult, LanczosConfig,
    LanczosFactorization, Operator, SolveStats,
};
pub use sparse::{load_matrix_market, DenseBlock, SparseSymMatrix, Symmetry};
