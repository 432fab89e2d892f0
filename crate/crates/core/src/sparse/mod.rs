//! Sparse symmetric matrices in CSR form.
//!
//! The full pattern is stored: symmetric input is mirrored at construction
//! time so the product kernel is a plain row-wise CSR loop. Every product
//! bumps an atomic counter owned by the matrix, which solvers read to
//! report how many matrix-vector products a run used.

mod dense;
pub mod mm;

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

pub use dense::{axpy, dot, norm2, DenseBlock};
pub use mm::{
    load_matrix_market, read_dense_array, read_matrix_market, write_dense_array,
    write_matrix_market,
};

use crate::error::{Error, Result};

/// Rows above which products are split across the rayon pool. Each output
/// row is still summed serially, so parallel and serial results agree bitwise.
const PARALLEL_ROWS: usize = 8192;

/// How the triplets passed to [`SparseSymMatrix::from_triplets`] describe the matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    /// Only one triangle is given; off-diagonal entries are mirrored.
    Symmetric,
    /// Both triangles are given; symmetry is verified to `tol` relative to max |A|.
    General { tol: f64 },
}

#[derive(Debug)]
pub struct SparseSymMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    matvecs: AtomicU64,
}

impl Clone for SparseSymMatrix {
    fn clone(&self) -> Self {
        Self {
            n: self.n,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.clone(),
            matvecs: AtomicU64::new(self.matvec_count()),
        }
    }
}

impl PartialEq for SparseSymMatrix {
    /// Structural equality of the CSR arrays; the counter is ignored.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.row_ptr == other.row_ptr
            && self.col_idx == other.col_idx
            && self.values == other.values
    }
}

impl SparseSymMatrix {
    /// Assembles a CSR matrix from 0-based `(row, col, value)` triplets.
    ///
    /// Duplicate coordinates are summed. Explicit zeros are kept as stored
    /// entries.
    pub fn from_triplets(
        n: usize,
        triplets: &[(usize, usize, f64)],
        symmetry: Symmetry,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            if i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) outside a {n} x {n} matrix"
                )));
            }
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "non-finite value at ({i}, {j})"
                )));
            }
            entries.push((i, j, v));
            if matches!(symmetry, Symmetry::Symmetric) && i != j {
                entries.push((j, i, v));
            }
        }
        entries.sort_by_key(|e| (e.0, e.1));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }

        if let Symmetry::General { tol } = symmetry {
            merged = symmetrize_checked(merged, tol)?;
        }

        let mut row_ptr = vec![0usize; n + 1];
        for &(i, _, _) in &merged {
            row_ptr[i + 1] += 1;
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = merged.iter().map(|e| e.1).collect();
        let values = merged.iter().map(|e| e.2).collect();
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
            matvecs: AtomicU64::new(0),
        })
    }

    /// Diagonal matrix with the given entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let triplets: Vec<_> = diag.iter().enumerate().map(|(i, &v)| (i, i, v)).collect();
        Self::from_triplets(diag.len(), &triplets, Symmetry::Symmetric)
            .expect("diagonal entries are in range")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stored nonzeros, counting both triangles.
    #[inline]
    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Iterates over `(col, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[range.clone()]
            .iter()
            .copied()
            .zip(self.values[range].iter().copied())
    }

    /// Largest stored |A_ij|.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Total matrix-vector products performed with this matrix.
    pub fn matvec_count(&self) -> u64 {
        self.matvecs.load(Ordering::Relaxed)
    }

    /// Dense copy, row-major dimensions `n x n`.
    pub fn to_dense(&self) -> DenseBlock {
        let mut out = DenseBlock::zeros(self.n, self.n);
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                out[(i, j)] = v;
            }
        }
        out
    }

    /// `y = A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.n];
        self.spmv_into(x, &mut y)?;
        Ok(y)
    }

    /// `y = A x` into a caller-supplied buffer.
    pub fn spmv_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        self.apply_rows(x, y);
        self.matvecs.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// `Y = A X`, one product per column.
    pub fn spmm_block(&self, x: &DenseBlock) -> Result<DenseBlock> {
        self.check_len(x.nrows())?;
        let mut y = DenseBlock::zeros(self.n, x.ncols());
        for j in 0..x.ncols() {
            self.apply_rows(x.col(j), y.col_mut(j));
        }
        self.matvecs.fetch_add(x.ncols() as u64, Ordering::Relaxed);
        Ok(y)
    }

    fn apply_rows(&self, x: &[f64], y: &mut [f64]) {
        let row = |(i, yi): (usize, &mut f64)| {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        };
        if self.n >= PARALLEL_ROWS {
            y.par_iter_mut().enumerate().for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: len,
            });
        }
        Ok(())
    }
}

/// Verifies numerical symmetry of sorted, merged triplets and returns the
/// exactly symmetric average `(A + A^T) / 2` on the union pattern.
fn symmetrize_checked(
    merged: Vec<(usize, usize, f64)>,
    tol: f64,
) -> Result<Vec<(usize, usize, f64)>> {
    use std::collections::BTreeMap;

    let scale = merged.iter().fold(0.0f64, |m, e| m.max(e.2.abs()));
    let lookup: BTreeMap<(usize, usize), f64> =
        merged.iter().map(|&(i, j, v)| ((i, j), v)).collect();

    let mut out: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&(i, j), &v) in &lookup {
        let mirror = lookup.get(&(j, i)).copied().unwrap_or(0.0);
        let diff = (v - mirror).abs();
        if diff > tol * scale {
            return Err(Error::NotSymmetric {
                row: i,
                col: j,
                diff,
            });
        }
        let avg = 0.5 * (v + mirror);
        out.insert((i, j), avg);
        out.insert((j, i), avg);
    }
    Ok(out.into_iter().map(|((i, j), v)| (i, j, v)).collect())
}
