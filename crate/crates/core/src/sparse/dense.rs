use std::fmt;

use crate::error::{Error, Result};

/// Column-major dense matrix.
///
/// Used for block vectors (`n x r`) as well as the small projected
/// matrices that appear in the Lanczos recurrence.
#[derive(Clone, PartialEq)]
pub struct DenseBlock {
    nrows: usize,
    ncols: usize,
    data: Vec<f64>,
}

impl DenseBlock {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![0.0; nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = 1.0;
        }
        out
    }

    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                expected: nrows * ncols,
                found: data.len(),
            });
        }
        Ok(Self { nrows, ncols, data })
    }

    /// Builds a block from equally sized columns.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let nrows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * columns.len());
        for c in columns {
            if c.len() != nrows {
                return Err(Error::DimensionMismatch {
                    expected: nrows,
                    found: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            nrows,
            ncols: columns.len(),
            data,
        })
    }

    /// Builds a matrix from a row-major closure.
    pub fn from_fn(nrows: usize, ncols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut out = Self::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                out[(i, j)] = f(i, j);
            }
        }
        out
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact panics on zero, so guard empty row counts
        self.data.chunks_exact(self.nrows.max(1)).take(self.ncols)
    }

    /// Copies the columns in `cols` into a new block.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut out = Self::zeros(self.nrows, cols.len());
        for (dst, &src) in cols.iter().enumerate() {
            out.col_mut(dst).copy_from_slice(self.col(src));
        }
        out
    }

    /// Copies rows `start..start + len` into a new matrix.
    pub fn row_range(&self, start: usize, len: usize) -> Self {
        let mut out = Self::zeros(len, self.ncols);
        for j in 0..self.ncols {
            out.col_mut(j)
                .copy_from_slice(&self.col(j)[start..start + len]);
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.ncols, self.nrows, |i, j| self[(j, i)])
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseBlock) -> Self {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for j in 0..other.ncols {
            let dst = out.col_mut(j);
            for (p, &w) in other.col(j).iter().enumerate() {
                if w != 0.0 {
                    axpy(w, self.col(p), dst);
                }
            }
        }
        out
    }

    /// `self^T * other`.
    pub fn t_matmul(&self, other: &DenseBlock) -> Self {
        assert_eq!(self.nrows, other.nrows, "t_matmul dimension mismatch");
        let mut out = Self::zeros(self.ncols, other.ncols);
        for j in 0..other.ncols {
            let b = other.col(j);
            for i in 0..self.ncols {
                out[(i, j)] = dot(self.col(i), b);
            }
        }
        out
    }

    /// `self -= a * b`.
    pub fn sub_matmul(&mut self, a: &DenseBlock, b: &DenseBlock) {
        assert_eq!(a.ncols, b.nrows);
        assert_eq!(self.nrows, a.nrows);
        assert_eq!(self.ncols, b.ncols);
        for j in 0..b.ncols {
            let dst = self.col_mut(j);
            for (p, &w) in b.col(j).iter().enumerate() {
                if w != 0.0 {
                    axpy(-w, a.col(p), dst);
                }
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: f64, other: &DenseBlock) {
        assert_eq!(self.data.len(), other.data.len());
        axpy(s, &other.data, &mut self.data);
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Replaces the matrix by `(M + M^T) / 2`. Must be square.
    pub fn symmetrize(&mut self) {
        assert_eq!(self.nrows, self.ncols);
        for j in 0..self.ncols {
            for i in j + 1..self.nrows {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = avg;
                self[(j, i)] = avg;
            }
        }
    }

    /// Largest |(M^T M - I)_ij|.
    pub fn orthogonality_error(&self) -> f64 {
        let g = self.t_matmul(self);
        let mut worst: f64 = 0.0;
        for j in 0..g.ncols {
            for i in 0..g.nrows {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }
}

impl std::ops::Index<(usize, usize)> for DenseBlock {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &self.data[j * self.nrows + i]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseBlock {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.nrows && j < self.ncols);
        &mut self.data[j * self.nrows + i]
    }
}

impl fmt::Debug for DenseBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseBlock {}x{}", self.nrows, self.ncols)?;
        for i in 0..self.nrows.min(12) {
            let row: Vec<String> = (0..self.ncols.min(8))
                .map(|j| format!("{:>12.5e}", self[(i, j)]))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // four accumulators let the compiler vectorize without reassociating
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for k in 0..chunks {
        let i = 4 * k;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[inline]
pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}
