use crate::sparse::DenseBlock;

/// Symmetric band matrix stored as its diagonal and `semi_bandwidth`
/// subdiagonals: `band[d * dim + i] = M[i + d][i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBandMatrix {
    dim: usize,
    bw: usize,
    band: Vec<f64>,
}

impl SymBandMatrix {
    /// Zero matrix. The bandwidth is clamped to `dim - 1`.
    pub fn zeros(dim: usize, semi_bandwidth: usize) -> Self {
        let bw = semi_bandwidth.min(dim.saturating_sub(1));
        Self {
            dim,
            bw,
            band: vec![0.0; (bw + 1) * dim],
        }
    }

    /// Band part of a dense square matrix, averaging `M[i][j]` and `M[j][i]`.
    pub fn from_dense(m: &DenseBlock, semi_bandwidth: usize) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "band matrix must be square");
        let mut out = Self::zeros(m.nrows(), semi_bandwidth);
        for d in 0..=out.bw {
            for i in 0..out.dim - d {
                out.band[d * out.dim + i] = 0.5 * (m[(i + d, i)] + m[(i, i + d)]);
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn semi_bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.bw {
            0.0
        } else {
            self.band[d * self.dim + lo]
        }
    }

    /// Sets `(i, j)` and, implicitly, `(j, i)`.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.bw, "({i}, {j}) outside band {}", self.bw);
        self.band[d * self.dim + lo] = v;
    }

    pub fn to_dense(&self) -> DenseBlock {
        let mut out = DenseBlock::zeros(self.dim, self.dim);
        for d in 0..=self.bw {
            for i in 0..self.dim - d {
                let v = self.band[d * self.dim + i];
                out[(i + d, i)] = v;
                out[(i, i + d)] = v;
            }
        }
        out
    }

    /// Largest |M_ij|.
    pub fn max_abs(&self) -> f64 {
        self.band.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `M = G T G^T` with `T` tridiagonal.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    /// `offdiag[i] = T[i+1][i]`.
    pub offdiag: Vec<f64>,
    /// Orthogonal `G`.
    pub transform: DenseBlock,
}

/// Reduces a symmetric band matrix to tridiagonal form.
pub fn tridiagonalize(m: &SymBandMatrix) -> Tridiagonal {
    let n = m.dim();
    let bw = m.semi_bandwidth();
    if bw <= 1 {
        let diag = (0..n).map(|i| m.get(i, i)).collect();
        let offdiag = (1..n).map(|i| m.get(i, i - 1)).collect();
        return Tridiagonal {
            diag,
            offdiag,
            transform: DenseBlock::identity(n),
        };
    }
    if 2 * bw >= n {
        householder_tridiag(m.to_dense())
    } else {
        givens_band_reduce(m)
    }
}

/// Rutishauser/Schwarz band reduction: each subdiagonal entry beyond the
/// first is annihilated by a rotation in the plane of the two rows just above
/// it, and the resulting bulge is chased down the band.
fn givens_band_reduce(m: &SymBandMatrix) -> Tridiagonal {
    let n = m.dim();
    let bw = m.semi_bandwidth();
    let mut a = m.to_dense();
    let mut g = DenseBlock::identity(n);

    for j in 0..n.saturating_sub(2) {
        for d in (2..=bw).rev() {
            let target = j + d;
            if target >= n {
                continue;
            }
            // zero a[target][j] using a[target - 1][j]
            let mut row = target;
            let mut col = j;
            loop {
                let x = a[(row - 1, col)];
                let y = a[(row, col)];
                if y == 0.0 {
                    break;
                }
                let r = x.hypot(y);
                let (c, s) = (x / r, y / r);
                rotate(&mut a, &mut g, row - 1, row, c, s, bw);
                a[(row, col)] = 0.0;
                a[(col, row)] = 0.0;
                // rotating rows (row-1, row) pushes fill to (row + bw, row - 1)
                let bulge_row = row + bw;
                if bulge_row >= n {
                    break;
                }
                col = row - 1;
                row = bulge_row;
            }
        }
    }

    let diag = (0..n).map(|i| a[(i, i)]).collect();
    let offdiag = (1..n).map(|i| a[(i, i - 1)]).collect();
    Tridiagonal {
        diag,
        offdiag,
        transform: g,
    }
}

/// Similarity `A <- P A P^T` with `P` the rotation `[c s; -s c]` in the
/// `(k, l)` plane, restricted to the band window of rows `k` and `l`;
/// `G <- G P^T`.
fn rotate(a: &mut DenseBlock, g: &mut DenseBlock, k: usize, l: usize, c: f64, s: f64, bw: usize) {
    let n = a.nrows();
    let lo = k.saturating_sub(bw + 1);
    let hi = (l + bw + 1).min(n - 1);
    for t in lo..=hi {
        let x = a[(k, t)];
        let y = a[(l, t)];
        a[(k, t)] = c * x + s * y;
        a[(l, t)] = -s * x + c * y;
    }
    for t in lo..=hi {
        let x = a[(t, k)];
        let y = a[(t, l)];
        a[(t, k)] = c * x + s * y;
        a[(t, l)] = -s * x + c * y;
    }
    let (left, right) = g.as_mut_slice().split_at_mut(l * n);
    let gk = &mut left[k * n..];
    let gl = &mut right[..n];
    for (x, y) in gk.iter_mut().zip(gl.iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = c * xv + s * yv;
        *y = -s * xv + c * yv;
    }
}

/// Householder tridiagonalization of a dense symmetric matrix (the EISPACK
/// `tred2` scheme, reading the lower triangle).
fn householder_tridiag(mut v: DenseBlock) -> Tridiagonal {
    let n = v.nrows();
    let mut d: Vec<f64> = (0..n).map(|j| v[(n - 1, j)]).collect();
    let mut e = vec![0.0; n];

    for i in (1..n).rev() {
        let scale: f64 = d[..i].iter().map(|x| x.abs()).sum();
        let mut h = 0.0;
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
                v[(j, i)] = 0.0;
            }
        } else {
            for dk in d[..i].iter_mut() {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].iter_mut().for_each(|x| *x = 0.0);

            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g += v[(k, j)] * d[k];
                    e[k] += v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] -= f * e[k] + g * d[k];
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = 0.0;
            }
        }
        d[i] = h;
    }

    // accumulate the reflections
    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = 0.0;
    }
    if n > 0 {
        v[(n - 1, n - 1)] = 1.0;
    }

    Tridiagonal {
        diag: d,
        offdiag: e.into_iter().skip(1).collect(),
        transform: v,
    }
}
