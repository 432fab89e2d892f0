use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Operator;
use crate::dense_eig::SymBandMatrix;
use crate::error::{Error, Result};
use crate::sparse::{axpy, dot, norm2, DenseBlock};

/// A remainder column whose norm drops below this fraction of its norm
/// before projection is treated as linearly dependent.
const BREAKDOWN_TOL: f64 = 1e-12;

/// Random stream used for replacement vectors after a breakdown.
const REPLACEMENT_STREAM: u64 = 7;

pub(crate) fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn random_column(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Orthogonalizes `v` against every column of `basis` with two passes of
/// classical Gram-Schmidt. Returns the accumulated coefficients.
fn project_out_columns(basis: &[&[f64]], v: &mut [f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; basis.len()];
    for _ in 0..2 {
        let h: Vec<f64> = basis.iter().map(|q| dot(q, v)).collect();
        for (q, &hi) in basis.iter().zip(&h) {
            axpy(-hi, q, v);
        }
        for (c, hi) in coeffs.iter_mut().zip(h) {
            *c += hi;
        }
    }
    coeffs
}

/// `n x r` block with orthonormal columns from seeded Gaussian entries.
pub fn init_block(n: usize, r: usize, seed: u64) -> Result<DenseBlock> {
    if r == 0 || r > n {
        return Err(Error::InvalidArgument(format!(
            "block size {r} must be in 1..={n}"
        )));
    }
    let mut rng = seeded_rng(seed, 0);
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(r);
    while cols.len() < r {
        let mut v = random_column(n, &mut rng);
        let before = norm2(&v);
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        project_out_columns(&refs, &mut v);
        let nv = norm2(&v);
        if nv <= BREAKDOWN_TOL * before {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= nv);
        cols.push(v);
    }
    DenseBlock::from_columns(&cols)
}

/// Block Lanczos factorization `op Q_k = Q_k T_k + Q_{k+1} S_k E_k^T` with
/// full reorthogonalization.
///
/// `blocks` holds `Q_1..Q_k` plus the pending block `Q_{k+1}` unless the
/// basis has reached its size limit, in which case only the residual
/// factor `S_k` is kept.
#[derive(Debug, Clone)]
pub struct LanczosFactorization {
    n: usize,
    block_size: usize,
    max_dim: usize,
    blocks: Vec<DenseBlock>,
    diag: Vec<DenseBlock>,
    sub: Vec<DenseBlock>,
    terminal: bool,
    rng: ChaCha8Rng,
    breakdowns: usize,
    matvecs: u64,
    max_diag_asymmetry: f64,
    orth_time: Duration,
    mv_time: Duration,
}

impl LanczosFactorization {
    /// Starts from a seeded random orthonormal block. `max_dim` (clamped to
    /// `n`) caps the number of stored basis vectors, pending block included.
    pub fn new(n: usize, block_size: usize, max_dim: usize, seed: u64) -> Result<Self> {
        let max_dim = max_dim.min(n);
        if block_size == 0 || block_size > max_dim {
            return Err(Error::InvalidArgument(format!(
                "block size {block_size} must be in 1..={max_dim}"
            )));
        }
        let q1 = init_block(n, block_size, seed)?;
        Ok(Self::from_block(q1, max_dim, seed))
    }

    /// Starts from a caller-supplied block with orthonormal columns.
    pub fn from_block(q1: DenseBlock, max_dim: usize, seed: u64) -> Self {
        let n = q1.nrows();
        Self {
            n,
            block_size: q1.ncols(),
            max_dim: max_dim.min(n),
            blocks: vec![q1],
            diag: Vec::new(),
            sub: Vec::new(),
            terminal: false,
            rng: seeded_rng(seed, REPLACEMENT_STREAM),
            breakdowns: 0,
            matvecs: 0,
            max_diag_asymmetry: 0.0,
            orth_time: Duration::ZERO,
            mv_time: Duration::ZERO,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    /// Number of completed block steps.
    pub fn k(&self) -> usize {
        self.diag.len()
    }

    /// Columns of `Q_k`.
    pub fn basis_dim(&self) -> usize {
        self.blocks[..self.k()].iter().map(DenseBlock::ncols).sum()
    }

    /// Columns stored, including the pending block.
    pub fn stored_dim(&self) -> usize {
        self.blocks.iter().map(DenseBlock::ncols).sum()
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn diag_blocks(&self) -> &[DenseBlock] {
        &self.diag
    }

    /// `S_1..S_k`; `S_k` is the residual factor of the last step.
    pub fn sub_blocks(&self) -> &[DenseBlock] {
        &self.sub
    }

    /// `Q_1..Q_k`.
    pub fn basis_blocks(&self) -> &[DenseBlock] {
        &self.blocks[..self.k()]
    }

    /// `Q_{k+1}` if one is stored.
    pub fn pending_block(&self) -> Option<&DenseBlock> {
        self.blocks.get(self.k())
    }

    pub fn breakdowns(&self) -> usize {
        self.breakdowns
    }

    /// Products with `A` performed by operator applications.
    pub fn matvecs(&self) -> u64 {
        self.matvecs
    }

    pub fn orth_time(&self) -> Duration {
        self.orth_time
    }

    pub fn mv_time(&self) -> Duration {
        self.mv_time
    }

    /// Largest `||D_j - D_j^T||_max / ||D_j||_max` seen before symmetrization.
    pub fn max_diag_asymmetry(&self) -> f64 {
        self.max_diag_asymmetry
    }

    fn next_width(&self, stored: usize) -> usize {
        if stored + self.block_size <= self.max_dim {
            self.block_size
        } else if self.max_dim == self.n {
            self.n - stored
        } else {
            0
        }
    }

    /// Block steps still possible before the size limit.
    pub fn remaining_steps(&self) -> usize {
        if self.terminal {
            return 0;
        }
        let mut stored = self.stored_dim();
        let mut steps = 0;
        loop {
            steps += 1;
            let w = self.next_width(stored);
            if w == 0 {
                return steps;
            }
            stored += w;
        }
    }

    /// Performs `nblocks` block Lanczos steps.
    pub fn expand(&mut self, op: &Operator<'_>, nblocks: usize) -> Result<()> {
        if nblocks > self.remaining_steps() {
            return Err(Error::MaxDimExceeded {
                max_dim: self.max_dim,
            });
        }
        for _ in 0..nblocks {
            self.step(op)?;
        }
        Ok(())
    }

    fn step(&mut self, op: &Operator<'_>) -> Result<()> {
        let j = self.k();
        let wj = self.blocks[j].ncols();

        let t = Instant::now();
        let mut z = op.apply(&self.blocks[j])?;
        self.mv_time += t.elapsed();
        self.matvecs += op.products_per_column() * wj as u64;

        let t = Instant::now();
        let ref_norms: Vec<f64> = z.columns().map(norm2).collect();
        let mut dj = DenseBlock::zeros(wj, wj);
        for _ in 0..2 {
            let coeffs: Vec<DenseBlock> =
                self.blocks[..=j].iter().map(|q| q.t_matmul(&z)).collect();
            for (q, h) in self.blocks[..=j].iter().zip(&coeffs) {
                z.sub_matmul(q, h);
            }
            dj.add_scaled(1.0, &coeffs[j]);
        }
        let scale = dj.max_abs();
        if scale > 0.0 {
            let asym = (0..wj)
                .flat_map(|a| (0..wj).map(move |b| (a, b)))
                .fold(0.0f64, |m, (a, b)| m.max((dj[(a, b)] - dj[(b, a)]).abs()));
            self.max_diag_asymmetry = self.max_diag_asymmetry.max(asym / scale);
        }
        dj.symmetrize();

        let width = self.next_width(self.stored_dim());
        let (next, s) = self.orthonormalize_remainder(&z, &ref_norms, width);
        self.diag.push(dj);
        self.sub.push(s);
        match next {
            Some(q) => self.blocks.push(q),
            None => self.terminal = true,
        }
        self.orth_time += t.elapsed();
        Ok(())
    }

    /// QR of the projected remainder, column by column. Dependent columns get
    /// a zero diagonal in `S` and, while there is room, a fresh random
    /// direction orthogonal to the whole basis. Returns the next block
    /// (`None` when `width == 0`) and `S` restricted to rows of kept columns.
    fn orthonormalize_remainder(
        &mut self,
        z: &DenseBlock,
        ref_norms: &[f64],
        width: usize,
    ) -> (Option<DenseBlock>, DenseBlock) {
        let w = z.ncols();
        let mut accepted: Vec<Vec<f64>> = Vec::with_capacity(w);
        // rows.len() == accepted.len(); rows[i][c] = S entry of new column i
        let mut rows: Vec<Vec<f64>> = Vec::with_capacity(w);

        for c in 0..w {
            let mut v = z.col(c).to_vec();
            let refs: Vec<&[f64]> = accepted.iter().map(Vec::as_slice).collect();
            let coeffs = project_out_columns(&refs, &mut v);
            for (row, h) in rows.iter_mut().zip(coeffs) {
                row[c] = h;
            }
            let nv = norm2(&v);
            if nv > BREAKDOWN_TOL * ref_norms[c] && nv > f64::MIN_POSITIVE {
                v.iter_mut().for_each(|x| *x /= nv);
                let mut row = vec![0.0; w];
                row[c] = nv;
                accepted.push(v);
                rows.push(row);
                continue;
            }
            self.breakdowns += 1;
            if norm2(z.col(c)) <= BREAKDOWN_TOL * ref_norms[c] {
                // the whole column is rounding noise
                for row in rows.iter_mut() {
                    row[c] = 0.0;
                }
            }
            if width == 0 || accepted.len() >= width {
                continue;
            }
            if let Some(fresh) = self.replacement_vector(&accepted) {
                accepted.push(fresh);
                rows.push(vec![0.0; w]);
            }
        }

        if width > 0 {
            accepted.truncate(width);
            rows.truncate(width);
        }
        let mut s = DenseBlock::zeros(rows.len(), w);
        for (i, row) in rows.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                s[(i, c)] = v;
            }
        }
        if width == 0 {
            return (None, s);
        }
        // no kept column means the basis already spans the whole space
        let next = (!accepted.is_empty())
            .then(|| DenseBlock::from_columns(&accepted).expect("columns share length n"));
        (next, s)
    }

    fn replacement_vector(&mut self, accepted: &[Vec<f64>]) -> Option<Vec<f64>> {
        for _ in 0..3 {
            let mut v = random_column(self.n, &mut self.rng);
            let before = norm2(&v);
            let mut refs: Vec<&[f64]> = self.blocks.iter().flat_map(|b| b.columns()).collect();
            refs.extend(accepted.iter().map(Vec::as_slice));
            project_out_columns(&refs, &mut v);
            let nv = norm2(&v);
            if nv > 1e-8 * before {
                v.iter_mut().for_each(|x| *x /= nv);
                return Some(v);
            }
        }
        None
    }

    /// The projected matrix `T_k`, symmetric with semi-bandwidth `r`.
    pub fn assemble_projected(&self) -> SymBandMatrix {
        let k = self.k();
        let widths: Vec<usize> = self.blocks[..k].iter().map(DenseBlock::ncols).collect();
        let dim: usize = widths.iter().sum();
        let mut t = SymBandMatrix::zeros(dim, self.block_size);
        let mut off = 0;
        for i in 0..k {
            let d = &self.diag[i];
            for b in 0..widths[i] {
                for a in b..widths[i] {
                    t.set(off + a, off + b, d[(a, b)]);
                }
            }
            if i + 1 < k {
                let s = &self.sub[i];
                let next_off = off + widths[i];
                for b in 0..widths[i] {
                    for a in 0..s.nrows() {
                        let v = s[(a, b)];
                        if v != 0.0 {
                            t.set(next_off + a, off + b, v);
                        }
                    }
                }
            }
            off += widths[i];
        }
        t
    }

    /// `Q_k w` for a coefficient block `w` with `basis_dim()` rows.
    pub fn lift(&self, w: &DenseBlock) -> DenseBlock {
        let mut out = DenseBlock::zeros(self.n, w.ncols());
        let mut off = 0;
        for q in self.basis_blocks() {
            let part = w.row_range(off, q.ncols());
            out.add_scaled(1.0, &q.matmul(&part));
            off += q.ncols();
        }
        out
    }

    /// All stored basis vectors, pending block included, as one block.
    pub fn stored_basis(&self) -> DenseBlock {
        let cols: Vec<Vec<f64>> = self
            .blocks
            .iter()
            .flat_map(|b| b.columns().map(<[f64]>::to_vec))
            .collect();
        DenseBlock::from_columns(&cols).expect("columns share length n")
    }

    /// Largest `|(Q^T Q - I)_ij|` over the stored basis.
    pub fn orthogonality_error(&self) -> f64 {
        self.stored_basis().orthogonality_error()
    }
}
