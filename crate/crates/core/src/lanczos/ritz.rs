use super::LanczosFactorization;
use crate::dense_eig::{sym_band_eig, sym_eig_dense};
use crate::error::Result;
use crate::sparse::{norm2, DenseBlock, SparseSymMatrix};

/// Which Ritz pairs of `T_k` the solver is after.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Target {
    /// Filtered operator: pairs whose value reaches the separation threshold.
    Filtered { threshold: f64 },
    /// Unfiltered operator: pairs with value inside `[alpha, beta]`.
    Plain { alpha: f64, beta: f64 },
}

impl Target {
    fn is_wanted(&self, theta: f64) -> bool {
        match *self {
            Target::Filtered { threshold } => theta >= threshold,
            Target::Plain { alpha, beta } => theta >= alpha && theta <= beta,
        }
    }

    /// Ordering key for unwanted pairs; smaller means closer to being wanted.
    fn distance(&self, theta: f64) -> f64 {
        match *self {
            Target::Filtered { threshold } => threshold - theta,
            Target::Plain { alpha, beta } => (alpha - theta).max(theta - beta),
        }
    }
}

/// Ritz decomposition of `T_k` with residual estimates.
#[derive(Debug, Clone)]
pub struct RitzSet {
    /// Ritz values, descending.
    pub values: Vec<f64>,
    /// Eigenvectors of `T_k`, one column per value.
    pub vectors: DenseBlock,
    /// `||S_k E_k^T w||` per pair.
    pub residual_estimates: Vec<f64>,
    pub wanted: Vec<usize>,
    /// Nearest unwanted pairs that must also converge.
    pub extras: Vec<usize>,
    /// Absolute threshold the estimates were compared against.
    pub threshold: f64,
    pub converged: bool,
}

impl RitzSet {
    /// Largest residual estimate over wanted and extra pairs.
    pub fn max_checked_residual(&self) -> f64 {
        self.wanted
            .iter()
            .chain(&self.extras)
            .fold(0.0, |m, &i| m.max(self.residual_estimates[i]))
    }
}

/// Diagonalizes `T_k` and tests the wanted pairs plus `extra_ritz` of their
/// nearest unwanted neighbours against `tol * ||T_k||_max`.
pub fn check_convergence(
    fact: &LanczosFactorization,
    target: Target,
    tol: f64,
    extra_ritz: usize,
) -> Result<RitzSet> {
    let t = fact.assemble_projected();
    let eig = sym_band_eig(&t)?;
    let dim = eig.values.len();
    let order: Vec<usize> = (0..dim).rev().collect();
    let values: Vec<f64> = order.iter().map(|&i| eig.values[i]).collect();
    let vectors = eig.vectors.select_columns(&order);

    let s_last = &fact.sub_blocks()[fact.k() - 1];
    let w_last = s_last.ncols();
    let last_rows = vectors.row_range(dim - w_last, w_last);
    let residual_estimates: Vec<f64> = if s_last.nrows() == 0 {
        vec![0.0; dim]
    } else {
        s_last.matmul(&last_rows).columns().map(norm2).collect()
    };

    let wanted: Vec<usize> = (0..dim).filter(|&i| target.is_wanted(values[i])).collect();
    let mut unwanted: Vec<usize> = (0..dim).filter(|&i| !target.is_wanted(values[i])).collect();
    unwanted.sort_by(|&a, &b| {
        target
            .distance(values[a])
            .total_cmp(&target.distance(values[b]))
    });
    unwanted.truncate(extra_ritz);

    let threshold = tol * t.max_abs();
    let converged = wanted
        .iter()
        .chain(&unwanted)
        .all(|&i| residual_estimates[i] <= threshold);
    Ok(RitzSet {
        values,
        vectors,
        residual_estimates,
        wanted,
        extras: unwanted,
        threshold,
        converged,
    })
}

/// Eigenpairs of `A` recovered from the wanted Ritz subspace.
#[derive(Debug, Clone)]
pub struct Recovered {
    /// Ascending, restricted to `[alpha, beta]`.
    pub values: Vec<f64>,
    pub vectors: DenseBlock,
    /// `||A v - lambda v|| / norm_estimate`.
    pub residuals: Vec<f64>,
    /// Residuals of every candidate, including those outside the interval.
    pub candidate_residuals: Vec<f64>,
    pub matvecs: u64,
}

impl Recovered {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }

    pub fn max_candidate_residual(&self) -> f64 {
        self.candidate_residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// Lifts the wanted Ritz vectors to `R^n` and extracts eigenpairs of `A`.
///
/// With `rayleigh_ritz` the lifted block is orthonormal and `A` is projected
/// onto it, which separates eigenvalues the filter maps close together.
/// Without it the Ritz values themselves are taken as eigenvalues.
pub fn recover_eigenpairs(
    fact: &LanczosFactorization,
    a: &SparseSymMatrix,
    ritz: &RitzSet,
    interval: (f64, f64),
    norm_estimate: f64,
    rayleigh_ritz: bool,
) -> Result<Recovered> {
    let (alpha, beta) = interval;
    let w = ritz.vectors.select_columns(&ritz.wanted);
    let v = fact.lift(&w);
    if v.ncols() == 0 {
        return Ok(Recovered {
            values: Vec::new(),
            vectors: v,
            residuals: Vec::new(),
            candidate_residuals: Vec::new(),
            matvecs: 0,
        });
    }
    let av = a.spmm_block(&v)?;
    let matvecs = v.ncols() as u64;

    let (mut lambdas, u, au) = if rayleigh_ritz {
        let mut h = v.t_matmul(&av);
        h.symmetrize();
        let eig = sym_eig_dense(&h)?;
        (eig.values, v.matmul(&eig.vectors), av.matmul(&eig.vectors))
    } else {
        let lambdas = ritz.wanted.iter().map(|&i| ritz.values[i]).collect();
        (lambdas, v, av)
    };

    let scale = if norm_estimate > 0.0 {
        norm_estimate
    } else {
        1.0
    };
    let mut candidates: Vec<(f64, usize, f64)> = Vec::with_capacity(lambdas.len());
    for (j, &lambda) in lambdas.iter().enumerate() {
        let uj = u.col(j);
        let res: f64 = au
            .col(j)
            .iter()
            .zip(uj)
            .map(|(x, y)| (x - lambda * y).powi(2))
            .sum::<f64>()
            .sqrt()
            / (norm2(uj) * scale);
        candidates.push((lambda, j, res));
    }
    let candidate_residuals = candidates.iter().map(|c| c.2).collect();
    candidates.retain(|&(l, _, _)| l >= alpha && l <= beta);
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));

    let cols: Vec<Vec<f64>> = candidates
        .iter()
        .map(|&(_, j, _)| {
            let uj = u.col(j);
            let nrm = norm2(uj);
            uj.iter().map(|x| x / nrm).collect()
        })
        .collect();
    let vectors = if cols.is_empty() {
        DenseBlock::zeros(fact.n(), 0)
    } else {
        DenseBlock::from_columns(&cols)?
    };
    lambdas = candidates.iter().map(|c| c.0).collect();
    Ok(Recovered {
        values: lambdas,
        vectors,
        residuals: candidates.iter().map(|c| c.2).collect(),
        candidate_residuals,
        matvecs,
    })
}
