//! Block Lanczos with full reorthogonalization, filtered or plain.

mod bounds;
mod factorization;
mod ritz;

use std::time::{Duration, Instant};

pub use bounds::{
    estimate_spectral_bounds, extreme_ritz_values, ExtremeRitz, DEFAULT_BOUNDS_STEPS,
};
pub use factorization::{init_block, LanczosFactorization};
pub use ritz::{check_convergence, recover_eigenpairs, Recovered, RitzSet, Target};

use crate::error::{Error, Result};
use crate::filter::{build_filter, ChebyshevFilter, DegreeRule, SpectralBounds};
use crate::sparse::{DenseBlock, SparseSymMatrix};

/// The operator whose Krylov space is built.
#[derive(Debug, Clone, Copy)]
pub enum Operator<'a> {
    Plain(&'a SparseSymMatrix),
    Filtered {
        matrix: &'a SparseSymMatrix,
        filter: &'a ChebyshevFilter,
    },
}

impl Operator<'_> {
    pub fn matrix(&self) -> &SparseSymMatrix {
        match self {
            Operator::Plain(a) => a,
            Operator::Filtered { matrix, .. } => matrix,
        }
    }

    pub fn apply(&self, x: &DenseBlock) -> Result<DenseBlock> {
        match self {
            Operator::Plain(a) => a.spmm_block(x),
            Operator::Filtered { matrix, filter } => filter.apply_filter(matrix, x),
        }
    }

    /// Products with `A` per column per application.
    pub fn products_per_column(&self) -> u64 {
        match self {
            Operator::Plain(_) => 1,
            Operator::Filtered { filter, .. } => filter.degree() as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanczosConfig {
    pub block_size: usize,
    /// Relative tolerance for both the Ritz residual estimates and the final
    /// residuals `||A v - lambda v|| / ||A||`.
    pub tol: f64,
    /// Cap on stored basis vectors; clamped to `n`.
    pub max_dim: usize,
    /// Block steps between convergence checks.
    pub check_every: usize,
    /// Unwanted Ritz pairs nearest the wanted set that must converge too.
    pub extra_ritz: usize,
    pub degree: DegreeRule,
    /// Known spectral bounds; estimated when `None`.
    pub bounds: Option<SpectralBounds>,
    pub bounds_steps: usize,
    pub seed: u64,
    /// Rayleigh-Ritz with `A` on the recovered subspace.
    pub rayleigh_ritz: bool,
    /// Measure `max |Q^T Q - I|` once the run ends.
    pub measure_orthogonality: bool,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        Self {
            block_size: 3,
            tol: 1e-10,
            max_dim: 3000,
            check_every: 10,
            extra_ritz: 5,
            degree: DegreeRule::default(),
            bounds: None,
            bounds_steps: DEFAULT_BOUNDS_STEPS,
            seed: 0,
            rayleigh_ritz: true,
            measure_orthogonality: false,
        }
    }
}

impl LanczosConfig {
    fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.block_size == 0 {
            return bad("block size must be at least 1".into());
        }
        if self.block_size > n {
            return bad(format!(
                "block size {} exceeds matrix order {n}",
                self.block_size
            ));
        }
        if self.max_dim < 2 * self.block_size {
            return bad(format!(
                "max_dim {} must be at least twice the block size {}",
                self.max_dim, self.block_size
            ));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tolerance {} must be positive", self.tol));
        }
        if self.check_every == 0 {
            return bad("check interval must be at least 1".into());
        }
        if self.bounds.is_none() && self.bounds_steps == 0 {
            return bad("bounds estimation needs at least one step".into());
        }
        Ok(())
    }
}

/// Counters and timings of one solve.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolveStats {
    /// Block Lanczos steps taken.
    pub iters: usize,
    pub basis_dim: usize,
    pub block_size: usize,
    /// Filter degree; `None` for the plain solver.
    pub degree: Option<usize>,
    pub degree_clamped: bool,
    /// Products with `A` inside the Krylov expansion.
    pub mv: u64,
    pub bounds_mv: u64,
    pub recovery_mv: u64,
    pub checks: usize,
    pub breakdowns: usize,
    /// Smallest filter value counted as wanted (filtered solver).
    pub separation_threshold: Option<f64>,
    pub max_residual_estimate: f64,
    pub max_diag_asymmetry: f64,
    pub orthogonality: Option<f64>,
    pub preproc_time: Duration,
    pub orth_time: Duration,
    pub mv_time: Duration,
    pub ritz_time: Duration,
    pub recovery_time: Duration,
    pub total_time: Duration,
}

impl SolveStats {
    pub fn total_mv(&self) -> u64 {
        self.mv + self.bounds_mv + self.recovery_mv
    }

    fn pct(&self, d: Duration) -> f64 {
        let total = self.total_time.as_secs_f64();
        if total > 0.0 {
            100.0 * d.as_secs_f64() / total
        } else {
            0.0
        }
    }

    pub fn preproc_pct(&self) -> f64 {
        self.pct(self.preproc_time)
    }

    pub fn orth_pct(&self) -> f64 {
        self.pct(self.orth_time)
    }

    pub fn mv_pct(&self) -> f64 {
        self.pct(self.mv_time)
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues in `[alpha, beta]`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors as columns.
    pub eigenvectors: DenseBlock,
    /// `||A v - lambda v|| / max(|lambda_min|, |lambda_max|)`.
    pub residuals: Vec<f64>,
    pub converged: bool,
    pub bounds: SpectralBounds,
    pub stats: SolveStats,
}

impl EigenResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &r| m.max(r))
    }
}

/// Eigenpairs of `a` in `[alpha, beta]` by block Lanczos on `p(A)`.
pub fn filtered_lanczos(
    a: &SparseSymMatrix,
    alpha: f64,
    beta: f64,
    config: &LanczosConfig,
) -> Result<EigenResult> {
    solve(a, alpha, beta, config, true)
}

/// Eigenpairs of `a` in `[alpha, beta]` by block Lanczos on `A` itself.
pub fn plain_lanczos(
    a: &SparseSymMatrix,
    alpha: f64,
    beta: f64,
    config: &LanczosConfig,
) -> Result<EigenResult> {
    solve(a, alpha, beta, config, false)
}

fn solve(
    a: &SparseSymMatrix,
    alpha: f64,
    beta: f64,
    config: &LanczosConfig,
    filtered: bool,
) -> Result<EigenResult> {
    let start = Instant::now();
    let n = a.n();
    if !(alpha.is_finite() && beta.is_finite()) || alpha >= beta {
        return Err(Error::interval(alpha, beta, "need alpha < beta"));
    }
    config.validate(n)?;

    let mut stats = SolveStats {
        block_size: config.block_size,
        ..SolveStats::default()
    };
    let bounds = match config.bounds {
        Some(b) => b,
        None => {
            let (b, mv) = estimate_spectral_bounds(a, config.bounds_steps, config.seed)?;
            stats.bounds_mv = mv;
            b
        }
    };
    if beta <= bounds.lambda_min() || alpha >= bounds.lambda_max() {
        return Err(Error::OutsideSpectrum {
            alpha,
            beta,
            lambda_min: bounds.lambda_min(),
            lambda_max: bounds.lambda_max(),
        });
    }
    let filter = if filtered {
        let f = build_filter(&bounds, alpha, beta, config.degree)?;
        stats.degree = Some(f.degree());
        stats.degree_clamped = f.degree_clamped();
        stats.separation_threshold = Some(f.separation_threshold());
        Some(f)
    } else {
        None
    };
    let (op, target) = match &filter {
        Some(f) => (
            Operator::Filtered {
                matrix: a,
                filter: f,
            },
            Target::Filtered {
                threshold: f.separation_threshold(),
            },
        ),
        None => (Operator::Plain(a), Target::Plain { alpha, beta }),
    };
    let norm_estimate = bounds.lambda_min().abs().max(bounds.lambda_max().abs());
    stats.preproc_time = start.elapsed();

    let mut fact = LanczosFactorization::new(n, config.block_size, config.max_dim, config.seed)?;
    let mut outcome: Option<(Recovered, bool)> = None;
    while outcome.is_none() {
        let steps = config.check_every.min(fact.remaining_steps());
        fact.expand(&op, steps)?;
        let exhausted = fact.remaining_steps() == 0;

        let t = Instant::now();
        let ritz = check_convergence(&fact, target, config.tol, config.extra_ritz)?;
        stats.ritz_time += t.elapsed();
        stats.checks += 1;
        stats.max_residual_estimate = ritz.max_checked_residual();

        if ritz.converged || exhausted {
            let t = Instant::now();
            let rec = recover_eigenpairs(
                &fact,
                a,
                &ritz,
                (alpha, beta),
                norm_estimate,
                config.rayleigh_ritz,
            )?;
            stats.recovery_time += t.elapsed();
            stats.recovery_mv += rec.matvecs;
            let ok = ritz.converged && rec.max_residual() <= config.tol;
            if ok || exhausted {
                outcome = Some((rec, ok));
            }
        }
    }
    let (rec, converged) = outcome.expect("loop exits with an outcome");

    stats.iters = fact.k();
    stats.basis_dim = fact.basis_dim();
    stats.mv = fact.matvecs();
    stats.breakdowns = fact.breakdowns();
    stats.max_diag_asymmetry = fact.max_diag_asymmetry();
    stats.orth_time = fact.orth_time();
    stats.mv_time = fact.mv_time();
    stats.total_time = start.elapsed();
    if config.measure_orthogonality {
        stats.orthogonality = Some(fact.orthogonality_error());
    }

    Ok(EigenResult {
        eigenvalues: rec.values,
        eigenvectors: rec.vectors,
        residuals: rec.residuals,
        converged,
        bounds,
        stats,
    })
}
