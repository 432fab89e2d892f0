use std::path::Path;

use cheblanczos::filter::{DEFAULT_EPSILON, DEFAULT_MAX_DEGREE};
use cheblanczos::lanczos::DEFAULT_BOUNDS_STEPS;
use cheblanczos::{
    filtered_lanczos, plain_lanczos, DegreeRule, EigenResult, Error, LanczosConfig, SparseSymMatrix,
};
use serde::{Deserialize, Serialize};

/// Solver settings shared by `solve` and `bench`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub block_size: usize,
    /// Fixed filter degree; automatic when `None`.
    pub degree: Option<usize>,
    pub epsilon: f64,
    pub max_degree: usize,
    pub tol: f64,
    pub max_dim: usize,
    pub check_every: usize,
    pub extra_ritz: usize,
    pub bounds_steps: usize,
    pub seed: u64,
    pub plain: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        let c = LanczosConfig::default();
        Self {
            block_size: c.block_size,
            degree: None,
            epsilon: DEFAULT_EPSILON,
            max_degree: DEFAULT_MAX_DEGREE,
            tol: c.tol,
            max_dim: c.max_dim,
            check_every: c.check_every,
            extra_ritz: c.extra_ritz,
            bounds_steps: DEFAULT_BOUNDS_STEPS,
            seed: c.seed,
            plain: false,
        }
    }
}

impl SolveOptions {
    pub fn degree_rule(&self) -> DegreeRule {
        match self.degree {
            Some(m) => DegreeRule::Fixed(m),
            None => DegreeRule::Auto {
                epsilon: self.epsilon,
                max_degree: self.max_degree,
            },
        }
    }

    pub fn lanczos_config(&self) -> LanczosConfig {
        LanczosConfig {
            block_size: self.block_size,
            tol: self.tol,
            max_dim: self.max_dim,
            check_every: self.check_every,
            extra_ritz: self.extra_ritz,
            degree: self.degree_rule(),
            bounds: None,
            bounds_steps: self.bounds_steps,
            seed: self.seed,
            rayleigh_ritz: true,
            measure_orthogonality: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    NotConverged,
    Error,
}

/// One solve, with the columns of the accounting tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub matrix: String,
    pub interval: [f64; 2],
    pub eigs: usize,
    /// Filter degree; `None` for the plain solver or a failed run.
    pub m: Option<usize>,
    pub iters: usize,
    /// Products with `A` during Krylov expansion.
    pub mv: u64,
    pub time_s: f64,
    pub max_residual: f64,
    pub preproc_pct: f64,
    pub orth_pct: f64,
    pub mv_pct: f64,
    pub converged: bool,
    pub status: Status,
    pub error: Option<String>,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub basis_dim: usize,
    pub degree_clamped: bool,
    pub bounds: Option<[f64; 2]>,
    pub bounds_mv: u64,
    pub recovery_mv: u64,
    /// All products with `A`, equal to the change of the matrix counter.
    pub total_mv: u64,
    pub config: SolveOptions,
}

impl SolveReport {
    pub fn from_result(
        matrix: &str,
        interval: (f64, f64),
        config: &SolveOptions,
        res: &EigenResult,
    ) -> Self {
        let s = &res.stats;
        Self {
            matrix: matrix.to_string(),
            interval: [interval.0, interval.1],
            eigs: res.eigenvalues.len(),
            m: s.degree,
            iters: s.iters,
            mv: s.mv,
            time_s: s.total_time.as_secs_f64(),
            max_residual: res.max_residual(),
            preproc_pct: s.preproc_pct(),
            orth_pct: s.orth_pct(),
            mv_pct: s.mv_pct(),
            converged: res.converged,
            status: if res.converged {
                Status::Converged
            } else {
                Status::NotConverged
            },
            error: None,
            eigenvalues: res.eigenvalues.clone(),
            residuals: res.residuals.clone(),
            basis_dim: s.basis_dim,
            degree_clamped: s.degree_clamped,
            bounds: Some([res.bounds.lambda_min(), res.bounds.lambda_max()]),
            bounds_mv: s.bounds_mv,
            recovery_mv: s.recovery_mv,
            total_mv: s.total_mv(),
            config: config.clone(),
        }
    }

    pub fn from_error(
        matrix: &str,
        interval: (f64, f64),
        config: &SolveOptions,
        err: &Error,
    ) -> Self {
        Self {
            matrix: matrix.to_string(),
            interval: [interval.0, interval.1],
            eigs: 0,
            m: None,
            iters: 0,
            mv: 0,
            time_s: 0.0,
            max_residual: 0.0,
            preproc_pct: 0.0,
            orth_pct: 0.0,
            mv_pct: 0.0,
            converged: false,
            status: Status::Error,
            error: Some(err.to_string()),
            eigenvalues: Vec::new(),
            residuals: Vec::new(),
            basis_dim: 0,
            degree_clamped: false,
            bounds: None,
            bounds_mv: 0,
            recovery_mv: 0,
            total_mv: 0,
            config: config.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs one solve and keeps the full result for callers that need vectors.
pub fn run_solve(
    a: &SparseSymMatrix,
    matrix: &str,
    interval: (f64, f64),
    opts: &SolveOptions,
) -> Result<(SolveReport, EigenResult), Error> {
    let cfg = opts.lanczos_config();
    let res = if opts.plain {
        plain_lanczos(a, interval.0, interval.1, &cfg)?
    } else {
        filtered_lanczos(a, interval.0, interval.1, &cfg)?
    };
    Ok((SolveReport::from_result(matrix, interval, opts, &res), res))
}

/// Process exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInterval { .. }
        | Error::OutsideSpectrum { .. }
        | Error::InvalidArgument(_) => 2,
        Error::MaxDimExceeded { .. } | Error::NoConvergence { .. } => 3,
        _ => 1,
    }
}

pub const EXIT_NOT_CONVERGED: i32 = 3;

/// File stem used as the matrix name in reports.
pub fn matrix_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}
