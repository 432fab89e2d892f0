use super::{LanczosFactorization, Operator};
use crate::dense_eig::sym_band_eig;
use crate::error::{Error, Result};
use crate::filter::SpectralBounds;
use crate::sparse::SparseSymMatrix;

/// Default number of single-vector Lanczos steps for bounds estimation.
pub const DEFAULT_BOUNDS_STEPS: usize = 50;

/// Fraction of the estimated width added at each end.
const SAFETY_MARGIN: f64 = 0.005;

const BOUNDS_STREAM_OFFSET: u64 = 0x5eed;

/// Extreme Ritz values of a short Lanczos run and their residual norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremeRitz {
    pub theta_min: f64,
    pub theta_max: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub steps: usize,
    pub matvecs: u64,
}

/// Runs `min(steps, n)` single-vector Lanczos steps with full
/// reorthogonalization and reports the extreme Ritz pairs.
pub fn extreme_ritz_values(a: &SparseSymMatrix, steps: usize, seed: u64) -> Result<ExtremeRitz> {
    let n = a.n();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    let steps = steps.clamp(1, n);
    let mut fact = LanczosFactorization::new(n, 1, steps, seed.wrapping_add(BOUNDS_STREAM_OFFSET))?;
    let op = Operator::Plain(a);
    let todo = fact.remaining_steps();
    fact.expand(&op, todo)?;

    let eig = sym_band_eig(&fact.assemble_projected())?;
    let dim = eig.values.len();
    let s = &fact.sub_blocks()[fact.k() - 1];
    let rho = |j: usize| -> f64 {
        if s.nrows() == 0 {
            0.0
        } else {
            (s[(0, 0)] * eig.vectors[(dim - 1, j)]).abs()
        }
    };
    Ok(ExtremeRitz {
        theta_min: eig.values[0],
        theta_max: eig.values[dim - 1],
        rho_min: rho(0),
        rho_max: rho(dim - 1),
        steps: fact.k(),
        matvecs: fact.matvecs(),
    })
}

/// Spectral interval `[theta_min - rho_min, theta_max + rho_max]` widened by
/// a small margin on each side.
pub fn estimate_spectral_bounds(
    a: &SparseSymMatrix,
    steps: usize,
    seed: u64,
) -> Result<(SpectralBounds, u64)> {
    let x = extreme_ritz_values(a, steps, seed)?;
    let lo = x.theta_min - x.rho_min;
    let hi = x.theta_max + x.rho_max;
    let width = hi - lo;
    if width <= 1e-14 * lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateSpectrum(0.5 * (lo + hi)));
    }
    let bounds = SpectralBounds::new(lo - SAFETY_MARGIN * width, hi + SAFETY_MARGIN * width)?;
    Ok((bounds, x.matvecs))
}
