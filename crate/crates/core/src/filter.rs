//! Chebyshev approximations of the indicator function of an interval.
//!
//! A filter is the truncated Chebyshev series of the indicator of
//! `[alpha, beta]`, expressed in the coordinate `t = (x - c) / e` that maps
//! the spectral bounds `[lambda_min, lambda_max]` onto `[-1, 1]`. Applying it
//! to a matrix uses the block form of Clenshaw's backward recurrence, so the
//! only access to `A` is through sparse products.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::sparse::{DenseBlock, SparseSymMatrix};

/// Library default for the relative tolerance of the degree rule.
///
/// Any value in `(0.312233, 0.312320]` yields degrees 49, 49, 61, 98 and 308
/// on the PARSEC test intervals exercised in the unit tests.
pub const DEFAULT_EPSILON: f64 = 0.31227;

/// Largest degree the automatic rule will return.
pub const DEFAULT_MAX_DEGREE: usize = 1000;

/// Estimated extremes of the spectrum and the affine map onto `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    lambda_min: f64,
    lambda_max: f64,
    center: f64,
    half_width: f64,
}

impl SpectralBounds {
    pub fn new(lambda_min: f64, lambda_max: f64) -> Result<Self> {
        if !(lambda_min.is_finite() && lambda_max.is_finite()) || lambda_min >= lambda_max {
            return Err(Error::InvalidArgument(format!(
                "spectral bounds need lambda_min < lambda_max, got [{lambda_min}, {lambda_max}]"
            )));
        }
        Ok(Self {
            lambda_min,
            lambda_max,
            center: 0.5 * (lambda_min + lambda_max),
            half_width: 0.5 * (lambda_max - lambda_min),
        })
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda_min
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// `c = (lambda_min + lambda_max) / 2`.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// `e = (lambda_max - lambda_min) / 2`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Maps `x` to `(x - c) / e`.
    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.center) / self.half_width
    }

    pub fn from_unit(&self, t: f64) -> f64 {
        self.center + self.half_width * t
    }
}

/// How the filter degree is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DegreeRule {
    Fixed(usize),
    /// Smallest `m` with `||p_m - phi|| < epsilon ||phi||`, capped at `max_degree`.
    Auto {
        epsilon: f64,
        max_degree: usize,
    },
}

impl Default for DegreeRule {
    fn default() -> Self {
        DegreeRule::Auto {
            epsilon: DEFAULT_EPSILON,
            max_degree: DEFAULT_MAX_DEGREE,
        }
    }
}

/// Result of the automatic degree rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeChoice {
    pub degree: usize,
    /// Set when no degree up to the cap met the tolerance.
    pub clamped: bool,
}

fn check_unit_interval(alpha_s: f64, beta_s: f64) -> Result<()> {
    if !(-1.0..=1.0).contains(&alpha_s) || !(-1.0..=1.0).contains(&beta_s) {
        return Err(Error::interval(
            alpha_s,
            beta_s,
            "endpoints must lie in [-1, 1]",
        ));
    }
    if alpha_s >= beta_s {
        return Err(Error::interval(alpha_s, beta_s, "need alpha < beta"));
    }
    Ok(())
}

/// Chebyshev coefficients `b_0..=b_m` of the indicator of `[alpha_s, beta_s]`.
pub fn indicator_coefficients(alpha_s: f64, beta_s: f64, m: usize) -> Result<Vec<f64>> {
    check_unit_interval(alpha_s, beta_s)?;
    Ok(indicator_coefficients_unchecked(alpha_s, beta_s, m))
}

fn indicator_coefficients_unchecked(alpha_s: f64, beta_s: f64, m: usize) -> Vec<f64> {
    let ta = alpha_s.acos();
    let tb = beta_s.acos();
    let mut b = Vec::with_capacity(m + 1);
    b.push((ta - tb) / PI);
    for i in 1..=m {
        let fi = i as f64;
        b.push(2.0 * ((fi * ta).sin() - (fi * tb).sin()) / (fi * PI));
    }
    b
}

/// Squared weighted Chebyshev norm of `sum b_i T_i`:
/// `pi b_0^2 + (pi / 2) sum_{i >= 1} b_i^2`.
pub fn chebyshev_norm_sq(coeffs: &[f64]) -> f64 {
    match coeffs.split_first() {
        None => 0.0,
        Some((b0, rest)) => PI * b0 * b0 + 0.5 * PI * rest.iter().map(|b| b * b).sum::<f64>(),
    }
}

/// Smallest degree `m >= 1` whose truncated series is within `epsilon`
/// (relative, weighted Chebyshev 2-norm) of the indicator.
pub fn select_degree(
    alpha_s: f64,
    beta_s: f64,
    epsilon: f64,
    max_degree: usize,
) -> Result<DegreeChoice> {
    check_unit_interval(alpha_s, beta_s)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be in (0, 1), got {epsilon}"
        )));
    }
    if max_degree < 1 {
        return Err(Error::InvalidArgument(
            "max_degree must be at least 1".into(),
        ));
    }
    // ||phi - p_m||^2 = ||phi||^2 - ||p_m||^2 by orthogonality; ||phi||^2 is
    // the weighted measure of the interval
    let phi_sq = alpha_s.acos() - beta_s.acos();
    let threshold = epsilon * phi_sq.sqrt();
    let b = indicator_coefficients_unchecked(alpha_s, beta_s, max_degree);
    let mut partial = PI * b[0] * b[0];
    let mut tail = vec![0.0; max_degree + 1];
    for m in 1..=max_degree {
        partial += 0.5 * PI * b[m] * b[m];
        tail[m] = (phi_sq - partial).max(0.0);
    }

    for m in 1..=max_degree {
        if tail[m].sqrt() < threshold {
            return Ok(DegreeChoice {
                degree: m,
                clamped: false,
            });
        }
    }
    Ok(DegreeChoice {
        degree: max_degree,
        clamped: true,
    })
}

/// Clenshaw evaluation of `sum_i coeffs[i] T_i(t)`.
pub fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let Some((&b0, rest)) = coeffs.split_first() else {
        return 0.0;
    };
    let (mut y1, mut y2) = (0.0, 0.0);
    for &bj in rest.iter().rev() {
        let y = 2.0 * t * y1 - y2 + bj;
        y2 = y1;
        y1 = y;
    }
    t * y1 - y2 + b0
}

/// A polynomial `p(t) = sum b_i T_i(t)` in the mapped coordinate of `bounds`,
/// normally the truncated series of the indicator of `[alpha, beta]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevFilter {
    coeffs: Vec<f64>,
    alpha: f64,
    beta: f64,
    alpha_s: f64,
    beta_s: f64,
    bounds: SpectralBounds,
    clamped: bool,
}

/// Builds the indicator filter for `[alpha, beta]` on the given bounds.
///
/// Endpoints are mapped with `(x - c) / e` and clipped to `[-1, 1]`. The
/// bounds are trusted as-is.
pub fn build_filter(
    bounds: &SpectralBounds,
    alpha: f64,
    beta: f64,
    rule: DegreeRule,
) -> Result<ChebyshevFilter> {
    if !(alpha.is_finite() && beta.is_finite()) || alpha >= beta {
        return Err(Error::interval(alpha, beta, "need alpha < beta"));
    }
    if beta <= bounds.lambda_min() || alpha >= bounds.lambda_max() {
        return Err(Error::OutsideSpectrum {
            alpha,
            beta,
            lambda_min: bounds.lambda_min(),
            lambda_max: bounds.lambda_max(),
        });
    }
    let alpha_s = bounds.to_unit(alpha).clamp(-1.0, 1.0);
    let beta_s = bounds.to_unit(beta).clamp(-1.0, 1.0);
    let (degree, clamped) = match rule {
        DegreeRule::Fixed(0) => {
            return Err(Error::InvalidArgument(
                "filter degree must be at least 1".into(),
            ));
        }
        DegreeRule::Fixed(m) => (m, false),
        DegreeRule::Auto {
            epsilon,
            max_degree,
        } => {
            let choice = select_degree(alpha_s, beta_s, epsilon, max_degree)?;
            (choice.degree, choice.clamped)
        }
    };
    Ok(ChebyshevFilter {
        coeffs: indicator_coefficients(alpha_s, beta_s, degree)?,
        alpha,
        beta,
        alpha_s,
        beta_s,
        bounds: *bounds,
        clamped,
    })
}

impl ChebyshevFilter {
    /// A filter with explicit coefficients; the interval is the whole of
    /// `bounds`. Degree zero is allowed here (a constant).
    pub fn from_coefficients(bounds: &SpectralBounds, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(
                "coefficients must be non-empty and finite".into(),
            ));
        }
        Ok(Self {
            coeffs,
            alpha: bounds.lambda_min(),
            beta: bounds.lambda_max(),
            alpha_s: -1.0,
            beta_s: 1.0,
            bounds: *bounds,
            clamped: false,
        })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.alpha, self.beta)
    }

    pub fn mapped_interval(&self) -> (f64, f64) {
        (self.alpha_s, self.beta_s)
    }

    pub fn bounds(&self) -> &SpectralBounds {
        &self.bounds
    }

    /// True when the automatic rule hit its degree cap.
    pub fn degree_clamped(&self) -> bool {
        self.clamped
    }

    /// `p((z - c) / e)` for `z` in original coordinates.
    pub fn evaluate_scalar(&self, z: f64) -> f64 {
        clenshaw(&self.coeffs, self.bounds.to_unit(z))
    }

    /// `p(t)` for `t` already in `[-1, 1]` coordinates.
    pub fn evaluate_mapped(&self, t: f64) -> f64 {
        clenshaw(&self.coeffs, t)
    }

    /// Filter value at the interval endpoints; the smaller of the two
    /// separates wanted from unwanted Ritz values of `p(A)`.
    pub fn separation_threshold(&self) -> f64 {
        self.evaluate_mapped(self.alpha_s)
            .min(self.evaluate_mapped(self.beta_s))
    }

    /// `p(A~) X` with `A~ = (A - cI) / e`, using exactly `degree` block products.
    pub fn apply_filter(&self, a: &SparseSymMatrix, x: &DenseBlock) -> Result<DenseBlock> {
        if x.nrows() != a.n() {
            return Err(Error::DimensionMismatch {
                expected: a.n(),
                found: x.nrows(),
            });
        }
        let m = self.degree();
        let b = &self.coeffs;
        if m == 0 {
            let mut out = x.clone();
            out.scale(b[0]);
            return Ok(out);
        }
        let scale = 1.0 / self.bounds.half_width();
        let shift = self.bounds.center() * scale;

        // y1 = Y_{j+1}, y2 = Y_{j+2}; Y_m = b_m X
        let mut y1 = x.clone();
        y1.scale(b[m]);
        let mut y2 = DenseBlock::zeros(x.nrows(), x.ncols());
        for j in (1..m).rev() {
            let ay = a.spmm_block(&y1)?;
            // Y_j = 2 A~ Y_{j+1} - Y_{j+2} + b_j X, written into y2's storage
            let bj = b[j];
            for (((out, &av), &yv), &xv) in y2
                .as_mut_slice()
                .iter_mut()
                .zip(ay.as_slice())
                .zip(y1.as_slice())
                .zip(x.as_slice())
            {
                *out = 2.0 * (scale * av - shift * yv) - *out + bj * xv;
            }
            std::mem::swap(&mut y1, &mut y2);
        }
        let ay = a.spmm_block(&y1)?;
        let mut out = y2;
        for (((o, &av), &yv), &xv) in out
            .as_mut_slice()
            .iter_mut()
            .zip(ay.as_slice())
            .zip(y1.as_slice())
            .zip(x.as_slice())
        {
            *o = scale * av - shift * yv - *o + b[0] * xv;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> SpectralBounds {
        SpectralBounds::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn full_interval_is_constant_one() {
        let b = indicator_coefficients(-1.0, 1.0, 12).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15);
        assert!(b[1..].iter().all(|v| v.abs() < 1e-15));
        let choice = select_degree(-1.0, 1.0, 0.3, 50).unwrap();
        assert_eq!(
            choice,
            DegreeChoice {
                degree: 1,
                clamped: false
            }
        );
    }

    #[test]
    fn left_end_interval_coefficients() {
        let b = indicator_coefficients(-1.0, -0.5, 2).unwrap();
        assert!((b[0] - 1.0 / 3.0).abs() < 1e-15);
        let want = 2.0 * (PI.sin() - (2.0 * PI / 3.0).sin()) / PI;
        assert!((b[1] - want).abs() < 1e-15);
        assert!((b[1] + 0.551329).abs() < 1e-6);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(indicator_coefficients(0.3, 0.1, 3).is_err());
        assert!(indicator_coefficients(-1.5, 0.1, 3).is_err());
        assert!(select_degree(0.1, 0.3, 0.0, 10).is_err());
        assert!(select_degree(0.1, 0.3, 1.0, 10).is_err());
        assert!(select_degree(0.1, 0.3, 0.5, 0).is_err());
    }

    #[test]
    fn norm_of_simple_series() {
        assert!((chebyshev_norm_sq(&[1.0]) - PI).abs() < 1e-15);
        assert!((chebyshev_norm_sq(&[0.0, 1.0]) - PI / 2.0).abs() < 1e-15);
        assert_eq!(chebyshev_norm_sq(&[]), 0.0);
    }

    #[test]
    fn degree_cap_sets_flag() {
        let choice = select_degree(0.1, 0.1001, 0.01, 5).unwrap();
        assert_eq!(
            choice,
            DegreeChoice {
                degree: 5,
                clamped: true
            }
        );
    }

    #[test]
    fn parsec_automatic_degrees() {
        // (interval, spectral interval, reported degree)
        let rows = [
            ((-0.645, -0.0053), (-1.21, 32.8), 49),
            ((-0.650, -0.0096), (-1.23, 32.7), 49),
            ((-0.640, -0.0028), (-1.21, 49.8), 61),
            ((-0.660, -0.3300), (-1.20, 43.1), 98),
            ((-0.640, 0.0000), (-1.25, 1300.0), 308),
        ];
        for ((a, b), (lo, hi), m) in rows {
            let bounds = SpectralBounds::new(lo, hi).unwrap();
            let f = build_filter(&bounds, a, b, DegreeRule::default()).unwrap();
            assert_eq!(f.degree(), m, "interval [{a}, {b}]");
        }
    }

    #[test]
    fn bounds_map_constants() {
        let b = SpectralBounds::new(-1.21, 32.8).unwrap();
        assert!((b.center() - 15.795).abs() < 1e-12);
        assert!((b.half_width() - 17.005).abs() < 1e-12);
        assert!((b.from_unit(b.to_unit(3.7)) - 3.7).abs() < 1e-14);
    }

    #[test]
    fn build_filter_errors() {
        let b = unit();
        assert!(matches!(
            build_filter(&b, 50.0, 60.0, DegreeRule::default()),
            Err(Error::OutsideSpectrum { .. })
        ));
        assert!(matches!(
            build_filter(&b, 0.3, 0.1, DegreeRule::default()),
            Err(Error::InvalidInterval { .. })
        ));
        assert!(build_filter(&b, 0.1, 0.3, DegreeRule::Fixed(0)).is_err());
    }

    #[test]
    fn build_filter_clips_endpoints() {
        let f = build_filter(&unit(), -3.0, -0.5, DegreeRule::Fixed(10)).unwrap();
        assert_eq!(f.mapped_interval(), (-1.0, -0.5));
        assert_eq!(f.interval(), (-3.0, -0.5));
        assert_eq!(f.coefficients().len(), 11);
    }

    #[test]
    fn scalar_evaluation_trivial_cases() {
        let one = ChebyshevFilter::from_coefficients(&unit(), vec![1.0]).unwrap();
        assert_eq!(one.evaluate_scalar(0.123), 1.0);
        let t1 = ChebyshevFilter::from_coefficients(&unit(), vec![0.0, 1.0]).unwrap();
        assert!((t1.evaluate_scalar(0.7) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn apply_constant_filter_uses_no_products() {
        let a = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let f =
            ChebyshevFilter::from_coefficients(&SpectralBounds::new(1.0, 3.0).unwrap(), vec![1.0])
                .unwrap();
        let x = DenseBlock::from_fn(3, 2, |i, j| (i + 3 * j) as f64);
        assert_eq!(f.apply_filter(&a, &x).unwrap(), x);
        assert_eq!(a.matvec_count(), 0);
    }

    #[test]
    fn apply_counts_degree_products_per_column() {
        let a = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0]);
        let bounds = SpectralBounds::new(1.0, 5.0).unwrap();
        let f = build_filter(&bounds, 1.5, 3.5, DegreeRule::Fixed(48)).unwrap();
        let x = DenseBlock::identity(5);
        let y = f.apply_filter(&a, &x).unwrap();
        assert_eq!(a.matvec_count(), 5 * 48);
        for i in 0..5 {
            for j in 0..5 {
                let want = if i == j {
                    f.evaluate_scalar((i + 1) as f64)
                } else {
                    0.0
                };
                assert!((y[(i, j)] - want).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn apply_rejects_dimension_mismatch() {
        let a = SparseSymMatrix::identity(4);
        let f = build_filter(&unit(), 0.0, 0.5, DegreeRule::Fixed(4)).unwrap();
        assert!(f.apply_filter(&a, &DenseBlock::zeros(3, 1)).is_err());
    }
}
