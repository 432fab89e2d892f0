mod common;

use cheblanczos::dense_eig::sym_band_eig;
use cheblanczos::lanczos::{
    check_convergence, extreme_ritz_values, init_block, recover_eigenpairs, Target,
};
use cheblanczos::{
    build_filter, estimate_spectral_bounds, filtered_lanczos, plain_lanczos, ChebyshevFilter,
    DegreeRule, DenseBlock, Error, LanczosConfig, LanczosFactorization, Operator, SparseSymMatrix,
    SpectralBounds,
};
use common::*;

fn diag5() -> SparseSymMatrix {
    SparseSymMatrix::from_diagonal(&[1.0, 2.0, 3.0, 4.0, 5.0])
}

fn assert_close(got: &[f64], want: &[f64], tol: f64) {
    assert_eq!(got.len(), want.len(), "{got:?} vs {want:?}");
    for (g, w) in got.iter().zip(want) {
        assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
    }
}

/// `||op Q_k - Q_k T_k - Q_{k+1} S_k E_k^T||_max`.
fn factorization_error(fact: &LanczosFactorization, op: &Operator<'_>) -> f64 {
    let q = {
        let cols: Vec<Vec<f64>> = fact
            .basis_blocks()
            .iter()
            .flat_map(|b| b.columns().map(<[f64]>::to_vec))
            .collect();
        DenseBlock::from_columns(&cols).unwrap()
    };
    let t = fact.assemble_projected().to_dense();
    let mut lhs = op.apply(&q).unwrap();
    lhs.sub_matmul(&q, &t);
    if let Some(next) = fact.pending_block() {
        let s = &fact.sub_blocks()[fact.k() - 1];
        let w_last = s.ncols();
        let mut tail = DenseBlock::zeros(q.ncols(), next.ncols());
        let off = q.ncols() - w_last;
        for a in 0..s.nrows() {
            for b in 0..w_last {
                tail[(off + b, a)] = s[(a, b)];
            }
        }
        lhs.sub_matmul(next, &tail.transpose());
    }
    lhs.max_abs()
}

#[test]
fn init_block_properties() {
    let q = init_block(5, 3, 1).unwrap();
    assert!(q.orthogonality_error() < 1e-14);
    assert_eq!(init_block(5, 3, 1).unwrap(), q);
    assert_ne!(init_block(5, 3, 2).unwrap(), q);
    let square = init_block(6, 6, 3).unwrap();
    assert!(square.orthogonality_error() < 1e-14);
    assert!(init_block(4, 5, 0).is_err());
    assert!(init_block(4, 0, 0).is_err());
}

#[test]
fn scalar_lanczos_on_diagonal() {
    let a = diag5();
    let op = Operator::Plain(&a);
    let mut fact = LanczosFactorization::new(5, 1, 5, 0).unwrap();
    assert_eq!(fact.remaining_steps(), 5);
    fact.expand(&op, 5).unwrap();
    assert!(fact.is_terminal());
    let t = fact.assemble_projected();
    assert_eq!(t.semi_bandwidth(), 1);
    for i in 0..5 {
        assert_eq!(t.get(i, i), fact.diag_blocks()[i][(0, 0)]);
        if i < 4 {
            assert_eq!(t.get(i + 1, i), fact.sub_blocks()[i][(0, 0)]);
        }
    }
    let eig = sym_band_eig(&t).unwrap();
    assert_close(&eig.values, &[1.0, 2.0, 3.0, 4.0, 5.0], 1e-12);
    assert!(matches!(
        fact.expand(&op, 1),
        Err(Error::MaxDimExceeded { .. })
    ));
}

#[test]
fn single_step_projection_is_d1() {
    let a = random_symmetric(40, 0.2, 1);
    let op = Operator::Plain(&a);
    let mut fact = LanczosFactorization::new(40, 3, 40, 5).unwrap();
    fact.expand(&op, 1).unwrap();
    assert_eq!(fact.assemble_projected().to_dense(), fact.diag_blocks()[0]);
}

#[test]
fn identity_filter_breaks_down_cleanly() {
    let a = random_symmetric(30, 0.2, 2);
    let bounds = SpectralBounds::new(-10.0, 10.0).unwrap();
    let f = ChebyshevFilter::from_coefficients(&bounds, vec![1.0]).unwrap();
    let op = Operator::Filtered {
        matrix: &a,
        filter: &f,
    };
    let mut fact = LanczosFactorization::new(30, 3, 30, 0).unwrap();
    fact.expand(&op, 1).unwrap();
    let d1 = &fact.diag_blocks()[0];
    let mut diff = d1.clone();
    diff.add_scaled(-1.0, &DenseBlock::identity(3));
    assert!(diff.max_abs() < 1e-14);
    assert!(fact.sub_blocks()[0].max_abs() == 0.0);
    assert_eq!(fact.breakdowns(), 3);
    assert_eq!(fact.pending_block().unwrap().ncols(), 3);
    assert!(fact.orthogonality_error() < 1e-14);
}

#[test]
fn laplacian_factorization_invariants() {
    let a = laplacian_2d(30);
    let op = Operator::Plain(&a);
    let mut fact = LanczosFactorization::new(900, 3, 900, 7).unwrap();
    fact.expand(&op, 60).unwrap();
    assert_eq!(fact.k(), 60);
    assert_eq!(fact.basis_dim(), 180);
    assert!(fact.orthogonality_error() <= 1e-12);
    assert!(fact.max_diag_asymmetry() <= 1e-13);
    assert!(factorization_error(&fact, &op) < 1e-12);
    assert_eq!(fact.matvecs(), 180);
}

#[test]
fn filtered_factorization_invariants() {
    let a = laplacian_2d(20);
    let (bounds, _) = estimate_spectral_bounds(&a, 50, 0).unwrap();
    let f = build_filter(&bounds, 1.0, 1.3, DegreeRule::Fixed(30)).unwrap();
    let op = Operator::Filtered {
        matrix: &a,
        filter: &f,
    };
    let mut fact = LanczosFactorization::new(400, 3, 400, 1).unwrap();
    fact.expand(&op, 20).unwrap();
    assert!(fact.orthogonality_error() <= 1e-12);
    assert!(factorization_error(&fact, &op) < 1e-11);
    assert_eq!(fact.matvecs(), 30 * 3 * 20);
}

#[test]
fn narrow_last_block_when_space_runs_out() {
    let a = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 2.0, 2.0, 3.0]);
    let op = Operator::Plain(&a);
    let mut fact = LanczosFactorization::new(5, 3, 5, 0).unwrap();
    assert_eq!(fact.remaining_steps(), 2);
    fact.expand(&op, 2).unwrap();
    assert_eq!(fact.basis_dim(), 5);
    assert!(fact.orthogonality_error() < 1e-14);
}

#[test]
fn full_space_residual_estimates_vanish() {
    let a = diag5();
    let op = Operator::Plain(&a);
    let mut fact = LanczosFactorization::new(5, 1, 5, 3).unwrap();
    fact.expand(&op, 5).unwrap();
    for (lo, hi) in [(0.0, 10.0), (1.5, 3.5), (4.5, 5.5)] {
        let ritz = check_convergence(
            &fact,
            Target::Plain {
                alpha: lo,
                beta: hi,
            },
            1e-10,
            5,
        )
        .unwrap();
        assert!(ritz.converged);
        assert!(ritz.residual_estimates.iter().all(|&r| r < 1e-12));
    }
    let ritz = check_convergence(
        &fact,
        Target::Plain {
            alpha: 1.5,
            beta: 3.5,
        },
        1e-10,
        0,
    )
    .unwrap();
    let mut wanted: Vec<f64> = ritz.wanted.iter().map(|&i| ritz.values[i]).collect();
    wanted.sort_by(f64::total_cmp);
    assert_close(&wanted, &[2.0, 3.0], 1e-12);

    let rec = recover_eigenpairs(&fact, &a, &ritz, (1.5, 3.5), 5.0, true).unwrap();
    assert_close(&rec.values, &[2.0, 3.0], 1e-12);
    assert!(rec.max_residual() <= 1e-12);
    assert_eq!(rec.matvecs, 2);
}

#[test]
fn identity_matrix_recovers_one() {
    let a = SparseSymMatrix::identity(6);
    let op = Operator::Plain(&a);
    let mut fact = LanczosFactorization::new(6, 2, 6, 0).unwrap();
    fact.expand(&op, 1).unwrap();
    let ritz = check_convergence(
        &fact,
        Target::Plain {
            alpha: 0.5,
            beta: 1.5,
        },
        1e-10,
        1,
    )
    .unwrap();
    let rec = recover_eigenpairs(&fact, &a, &ritz, (0.5, 1.5), 1.0, true).unwrap();
    assert_close(&rec.values, &[1.0, 1.0], 1e-15);
}

#[test]
fn bounds_on_small_and_laplacian_matrices() {
    let x = extreme_ritz_values(&diag5(), 5, 0).unwrap();
    assert!((x.theta_min - 1.0).abs() < 1e-12 && (x.theta_max - 5.0).abs() < 1e-12);
    assert!(x.rho_min < 1e-12 && x.rho_max < 1e-12);
    let (b, mv) = estimate_spectral_bounds(&diag5(), 50, 0).unwrap();
    assert_eq!(mv, 5);
    assert!(b.lambda_min() < 1.0 && b.lambda_min() > 0.97);
    assert!(b.lambda_max() > 5.0 && b.lambda_max() < 5.03);

    let spec = laplacian_spectrum(30);
    let (b, mv) = estimate_spectral_bounds(&laplacian_2d(30), 50, 0).unwrap();
    assert_eq!(mv, 50);
    assert!(b.lambda_min() <= spec[0] && b.lambda_max() >= spec[899]);

    let zero = SparseSymMatrix::from_diagonal(&[0.0; 4]);
    assert!(matches!(
        estimate_spectral_bounds(&zero, 10, 0),
        Err(Error::DegenerateSpectrum(_))
    ));
    let scaled = SparseSymMatrix::from_diagonal(&[2.5; 7]);
    assert!(matches!(
        estimate_spectral_bounds(&scaled, 10, 0),
        Err(Error::DegenerateSpectrum(_))
    ));
}

fn cfg(r: usize) -> LanczosConfig {
    LanczosConfig {
        block_size: r,
        measure_orthogonality: true,
        ..LanczosConfig::default()
    }
}

#[test]
fn diagonal_interval_both_solvers() {
    let a = diag5();
    for r in [1, 2] {
        let f = filtered_lanczos(&a, 1.5, 3.5, &cfg(r)).unwrap();
        assert!(f.converged);
        assert_close(&f.eigenvalues, &[2.0, 3.0], 1e-10);
        assert!(f.max_residual() <= 1e-10);
        let p = plain_lanczos(&a, 1.5, 3.5, &cfg(r)).unwrap();
        assert!(p.converged);
        assert_close(&p.eigenvalues, &[2.0, 3.0], 1e-10);
    }
    let top = filtered_lanczos(&a, 4.5, 5.5, &cfg(1)).unwrap();
    assert_close(&top.eigenvalues, &[5.0], 1e-10);
}

#[test]
fn multiplicity_three_is_captured() {
    let a = SparseSymMatrix::from_diagonal(&[1.0, 2.0, 2.0, 2.0, 3.0]);
    let res = filtered_lanczos(&a, 1.5, 2.5, &cfg(3)).unwrap();
    assert!(res.converged);
    assert_close(&res.eigenvalues, &[2.0, 2.0, 2.0], 1e-10);
    assert!(res.eigenvectors.orthogonality_error() < 1e-10);
}

#[test]
fn multiplicity_in_a_larger_matrix() {
    let mut d: Vec<f64> = (0..300).map(|i| i as f64 * 0.01).collect();
    d[150] = 1.505;
    d[151] = 1.505;
    d[152] = 1.505;
    let a = SparseSymMatrix::from_diagonal(&d);
    let res = filtered_lanczos(&a, 1.4955, 1.5355, &cfg(3)).unwrap();
    assert!(res.converged);
    assert_close(&res.eigenvalues, &[1.505, 1.505, 1.505, 1.53], 1e-10);
}

#[test]
fn interval_errors() {
    let a = diag5();
    assert!(matches!(
        filtered_lanczos(&a, 10.0, 20.0, &cfg(1)),
        Err(Error::OutsideSpectrum { .. })
    ));
    assert!(matches!(
        plain_lanczos(&a, 10.0, 20.0, &cfg(1)),
        Err(Error::OutsideSpectrum { .. })
    ));
    assert!(matches!(
        filtered_lanczos(&a, 3.5, 1.5, &cfg(1)),
        Err(Error::InvalidInterval { .. })
    ));
    let small = LanczosConfig {
        max_dim: 5,
        ..cfg(3)
    };
    assert!(matches!(
        filtered_lanczos(&a, 1.5, 3.5, &small),
        Err(Error::InvalidArgument(_))
    ));
    assert!(filtered_lanczos(&a, 1.5, 3.5, &cfg(6)).is_err());
}

#[test]
fn laplacian_median_interval() {
    let a = laplacian_2d(30);
    let spec = laplacian_spectrum(30);
    // twenty eigenvalues below the multiple eigenvalue at 4
    let last_below = spec.iter().rposition(|&v| v < 4.0 - 1e-9).unwrap();
    let (lo, hi) = gap_interval(&spec, last_below - 19, 20);
    let before = a.matvec_count();
    let res = filtered_lanczos(&a, lo, hi, &cfg(3)).unwrap();
    assert!(res.converged);
    assert_close(&res.eigenvalues, &spec[last_below - 19..=last_below], 1e-10);
    assert!(res.max_residual() <= 1e-10);
    assert!(res.stats.orthogonality.unwrap() <= 1e-12);

    let s = &res.stats;
    assert_eq!(s.mv, (3 * s.degree.unwrap() * s.iters) as u64);
    assert_eq!(a.matvec_count() - before, s.total_mv());
    assert_eq!(s.basis_dim, 3 * s.iters);
}

#[test]
fn laplacian_right_end_agrees_across_solvers() {
    let a = laplacian_2d(30);
    let spec = laplacian_spectrum(30);
    let (lo, hi) = gap_interval(&spec, 890, 10);
    let f = filtered_lanczos(&a, lo, hi, &cfg(3)).unwrap();
    let p = plain_lanczos(&a, lo, hi, &cfg(3)).unwrap();
    assert!(f.converged && p.converged);
    assert_close(&f.eigenvalues, &spec[890..], 1e-10);
    assert_close(&p.eigenvalues, &f.eigenvalues, 1e-9);
}

#[test]
fn same_seed_same_answer() {
    let a = random_symmetric(200, 0.05, 3);
    let spec = sparse_spectrum(&a);
    let (lo, hi) = gap_interval(&spec, 90, 8);
    let c = LanczosConfig { seed: 42, ..cfg(3) };
    let r1 = filtered_lanczos(&a, lo, hi, &c).unwrap();
    let r2 = filtered_lanczos(&a, lo, hi, &c).unwrap();
    assert_eq!(r1.eigenvalues, r2.eigenvalues);
    assert_eq!(r1.eigenvectors, r2.eigenvectors);
    assert_eq!(r1.stats.iters, r2.stats.iters);
    assert_close(&r1.eigenvalues, &spec[90..98], 1e-10);
}
