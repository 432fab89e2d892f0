#![allow(dead_code)]

use cheblanczos::{DenseBlock, SparseSymMatrix, Symmetry};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 5-point Laplacian on an `m x m` grid with Dirichlet boundary.
pub fn laplacian_2d(m: usize) -> SparseSymMatrix {
    let idx = |i: usize, j: usize| i * m + j;
    let mut t = Vec::new();
    for i in 0..m {
        for j in 0..m {
            t.push((idx(i, j), idx(i, j), 4.0));
            if i + 1 < m {
                t.push((idx(i + 1, j), idx(i, j), -1.0));
            }
            if j + 1 < m {
                t.push((idx(i, j + 1), idx(i, j), -1.0));
            }
        }
    }
    SparseSymMatrix::from_triplets(m * m, &t, Symmetry::Symmetric).unwrap()
}

/// Analytic spectrum of `laplacian_2d(m)`, ascending.
pub fn laplacian_spectrum(m: usize) -> Vec<f64> {
    let h = std::f64::consts::PI / (m + 1) as f64;
    let mut v: Vec<f64> = (1..=m)
        .flat_map(|i| {
            (1..=m).map(move |j| 4.0 - 2.0 * (i as f64 * h).cos() - 2.0 * (j as f64 * h).cos())
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Random symmetric sparse matrix: nonzero diagonal plus off-diagonal
/// entries with the given density, values uniform in `[-1, 1]`.
pub fn random_symmetric(n: usize, density: f64, seed: u64) -> SparseSymMatrix {
    let mut r = rng(seed);
    let mut t = Vec::new();
    for i in 0..n {
        t.push((i, i, r.random_range(-1.0..1.0)));
        for j in 0..i {
            if r.random::<f64>() < density {
                t.push((i, j, r.random_range(-1.0..1.0)));
            }
        }
    }
    SparseSymMatrix::from_triplets(n, &t, Symmetry::Symmetric).unwrap()
}

pub fn random_block(n: usize, k: usize, seed: u64) -> DenseBlock {
    let mut r = rng(seed);
    DenseBlock::from_fn(n, k, |_, _| r.random_range(-1.0..1.0))
}

pub fn to_nalgebra(m: &DenseBlock) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> DenseBlock {
    DenseBlock::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Dense eigendecomposition oracle: ascending values, matching columns.
pub fn dense_eig(m: &DenseBlock) -> (Vec<f64>, DenseBlock) {
    let eig = SymmetricEigen::new(to_nalgebra(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseBlock::from_fn(m.nrows(), m.ncols(), |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

pub fn dense_eigenvalues(m: &DenseBlock) -> Vec<f64> {
    dense_eig(m).0
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const K15_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
const G7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = K15_WEIGHTS[7] * f(c);
    let mut g = G7_WEIGHTS[3] * f(c);
    for i in 0..7 {
        let x = h * GK_NODES[i];
        let s = f(c - x) + f(c + x);
        k += K15_WEIGHTS[i] * s;
        if i % 2 == 1 {
            g += G7_WEIGHTS[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature to absolute tolerance `tol`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth == 0 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, 0.5 * tol, depth - 1) + rec(f, m, b, 0.5 * tol, depth - 1)
    }
    rec(f, a, b, tol, 40)
}

/// Forward three-term recurrence summation of a Chebyshev series.
pub fn chebyshev_forward(coeffs: &[f64], t: f64) -> f64 {
    let mut prev = 1.0;
    let mut cur = t;
    let mut sum = coeffs.first().copied().unwrap_or(0.0);
    for (i, &c) in coeffs.iter().enumerate().skip(1) {
        if i > 1 {
            let next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        sum += c * cur;
    }
    sum
}

pub fn relative_max_diff(a: &DenseBlock, b: &DenseBlock) -> f64 {
    let scale = a.max_abs().max(b.max_abs()).max(f64::MIN_POSITIVE);
    let mut d = a.clone();
    d.add_scaled(-1.0, b);
    d.max_abs() / scale
}

/// Dense eigenvalues of a sparse matrix.
pub fn sparse_spectrum(a: &SparseSymMatrix) -> Vec<f64> {
    dense_eigenvalues(&a.to_dense())
}

/// Intervals whose endpoints sit mid-gap between consecutive eigenvalues.
/// `spans` are `(first index, count)` pairs into the ascending spectrum.
pub fn gap_interval(spectrum: &[f64], first: usize, count: usize) -> (f64, f64) {
    let lo = if first == 0 {
        spectrum[0] - 0.5
    } else {
        0.5 * (spectrum[first - 1] + spectrum[first])
    };
    let last = first + count - 1;
    let hi = if last + 1 >= spectrum.len() {
        spectrum[last] + 0.5
    } else {
        0.5 * (spectrum[last] + spectrum[last + 1])
    };
    (lo, hi)
}
