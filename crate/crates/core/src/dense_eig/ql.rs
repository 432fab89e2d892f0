use crate::error::{Error, Result};
use crate::sparse::DenseBlock;

const MAX_SWEEPS: usize = 30;

/// Implicitly shifted QL on the symmetric tridiagonal matrix with diagonal
/// `diag` and subdiagonal `offdiag` (`offdiag[i] = T[i+1][i]`).
///
/// `z` is post-multiplied by the accumulated rotations: pass the identity to
/// get the eigenvectors of `T`, or the tridiagonalizing transform to get
/// those of the original matrix. Eigenpairs come back in ascending order.
pub fn tridiag_eig(
    diag: Vec<f64>,
    offdiag: Vec<f64>,
    mut z: DenseBlock,
) -> Result<(Vec<f64>, DenseBlock)> {
    let n = diag.len();
    assert_eq!(
        offdiag.len(),
        n.saturating_sub(1),
        "offdiag must have n - 1 entries"
    );
    assert_eq!(z.ncols(), n, "transform must have n columns");
    if n == 0 {
        return Ok((diag, z));
    }
    let rows = z.nrows();
    let mut d = diag;
    let mut e = offdiag;
    e.push(0.0);

    let mut f = 0.0f64;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_SWEEPS {
                    return Err(Error::NoConvergence { index: l });
                }
                // Wilkinson-type shift from the leading 2x2
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (left, right) = z.as_mut_slice().split_at_mut((i + 1) * rows);
                    let zi = &mut left[i * rows..];
                    let zi1 = &mut right[..rows];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let h = *b;
                        *b = s * *a + c * h;
                        *a = c * *a - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // selection sort keeps the column swaps to at most n - 1
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        for j in i + 1..n {
            if d[j] < d[k] {
                k = j;
            }
        }
        if k != i {
            d.swap(i, k);
            let (left, right) = z.as_mut_slice().split_at_mut(k * rows);
            left[i * rows..(i + 1) * rows].swap_with_slice(&mut right[..rows]);
        }
    }
    Ok((d, z))
}
