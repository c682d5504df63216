//! Shared generators and independent oracles for the integration tests.
//!
//! The oracles avoid the crate's power iteration and pseudoinverse:
//! stationary vectors come from direct elimination, derivatives from
//! central differences.

#![allow(dead_code, clippy::needless_range_loop)]

use qsrank::{CountMatrix, DenseMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer counts with about 30% zeros off the cycle `i -> i+1`, which is
/// always present so the matrix is irreducible. Diagonals are random too.
pub fn random_irreducible(n: usize, seed: u64) -> CountMatrix {
    let mut r = rng(seed ^ 0x5eed_0000);
    let mut c = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            r.random_range(0..5) as f64
        } else if r.random_bool(0.3) {
            0.0
        } else {
            r.random_range(1..=20) as f64
        }
    });
    for i in 0..n {
        let j = (i + 1) % n;
        if c[(j, i)] == 0.0 {
            c[(j, i)] = 1.0 + r.random_range(0..3) as f64;
        }
    }
    let c = CountMatrix::unlabeled(c).unwrap();
    assert!(c.is_irreducible());
    c
}

/// Strictly positive real counts.
pub fn random_positive(n: usize, seed: u64) -> CountMatrix {
    let mut r = rng(seed ^ 0xface);
    CountMatrix::unlabeled(DenseMatrix::from_fn(n, n, |_, _| r.random_range(0.5..20.0))).unwrap()
}

/// `diag(d) S` with `S` symmetric and every entry, diagonal included,
/// positive.
pub fn random_qs_positive(n: usize, seed: u64) -> CountMatrix {
    let mut r = rng(seed ^ 0x9500);
    let d: Vec<f64> = (0..n).map(|_| r.random_range(0.2..5.0)).collect();
    let mut s = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = r.random_range(0.5..20.0);
            s[(i, j)] = x;
            s[(j, i)] = x;
        }
    }
    CountMatrix::unlabeled(DenseMatrix::from_fn(n, n, |i, j| d[i] * s[(i, j)])).unwrap()
}

/// Solves `M x = b` by Gaussian elimination with partial pivoting.
pub fn solve(m: &DenseMatrix, b: &[f64]) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = m.to_rows();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        x.swap(col, pivot);
        assert!(a[col][col].abs() > 1e-300, "singular system");
        for row in (col + 1)..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        let s: f64 = ((col + 1)..n).map(|k| a[col][k] * x[k]).sum();
        x[col] = (x[col] - s) / a[col][col];
    }
    x
}

/// Column-stochastic `C A^-1`.
pub fn transition(c: &DenseMatrix) -> DenseMatrix {
    let n = c.rows();
    let sums: Vec<f64> = (0..n).map(|j| (0..n).map(|i| c[(i, j)]).sum()).collect();
    DenseMatrix::from_fn(n, n, |i, j| c[(i, j)] / sums[j])
}

/// Sum-one stationary vector of an irreducible column-stochastic `P` by
/// Grassmann-Taksar-Heyman elimination. It never subtracts, so even tiny
/// entries come out to near machine precision, which central differences
/// at small steps need.
pub fn stationary(p: &DenseMatrix) -> Vec<f64> {
    let n = p.rows();
    // q[a][b]: probability of moving from state a to state b
    let mut q: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| p[(b, a)]).collect()).collect();
    for k in (1..n).rev() {
        let s: f64 = (0..k).map(|j| q[k][j]).sum();
        for i in 0..k {
            q[i][k] /= s;
        }
        for i in 0..k {
            for j in 0..k {
                q[i][j] += q[i][k] * q[k][j];
            }
        }
    }
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    for j in 1..n {
        x[j] = (0..j).map(|i| x[i] * q[i][j]).sum();
    }
    let total: f64 = x.iter().sum();
    x.iter().map(|v| v / total).collect()
}

/// Same vector from a dense solve with the last equation of
/// `(I - P) pi = 0` replaced by `sum(pi) = 1`.
pub fn stationary_by_solve(p: &DenseMatrix) -> Vec<f64> {
    let n = p.rows();
    let mut m = DenseMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - p[(i, j)]);
    for j in 0..n {
        m[(n - 1, j)] = 1.0;
    }
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;
    solve(&m, &b)
}

/// Influence weight `normalize(A^-1 pi)` by direct solve.
pub fn iw_direct(c: &DenseMatrix) -> Vec<f64> {
    let n = c.rows();
    let pi = stationary(&transition(c));
    let raw: Vec<f64> = (0..n).map(|j| pi[j] / (0..n).map(|i| c[(i, j)]).sum::<f64>()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

/// `C + t F_ij`: `t` results move from `j` beating `i` to `i` beating `j`.
pub fn perturbed(c: &DenseMatrix, i: usize, j: usize, t: f64) -> DenseMatrix {
    let mut out = c.clone();
    out[(i, j)] += t;
    out[(j, i)] -= t;
    out
}

/// Five-point central difference of a vector-valued function of `t`,
/// `(-f(2h) + 8 f(h) - 8 f(-h) + f(-2h)) / 12h`. The `O(h^4)` truncation
/// keeps the oracle sharp near points where a log weight has large
/// curvature, which the three-point rule misses by `h^2 f'''/6`.
pub fn central_diff(f: impl Fn(f64) -> Vec<f64>, h: f64) -> Vec<f64> {
    let (p2, p1, m1, m2) = (f(2.0 * h), f(h), f(-h), f(-2.0 * h));
    (0..p1.len())
        .map(|k| (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * h))
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Circular tournament covariance entry at circular distance `d`, from the
/// pseudoinverse of the cycle Laplacian: `(n^2 - 1 - 6 d (n - d)) / (6 k n)`.
pub fn circular_entry(n: usize, k: usize, d: usize) -> f64 {
    let (n, k, d) = (n as f64, k as f64, d as f64);
    (n * n - 1.0 - 6.0 * d * (n - d)) / (6.0 * k * n)
}
