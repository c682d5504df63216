//! Quasi-symmetry diagnostics.
//!
//! A count matrix is quasi-symmetric when it factors as `C = diag(d) S` with
//! `S` symmetric. For such matrices `d` is the leading eigenvector of
//! `A^-1 C` (so influence weights recover `d`), the Bradley-Terry model fits
//! exactly with abilities `log d`, and the undamped chain `C A^-1` is
//! reversible. The checks here test each side of that equivalence
//! independently: the triplet product identity, a spanning-tree
//! factorization, and detailed balance of the stationary chain.

use std::collections::VecDeque;

use crate::bradley_terry::{fit_bt, DEFAULT_FIT_MAX_ITER, DEFAULT_FIT_TOL};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::rankings::{
    influence_weight, require_undamped_chain, stationary_vector, transition_matrix, CountMatrix, DampingFactor,
};
use crate::scalar::Scalar;

const GAP_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq)]
pub struct TripletViolation<T> {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `c_ij c_jk c_ki`
    pub lhs: T,
    /// `c_ji c_kj c_ik`
    pub rhs: T,
    pub relative_gap: T,
}

/// Result of checking `c_ij c_jk c_ki = c_ji c_kj c_ik` for all `i < j < k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TripletReport<T> {
    pub violations: Vec<TripletViolation<T>>,
    /// Pairs where exactly one of `c_ij`, `c_ji` is zero.
    pub one_sided_pairs: Vec<(usize, usize)>,
    pub max_relative_gap: T,
    pub is_quasi_symmetric: bool,
}

fn relative_gap<T: Scalar>(a: T, b: T) -> T {
    let floor = T::lit(GAP_FLOOR).max(T::min_positive_value());
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Evaluates the triplet identity on every triple. Triples where both
/// products vanish pass; pairs with exactly one zero direction count as
/// violations with gap 1.
pub fn check_triplets<T: Scalar>(c: &CountMatrix<T>, tol: T) -> TripletReport<T> {
    let n = c.n();
    let mut violations = Vec::new();
    let mut max_gap = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let lhs = c.get(i, j) * c.get(j, k) * c.get(k, i);
                let rhs = c.get(j, i) * c.get(k, j) * c.get(i, k);
                let gap = relative_gap(lhs, rhs);
                max_gap = max_gap.max(gap);
                if gap > tol {
                    violations.push(TripletViolation {
                        i,
                        j,
                        k,
                        lhs,
                        rhs,
                        relative_gap: gap,
                    });
                }
            }
        }
    }
    let one_sided_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| (c.get(i, j) > T::zero()) != (c.get(j, i) > T::zero()))
        .collect();
    if !one_sided_pairs.is_empty() {
        max_gap = max_gap.max(T::one());
    }
    TripletReport {
        is_quasi_symmetric: violations.is_empty() && one_sided_pairs.is_empty() && max_gap <= tol,
        violations,
        one_sided_pairs,
        max_relative_gap: max_gap,
    }
}

/// `C = diag(d) S` with `d_1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct QsDecomposition<T> {
    pub d: Vec<T>,
    pub s: DenseMatrix<T>,
    /// `max |C - diag(d) S|`.
    pub residual: T,
}

impl<T: Scalar> QsDecomposition<T> {
    pub fn recompose(&self) -> DenseMatrix<T> {
        let n = self.d.len();
        DenseMatrix::from_fn(n, n, |i, j| self.d[i] * self.s[(i, j)])
    }

    /// The other-sided factorization `C = S' D'` with `S' = D S D` and
    /// `D' = D^-1`.
    pub fn right_factors(&self) -> (DenseMatrix<T>, Vec<T>) {
        let n = self.d.len();
        let s = DenseMatrix::from_fn(n, n, |i, j| self.d[i] * self.s[(i, j)] * self.d[j]);
        (s, self.d.iter().map(|&x| T::one() / x).collect())
    }

    /// `log d` re-centered to sum zero (gauge-free).
    pub fn centered_log_d(&self) -> Vec<T> {
        let logs: Vec<T> = self.d.iter().map(|x| x.ln()).collect();
        let mean = logs.iter().copied().sum::<T>() / T::from_count(logs.len());
        logs.into_iter().map(|x| x - mean).collect()
    }
}

/// Recovers `d` along a breadth-first spanning tree of the reciprocal
/// graph (edge `{i, j}` when both `c_ij` and `c_ji` are positive) using
/// `d_j = d_i c_ji / c_ij`, then checks that `diag(d)^-1 C` is symmetric.
///
/// Success requires the worst relative asymmetry `|s_ij - s_ji| /
/// max(s_ij, s_ji)` to be at most `tol`.
pub fn decompose_qs<T: Scalar>(c: &CountMatrix<T>, tol: T) -> Result<QsDecomposition<T>> {
    let n = c.n();
    let labels = c.labels();
    let mut d = vec![T::zero(); n];
    let mut seen = vec![false; n];
    d[0] = T::one();
    seen[0] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if !seen[j] && c.get(i, j) > T::zero() && c.get(j, i) > T::zero() {
                d[j] = d[i] * c.get(j, i) / c.get(i, j);
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    if seen.iter().any(|&s| !s) {
        let (inside, outside): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| seen[i]);
        return Err(Error::Disconnected {
            components: vec![
                inside.iter().map(|&i| labels[i].clone()).collect(),
                outside.iter().map(|&i| labels[i].clone()).collect(),
            ],
        });
    }

    let raw = DenseMatrix::from_fn(n, n, |i, j| c.get(i, j) / d[i]);
    let mut worst = (T::zero(), 0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = relative_gap(raw[(i, j)], raw[(j, i)]);
            if gap > worst.0 {
                worst = (gap, i, j);
            }
        }
    }
    let half = T::lit(0.5);
    let s = DenseMatrix::from_fn(n, n, |i, j| half * (raw[(i, j)] + raw[(j, i)]));
    let residual = DenseMatrix::from_fn(n, n, |i, j| d[i] * s[(i, j)]).max_abs_diff(c.counts())?;
    if worst.0 > tol {
        return Err(Error::NotQuasiSymmetric {
            residual: residual.to_f64_lossy(),
            row: labels[worst.1].clone(),
            col: labels[worst.2].clone(),
        });
    }
    Ok(QsDecomposition { d, s, residual })
}

/// Outcome of checking the eigenvector correspondence on a quasi-symmetric
/// matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremCheck<T> {
    pub decomposition: QsDecomposition<T>,
    /// `|A^-1 C d - d|_inf / |d|_inf`.
    pub eigen_residual: T,
    /// Max-norm gap between influence weight and `d / sum(d)`.
    pub influence_gap: T,
    /// Max-norm gap between fitted abilities and centered `log d`.
    pub ability_gap: T,
    pub deviance: T,
}

/// Verifies that `d` from the factorization is the leading eigenvector of
/// `A^-1 C`, that influence weights are proportional to `d`, and that the
/// Bradley-Terry abilities are centered `log d` (gaps up to `1e-6`).
pub fn verify_theorem<T: Scalar>(c: &CountMatrix<T>, tol: T) -> Result<TheoremCheck<T>> {
    let qs = decompose_qs(c, tol)?;
    let sums = require_undamped_chain(c)?;
    let n = c.n();
    let d = &qs.d;
    let scaled = c.counts().mul_vec(d)?;
    let d_inf = d.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let eigen_residual = (0..n)
        .map(|i| (scaled[i] / sums[i] - d[i]).abs())
        .fold(T::zero(), T::max)
        / d_inf;
    if eigen_residual > tol {
        return Err(Error::NotQuasiSymmetric {
            residual: eigen_residual.to_f64_lossy(),
            row: c.labels()[0].clone(),
            col: c.labels()[0].clone(),
        });
    }

    let iw = influence_weight(c, T::lit(crate::matrix::DEFAULT_TOL).max(T::epsilon() * T::lit(16.0)))?;
    let d_sum: T = d.iter().copied().sum();
    let influence_gap = iw
        .scores
        .iter()
        .zip(d)
        .fold(T::zero(), |m, (&w, &di)| m.max((w - di / d_sum).abs()));

    let fit = fit_bt(
        c,
        T::lit(DEFAULT_FIT_TOL).max(T::epsilon() * T::lit(16.0)),
        DEFAULT_FIT_MAX_ITER,
    )?;
    let ability_gap = fit
        .abilities
        .mu
        .iter()
        .zip(qs.centered_log_d())
        .fold(T::zero(), |m, (&a, b)| m.max((a - b).abs()));

    let bridge_tol = T::lit(1e-6);
    if influence_gap > bridge_tol || ability_gap > bridge_tol {
        return Err(Error::Domain(format!(
            "eigenvector correspondence failed: influence gap {:e}, ability gap {:e}",
            influence_gap.to_f64_lossy(),
            ability_gap.to_f64_lossy()
        )));
    }
    Ok(TheoremCheck {
        decomposition: qs,
        eigen_residual,
        influence_gap,
        ability_gap,
        deviance: fit.deviance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReversibilityReport<T> {
    pub reversible: bool,
    /// Worst relative detailed-balance gap `|pi_j p_ij - pi_i p_ji|`.
    pub max_gap: T,
    pub worst_pair: Option<(usize, usize)>,
}

/// Detailed balance `pi_j p_ij = pi_i p_ji` for a column-stochastic chain
/// (`p_ij` is the probability of moving into `i` from `j`). Gaps are
/// relative to the larger flow; pairs with no flow either way pass.
pub fn is_reversible_chain<T: Scalar>(p: &DenseMatrix<T>, tol: T) -> Result<ReversibilityReport<T>> {
    let pi = stationary_vector(p, T::lit(crate::matrix::DEFAULT_TOL).max(T::epsilon() * T::lit(16.0)))?;
    let n = p.rows();
    let mut worst = (T::zero(), None);
    for i in 0..n {
        for j in (i + 1)..n {
            let forward = pi[j] * p[(i, j)];
            let backward = pi[i] * p[(j, i)];
            if forward == T::zero() && backward == T::zero() {
                continue;
            }
            let gap = relative_gap(forward, backward);
            if gap > worst.0 {
                worst = (gap, Some((i, j)));
            }
        }
    }
    Ok(ReversibilityReport {
        reversible: worst.0 <= tol,
        max_gap: worst.0,
        worst_pair: worst.1,
    })
}

/// Reversibility of the undamped chain `C A^-1`.
pub fn is_reversible<T: Scalar>(c: &CountMatrix<T>, tol: T) -> Result<ReversibilityReport<T>> {
    is_reversible_chain(&transition_matrix(c, DampingFactor::undamped())?, tol)
}
