//! PageRank (damped and undamped), influence weight, total influence,
//! influence per publication, and the conversions between PageRank and
//! influence weight.
//!
//! Conventions: `c_ij` counts wins of `i` over `j` (citations from `j` to
//! `i`), `A = diag(e^T C)` holds column sums, and `P_alpha = alpha C A^-1 +
//! (1 - alpha)/n e e^T` is column-stochastic.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, column_sums, leading_eigenvector, DenseMatrix, DEFAULT_MAX_ITER};
use crate::scalar::Scalar;

/// Nonnegative square count matrix with one label per row/column.
#[derive(Debug, Clone, PartialEq)]
pub struct CountMatrix<T> {
    counts: DenseMatrix<T>,
    labels: Vec<String>,
}

impl<T: Scalar> CountMatrix<T> {
    pub fn new(counts: DenseMatrix<T>, labels: Vec<String>) -> Result<Self> {
        if !counts.is_square() {
            return Err(Error::Dimension(format!(
                "count matrix must be square, got {}x{}",
                counts.rows(),
                counts.cols()
            )));
        }
        if counts.rows() == 0 {
            return Err(Error::Dimension("count matrix is empty".into()));
        }
        if labels.len() != counts.rows() {
            return Err(Error::Dimension(format!(
                "{} labels for {} players",
                labels.len(),
                counts.rows()
            )));
        }
        if let Some(pos) = counts.as_slice().iter().position(|&x| x < T::zero()) {
            let n = counts.rows();
            return Err(Error::Domain(format!(
                "negative count at ({}, {})",
                labels[pos / n],
                labels[pos % n]
            )));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::Domain(format!("duplicate label `{dup}`")));
        }
        Ok(Self { counts, labels })
    }

    /// Count matrix labelled `1..=n`.
    pub fn unlabeled(counts: DenseMatrix<T>) -> Result<Self> {
        let labels = (1..=counts.rows()).map(|i| i.to_string()).collect();
        Self::new(counts, labels)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        Self::unlabeled(DenseMatrix::from_rows(rows)?)
    }

    pub fn n(&self) -> usize {
        self.counts.rows()
    }

    pub fn counts(&self) -> &DenseMatrix<T> {
        &self.counts
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.counts[(i, j)]
    }

    pub fn column_sums(&self) -> Vec<T> {
        column_sums(&self.counts).expect("count matrix is square")
    }

    /// Same labels, diagonal replaced.
    pub fn with_diagonal(&self, diag: &[T]) -> Result<Self> {
        if diag.len() != self.n() {
            return Err(Error::Dimension("diagonal length".into()));
        }
        let mut counts = self.counts.clone();
        for (i, &d) in diag.iter().enumerate() {
            counts[(i, i)] = d;
        }
        Self::new(counts, self.labels.clone())
    }

    /// Relabels and reorders players: entry `(a, b)` of the result is
    /// entry `(perm[a], perm[b])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.n();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Domain("not a permutation".into()));
        }
        let counts = DenseMatrix::from_fn(n, n, |a, b| self.counts[(perm[a], perm[b])]);
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        Self::new(counts, labels)
    }

    pub fn scaled(&self, factor: T) -> Result<Self> {
        Self::new(self.counts.scale(factor), self.labels.clone())
    }

    /// Strong connectivity of the citation graph (edge `j -> i` when
    /// `c_ij > 0`).
    pub fn is_irreducible(&self) -> bool {
        matrix::is_irreducible(&self.counts)
    }

    pub fn cast<U: Scalar>(&self) -> CountMatrix<U> {
        CountMatrix {
            counts: self.counts.cast(),
            labels: self.labels.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingMethod {
    Pagerank,
    InfluenceWeight,
    TotalInfluence,
    InfluencePerPublication,
}

/// Labelled nonnegative scores summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingVector<T> {
    pub scores: Vec<T>,
    pub labels: Vec<String>,
    pub method: RankingMethod,
}

impl<T: Scalar> RankingVector<T> {
    /// Normalizes `raw` to sum one.
    pub fn normalized(raw: Vec<T>, labels: Vec<String>, method: RankingMethod) -> Result<Self> {
        if raw.len() != labels.len() {
            return Err(Error::Dimension("scores and labels differ in length".into()));
        }
        if raw.iter().any(|x| !x.is_finite() || *x < T::zero()) {
            return Err(Error::Domain("scores must be finite and nonnegative".into()));
        }
        let total: T = raw.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::Domain("scores sum to zero".into()));
        }
        Ok(Self {
            scores: raw.into_iter().map(|x| x / total).collect(),
            labels,
            method,
        })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Damping factor `alpha` in `[0, 1]`; `1` is undamped.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct DampingFactor<T>(T);

impl<T: Scalar> DampingFactor<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha >= T::zero() && alpha <= T::one() {
            Ok(Self(alpha))
        } else {
            Err(Error::Domain(format!("damping factor {alpha} outside [0, 1]")))
        }
    }

    pub fn undamped() -> Self {
        Self(T::one())
    }

    pub fn value(self) -> T {
        self.0
    }

    pub fn is_undamped(self) -> bool {
        self.0 == T::one()
    }
}

impl<T: Scalar> Default for DampingFactor<T> {
    fn default() -> Self {
        Self(T::lit(0.85))
    }
}

/// Fails unless every column sum is positive and the graph is strongly
/// connected, the preconditions of every undamped quantity.
pub(crate) fn require_undamped_chain<T: Scalar>(c: &CountMatrix<T>) -> Result<Vec<T>> {
    let sums = c.column_sums();
    if let Some(j) = sums.iter().position(|&s| !(s > T::zero())) {
        return Err(Error::DanglingNode {
            label: c.labels[j].clone(),
        });
    }
    let forward = matrix::reachable(&c.counts, 0, false);
    let backward = matrix::reachable(&c.counts, 0, true);
    if let Some(i) = (0..c.n()).find(|&i| !(forward[i] && backward[i])) {
        return Err(Error::Reducible {
            label: c.labels[i].clone(),
        });
    }
    Ok(sums)
}

/// Column-stochastic `P_alpha`.
///
/// With `alpha = 1` every column needs a positive sum and the matrix must be
/// irreducible; with `alpha < 1` empty columns become uniform before
/// damping.
pub fn transition_matrix<T: Scalar>(c: &CountMatrix<T>, alpha: DampingFactor<T>) -> Result<DenseMatrix<T>> {
    let n = c.n();
    let sums = if alpha.is_undamped() {
        require_undamped_chain(c)?
    } else {
        c.column_sums()
    };
    let a = alpha.value();
    let uniform = T::one() / T::from_count(n);
    let teleport = (T::one() - a) * uniform;
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        let follow = if sums[j] > T::zero() {
            c.counts[(i, j)] / sums[j]
        } else {
            uniform
        };
        a * follow + teleport
    }))
}

/// Stationary vector of a column-stochastic matrix by power iteration on
/// the lazy chain `(I + P)/2`, which has the same stationary vector and no
/// periodic eigenvalues on the unit circle.
pub(crate) fn stationary_vector<T: Scalar>(p: &DenseMatrix<T>, tol: T) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    let n = p.rows();
    let lazy = DenseMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        half * (id + p[(i, j)])
    });
    Ok(leading_eigenvector(&lazy, tol, DEFAULT_MAX_ITER)?.vector)
}

/// PageRank: the stationary distribution of `P_alpha`, summing to one.
pub fn pagerank<T: Scalar>(c: &CountMatrix<T>, alpha: DampingFactor<T>, tol: T) -> Result<RankingVector<T>> {
    let p = transition_matrix(c, alpha)?;
    let pi = stationary_vector(&p, tol)?;
    RankingVector::normalized(pi, c.labels.clone(), RankingMethod::Pagerank)
}

/// Influence weight: the fixed point `w_i = sum_j w_j c_ij / sum_j c_ji`,
/// computed as the leading eigenvector of `A^-1 C` and normalized to sum
/// one. Diagonal entries cancel from both sides, so self-citations have no
/// effect.
pub fn influence_weight<T: Scalar>(c: &CountMatrix<T>, tol: T) -> Result<RankingVector<T>> {
    let sums = require_undamped_chain(c)?;
    let n = c.n();
    let half = T::lit(0.5);
    let lazy = DenseMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { T::one() } else { T::zero() };
        half * (id + c.counts[(i, j)] / sums[i])
    });
    let w = leading_eigenvector(&lazy, tol, DEFAULT_MAX_ITER)?.vector;
    RankingVector::normalized(w, c.labels.clone(), RankingMethod::InfluenceWeight)
}

/// Total influence `w_i c_.i`: influence weight times out-degree, which is
/// undamped PageRank.
pub fn total_influence<T: Scalar>(c: &CountMatrix<T>, tol: T) -> Result<RankingVector<T>> {
    let w = influence_weight(c, tol)?;
    let sums = c.column_sums();
    let raw = w.scores.iter().zip(&sums).map(|(&wi, &a)| wi * a).collect();
    RankingVector::normalized(raw, c.labels.clone(), RankingMethod::TotalInfluence)
}

/// Influence per publication `(w_i / articles_i) c_.i`.
pub fn influence_per_publication<T: Scalar>(c: &CountMatrix<T>, articles: &[T], tol: T) -> Result<RankingVector<T>> {
    if articles.len() != c.n() {
        return Err(Error::Dimension(format!(
            "{} article counts for {} journals",
            articles.len(),
            c.n()
        )));
    }
    if let Some(i) = articles.iter().position(|&a| !(a > T::zero()) || !a.is_finite()) {
        return Err(Error::Domain(format!(
            "article count for `{}` must be positive",
            c.labels[i]
        )));
    }
    let w = influence_weight(c, tol)?;
    let sums = c.column_sums();
    let raw = (0..c.n()).map(|i| w.scores[i] / articles[i] * sums[i]).collect();
    RankingVector::normalized(raw, c.labels.clone(), RankingMethod::InfluencePerPublication)
}

fn require_positive_colsums<T: Scalar>(colsums: &[T], len: usize) -> Result<()> {
    if colsums.len() != len {
        return Err(Error::Dimension(format!(
            "{} column sums for {} scores",
            colsums.len(),
            len
        )));
    }
    if let Some(i) = colsums.iter().position(|&a| !(a > T::zero())) {
        return Err(Error::Domain(format!("column sum {i} is not positive")));
    }
    Ok(())
}

/// Influence weight from undamped PageRank: `normalize(A^-1 pi)`.
pub fn iw_from_pagerank<T: Scalar>(pi: &RankingVector<T>, colsums: &[T]) -> Result<RankingVector<T>> {
    require_positive_colsums(colsums, pi.len())?;
    let raw = pi.scores.iter().zip(colsums).map(|(&p, &a)| p / a).collect();
    RankingVector::normalized(raw, pi.labels.clone(), RankingMethod::InfluenceWeight)
}

/// Undamped PageRank from influence weight: `normalize(A w)`.
pub fn pagerank_from_iw<T: Scalar>(w: &RankingVector<T>, colsums: &[T]) -> Result<RankingVector<T>> {
    require_positive_colsums(colsums, w.len())?;
    let raw = w.scores.iter().zip(colsums).map(|(&x, &a)| x * a).collect();
    RankingVector::normalized(raw, w.labels.clone(), RankingMethod::Pagerank)
}

/// `normalize(A^-1 pi_alpha)` for damped PageRank. With `alpha < 1` this has
/// no quasi-symmetry interpretation; it exists for comparison only.
pub fn damped_influence_weight<T: Scalar>(
    c: &CountMatrix<T>,
    alpha: DampingFactor<T>,
    tol: T,
) -> Result<RankingVector<T>> {
    let sums = c.column_sums();
    if let Some(j) = sums.iter().position(|&s| !(s > T::zero())) {
        return Err(Error::DanglingNode {
            label: c.labels[j].clone(),
        });
    }
    let pi = pagerank(c, alpha, tol)?;
    iw_from_pagerank(&pi, &sums)
}
