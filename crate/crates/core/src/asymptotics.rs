//! Delta-method asymptotics for log influence weights.
//!
//! A perturbation `C_t = C + t F_ij` moves one win from `j` to `i`
//! (`F_ij` has `+1` at `(i, j)` and `-1` at `(j, i)`). Its effect on the
//! transition matrix, the stationary vector (through the pseudoinverse of
//! `I - P`), and finally on normalized log influence weights gives one
//! Jacobian column per unordered pair. Under the equal-abilities binomial
//! null every pair contributes variance `n_ij / 4`, and the delta method
//! yields `J Sigma J^T`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators;
use crate::matrix::{pseudoinverse, DenseMatrix};
use crate::rankings::{pagerank, transition_matrix, CountMatrix, DampingFactor};
use crate::scalar::Scalar;

/// Symmetric matrix of asymptotic covariances of log-scores.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T> {
    entries: DenseMatrix<T>,
}

impl<T: Scalar> CovarianceMatrix<T> {
    /// Accepts a square matrix that is symmetric up to rounding and stores
    /// its exact symmetric part.
    pub fn new(entries: DenseMatrix<T>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Dimension("covariance must be square".into()));
        }
        let scale = entries.max_abs().max(T::one());
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e4)) * scale;
        if !entries.is_symmetric(tol) {
            return Err(Error::Domain("covariance is not symmetric".into()));
        }
        let n = entries.rows();
        let half = T::lit(0.5);
        let sym = DenseMatrix::from_fn(n, n, |i, j| half * (entries[(i, j)] + entries[(j, i)]));
        Ok(Self { entries: sym })
    }

    pub fn entries(&self) -> &DenseMatrix<T> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.rows()
    }

    pub fn variances(&self) -> Vec<T> {
        self.entries.diagonal()
    }

    pub fn std_errors(&self) -> Vec<T> {
        self.variances().into_iter().map(|v| v.max(T::zero()).sqrt()).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.entries.max_abs_diff(&other.entries)
    }

    /// Largest absolute row sum; zero when the matrix annihilates `e`.
    pub fn max_row_sum(&self) -> T {
        crate::matrix::row_sums(&self.entries)
            .into_iter()
            .fold(T::zero(), |m, s| m.max(s.abs()))
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let eig = crate::matrix::symmetric_eigenvalues(&self.entries)?;
        Ok(eig.first().copied().unwrap_or(T::zero()))
    }

    /// Entries at circular distance `band` from the diagonal, read along
    /// the first row.
    pub fn band(&self, band: usize) -> T {
        self.entries[(0, band % self.n())]
    }
}

/// Direction `F_ij` of a count perturbation with magnitude `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationDirection<T> {
    pub i: usize,
    pub j: usize,
    pub t: T,
}

impl<T: Scalar> PerturbationDirection<T> {
    /// Unit-magnitude direction. `i > j` is allowed and equals the
    /// negated `(j, i)` direction.
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::Domain(format!(
                "perturbation needs two distinct players, got ({i}, {j})"
            )));
        }
        Ok(Self { i, j, t: T::one() })
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.i == self.j || self.i >= n || self.j >= n {
            return Err(Error::Domain(format!(
                "invalid perturbation ({}, {}) for {n} players",
                self.i, self.j
            )));
        }
        Ok(())
    }

    /// Dense `F_ij` scaled by `t`.
    pub fn matrix(&self, n: usize) -> Result<DenseMatrix<T>> {
        self.check(n)?;
        let mut f = DenseMatrix::zeros(n, n);
        f[(self.i, self.j)] = self.t;
        f[(self.j, self.i)] = -self.t;
        Ok(f)
    }
}

/// Lexicographic pairs `(0,1), (0,2), ..., (n-2, n-1)`.
pub fn pair_order(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect()
}

/// Jacobian of log influence weights with one column per unordered pair.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix<T> {
    pub entries: DenseMatrix<T>,
    pub column_order: Vec<(usize, usize)>,
}

impl<T: Scalar> JacobianMatrix<T> {
    pub fn column(&self, pair: (usize, usize)) -> Option<Vec<T>> {
        self.column_order
            .iter()
            .position(|&p| p == pair)
            .map(|k| self.entries.column(k))
    }
}

/// `dP/dt` at the round-robin point `C = k e e^T`: column `i` is
/// `e/(k n^2) - e_j/(k n)` and column `j` its negation with `e_i`.
pub fn transition_derivative<T: Scalar>(n: usize, k: usize, dir: &PerturbationDirection<T>) -> Result<DenseMatrix<T>> {
    if n < 2 || k < 1 {
        return Err(Error::Domain(format!(
            "round robin needs n >= 2 and k >= 1, got n={n}, k={k}"
        )));
    }
    dir.check(n)?;
    let nf = T::from_count(n);
    let kf = T::from_count(k);
    let small = dir.t / (kf * nf * nf);
    let big = dir.t / (kf * nf);
    let mut d = DenseMatrix::zeros(n, n);
    for r in 0..n {
        d[(r, dir.i)] = small;
        d[(r, dir.j)] = -small;
    }
    d[(dir.j, dir.i)] = d[(dir.j, dir.i)] - big;
    d[(dir.i, dir.j)] = d[(dir.i, dir.j)] + big;
    Ok(d)
}

/// `dP/dt` for `P = C A^-1` at a general count matrix.
pub fn transition_derivative_at<T: Scalar>(
    c: &CountMatrix<T>,
    dir: &PerturbationDirection<T>,
) -> Result<DenseMatrix<T>> {
    let p = transition_matrix(c, DampingFactor::undamped())?;
    let sums = c.column_sums();
    transition_derivative_from(&p, &sums, dir)
}

fn transition_derivative_from<T: Scalar>(
    p: &DenseMatrix<T>,
    sums: &[T],
    dir: &PerturbationDirection<T>,
) -> Result<DenseMatrix<T>> {
    let n = p.rows();
    dir.check(n)?;
    let (i, j, t) = (dir.i, dir.j, dir.t);
    let mut d = DenseMatrix::zeros(n, n);
    for r in 0..n {
        // column j gains e_i, column i loses e_j
        let gain = if r == i { T::one() } else { T::zero() };
        let loss = if r == j { T::one() } else { T::zero() };
        d[(r, j)] = t * (gain - p[(r, j)]) / sums[j];
        d[(r, i)] = t * (p[(r, i)] - loss) / sums[i];
    }
    Ok(d)
}

fn stationary_residual<T: Scalar>(p: &DenseMatrix<T>, pi: &[T]) -> Result<T> {
    let ppi = p.mul_vec(pi)?;
    Ok(ppi.iter().zip(pi).fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs())))
}

/// Derivative of the sum-one stationary vector of column-stochastic `P`
/// along `Pdot`: `(I - P)^+ Pdot pi`, shifted along `pi` so the entries sum
/// to zero.
pub fn stationary_derivative<T: Scalar>(p: &DenseMatrix<T>, pi: &[T], pdot: &DenseMatrix<T>) -> Result<Vec<T>> {
    if !p.is_square() || pdot.rows() != p.rows() || pdot.cols() != p.cols() || pi.len() != p.rows() {
        return Err(Error::Dimension("P, pi and Pdot must agree in size".into()));
    }
    let residual = stationary_residual(p, pi)?;
    if residual > T::lit(1e-8) {
        return Err(Error::Consistency {
            residual: residual.to_f64_lossy(),
        });
    }
    let n = p.rows();
    let resolvent = pseudoinverse(&DenseMatrix::identity(n).sub(p)?)?;
    stationary_derivative_with(&resolvent, pi, pdot)
}

fn stationary_derivative_with<T: Scalar>(
    resolvent: &DenseMatrix<T>,
    pi: &[T],
    pdot: &DenseMatrix<T>,
) -> Result<Vec<T>> {
    let y = resolvent.mul_vec(&pdot.mul_vec(pi)?)?;
    let drift: T = y.iter().copied().sum();
    let mass: T = pi.iter().copied().sum();
    Ok(y.iter().zip(pi).map(|(&yi, &p)| yi - drift * p / mass).collect())
}

/// Shared state for Jacobian columns at one count matrix.
struct LogIwContext<T> {
    p: DenseMatrix<T>,
    pi: Vec<T>,
    sums: Vec<T>,
    resolvent: DenseMatrix<T>,
}

impl<T: Scalar> LogIwContext<T> {
    fn new(c: &CountMatrix<T>) -> Result<Self> {
        let p = transition_matrix(c, DampingFactor::undamped())?;
        let pi = pagerank(
            c,
            DampingFactor::undamped(),
            T::lit(crate::matrix::DEFAULT_TOL).max(T::epsilon() * T::lit(16.0)),
        )?
        .scores;
        let resolvent = pseudoinverse(&DenseMatrix::identity(c.n()).sub(&p)?)?;
        Ok(Self {
            p,
            pi,
            sums: c.column_sums(),
            resolvent,
        })
    }

    fn column(&self, dir: &PerturbationDirection<T>) -> Result<Vec<T>> {
        let pdot = transition_derivative_from(&self.p, &self.sums, dir)?;
        let pidot = stationary_derivative_with(&self.resolvent, &self.pi, &pdot)?;
        let n = self.pi.len();
        let mut sums_dot = vec![T::zero(); n];
        sums_dot[dir.j] = dir.t;
        sums_dot[dir.i] = -dir.t;
        // unnormalized influence weight u = A^-1 pi and its derivative
        let u: Vec<T> = (0..n).map(|l| self.pi[l] / self.sums[l]).collect();
        let udot: Vec<T> = (0..n)
            .map(|l| pidot[l] / self.sums[l] - self.pi[l] * sums_dot[l] / (self.sums[l] * self.sums[l]))
            .collect();
        let psi: T = u.iter().copied().sum();
        let psidot: T = udot.iter().copied().sum();
        Ok((0..n).map(|l| udot[l] / u[l] - psidot / psi).collect())
    }
}

/// Derivative of `log IW_norm` along `F_ij` for one ordered pair.
pub fn log_iw_derivative<T: Scalar>(c: &CountMatrix<T>, dir: &PerturbationDirection<T>) -> Result<Vec<T>> {
    dir.check(c.n())?;
    LogIwContext::new(c)?.column(dir)
}

/// Jacobian of normalized log influence weights with respect to the
/// upper-triangle perturbations, columns in [`pair_order`].
pub fn log_iw_jacobian<T: Scalar>(c: &CountMatrix<T>) -> Result<JacobianMatrix<T>> {
    let n = c.n();
    let ctx = LogIwContext::new(c)?;
    let order = pair_order(n);
    let columns: Vec<Vec<T>> = order
        .par_iter()
        .map(|&(i, j)| ctx.column(&PerturbationDirection { i, j, t: T::one() }))
        .collect::<Result<_>>()?;
    let entries = DenseMatrix::from_fn(n, order.len(), |r, k| columns[k][r]);
    Ok(JacobianMatrix {
        entries,
        column_order: order,
    })
}

/// `J (k/2 I) J^T`: every pair played `2k` times at success probability
/// one half.
pub fn delta_covariance<T: Scalar>(j: &JacobianMatrix<T>, k: usize) -> Result<CovarianceMatrix<T>> {
    let var = T::from_count(k) * T::lit(0.5);
    weighted_outer(&j.entries, &vec![var; j.column_order.len()])
}

/// `J Sigma J^T` with `Sigma = diag(n_ij / 4)` taken from the pair totals
/// of `c` (binomial variance at the equal-abilities null).
pub fn null_delta_covariance<T: Scalar>(j: &JacobianMatrix<T>, c: &CountMatrix<T>) -> Result<CovarianceMatrix<T>> {
    if j.entries.rows() != c.n() {
        return Err(Error::Dimension("Jacobian rows differ from player count".into()));
    }
    let quarter = T::lit(0.25);
    let weights: Vec<T> = j
        .column_order
        .iter()
        .map(|&(a, b)| (c.get(a, b) + c.get(b, a)) * quarter)
        .collect();
    weighted_outer(&j.entries, &weights)
}

fn weighted_outer<T: Scalar>(j: &DenseMatrix<T>, weights: &[T]) -> Result<CovarianceMatrix<T>> {
    let n = j.rows();
    let out = DenseMatrix::from_fn(n, n, |a, b| {
        (0..j.cols()).map(|k| j[(a, k)] * weights[k] * j[(b, k)]).sum()
    });
    CovarianceMatrix::new(out)
}

/// Numerical delta-method covariance of log influence weights at `c` under
/// the binomial null.
pub fn delta_method_covariance<T: Scalar>(c: &CountMatrix<T>) -> Result<CovarianceMatrix<T>> {
    null_delta_covariance(&log_iw_jacobian(c)?, c)
}

/// Closed form for a round robin: `2(n-1)/(k n^2)` on the diagonal and
/// `-2/(k n^2)` elsewhere.
pub fn round_robin_covariance<T: Scalar>(n: usize, k: usize) -> Result<CovarianceMatrix<T>> {
    if n < 2 || k < 1 {
        return Err(Error::Domain(format!(
            "round robin needs n >= 2 and k >= 1, got n={n}, k={k}"
        )));
    }
    let nf = T::from_count(n);
    let denom = T::from_count(k) * nf * nf;
    let two = T::lit(2.0);
    let diag = two * (nf - T::one()) / denom;
    let off = -two / denom;
    CovarianceMatrix::new(DenseMatrix::from_fn(n, n, |i, j| if i == j { diag } else { off }))
}

/// Circular distance between players on an `n`-cycle.
pub fn circular_distance(n: usize, i: usize, j: usize) -> usize {
    let d = i.abs_diff(j);
    d.min(n - d)
}

/// Closed-form circular-tournament covariance bands: distance 0, 1 and 2
/// from the diagonal. Returns `None` beyond the second band.
pub fn circular_band<T: Scalar>(n: usize, k: usize, distance: usize) -> Option<T> {
    let nf = T::from_count(n);
    let denom = T::lit(6.0) * T::from_count(k) * nf;
    let numer = match distance {
        0 => nf * nf - T::one(),
        1 => (nf - T::one()) * (nf - T::lit(5.0)),
        2 => nf * nf - T::lit(12.0) * nf + T::lit(23.0),
        _ => return None,
    };
    Some(numer / denom)
}

/// Circular tournament covariance: closed-form diagonal and first two
/// off-diagonal bands, remaining bands from the numerical delta method.
///
/// Needs `n >= 7` so the three closed-form bands are distinct; smaller
/// tournaments go through [`delta_method_covariance`] on
/// [`generators::circular`].
pub fn circular_covariance<T: Scalar>(n: usize, k: usize) -> Result<CovarianceMatrix<T>> {
    if n < 7 || k < 1 {
        return Err(Error::Domain(format!(
            "closed-form circular covariance needs n >= 7 and k >= 1 (got n={n}, k={k}); \
             use the numerical delta-method path for smaller tournaments"
        )));
    }
    let numeric = delta_method_covariance(&generators::circular::<T>(n, k)?)?;
    let out = DenseMatrix::from_fn(n, n, |i, j| {
        circular_band(n, k, circular_distance(n, i, j)).unwrap_or(numeric.entries()[(i, j)])
    });
    CovarianceMatrix::new(out)
}
