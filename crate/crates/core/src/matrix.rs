//! Dense linear-algebra substrate: a row-major matrix container, power
//! iteration for dominant eigenvectors, a Jacobi SVD backing the
//! Moore-Penrose pseudoinverse, and strong-connectivity checks.

use std::collections::VecDeque;
use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Default stopping tolerance for power iteration.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Default iteration cap for power iteration.
pub const DEFAULT_MAX_ITER: usize = 100_000;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Row-major dense matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.iter().flatten().copied().collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { T::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] = out.data[i * other.cols + j] + a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[T]) -> Result<Vec<T>> {
        if self.cols != v.len() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} matrix by length-{} vector",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Largest absolute entry (zero for an empty matrix).
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        Ok(self.sub(other)?.max_abs())
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn is_symmetric(&self, tol: T) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| (self[(i, j)] - self[(j, i)]).abs() <= tol))
    }

    /// Converts to another scalar precision.
    pub fn cast<U: Scalar>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| U::lit(x.to_f64_lossy())).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.rows && j < self.cols, "index ({i}, {j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Debug> fmt::Debug for DenseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<&[T]> = (0..self.rows)
            .map(|i| &self.data[i * self.cols..(i + 1) * self.cols])
            .collect();
        f.debug_struct("DenseMatrix")
            .field("rows", &self.rows)
            .field("cols", &self.cols)
            .field("entries", &rows)
            .finish()
    }
}

fn require_square<T: Scalar>(m: &DenseMatrix<T>) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows, m.cols
        )))
    }
}

/// Column sums `e^T C`, the out-degrees that form the diagonal of `A`.
pub fn column_sums<T: Scalar>(c: &DenseMatrix<T>) -> Result<Vec<T>> {
    require_square(c)?;
    let mut sums = vec![T::zero(); c.cols];
    for i in 0..c.rows {
        for (s, &x) in sums.iter_mut().zip(c.row(i)) {
            *s = *s + x;
        }
    }
    Ok(sums)
}

pub fn row_sums<T: Scalar>(c: &DenseMatrix<T>) -> Vec<T> {
    (0..c.rows).map(|i| c.row(i).iter().copied().sum()).collect()
}

/// Dominant eigenpair found by power iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    /// Sum-1 normalized when nonnegative, unit 2-norm otherwise.
    pub vector: Vec<T>,
    pub value: T,
    pub iterations: usize,
    /// `max |M v - value v|`.
    pub residual: T,
}

/// Power iteration with per-step renormalization, stopping once both the
/// last step and the extrapolated distance to the limit fall below `tol` in
/// max-norm.
///
/// Nonnegative matrices are iterated under 1-norm normalization from the
/// uniform vector. Any other matrix falls back to 2-norm normalization with
/// the largest-magnitude entry kept positive.
pub fn leading_eigenvector<T: Scalar>(m: &DenseMatrix<T>, tol: T, max_iter: usize) -> Result<EigenResult<T>> {
    require_square(m)?;
    if !(tol > T::zero()) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let n = m.rows;
    if n == 0 {
        return Err(Error::Dimension("empty matrix".into()));
    }
    let nonnegative = m.data.iter().all(|&x| x >= T::zero());
    let normalize = |v: &mut Vec<T>| -> bool {
        if nonnegative {
            let s: T = v.iter().copied().sum();
            if s <= T::zero() {
                return false;
            }
            v.iter_mut().for_each(|x| *x = *x / s);
        } else {
            let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
            if norm == T::zero() {
                return false;
            }
            let pivot = v
                .iter()
                .copied()
                .fold(T::zero(), |best, x| if x.abs() > best.abs() { x } else { best });
            let sign = if pivot < T::zero() { -T::one() } else { T::one() };
            v.iter_mut().for_each(|x| *x = *x * sign / norm);
        }
        true
    };

    let mut v = vec![T::one() / T::from_count(n); n];
    normalize(&mut v);
    // Below this floor successive differences are rounding noise.
    let floor = T::epsilon() * T::from_count(16 * n);
    let mut diff = T::infinity();
    let mut error = T::infinity();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut w = m.mul_vec(&v)?;
        if !normalize(&mut w) {
            // M v = 0: the iterate lies in the null space
            return Err(Error::Convergence {
                iterations,
                residual: f64::INFINITY,
            });
        }
        let prev = diff;
        diff = w.iter().zip(&v).fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        v = w;
        // Geometric tail bound: with contraction rate r the remaining
        // distance to the limit is about diff * r / (1 - r).
        let rate = diff / prev;
        error = if rate < T::one() {
            diff * rate / (T::one() - rate)
        } else {
            T::infinity()
        };
        if diff <= floor || (diff < tol && error < tol) {
            break;
        }
    }
    if !(diff <= floor || (diff < tol && error < tol)) {
        return Err(Error::Convergence {
            iterations,
            residual: diff.to_f64_lossy(),
        });
    }
    let mv = m.mul_vec(&v)?;
    let value = if nonnegative {
        mv.iter().map(|x| x.abs()).sum::<T>() / v.iter().map(|x| x.abs()).sum::<T>()
    } else {
        mv.iter().zip(&v).map(|(&a, &b)| a * b).sum::<T>() / v.iter().map(|&x| x * x).sum::<T>()
    };
    let residual = mv
        .iter()
        .zip(&v)
        .fold(T::zero(), |acc, (&a, &b)| acc.max((a - value * b).abs()));
    Ok(EigenResult {
        vector: v,
        value,
        iterations,
        residual,
    })
}

/// Thin singular value decomposition `M = U diag(s) V^T`.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    /// `rows x r` with orthonormal columns (zero columns where `s` is zero).
    pub u: DenseMatrix<T>,
    pub singular_values: Vec<T>,
    /// `cols x r` with orthonormal columns.
    pub v: DenseMatrix<T>,
}

/// One-sided (Hestenes) Jacobi SVD.
pub fn svd<T: Scalar>(m: &DenseMatrix<T>) -> Result<Svd<T>> {
    if m.rows < m.cols {
        let t = svd(&m.transpose())?;
        return Ok(Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        });
    }
    let (rows, cols) = (m.rows, m.cols);
    // column-major working copies
    let mut a: Vec<Vec<T>> = (0..cols).map(|j| m.column(j)).collect();
    let mut v: Vec<Vec<T>> = (0..cols)
        .map(|j| (0..cols).map(|i| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let eps = T::epsilon();
    // Rotations themselves leave cosines of a few `eps`; demanding less than
    // `rows * eps` can stall a pair forever.
    let orth_tol = T::from_count(rows) * eps;
    // Columns below `eps * ||M||_F` are rounding noise: their singular values
    // fall under any pseudoinverse cutoff, and rotating them never settles.
    let negligible = eps * eps * a.iter().flatten().map(|&x| x * x).sum::<T>();
    let mut converged = cols < 2;
    for _ in 0..MAX_JACOBI_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (alpha, beta, gamma) = a[p]
                    .iter()
                    .zip(&a[q])
                    .fold((T::zero(), T::zero(), T::zero()), |(al, be, ga), (&x, &y)| {
                        (al + x * x, be + y * y, ga + x * y)
                    });
                if gamma == T::zero()
                    || gamma.abs() <= orth_tol * (alpha * beta).sqrt()
                    || alpha.min(beta) <= negligible
                {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (gamma + gamma);
                let t = if zeta == T::zero() {
                    T::one()
                } else {
                    zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut a, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        converged = !rotated;
    }
    if !converged {
        return Err(Error::Decomposition {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }
    let singular_values: Vec<T> = a
        .iter()
        .map(|col| col.iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    let u = DenseMatrix::from_fn(rows, cols, |i, j| {
        if singular_values[j] > T::zero() {
            a[j][i] / singular_values[j]
        } else {
            T::zero()
        }
    });
    let v = DenseMatrix::from_fn(cols, cols, |i, j| v[j][i]);
    Ok(Svd { u, singular_values, v })
}

fn rotate_pair<T: Scalar>(cols: &mut [Vec<T>], p: usize, q: usize, c: T, s: T) {
    let (left, right) = cols.split_at_mut(q);
    for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Moore-Penrose pseudoinverse.
///
/// Singular values at or below `max(rows, cols) * eps * s_max` are treated
/// as zero.
pub fn pseudoinverse<T: Scalar>(m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
    let d = svd(m)?;
    let s_max = d.singular_values.iter().copied().fold(T::zero(), T::max);
    let cutoff = T::from_count(m.rows.max(m.cols)) * T::epsilon() * s_max;
    let inv: Vec<T> = d
        .singular_values
        .iter()
        .map(|&s| if s > cutoff { T::one() / s } else { T::zero() })
        .collect();
    let r = inv.len();
    Ok(DenseMatrix::from_fn(m.cols, m.rows, |i, j| {
        (0..r)
            .filter(|&k| inv[k] != T::zero())
            .map(|k| d.v[(i, k)] * inv[k] * d.u[(j, k)])
            .sum()
    }))
}

/// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
pub fn symmetric_eigenvalues<T: Scalar>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    require_square(m)?;
    let n = m.rows;
    let mut a = m.clone();
    for _ in 0..MAX_JACOBI_SWEEPS {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: T = a.data.iter().map(|&x| x * x).sum();
        // Rotations leave off-diagonal residue of a few ulps; the bound
        // keeps eigenvalue errors near `n * eps * ||A||_F`.
        let tol = T::from_count(n) * T::epsilon();
        if off <= tol * tol * scale || off == T::zero() {
            let mut eig = a.diagonal();
            eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
            return Ok(eig);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (apq + apq);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    theta.signum() / (theta.abs() + (T::one() + theta * theta).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    Err(Error::Decomposition {
        sweeps: MAX_JACOBI_SWEEPS,
    })
}

/// Nodes reachable from `start` following edges `j -> i` whenever
/// `c_ij > 0` (or the reverse edges when `reverse` is set).
pub(crate) fn reachable<T: Scalar>(c: &DenseMatrix<T>, start: usize, reverse: bool) -> Vec<bool> {
    let n = c.rows;
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(node) = queue.pop_front() {
        for next in 0..n {
            let w = if reverse { c[(node, next)] } else { c[(next, node)] };
            if w > T::zero() && !seen[next] {
                seen[next] = true;
                queue.push_back(next);
            }
        }
    }
    seen
}

/// Strong connectivity of the directed graph with edge `j -> i` whenever
/// `c_ij > 0`.
pub fn is_irreducible<T: Scalar>(c: &DenseMatrix<T>) -> bool {
    if !c.is_square() || c.rows == 0 {
        return false;
    }
    reachable(c, 0, false).into_iter().all(|x| x) && reachable(c, 0, true).into_iter().all(|x| x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn m(rows: &[&[f64]]) -> DenseMatrix<f64> {
        DenseMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_bad_shapes_and_non_finite() {
        assert!(matches!(DenseMatrix::new(2, 2, vec![1.0; 3]), Err(Error::Dimension(_))));
        assert!(matches!(
            DenseMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            column_sums(&DenseMatrix::<f64>::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn column_sums_examples() {
        assert_eq!(column_sums(&m(&[&[0.0, 1.0], &[2.0, 0.0]])).unwrap(), vec![2.0, 1.0]);
        let rr = DenseMatrix::from_fn(4, 4, |_, _| 1.0);
        assert_eq!(column_sums(&rr).unwrap(), vec![4.0; 4]);
        let c = m(&[&[0.0, 1.0, 1.0], &[2.0, 0.0, 2.0], &[4.0, 4.0, 0.0]]);
        assert_eq!(column_sums(&c).unwrap(), vec![6.0, 5.0, 3.0]);
        assert_eq!(column_sums(&c.transpose()).unwrap(), row_sums(&c));
    }

    #[test]
    fn power_iteration_examples() {
        let id = DenseMatrix::<f64>::identity(3);
        let r = leading_eigenvector(&id, 1e-12, 100).unwrap();
        assert_eq!(r.vector, vec![1.0 / 3.0; 3]);
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-15);

        let flat = DenseMatrix::from_fn(5, 5, |_, _| 0.2);
        let r = leading_eigenvector(&flat, 1e-12, 100).unwrap();
        for x in &r.vector {
            assert_abs_diff_eq!(*x, 0.2, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-14);

        // A^{-1} C for the three-node quasi-symmetric example
        let c = m(&[&[0.0, 1.0, 1.0], &[2.0, 0.0, 2.0], &[4.0, 4.0, 0.0]]);
        let a = column_sums(&c).unwrap();
        let scaled = DenseMatrix::from_fn(3, 3, |i, j| c[(i, j)] / a[i]);
        let r = leading_eigenvector(&scaled, 1e-13, 10_000).unwrap();
        for (x, want) in r.vector.iter().zip([1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0]) {
            assert_abs_diff_eq!(*x, want, epsilon = 1e-11);
        }
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-11);
        assert!(r.residual < 1e-11);
    }

    #[test]
    fn power_iteration_reports_non_convergence() {
        // period-2 permutation never settles
        let swap = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let start = leading_eigenvector(&swap, 1e-12, 5);
        assert!(start.is_ok(), "uniform start is already the fixed point");
        let skew = m(&[&[0.0, 2.0], &[1.0, 0.0]]);
        assert!(matches!(
            leading_eigenvector(&skew, 1e-12, 50),
            Err(Error::Convergence { iterations: 50, .. })
        ));
    }

    #[test]
    fn pseudoinverse_examples() {
        let d = m(&[&[2.0, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 5.0]]);
        let p = pseudoinverse(&d).unwrap();
        assert!(
            p.max_abs_diff(&m(&[&[0.5, 0.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 0.2]]))
                .unwrap()
                < 1e-15
        );

        let a = m(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let p = pseudoinverse(&a).unwrap();
        assert!(p.max_abs_diff(&m(&[&[1.0, -1.0], &[0.0, 1.0]])).unwrap() < 1e-14);

        let proj = DenseMatrix::from_fn(4, 4, |i, j| if i == j { 0.75 } else { -0.25 });
        let p = pseudoinverse(&proj).unwrap();
        assert!(p.max_abs_diff(&proj).unwrap() < 1e-14);
    }

    #[test]
    fn svd_of_exactly_rank_one_matrix() {
        // I - P for counts [[0, 14], [3, 4]]: after one rotation a column is
        // pure rounding noise, which must not keep the sweeps going.
        let c = m(&[&[0.0, 14.0], &[3.0, 4.0]]);
        let sums = [3.0, 18.0];
        let a = DenseMatrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 0.0 } - c[(i, j)] / sums[j]);
        let p = pseudoinverse(&a).unwrap();
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.max_abs_diff(&a).unwrap() < 1e-14);
        let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
        assert!(pap.max_abs_diff(&p).unwrap() < 1e-14);
    }

    #[test]
    fn pseudoinverse_of_wide_matrix() {
        let a = m(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        let p = pseudoinverse(&a).unwrap();
        assert_eq!((p.rows(), p.cols()), (3, 2));
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        assert!(apa.max_abs_diff(&a).unwrap() < 1e-12);
    }

    #[test]
    fn symmetric_eigenvalues_of_projector() {
        let proj = DenseMatrix::from_fn(4, 4, |i, j| if i == j { 0.75 } else { -0.25 });
        let eig = symmetric_eigenvalues(&proj).unwrap();
        assert_abs_diff_eq!(eig[0], 0.0, epsilon = 1e-14);
        for e in &eig[1..] {
            assert_abs_diff_eq!(*e, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn irreducibility_examples() {
        assert!(is_irreducible(&m(&[&[0.0, 1.0], &[1.0, 0.0]])));
        assert!(!is_irreducible(&m(&[&[0.0, 1.0], &[0.0, 0.0]])));
        let n = 6;
        let cyc = DenseMatrix::from_fn(
            n,
            n,
            |i, j| {
                if (i + 1) % n == j || (j + 1) % n == i {
                    2.0
                } else {
                    0.0
                }
            },
        );
        assert!(is_irreducible(&cyc));
    }

    #[test]
    fn works_in_single_precision() {
        let c = DenseMatrix::<f32>::from_rows(&[vec![0.0, 3.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(column_sums(&c).unwrap(), vec![1.0, 3.0]);
        let p = pseudoinverse(&DenseMatrix::<f32>::from_diagonal(&[2.0, 4.0])).unwrap();
        assert!((p[(1, 1)] - 0.25).abs() < 1e-6);
    }
}
