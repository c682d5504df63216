//! Bradley-Terry paired-comparison model: `log odds(i beats j) = mu_i - mu_j`.
//!
//! Abilities are identified by the sum-zero constraint. Fitting uses the
//! classical minorization-maximization (Zermelo/Ford) iteration, and the
//! asymptotic covariance is the pseudoinverse of the singular Fisher
//! information. Diagonal entries of the count matrix (self-play) are
//! ignored throughout.

use crate::asymptotics::CovarianceMatrix;
use crate::error::{Error, Result};
use crate::matrix::{pseudoinverse, DenseMatrix};
use crate::rankings::CountMatrix;
use crate::scalar::Scalar;

pub const DEFAULT_FIT_TOL: f64 = 1e-10;
pub const DEFAULT_FIT_MAX_ITER: usize = 10_000;

/// Sum-zero log-abilities.
#[derive(Debug, Clone, PartialEq)]
pub struct AbilityVector<T> {
    pub mu: Vec<T>,
    pub labels: Vec<String>,
}

impl<T: Scalar> AbilityVector<T> {
    /// Re-centers `mu` to sum zero.
    pub fn centered(mu: Vec<T>, labels: Vec<String>) -> Result<Self> {
        if mu.len() != labels.len() {
            return Err(Error::Dimension("abilities and labels differ in length".into()));
        }
        if mu.iter().any(|x| !x.is_finite()) {
            return Err(Error::Domain("abilities must be finite".into()));
        }
        let mean = mu.iter().copied().sum::<T>() / T::from_count(mu.len().max(1));
        Ok(Self {
            mu: mu.into_iter().map(|x| x - mean).collect(),
            labels,
        })
    }

    /// All-zero abilities (the equal-abilities null).
    pub fn zeros(labels: Vec<String>) -> Self {
        Self {
            mu: vec![T::zero(); labels.len()],
            labels,
        }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct FitReport<T> {
    pub abilities: AbilityVector<T>,
    pub covariance: CovarianceMatrix<T>,
    pub deviance: T,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> FitReport<T> {
    /// Square roots of the covariance diagonal.
    pub fn std_errors(&self) -> Vec<T> {
        self.covariance.std_errors()
    }
}

pub(crate) fn logistic<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// Connected components of the comparison graph (edge `{i, j}` whenever
/// `c_ij + c_ji > 0`), each sorted by index.
fn comparison_components<T: Scalar>(c: &CountMatrix<T>) -> Vec<Vec<usize>> {
    let n = c.n();
    let mut component = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        component[start] = id;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if j != i && component[j] == usize::MAX && c.get(i, j) + c.get(j, i) > T::zero() {
                    component[j] = id;
                    members.push(j);
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Checks the conditions under which the maximum likelihood estimate
/// exists: a connected comparison graph, every player with at least one
/// win and one loss, and a strongly connected win graph.
pub fn check_mle_exists<T: Scalar>(c: &CountMatrix<T>) -> Result<()> {
    let n = c.n();
    let labels = c.labels();
    let components = comparison_components(c);
    if components.len() > 1 {
        return Err(Error::Disconnected {
            components: components
                .iter()
                .map(|comp| comp.iter().map(|&i| labels[i].clone()).collect())
                .collect(),
        });
    }
    for i in 0..n {
        let wins: T = (0..n).filter(|&j| j != i).map(|j| c.get(i, j)).sum();
        let losses: T = (0..n).filter(|&j| j != i).map(|j| c.get(j, i)).sum();
        if n > 1 && wins == T::zero() {
            return Err(Error::Separation(format!("`{}` never wins", labels[i])));
        }
        if n > 1 && losses == T::zero() {
            return Err(Error::Separation(format!("`{}` never loses", labels[i])));
        }
    }
    // Ford's condition: for every split, someone in each half beats someone
    // in the other, i.e. the win graph is strongly connected.
    let offdiag = DenseMatrix::from_fn(n, n, |i, j| if i == j { T::zero() } else { c.get(i, j) });
    let beaten_by_first = crate::matrix::reachable(&offdiag, 0, true);
    let beat_first = crate::matrix::reachable(&offdiag, 0, false);
    let dominated: Vec<String> = (0..n)
        .filter(|&i| !(beaten_by_first[i] && beat_first[i]))
        .map(|i| labels[i].clone())
        .collect();
    if !dominated.is_empty() {
        return Err(Error::Separation(format!(
            "players {{{}}} are completely separated from `{}` by the win graph",
            dominated.join(", "),
            labels[0]
        )));
    }
    Ok(())
}

/// Maximum likelihood fit by minorization-maximization,
/// `p_i <- W_i / sum_j n_ij / (p_i + p_j)`, re-centered each sweep.
pub fn fit_bt<T: Scalar>(c: &CountMatrix<T>, tol: T, max_iter: usize) -> Result<FitReport<T>> {
    check_mle_exists(c)?;
    let n = c.n();
    let wins: Vec<T> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).map(|j| c.get(i, j)).sum())
        .collect();
    let games = DenseMatrix::from_fn(n, n, |i, j| if i == j { T::zero() } else { c.get(i, j) + c.get(j, i) });

    let mut mu = vec![T::zero(); n];
    let mut iterations = 0;
    let mut converged = n < 2;
    while !converged && iterations < max_iter {
        iterations += 1;
        let strength: Vec<T> = mu.iter().map(|m| m.exp()).collect();
        let mut next: Vec<T> = (0..n)
            .map(|i| {
                let denom: T = (0..n)
                    .filter(|&j| j != i && games[(i, j)] > T::zero())
                    .map(|j| games[(i, j)] / (strength[i] + strength[j]))
                    .sum();
                (wins[i] / denom).ln()
            })
            .collect();
        let mean = next.iter().copied().sum::<T>() / T::from_count(n);
        next.iter_mut().for_each(|x| *x = *x - mean);
        let change = next
            .iter()
            .zip(&mu)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()));
        mu = next;
        converged = change < tol;
    }
    if !converged {
        return Err(Error::Convergence {
            iterations,
            residual: bt_gradient(c, &mu)
                .iter()
                .fold(0.0, |m, g| m.max(g.abs().to_f64_lossy())),
        });
    }
    let abilities = AbilityVector::centered(mu, c.labels().to_vec())?;
    let covariance = bt_covariance(c, &abilities)?;
    let deviance = bt_deviance(c, &abilities)?;
    Ok(FitReport {
        abilities,
        covariance,
        deviance,
        iterations,
        converged,
    })
}

fn check_len<T: Scalar>(c: &CountMatrix<T>, mu: &AbilityVector<T>) -> Result<()> {
    if c.n() != mu.len() {
        return Err(Error::Dimension(format!(
            "{} abilities for {} players",
            mu.len(),
            c.n()
        )));
    }
    Ok(())
}

/// Fisher information of the sum-zero model:
/// `F_ii = sum_j n_ij p_ij (1 - p_ij)`, `F_ij = -n_ij p_ij (1 - p_ij)`.
pub fn bt_information<T: Scalar>(c: &CountMatrix<T>, mu: &AbilityVector<T>) -> Result<DenseMatrix<T>> {
    check_len(c, mu)?;
    let n = c.n();
    let mut info = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let games = c.get(i, j) + c.get(j, i);
            let p = logistic(mu.mu[i] - mu.mu[j]);
            let w = games * p * (T::one() - p);
            info[(i, j)] = -w;
            info[(j, i)] = -w;
            info[(i, i)] = info[(i, i)] + w;
            info[(j, j)] = info[(j, j)] + w;
        }
    }
    Ok(info)
}

/// Asymptotic covariance of sum-zero log-abilities: the Moore-Penrose
/// pseudoinverse of the Fisher information.
pub fn bt_covariance<T: Scalar>(c: &CountMatrix<T>, mu: &AbilityVector<T>) -> Result<CovarianceMatrix<T>> {
    let info = bt_information(c, mu)?;
    CovarianceMatrix::new(pseudoinverse(&info)?)
}

/// Log-likelihood `sum_{i != j} c_ij log p_ij`.
pub fn bt_log_likelihood<T: Scalar>(c: &CountMatrix<T>, mu: &AbilityVector<T>) -> Result<T> {
    check_len(c, mu)?;
    let n = c.n();
    let mut ll = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j && c.get(i, j) > T::zero() {
                ll = ll + c.get(i, j) * logistic(mu.mu[i] - mu.mu[j]).ln();
            }
        }
    }
    Ok(ll)
}

/// Score vector `W_i - sum_j n_ij p_ij`.
pub fn bt_gradient<T: Scalar>(c: &CountMatrix<T>, mu: &[T]) -> Vec<T> {
    let n = c.n();
    (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let games = c.get(i, j) + c.get(j, i);
                    c.get(i, j) - games * logistic(mu[i] - mu[j])
                })
                .sum()
        })
        .collect()
}

/// Deviance against the saturated model, with `0 log 0 = 0`.
pub fn bt_deviance<T: Scalar>(c: &CountMatrix<T>, mu: &AbilityVector<T>) -> Result<T> {
    check_len(c, mu)?;
    let n = c.n();
    let term = |count: T, expected: T| {
        if count > T::zero() {
            count * (count / expected).ln()
        } else {
            T::zero()
        }
    };
    let mut dev = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let games = c.get(i, j) + c.get(j, i);
            if games == T::zero() {
                continue;
            }
            let p = logistic(mu.mu[i] - mu.mu[j]);
            dev = dev + term(c.get(i, j), games * p) + term(c.get(j, i), games * (T::one() - p));
        }
    }
    Ok((dev + dev).max(T::zero()))
}

/// Probability that `i` beats `j`.
pub fn predict_prob<T: Scalar>(mu: &AbilityVector<T>, i: usize, j: usize) -> Result<T> {
    if i == j {
        return Err(Error::Domain("a player cannot meet themselves".into()));
    }
    if i >= mu.len() || j >= mu.len() {
        return Err(Error::Domain(format!("index out of range for {} players", mu.len())));
    }
    if i < j {
        Ok(logistic(mu.mu[i] - mu.mu[j]))
    } else {
        Ok(T::one() - logistic(mu.mu[j] - mu.mu[i]))
    }
}
