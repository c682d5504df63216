//! Canonical tournament structures, random quasi-symmetric matrices and
//! seeded Bradley-Terry tournament simulation.
//!
//! Random draws come from ChaCha8 streams keyed by `(seed, pair, attempt)`
//! with the replication index as stream id, so every replication can be
//! regenerated on its own regardless of how replications are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::asymptotics::CovarianceMatrix;
use crate::bradley_terry::{logistic, AbilityVector};
use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, DEFAULT_TOL};
use crate::rankings::{influence_weight, CountMatrix};
use crate::scalar::Scalar;

/// Attempts per replication before the draw is declared hopeless.
const MAX_ATTEMPTS: u64 = 64;

/// `C = k e e^T`, diagonal included.
pub fn round_robin<T: Scalar>(n: usize, k: usize) -> Result<CountMatrix<T>> {
    if n < 2 || k < 1 {
        return Err(Error::Domain(format!(
            "round robin needs n >= 2 and k >= 1, got n={n}, k={k}"
        )));
    }
    let kf = T::from_count(k);
    CountMatrix::unlabeled(DenseMatrix::from_fn(n, n, |_, _| kf))
}

/// Circulant `C` generated by `(0, k, 0, ..., 0, k)`: every player meets
/// its two neighbours on a cycle.
pub fn circular<T: Scalar>(n: usize, k: usize) -> Result<CountMatrix<T>> {
    if n < 3 || k < 1 {
        return Err(Error::Domain(format!(
            "circular tournament needs n >= 3 and k >= 1, got n={n}, k={k}"
        )));
    }
    let kf = T::from_count(k);
    CountMatrix::unlabeled(DenseMatrix::from_fn(n, n, |i, j| {
        if crate::asymptotics::circular_distance(n, i, j) == 1 {
            kf
        } else {
            T::zero()
        }
    }))
}

/// `diag(d) S` with `d_1 = 1`, other `d_i ~ U[0.5, 2]`, and symmetric `S`
/// with zero diagonal and off-diagonal entries `~ U[1, 10]`.
pub fn random_quasi_symmetric<T: Scalar>(n: usize, seed: u64) -> Result<CountMatrix<T>> {
    if n < 2 {
        return Err(Error::Domain(format!("need at least two players, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d: Vec<f64> = (0..n)
        .map(|i| if i == 0 { 1.0 } else { rng.random_range(0.5..=2.0) })
        .collect();
    let mut s = vec![0.0f64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let x = rng.random_range(1.0..=10.0);
            s[i * n + j] = x;
            s[j * n + i] = x;
        }
    }
    CountMatrix::unlabeled(DenseMatrix::from_fn(n, n, |i, j| T::lit(d[i] * s[i * n + j])))
}

/// Which pairs meet in a simulated tournament.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Structure {
    RoundRobin,
    Circular,
}

impl Structure {
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        crate::asymptotics::pair_order(n)
            .into_iter()
            .filter(|&(i, j)| match self {
                Structure::RoundRobin => true,
                Structure::Circular => crate::asymptotics::circular_distance(n, i, j) == 1,
            })
            .collect()
    }

    /// Expected count matrix at equal abilities with `k` wins each way.
    pub fn counts<T: Scalar>(self, n: usize, k: usize) -> Result<CountMatrix<T>> {
        match self {
            Structure::RoundRobin => round_robin(n, k),
            Structure::Circular => circular(n, k),
        }
    }

    /// Closed-form asymptotic covariance of log influence weights at
    /// equal abilities.
    pub fn target_covariance<T: Scalar>(self, n: usize, k: usize) -> Result<CovarianceMatrix<T>> {
        match self {
            Structure::RoundRobin => crate::asymptotics::round_robin_covariance(n, k),
            Structure::Circular if n >= 7 => crate::asymptotics::circular_covariance(n, k),
            Structure::Circular => crate::asymptotics::delta_method_covariance(&circular(n, k)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig<T> {
    pub abilities: AbilityVector<T>,
    /// Games per meeting pair (`2k` under the null).
    pub games_per_pair: u64,
    pub replications: usize,
    pub seed: u64,
}

impl<T: Scalar> SimulationConfig<T> {
    pub fn new(abilities: AbilityVector<T>, games_per_pair: u64, replications: usize, seed: u64) -> Result<Self> {
        if games_per_pair < 1 {
            return Err(Error::Domain("games_per_pair must be at least 1".into()));
        }
        if replications < 1 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        Ok(Self {
            abilities,
            games_per_pair,
            replications,
            seed,
        })
    }

    /// Equal abilities for `n` players, `2k` games per pair.
    pub fn null(n: usize, k: usize, replications: usize, seed: u64) -> Result<Self> {
        let labels = (1..=n).map(|i| i.to_string()).collect();
        Self::new(AbilityVector::zeros(labels), 2 * k as u64, replications, seed)
    }
}

fn pair_rng(seed: u64, pair: u64, attempt: u64, replication: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&pair.to_le_bytes());
    key[16..24].copy_from_slice(&attempt.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replication);
    rng
}

/// One simulated tournament: for each meeting pair `i < j`,
/// `c_ij ~ Binomial(games, logistic(mu_i - mu_j))` and
/// `c_ji = games - c_ij`. Diagonal is zero.
pub fn simulate_schedule<T: Scalar>(
    config: &SimulationConfig<T>,
    structure: Structure,
    replication: u64,
    attempt: u64,
) -> Result<CountMatrix<T>> {
    let n = config.abilities.len();
    let mu = &config.abilities.mu;
    let mut counts = DenseMatrix::zeros(n, n);
    for (i, j) in structure.pairs(n) {
        let pair = (i * n + j) as u64;
        let p = logistic(mu[i] - mu[j]).to_f64_lossy();
        let dist =
            Binomial::new(config.games_per_pair, p).map_err(|e| Error::Domain(format!("binomial parameters: {e}")))?;
        let wins = dist.sample(&mut pair_rng(config.seed, pair, attempt, replication));
        counts[(i, j)] = T::from_u64(wins).expect("count fits scalar");
        counts[(j, i)] = T::from_u64(config.games_per_pair - wins).expect("count fits scalar");
    }
    CountMatrix::new(counts, config.abilities.labels.clone())
}

/// Round-robin tournament, replication 0.
pub fn simulate_tournament<T: Scalar>(config: &SimulationConfig<T>) -> Result<CountMatrix<T>> {
    simulate_schedule(config, Structure::RoundRobin, 0, 0)
}

fn is_degenerate<T: Scalar>(c: &CountMatrix<T>) -> bool {
    c.column_sums().iter().any(|&s| !(s > T::zero())) || !c.is_irreducible()
}

#[derive(Debug, Clone)]
pub struct MonteCarloReport<T> {
    /// Empirical covariance of centered log influence weights.
    pub covariance: CovarianceMatrix<T>,
    /// Monte Carlo standard error of each covariance entry.
    pub std_errors: DenseMatrix<T>,
    pub mean: Vec<T>,
    pub replications: usize,
    pub rejections: usize,
}

impl<T: Scalar> MonteCarloReport<T> {
    /// `(empirical - target) / std_error` per entry.
    pub fn z_scores(&self, target: &CovarianceMatrix<T>) -> Result<DenseMatrix<T>> {
        let diff = self.covariance.entries().sub(target.entries())?;
        let n = diff.rows();
        Ok(DenseMatrix::from_fn(n, n, |i, j| {
            let se = self.std_errors[(i, j)];
            if se > T::zero() {
                diff[(i, j)] / se
            } else {
                T::zero()
            }
        }))
    }
}

fn centered_log_iw<T: Scalar>(c: &CountMatrix<T>) -> Result<Vec<T>> {
    let tol = T::lit(DEFAULT_TOL).max(T::epsilon() * T::lit(16.0));
    let w = influence_weight(c, tol)?;
    let logs: Vec<T> = w.scores.iter().map(|x| x.ln()).collect();
    let mean = logs.iter().copied().sum::<T>() / T::from_count(logs.len());
    Ok(logs.into_iter().map(|x| x - mean).collect())
}

/// Empirical covariance of centered log influence weights over seeded
/// replications. Draws with an empty column or a reducible matrix are
/// rejected and redrawn; the run fails when more than half of all draws
/// are rejected.
pub fn monte_carlo_covariance<T: Scalar>(
    config: &SimulationConfig<T>,
    structure: Structure,
) -> Result<MonteCarloReport<T>> {
    let reps = config.replications;
    if reps < 2 {
        return Err(Error::Domain(format!(
            "covariance needs at least two replications, got {reps}"
        )));
    }
    let n = config.abilities.len();
    let draws: Vec<(Vec<T>, u64)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            for attempt in 0..MAX_ATTEMPTS {
                let c = simulate_schedule(config, structure, r, attempt)?;
                if !is_degenerate(&c) {
                    return Ok((centered_log_iw(&c)?, attempt));
                }
            }
            Err(Error::Degenerate {
                rejections: MAX_ATTEMPTS as usize,
                attempts: MAX_ATTEMPTS as usize,
            })
        })
        .collect::<Result<_>>()?;

    let rejections: usize = draws.iter().map(|(_, a)| *a as usize).sum();
    if rejections > reps {
        return Err(Error::Degenerate {
            rejections,
            attempts: rejections + reps,
        });
    }

    let rf = T::from_count(reps);
    let mut mean = vec![T::zero(); n];
    for (x, _) in &draws {
        for (m, &v) in mean.iter_mut().zip(x) {
            *m = *m + v;
        }
    }
    mean.iter_mut().for_each(|m| *m = *m / rf);

    let mut cov = DenseMatrix::<T>::zeros(n, n);
    let mut second = DenseMatrix::<T>::zeros(n, n);
    for (x, _) in &draws {
        for a in 0..n {
            for b in 0..n {
                let prod = (x[a] - mean[a]) * (x[b] - mean[b]);
                cov[(a, b)] = cov[(a, b)] + prod;
                second[(a, b)] = second[(a, b)] + prod * prod;
            }
        }
    }
    let dof = rf - T::one();
    let std_errors = DenseMatrix::from_fn(n, n, |a, b| {
        // spread of the per-replication products around their mean
        let m1 = cov[(a, b)] / rf;
        let var = (second[(a, b)] / rf - m1 * m1).max(T::zero()) * rf / dof;
        (var / rf).sqrt()
    });
    let cov = cov.scale(T::one() / dof);
    Ok(MonteCarloReport {
        covariance: CovarianceMatrix::new(cov)?,
        std_errors,
        mean,
        replications: reps,
        rejections,
    })
}
