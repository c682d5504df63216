//! Paired-comparison rankings from count matrices.
//!
//! `c_ij` counts wins of `i` over `j` (equivalently citations from `j` to
//! `i`). The crate computes PageRank, influence weight and its relatives,
//! fits the Bradley-Terry model, tests quasi-symmetry and reversibility,
//! and evaluates delta-method covariances of log influence weights in
//! closed form, numerically, and by seeded Monte Carlo simulation.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the precision to `f64`.

// `!(x > 0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod asymptotics;
pub mod bradley_terry;
pub mod cli;
pub mod error;
pub mod generators;
pub mod matrix;
pub mod quasi_symmetry;
pub mod rankings;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use asymptotics::{
    circular_covariance, delta_covariance, delta_method_covariance, log_iw_jacobian, null_delta_covariance,
    round_robin_covariance, stationary_derivative, transition_derivative,
};
pub use bradley_terry::{bt_covariance, bt_deviance, fit_bt, predict_prob};
pub use generators::{
    circular, monte_carlo_covariance, random_quasi_symmetric, round_robin, simulate_tournament, Structure,
};
pub use matrix::{column_sums, is_irreducible, leading_eigenvector, pseudoinverse};
pub use quasi_symmetry::{check_triplets, decompose_qs, is_reversible, verify_theorem};
pub use rankings::{
    influence_per_publication, influence_weight, iw_from_pagerank, pagerank, pagerank_from_iw, total_influence,
    transition_matrix,
};

pub type DenseMatrix = matrix::DenseMatrix<f64>;
pub type CountMatrix = rankings::CountMatrix<f64>;
pub type RankingVector = rankings::RankingVector<f64>;
pub type DampingFactor = rankings::DampingFactor<f64>;
pub type AbilityVector = bradley_terry::AbilityVector<f64>;
pub type FitReport = bradley_terry::FitReport<f64>;
pub type CovarianceMatrix = asymptotics::CovarianceMatrix<f64>;
pub type JacobianMatrix = asymptotics::JacobianMatrix<f64>;
pub type PerturbationDirection = asymptotics::PerturbationDirection<f64>;
pub type QsDecomposition = quasi_symmetry::QsDecomposition<f64>;
pub type TripletReport = quasi_symmetry::TripletReport<f64>;
pub type SimulationConfig = generators::SimulationConfig<f64>;
pub type MonteCarloReport = generators::MonteCarloReport<f64>;
pub type EigenResult = matrix::EigenResult<f64>;

/// Single-precision aliases.
pub mod f32 {
    pub type DenseMatrix = crate::matrix::DenseMatrix<f32>;
    pub type CountMatrix = crate::rankings::CountMatrix<f32>;
    pub type RankingVector = crate::rankings::RankingVector<f32>;
    pub type AbilityVector = crate::bradley_terry::AbilityVector<f32>;
    pub type CovarianceMatrix = crate::asymptotics::CovarianceMatrix<f32>;
}
