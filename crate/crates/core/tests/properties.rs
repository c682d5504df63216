mod common;

use common::*;
use proptest::prelude::*;
use qsrank::asymptotics::{transition_derivative_at, PerturbationDirection};
use qsrank::bradley_terry::{bt_gradient, bt_log_likelihood};
use qsrank::matrix::symmetric_eigenvalues;
use qsrank::quasi_symmetry::is_reversible_chain;
use qsrank::{
    check_triplets, circular, decompose_qs, delta_method_covariance, fit_bt, influence_weight, is_reversible,
    leading_eigenvector, log_iw_jacobian, monte_carlo_covariance, pagerank, predict_prob, pseudoinverse, round_robin,
    simulate_tournament, stationary_derivative, total_influence, transition_matrix, AbilityVector, CountMatrix,
    DampingFactor, DenseMatrix, SimulationConfig, Structure,
};
use rand::Rng;

const TOL: f64 = 1e-13;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn counts() -> impl Strategy<Value = CountMatrix> {
    (2usize..12, any::<u64>()).prop_map(|(n, seed)| random_irreducible(n, seed))
}

fn qs_counts() -> impl Strategy<Value = CountMatrix> {
    (3usize..10, any::<u64>()).prop_map(|(n, seed)| random_qs_positive(n, seed))
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn undamped_pagerank_is_total_influence(c in counts()) {
        let pr = pagerank(&c, DampingFactor::undamped(), TOL).unwrap();
        let ti = total_influence(&c, TOL).unwrap();
        prop_assert!(max_abs_diff(&pr.scores, &ti.scores) < 1e-10);
    }

    #[test]
    fn influence_weight_ignores_diagonal_and_scale(c in counts(), factor in 0.01f64..100.0, seed: u64) {
        let w = influence_weight(&c, TOL).unwrap();
        let mut r = rng(seed);
        let diag: Vec<f64> = (0..c.n()).map(|_| r.random_range(0.0..30.0)).collect();
        let moved = influence_weight(&c.with_diagonal(&diag).unwrap(), TOL).unwrap();
        prop_assert!(max_abs_diff(&w.scores, &moved.scores) < 1e-10);
        let scaled = influence_weight(&c.scaled(factor).unwrap(), TOL).unwrap();
        prop_assert!(max_abs_diff(&w.scores, &scaled.scores) < 1e-10);
    }

    #[test]
    fn influence_weight_matches_direct_solve(c in counts()) {
        let w = influence_weight(&c, TOL).unwrap();
        prop_assert!(max_abs_diff(&w.scores, &iw_direct(c.counts())) < 1e-10);
    }

    #[test]
    fn chains_share_leading_eigenvalue(c in counts()) {
        // A^-1 C and C A^-1 are similar, so both have eigenvalue one
        let n = c.n();
        let sums = c.column_sums();
        let left = DenseMatrix::from_fn(n, n, |i, j| c.get(i, j) / sums[i]);
        let right = transition_matrix(&c, DampingFactor::undamped()).unwrap();
        let lazy = |m: &DenseMatrix| DenseMatrix::from_fn(n, n, |i, j| 0.5 * (m[(i, j)] + if i == j { 1.0 } else { 0.0 }));
        let a = leading_eigenvector(&lazy(&left), TOL, 100_000).unwrap();
        let b = leading_eigenvector(&lazy(&right), TOL, 100_000).unwrap();
        prop_assert!((a.value - 1.0).abs() < 1e-10);
        prop_assert!((b.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn permutation_equivariance(c in counts(), seed: u64) {
        let n = c.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut r = rng(seed);
        for i in (1..n).rev() {
            perm.swap(i, r.random_range(0..=i));
        }
        let p = c.permuted(&perm).unwrap();
        let w = influence_weight(&c, TOL).unwrap();
        let wp = influence_weight(&p, TOL).unwrap();
        for (new, &old) in perm.iter().enumerate() {
            prop_assert!((wp.scores[new] - w.scores[old]).abs() < 1e-10);
            prop_assert_eq!(&wp.labels[new], &w.labels[old]);
        }
    }

    #[test]
    fn bt_gradient_matches_finite_differences(c in counts(), seed: u64) {
        let n = c.n();
        let mut r = rng(seed);
        let mu: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..2.0)).collect();
        let labels = c.labels().to_vec();
        let ll = |x: &[f64]| bt_log_likelihood(&c, &AbilityVector { mu: x.to_vec(), labels: labels.clone() }).unwrap();
        let g = bt_gradient(&c, &mu);
        for k in 0..n {
            let fd = central_diff(|t| {
                let mut x = mu.clone();
                x[k] += t;
                vec![ll(&x)]
            }, 1e-4)[0];
            prop_assert!((g[k] - fd).abs() < 1e-6 * (1.0 + fd.abs()), "k={} analytic {} fd {}", k, g[k], fd);
        }
    }

    #[test]
    fn bt_likelihood_is_translation_invariant(c in counts(), shift in -5.0f64..5.0) {
        let n = c.n();
        let mu: Vec<f64> = (0..n).map(|i| i as f64 * 0.3 - 1.0).collect();
        let labels = c.labels().to_vec();
        let a = bt_log_likelihood(&c, &AbilityVector { mu: mu.clone(), labels: labels.clone() }).unwrap();
        let shifted: Vec<f64> = mu.iter().map(|x| x + shift).collect();
        let b = bt_log_likelihood(&c, &AbilityVector { mu: shifted, labels }).unwrap();
        prop_assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn win_probabilities_complement(mu in proptest::collection::vec(-30.0f64..30.0, 2..8)) {
        let n = mu.len();
        let labels = (0..n).map(|i| i.to_string()).collect();
        let a = AbilityVector { mu, labels };
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let s = predict_prob(&a, i, j).unwrap() + predict_prob(&a, j, i).unwrap();
                    prop_assert!((s - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn bt_covariance_is_psd_and_annihilates_ones(c in counts()) {
        let fit = fit_bt(&c, 1e-10, 10_000).unwrap();
        let cov = &fit.covariance;
        let scale = cov.entries().max_abs().max(1e-300);
        prop_assert!(cov.min_eigenvalue().unwrap() > -1e-8 * scale);
        prop_assert!(cov.max_row_sum() < 1e-8 * scale);
        let mean = fit.abilities.mu.iter().sum::<f64>();
        prop_assert!(mean.abs() < 1e-10);
    }

    #[test]
    fn delta_covariance_is_psd_and_annihilates_weights(c in counts()) {
        // log-weights move only along directions with sum_l w_l dlog w_l = 0
        let cov = delta_method_covariance(&c).unwrap();
        let scale = cov.entries().max_abs().max(1e-300);
        prop_assert!(cov.min_eigenvalue().unwrap() > -1e-10 * scale);
        let w = iw_direct(c.counts());
        let cw = cov.entries().mul_vec(&w).unwrap();
        prop_assert!(cw.iter().all(|x| x.abs() < 1e-10 * scale));
    }

    #[test]
    fn jacobian_columns_are_weight_orthogonal(c in counts()) {
        // sum_l w_l = 1 forces sum_l w_l d log w_l = 0
        let j = log_iw_jacobian(&c).unwrap();
        let w = iw_direct(c.counts());
        for k in 0..j.column_order.len() {
            let s: f64 = (0..c.n()).map(|l| w[l] * j.entries[(l, k)]).sum();
            let size = (0..c.n()).map(|l| j.entries[(l, k)].abs()).fold(1.0, f64::max);
            prop_assert!(s.abs() < 1e-10 * size, "column {} sums to {}", k, s);
        }
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn penrose_conditions(n in 1usize..50, m in 1usize..50, rank in 1usize..50, seed: u64) {
        let mut r = rng(seed);
        let rank = rank.min(n).min(m);
        let left = DenseMatrix::from_fn(n, rank, |_, _| r.random_range(-1.0..1.0));
        let right = DenseMatrix::from_fn(rank, m, |_, _| r.random_range(-1.0..1.0));
        let a = left.matmul(&right).unwrap();
        let p = pseudoinverse(&a).unwrap();
        let tol = 1e-9 * (1.0 + a.max_abs()) * (1.0 + p.max_abs()).powi(2);
        let apa = a.matmul(&p).unwrap().matmul(&a).unwrap();
        let pap = p.matmul(&a).unwrap().matmul(&p).unwrap();
        let ap = a.matmul(&p).unwrap();
        let pa = p.matmul(&a).unwrap();
        prop_assert!(apa.max_abs_diff(&a).unwrap() < tol);
        prop_assert!(pap.max_abs_diff(&p).unwrap() < tol);
        prop_assert!(ap.max_abs_diff(&ap.transpose()).unwrap() < tol);
        prop_assert!(pa.max_abs_diff(&pa.transpose()).unwrap() < tol);
    }

    #[test]
    fn stationary_derivative_matches_finite_differences(n in 2usize..=20, seed: u64) {
        let c = random_irreducible(n, seed);
        let p = transition(c.counts());
        let pi = stationary(&p);
        let mut r = rng(seed);
        let i = r.random_range(0..n);
        let j = (i + r.random_range(1..n)) % n;
        let dir = PerturbationDirection::new(i, j).unwrap();
        let pdot = transition_derivative_at(&c, &dir).unwrap();
        let analytic = stationary_derivative(&p, &pi, &pdot).unwrap();
        let fd = central_diff(|t| stationary(&transition(&perturbed(c.counts(), i, j, t))), 1e-6);
        prop_assert!(max_abs_diff(&analytic, &fd) < 1e-7);
    }

    #[test]
    fn quasi_symmetry_iff_reversible(c in qs_counts(), factor in 1.05f64..2.0, seed: u64) {
        prop_assert!(is_reversible(&c, 1e-8).unwrap().reversible);
        prop_assert!(check_triplets(&c, 1e-8).is_quasi_symmetric);
        let mut r = rng(seed);
        let n = c.n();
        let i = r.random_range(0..n);
        let j = (i + r.random_range(1..n)) % n;
        let mut m = c.counts().clone();
        m[(i, j)] *= factor;
        let broken = CountMatrix::unlabeled(m).unwrap();
        prop_assert!(!is_reversible(&broken, 1e-8).unwrap().reversible);
        prop_assert!(!check_triplets(&broken, 1e-8).is_quasi_symmetric);
        prop_assert!(decompose_qs(&broken, 1e-8).is_err());
    }

    #[test]
    fn transition_matrix_of_quasi_symmetric_is_quasi_symmetric(c in qs_counts()) {
        let p = transition_matrix(&c, DampingFactor::undamped()).unwrap();
        let as_counts = CountMatrix::unlabeled(p).unwrap();
        prop_assert!(decompose_qs(&as_counts, 1e-10).is_ok());
    }

    #[test]
    fn damped_chain_is_not_reversible(c in qs_counts()) {
        let p = transition_matrix(&c, DampingFactor::new(0.85).unwrap()).unwrap();
        prop_assert!(!is_reversible_chain(&p, 1e-8).unwrap().reversible);
    }

    #[test]
    fn right_factorization_recomposes(c in qs_counts()) {
        let qs = decompose_qs(&c, 1e-10).unwrap();
        let (s_right, d_right) = qs.right_factors();
        prop_assert!(s_right.is_symmetric(1e-9 * s_right.max_abs()));
        let n = c.n();
        let back = DenseMatrix::from_fn(n, n, |i, j| s_right[(i, j)] * d_right[j]);
        prop_assert!(back.max_abs_diff(c.counts()).unwrap() < 1e-10 * c.counts().max_abs());
    }
}

#[test]
fn structured_tournaments_pass_triplets_exactly() {
    for n in 3..12 {
        for k in 1..4 {
            assert!(check_triplets(&round_robin::<f64>(n, k).unwrap(), 0.0).is_quasi_symmetric);
            assert!(check_triplets(&circular::<f64>(n, k).unwrap(), 0.0).is_quasi_symmetric);
        }
    }
}

#[test]
fn simulated_null_draws_are_rarely_quasi_symmetric() {
    let mut failures = 0;
    for seed in 0..100 {
        let cfg = SimulationConfig::null(6, 2, 1, seed).unwrap();
        let c = simulate_tournament(&cfg).unwrap();
        if !check_triplets(&c, 1e-8).is_quasi_symmetric {
            failures += 1;
        }
    }
    assert!(
        failures >= 95,
        "only {failures} of 100 draws violate the triplet identity"
    );
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let cfg = SimulationConfig::null(5, 4, 300, 99).unwrap();
            let mc = monte_carlo_covariance(&cfg, Structure::Circular).unwrap();
            let jac = log_iw_jacobian(&random_irreducible(9, 3)).unwrap();
            (mc.covariance, mc.std_errors, jac)
        })
    };
    assert_eq!(run(1), run(4));
    let cfg = SimulationConfig::null(6, 3, 1, 42).unwrap();
    assert_eq!(simulate_tournament(&cfg).unwrap(), simulate_tournament(&cfg).unwrap());
}

#[test]
fn covariance_spectrum_matches_laplacian() {
    // round robin: (k/2) J J^T has eigenvalues 0 and 2/(k n) (n - 1 times)
    for n in 2..8 {
        let cov = delta_method_covariance(&round_robin::<f64>(n, 3).unwrap()).unwrap();
        let eig = symmetric_eigenvalues(cov.entries()).unwrap();
        assert!(eig[0].abs() < 1e-12);
        for &e in &eig[1..] {
            assert!((e - 2.0 / (3.0 * n as f64)).abs() < 1e-12, "{eig:?}");
        }
    }
}

#[test]
fn single_precision_path() {
    let c =
        qsrank::f32::CountMatrix::from_rows(&[vec![0.0, 1.0, 1.0], vec![2.0, 0.0, 2.0], vec![4.0, 4.0, 0.0]]).unwrap();
    let w = influence_weight(&c, 1e-6f32).unwrap();
    let want = [1.0 / 7.0, 2.0 / 7.0, 4.0 / 7.0];
    for (a, b) in w.scores.iter().zip(want) {
        assert!((a - b).abs() < 1e-5);
    }
    let fit = fit_bt(&c, 1e-5f32, 10_000).unwrap();
    assert!((fit.abilities.mu[2] - 2f32.ln()).abs() < 1e-4);
}
