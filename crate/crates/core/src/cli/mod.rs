//! Command-line front end: `rank`, `check-qs`, `asymptotics` and
//! `simulate`.
//!
//! Exit statuses: 0 success, 2 parse or domain error, 3 numerical
//! non-convergence, 4 negative quasi-symmetry check.

pub mod input;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::asymptotics::{circular_covariance, delta_method_covariance, round_robin_covariance};
use crate::bradley_terry::{fit_bt, AbilityVector, DEFAULT_FIT_MAX_ITER};
use crate::error::Error;
use crate::generators::{monte_carlo_covariance, Structure};
use crate::quasi_symmetry::{check_triplets, decompose_qs, is_reversible, verify_theorem};
use crate::rankings::{influence_per_publication, influence_weight, pagerank, total_influence};
use crate::{CountMatrix, CovarianceMatrix, DampingFactor, SimulationConfig};

pub use input::{emit_matrix, parse_input, parse_str, InputFormat};
pub use report::{OutputFormat, RunReport, ScoreEntry};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_NOT_QS: i32 = 4;

const ALPHA_NOTE: &str =
    "alpha < 1: the damped chain is not reversible, so these scores have no quasi-symmetry correspondence with influence weight or Bradley-Terry abilities";

#[derive(Debug, Parser)]
#[command(
    name = "qsrank",
    version,
    about = "PageRank, influence weight and Bradley-Terry rankings for paired comparisons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank players or journals from a count matrix.
    Rank(RankArgs),
    /// Test quasi-symmetry, the eigenvector correspondence and reversibility.
    CheckQs(CheckArgs),
    /// Closed-form delta-method covariance of log influence weights.
    Asymptotics(AsymptoticsArgs),
    /// Monte Carlo covariance of log influence weights at equal abilities.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// CSV edge list (`winner,loser,count`) or labelled square matrix.
    pub input: PathBuf,
    /// Input layout; detected from the header when omitted.
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Pagerank,
    Iw,
    Total,
    Ipp,
    Bt,
}

#[derive(Debug, Clone, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value = "pagerank")]
    pub method: Method,
    /// Damping factor for `pagerank`.
    #[arg(long, default_value_t = 0.85)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// `label,articles` CSV, required for `ipp`.
    #[arg(long)]
    pub articles: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    RoundRobin,
    Circular,
}

impl From<StructureArg> for Structure {
    fn from(s: StructureArg) -> Self {
        match s {
            StructureArg::RoundRobin => Structure::RoundRobin,
            StructureArg::Circular => Structure::Circular,
        }
    }
}

impl StructureArg {
    fn name(self) -> &'static str {
        match self {
            StructureArg::RoundRobin => "round-robin",
            StructureArg::Circular => "circular",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, value_enum)]
    pub structure: StructureArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Also compute the numerical delta-method and Bradley-Terry
    /// covariances and report their discrepancies.
    #[arg(long)]
    pub check: bool,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub structure: StructureArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 10_000)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "table")]
    pub format: OutputFormat,
}

/// Command failure with the exit status it maps to.
#[derive(Debug)]
pub struct Failure {
    pub status: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Convergence { .. } | Error::Decomposition { .. } => EXIT_NUMERICAL,
            _ => EXIT_INPUT,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

/// Output of a successful command: the rendered report and its status.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub status: i32,
}

fn matrix_value(m: &crate::DenseMatrix) -> Value {
    Value::from(m.to_rows())
}

fn covariance_value(c: &CovarianceMatrix) -> Value {
    matrix_value(c.entries())
}

fn player_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

pub fn cmd_rank(args: &RankArgs) -> Result<Outcome, Failure> {
    let input = parse_input(&args.input.input, args.input.input_format)?;
    let c = &input.counts;
    let tol = args.tol;
    let mut report = match args.method {
        Method::Pagerank => {
            let alpha = DampingFactor::new(args.alpha)?;
            let pr = pagerank(c, alpha, tol)?;
            let mut r = RunReport::new("pagerank").with_scores(c.labels(), &pr.scores, None);
            r.alpha = Some(args.alpha);
            if !alpha.is_undamped() {
                r.diag("note", ALPHA_NOTE);
            }
            r
        }
        Method::Iw => {
            let w = influence_weight(c, tol)?;
            RunReport::new("iw").with_scores(c.labels(), &w.scores, None)
        }
        Method::Total => {
            let t = total_influence(c, tol)?;
            RunReport::new("total").with_scores(c.labels(), &t.scores, None)
        }
        Method::Ipp => {
            let path = args.articles.as_ref().ok_or_else(|| Failure {
                status: EXIT_INPUT,
                message: "method ipp needs --articles".into(),
            })?;
            let articles = input::parse_articles(path, c.labels())?;
            let ipp = influence_per_publication(c, &articles, tol)?;
            RunReport::new("ipp").with_scores(c.labels(), &ipp.scores, None)
        }
        Method::Bt => {
            let fit = fit_bt(c, tol, DEFAULT_FIT_MAX_ITER)?;
            let se = fit.std_errors();
            let mut r = RunReport::new("bt").with_scores(c.labels(), &fit.abilities.mu, Some(&se));
            r.diag("deviance", fit.deviance);
            r.diag("iterations", fit.iterations);
            r.diag("converged", fit.converged);
            r
        }
    };
    report.metadata.input_digest = Some(input.digest);
    report.metadata.tolerance = Some(tol);
    Ok(Outcome {
        report,
        status: EXIT_OK,
    })
}

pub fn cmd_check_qs(args: &CheckArgs) -> Result<Outcome, Failure> {
    let input = parse_input(&args.input.input, args.input.input_format)?;
    let c = &input.counts;
    let tol = args.tol;
    let mut report = RunReport::new("check-qs");

    let triplets = check_triplets(c, tol);
    report.diag("triplet_max_gap", triplets.max_relative_gap);
    report.diag("triplet_violations", triplets.violations.len());
    report.diag(
        "one_sided_pairs",
        Value::from(
            triplets
                .one_sided_pairs
                .iter()
                .map(|&(i, j)| json!([c.labels()[i], c.labels()[j]]))
                .collect::<Vec<_>>(),
        ),
    );

    let decomposition = decompose_qs(c, tol);
    match &decomposition {
        Ok(qs) => {
            report.diag("decomposition_residual", qs.residual);
            let total: f64 = qs.d.iter().sum();
            let normalized: Vec<f64> = qs.d.iter().map(|x| x / total).collect();
            report = report.with_scores(c.labels(), &normalized, None);
            report.diag("d", Value::from(qs.d.clone()));
        }
        Err(e) => {
            report.diag("decomposition", format!("failed: {e}"));
            // every label still gets a score; influence weight is the
            // natural stand-in for d
            let w = influence_weight(c, tol.min(crate::matrix::DEFAULT_TOL))?;
            report = report.with_scores(c.labels(), &w.scores, None);
        }
    }
    report.diag(
        "score_kind",
        if decomposition.is_ok() { "d" } else { "influence_weight" },
    );

    if decomposition.is_ok() {
        match verify_theorem(c, tol) {
            Ok(check) => {
                report.diag("theorem_residual", check.eigen_residual);
                report.diag("influence_gap", check.influence_gap);
                report.diag("ability_gap", check.ability_gap);
                report.diag("deviance", check.deviance);
            }
            Err(e) => report.diag("theorem", format!("failed: {e}")),
        }
    }

    match is_reversible(c, tol) {
        Ok(rev) => {
            report.diag("reversible", rev.reversible);
            report.diag("detailed_balance_gap", rev.max_gap);
        }
        Err(e) => report.diag("reversible", format!("undetermined: {e}")),
    }

    let qs = triplets.is_quasi_symmetric && decomposition.is_ok();
    report.diag("quasi_symmetric", qs);
    report.metadata.input_digest = Some(input.digest);
    report.metadata.tolerance = Some(tol);
    Ok(Outcome {
        report,
        status: if qs { EXIT_OK } else { EXIT_NOT_QS },
    })
}

pub fn cmd_asymptotics(args: &AsymptoticsArgs) -> Result<Outcome, Failure> {
    let (n, k) = (args.n, args.k);
    let structure = Structure::from(args.structure);
    let mut report = RunReport::new("asymptotics");
    let closed = match args.structure {
        StructureArg::RoundRobin => round_robin_covariance(n, k)?,
        StructureArg::Circular if n >= 7 => circular_covariance(n, k)?,
        StructureArg::Circular => {
            report.diag("note", "n < 7: bands from the numerical delta method");
            delta_method_covariance(&structure.counts(n, k)?)?
        }
    };
    report.diag("structure", args.structure.name());
    report.diag("n", n);
    report.diag("k", k);
    report.diag("covariance", covariance_value(&closed));
    if args.check {
        let counts: CountMatrix = structure.counts(n, k)?;
        let numeric = delta_method_covariance(&counts)?;
        let bt = crate::bradley_terry::bt_covariance(&counts, &AbilityVector::zeros(counts.labels().to_vec()))?;
        let d_numeric = closed.max_abs_diff(&numeric)?;
        let d_bt = closed.max_abs_diff(&bt)?;
        let d_pair = numeric.max_abs_diff(&bt)?;
        report.diag("delta_method_discrepancy", d_numeric);
        report.diag("bradley_terry_discrepancy", d_bt);
        report.diag("delta_vs_bradley_terry_discrepancy", d_pair);
        report.diag("max_discrepancy", d_numeric.max(d_bt).max(d_pair));
    }
    let report = report.with_scores(&player_labels(n), &closed.variances(), Some(&closed.std_errors()));
    Ok(Outcome {
        report,
        status: EXIT_OK,
    })
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Outcome, Failure> {
    let (n, k) = (args.n, args.k);
    let structure = Structure::from(args.structure);
    structure.counts::<f64>(n, k)?;
    let config = SimulationConfig::null(n, k, args.reps, args.seed)?;
    let mc = monte_carlo_covariance(&config, structure)?;
    let target = structure.target_covariance::<f64>(n, k)?;
    let z = mc.z_scores(&target)?;
    let se_var = mc.std_errors.diagonal();

    let mut report =
        RunReport::new("simulate").with_scores(&player_labels(n), &mc.covariance.variances(), Some(&se_var));
    report.diag("structure", args.structure.name());
    report.diag("n", n);
    report.diag("k", k);
    report.diag("replications", mc.replications);
    report.diag("rejections", mc.rejections);
    report.diag("empirical_covariance", covariance_value(&mc.covariance));
    report.diag("target_covariance", covariance_value(&target));
    report.diag("std_errors", matrix_value(&mc.std_errors));
    report.diag("z_scores", matrix_value(&z));
    report.diag("max_abs_z", z.max_abs());
    report.metadata.seed = Some(args.seed);
    Ok(Outcome {
        report,
        status: EXIT_OK,
    })
}

fn format_of(command: &Command) -> OutputFormat {
    match command {
        Command::Rank(a) => a.format,
        Command::CheckQs(a) => a.format,
        Command::Asymptotics(a) => a.format,
        Command::Simulate(a) => a.format,
    }
}

pub fn execute(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Rank(a) => cmd_rank(a),
        Command::CheckQs(a) => cmd_check_qs(a),
        Command::Asymptotics(a) => cmd_asymptotics(a),
        Command::Simulate(a) => cmd_simulate(a),
    }
}

/// Parses arguments, runs the command, writes the report to `out` and
/// errors to `err`, and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return status;
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.report.render(format_of(&cli.command)).as_bytes());
            outcome.status
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.status
        }
    }
}
