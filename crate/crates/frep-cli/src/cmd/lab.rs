//! `frep lab` subcommands: genericity experiments, the transport chain,
//! the cyclicity chain, density probes, and membership queries.
//!
//! Every lab subcommand accepts both direct flags and a JSON config
//! file (`--config`); flags take precedence over config values, which
//! take precedence over defaults. Seeds never default.

use super::{norm_source_from_flag, norm_source_name, positive, require, CommandOutput, Emitter};
use crate::digest::representation_digest;
use crate::error::{CliError, CliResult};
use crate::formats::{element_value, load_representation_default, load_vector};
use crate::report::ReportValue;
use clap::Args;
use frep_core::irred::DEFAULT_RANK_TOL;
use frep_core::lab::{
    block_heavy_pair, check_transport, cyclicity_trial_vectors, density_probe,
    genericity_control, genericity_experiment, membership_grid, verify_cyclicity_chain,
    verify_transport_chain, ControlKind, CyclicityFailure, CyclicityOutcome, MembershipQuery,
};
use frep_core::rep::{random_haar_rep, ProbeSequence};
use frep_core::seed::derive_seed;
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(clap::Subcommand, Debug)]
pub enum LabCmd {
    /// Monte Carlo irreducibility of tensor products with Haar factors.
    Genericity(GenericityArgs),
    /// Three-term transport chain on a block-extended representation.
    Chain(ChainArgs),
    /// Cyclicity chain trials.
    Cyclicity(CyclicityArgs),
    /// Density probe: block truncations and witness searches.
    Density(DensityArgs),
    /// Direct membership checks and witness-search grids.
    Membership(MembershipArgs),
}

fn load_config<T: for<'a> Deserialize<'a> + Default>(path: &Option<PathBuf>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| {
                CliError::input(format!(
                    "{}: malformed JSON at line {}, column {}: {e}",
                    p.display(),
                    e.line(),
                    e.column()
                ))
            })
        }
    }
}

fn config_str(path: &Option<PathBuf>) -> ReportValue {
    path.as_ref()
        .map(|p| ReportValue::from(p.display().to_string()))
        .unwrap_or(ReportValue::Null)
}

// ---------------------------------------------------------------- genericity

#[derive(Args, Debug)]
pub struct GenericityArgs {
    #[arg(long, env = "FREP_CONFIG")]
    config: Option<PathBuf>,
    /// Representation JSON for the fixed tensor factor.
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    pi_dim: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "FREP_SEED")]
    seed: Option<u64>,
    #[arg(long, env = "FREP_RANK_TOL")]
    tol: Option<f64>,
    /// Replace the Haar factor with a reducible control.
    #[arg(long, value_parser = ["trivial", "same"])]
    control: Option<String>,
    #[arg(long, env = "FREP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "FREP_CSV")]
    csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct GenericityConfig {
    eta: Option<PathBuf>,
    pi_dim: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    tol: Option<f64>,
    control: Option<String>,
}

pub fn genericity(args: GenericityArgs) -> CliResult<()> {
    let cfg: GenericityConfig = load_config(&args.config)?;
    let emitter = Emitter::prepare(args.out.clone(), args.csv.clone())?;
    let eta_path = require(args.eta.or(cfg.eta), "eta")?;
    let eta = load_representation_default(&eta_path)?;
    let tol = positive(args.tol.or(cfg.tol).unwrap_or(DEFAULT_RANK_TOL), "tol")?;
    let control = args.control.or(cfg.control);
    let mut digests = BTreeMap::new();
    digests.insert(eta_path.display().to_string(), representation_digest(&eta));

    if let Some(kind) = &control {
        let kind_enum = match kind.as_str() {
            "trivial" => ControlKind::TrivialPi,
            "same" => ControlKind::SamePi,
            other => return Err(CliError::input(format!("unknown control {other:?}"))),
        };
        let report = genericity_control(&eta, kind_enum, tol)?;
        return emitter.emit(CommandOutput {
            command: "lab genericity".into(),
            config: ReportValue::map([
                ("config", config_str(&args.config)),
                ("control", ReportValue::from(kind.clone())),
                ("eta", ReportValue::from(eta_path.display().to_string())),
                ("tol", ReportValue::from(tol)),
            ]),
            input_digests: digests,
            result: ReportValue::map([
                ("commutant_dim", ReportValue::from(report.commutant_dim)),
                ("algebra_dim", ReportValue::from(report.algebra_dim)),
                ("is_irreducible", ReportValue::from(report.is_irreducible)),
            ]),
            artifact: None,
        csv: Some((
                vec!["control", "commutant_dim", "algebra_dim", "is_irreducible"],
                vec![vec![
                    ReportValue::from(kind.clone()),
                    ReportValue::from(report.commutant_dim),
                    ReportValue::from(report.algebra_dim),
                    ReportValue::from(report.is_irreducible),
                ]],
            )),
        });
    }

    let pi_dim = require(args.pi_dim.or(cfg.pi_dim), "pi_dim")?;
    let trials = require(args.trials.or(cfg.trials), "trials")?;
    let seed = require(args.seed.or(cfg.seed), "seed")?;
    let summary = genericity_experiment(&eta, pi_dim, trials, seed, tol)?;
    let rows: Vec<Vec<ReportValue>> = summary
        .rows
        .iter()
        .map(|r| {
            vec![
                ReportValue::from(r.trial),
                ReportValue::from(r.pi_seed),
                ReportValue::from(r.commutant_dim),
                ReportValue::from(r.algebra_dim),
                ReportValue::from(r.is_irreducible),
            ]
        })
        .collect();
    emitter.emit(CommandOutput {
        command: "lab genericity".into(),
        config: ReportValue::map([
            ("config", config_str(&args.config)),
            ("eta", ReportValue::from(eta_path.display().to_string())),
            ("pi_dim", ReportValue::from(pi_dim)),
            ("trials", ReportValue::from(trials)),
            ("seed", ReportValue::from(seed)),
            ("tol", ReportValue::from(tol)),
        ]),
        input_digests: digests,
        result: ReportValue::map([
            ("trials", ReportValue::from(summary.trials)),
            ("irreducible", ReportValue::from(summary.irreducible)),
            (
                "irreducible_fraction",
                ReportValue::from(summary.irreducible as f64 / summary.trials as f64),
            ),
            (
                "rows",
                ReportValue::list(summary.rows.iter().map(|r| {
                    ReportValue::map([
                        ("trial", ReportValue::from(r.trial)),
                        ("pi_seed", ReportValue::from(r.pi_seed)),
                        ("commutant_dim", ReportValue::from(r.commutant_dim)),
                        ("algebra_dim", ReportValue::from(r.algebra_dim)),
                        ("is_irreducible", ReportValue::from(r.is_irreducible)),
                    ])
                })),
            ),
        ]),
        artifact: None,
        csv: Some((
            vec!["trial", "pi_seed", "commutant_dim", "algebra_dim", "is_irreducible"],
            rows,
        )),
    })
}

// ---------------------------------------------------------------- chain

#[derive(Args, Debug)]
pub struct ChainArgs {
    #[arg(long, env = "FREP_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long)]
    eta: Option<PathBuf>,
    /// Block representation JSON; alternatively --pi-n-haar-dim + seed.
    #[arg(long)]
    pi_n: Option<PathBuf>,
    #[arg(long)]
    pi_n_haar_dim: Option<usize>,
    #[arg(long)]
    total_dim: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, env = "FREP_SEED")]
    seed: Option<u64>,
    /// Complement mass scale for the generated source probe.
    #[arg(long)]
    eps_j: Option<f64>,
    /// Complement mass scale for the generated target probe.
    #[arg(long)]
    eps_k: Option<f64>,
    /// Explicit probe vectors (JSON), overriding generation.
    #[arg(long)]
    xj: Option<PathBuf>,
    #[arg(long)]
    xk: Option<PathBuf>,
    #[arg(long, env = "FREP_RANK_TOL")]
    tol: Option<f64>,
    #[arg(long, env = "FREP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "FREP_CSV")]
    csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct ChainConfig {
    eta: Option<PathBuf>,
    pi_n: Option<PathBuf>,
    pi_n_haar_dim: Option<usize>,
    total_dim: Option<usize>,
    delta: Option<f64>,
    budget: Option<usize>,
    seed: Option<u64>,
    eps_j: Option<f64>,
    eps_k: Option<f64>,
    xj: Option<PathBuf>,
    xk: Option<PathBuf>,
    tol: Option<f64>,
}

pub fn chain(args: ChainArgs) -> CliResult<()> {
    let cfg: ChainConfig = load_config(&args.config)?;
    let emitter = Emitter::prepare(args.out.clone(), args.csv.clone())?;
    let eta_path = require(args.eta.or(cfg.eta), "eta")?;
    let eta = load_representation_default(&eta_path)?;
    let total_dim = require(args.total_dim.or(cfg.total_dim), "total_dim")?;
    let delta = positive(require(args.delta.or(cfg.delta), "delta")?, "delta")?;
    let budget = args.budget.or(cfg.budget).unwrap_or(4);
    let seed = require(args.seed.or(cfg.seed), "seed")?;
    let tol = positive(args.tol.or(cfg.tol).unwrap_or(DEFAULT_RANK_TOL), "tol")?;
    let eps_j = args.eps_j.or(cfg.eps_j).unwrap_or(0.002);
    let eps_k = args.eps_k.or(cfg.eps_k).unwrap_or(0.01);

    let mut digests = BTreeMap::new();
    digests.insert(eta_path.display().to_string(), representation_digest(&eta));

    let (pi_n, pi_n_desc) = match (args.pi_n.or(cfg.pi_n), args.pi_n_haar_dim.or(cfg.pi_n_haar_dim)) {
        (Some(path), _) => {
            let rep = load_representation_default(&path)?;
            digests.insert(path.display().to_string(), representation_digest(&rep));
            (rep, ReportValue::from(path.display().to_string()))
        }
        (None, Some(d)) => {
            let rep = random_haar_rep(eta.k(), d, derive_seed(seed, 1))?;
            (rep, ReportValue::from(format!("haar(d={d})")))
        }
        (None, None) => return Err(CliError::input("provide `pi_n` or `pi_n_haar_dim`")),
    };

    let (xj, xk) = match (args.xj.or(cfg.xj), args.xk.or(cfg.xk)) {
        (Some(pj), Some(pk)) => (load_vector(&pj)?, load_vector(&pk)?),
        (None, None) => block_heavy_pair(
            eta.dim(),
            total_dim,
            pi_n.dim(),
            eps_j,
            eps_k,
            derive_seed(seed, 2),
        ),
        _ => return Err(CliError::input("provide both `xj` and `xk` or neither")),
    };

    let report = verify_transport_chain(&eta, &pi_n, total_dim, &xj, &xk, delta, budget, tol)?;
    let result = ReportValue::map([
        ("delta", ReportValue::from(report.delta)),
        ("term1", ReportValue::from(report.term1)),
        ("term2", ReportValue::from(report.term2)),
        ("term3", ReportValue::from(report.term3)),
        ("total", ReportValue::from(report.total)),
        ("x_j_proj_err", ReportValue::from(report.x_j_proj_err)),
        ("x_k_proj_err", ReportValue::from(report.x_k_proj_err)),
        ("x_j_norm", ReportValue::from(report.x_j_norm)),
        ("x_k_norm", ReportValue::from(report.x_k_norm)),
        ("ratio_ok", ReportValue::from(report.ratio_ok)),
        ("proj_cond_j_ok", ReportValue::from(report.proj_cond_j_ok)),
        ("proj_cond_k_ok", ReportValue::from(report.proj_cond_k_ok)),
        ("passed", ReportValue::from(report.passed)),
        (
            "witness",
            ReportValue::map([
                ("f", element_value(&report.solution.f)),
                ("residual", ReportValue::from(report.solution.residual)),
                (
                    "op_norm_on_rep",
                    ReportValue::from(report.solution.op_norm_on_rep),
                ),
                ("norm_cap", ReportValue::from(report.solution.norm_cap)),
                ("word_budget", ReportValue::from(report.solution.word_budget)),
                ("capped", ReportValue::from(report.solution.capped)),
            ]),
        ),
    ]);
    let csv_row = vec![
        ReportValue::from(report.delta),
        ReportValue::from(report.term1),
        ReportValue::from(report.term2),
        ReportValue::from(report.term3),
        ReportValue::from(report.total),
        ReportValue::from(report.passed),
    ];
    emitter.emit(CommandOutput {
        command: "lab chain".into(),
        config: ReportValue::map([
            ("config", config_str(&args.config)),
            ("eta", ReportValue::from(eta_path.display().to_string())),
            ("pi_n", pi_n_desc),
            ("total_dim", ReportValue::from(total_dim)),
            ("delta", ReportValue::from(delta)),
            ("budget", ReportValue::from(budget)),
            ("seed", ReportValue::from(seed)),
            ("eps_j", ReportValue::from(eps_j)),
            ("eps_k", ReportValue::from(eps_k)),
            ("tol", ReportValue::from(tol)),
        ]),
        input_digests: digests,
        result,
        artifact: None,
        csv: Some((
            vec!["delta", "term1", "term2", "term3", "total", "passed"],
            vec![csv_row],
        )),
    })
}

// ---------------------------------------------------------------- cyclicity

#[derive(Args, Debug)]
pub struct CyclicityArgs {
    #[arg(long, env = "FREP_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    pi: Option<PathBuf>,
    #[arg(long)]
    pi_haar_dim: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "FREP_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    /// Fraction of delta1 used when placing the cyclic vector near its
    /// probe.
    #[arg(long)]
    v_offset: Option<f64>,
    /// Fraction of the target tolerance used when placing y.
    #[arg(long)]
    y_offset: Option<f64>,
    #[arg(long, value_parser = ["rep-norm", "lambda-interval-upper"])]
    norm_source: Option<String>,
    /// Explicit single-case vectors (JSON) instead of trials.
    #[arg(long)]
    v: Option<PathBuf>,
    #[arg(long)]
    y: Option<PathBuf>,
    #[arg(long, env = "FREP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "FREP_CSV")]
    csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct CyclicityConfig {
    eta: Option<PathBuf>,
    pi: Option<PathBuf>,
    pi_haar_dim: Option<usize>,
    trials: Option<usize>,
    seed: Option<u64>,
    epsilon: Option<f64>,
    probes: Option<usize>,
    budget: Option<usize>,
    v_offset: Option<f64>,
    y_offset: Option<f64>,
    norm_source: Option<String>,
}

pub fn cyclicity(args: CyclicityArgs) -> CliResult<()> {
    let cfg: CyclicityConfig = load_config(&args.config)?;
    let emitter = Emitter::prepare(args.out.clone(), args.csv.clone())?;
    let eta_path = require(args.eta.or(cfg.eta), "eta")?;
    let eta = load_representation_default(&eta_path)?;
    let seed = require(args.seed.or(cfg.seed), "seed")?;
    let epsilon = positive(require(args.epsilon.or(cfg.epsilon), "epsilon")?, "epsilon")?;
    let probes_n = args.probes.or(cfg.probes).unwrap_or(64);
    let budget = args.budget.or(cfg.budget).unwrap_or(4);
    let v_offset = args.v_offset.or(cfg.v_offset).unwrap_or(0.5);
    let y_offset = args.y_offset.or(cfg.y_offset).unwrap_or(0.5);
    let source = norm_source_from_flag(
        args.norm_source
            .or(cfg.norm_source)
            .as_deref()
            .unwrap_or("rep-norm"),
    )?;

    let mut digests = BTreeMap::new();
    digests.insert(eta_path.display().to_string(), representation_digest(&eta));
    let (pi, pi_desc) = match (args.pi.or(cfg.pi), args.pi_haar_dim.or(cfg.pi_haar_dim)) {
        (Some(path), _) => {
            let rep = load_representation_default(&path)?;
            digests.insert(path.display().to_string(), representation_digest(&rep));
            (rep, ReportValue::from(path.display().to_string()))
        }
        (None, Some(d)) => (
            random_haar_rep(eta.k(), d, derive_seed(seed, 1))?,
            ReportValue::from(format!("haar(d={d})")),
        ),
        (None, None) => return Err(CliError::input("provide `pi` or `pi_haar_dim`")),
    };
    let dim = eta.dim() * pi.dim();
    let probes = ProbeSequence::generate(derive_seed(seed, 2), dim, probes_n)?;

    let single = match (&args.v, &args.y) {
        (Some(pv), Some(py)) => Some((load_vector(pv)?, load_vector(py)?)),
        (None, None) => None,
        _ => return Err(CliError::input("provide both `v` and `y` or neither")),
    };
    let trials = match single {
        Some(_) => 1,
        None => require(args.trials.or(cfg.trials), "trials")?,
    };

    let mut rows = Vec::with_capacity(trials);
    let mut passed_count = 0usize;
    for trial in 0..trials as u64 {
        let (v, y) = match &single {
            Some((v, y)) => (v.clone(), y.clone()),
            None => cyclicity_trial_vectors(
                &probes,
                epsilon,
                v_offset,
                y_offset,
                derive_seed(seed, 100 + trial),
            ),
        };
        let outcome =
            verify_cyclicity_chain(&eta, &pi, &v, &y, epsilon, &probes, budget, source)?;
        let row = match outcome {
            CyclicityOutcome::Report(r) => {
                if r.passed {
                    passed_count += 1;
                }
                ReportValue::map([
                    ("trial", ReportValue::from(trial)),
                    ("outcome", ReportValue::from("report")),
                    ("passed", ReportValue::from(r.passed)),
                    ("final_error", ReportValue::from(r.final_error)),
                    ("delta1", ReportValue::from(r.delta1)),
                    ("delta2", ReportValue::from(r.delta2)),
                    ("delta_used", ReportValue::from(r.delta_used)),
                    (
                        "chosen_j",
                        r.chosen_j
                            .map(ReportValue::from)
                            .unwrap_or(ReportValue::Null),
                    ),
                    (
                        "chosen_k",
                        r.chosen_k
                            .map(ReportValue::from)
                            .unwrap_or(ReportValue::Null),
                    ),
                    ("op_norm", ReportValue::from(r.op_norm)),
                    ("bound_product", ReportValue::from(r.bound_product)),
                    ("witness_terms", ReportValue::from(r.f.term_count())),
                    ("shortfall", ReportValue::Null),
                ])
            }
            CyclicityOutcome::Failure(failure) => {
                let (kind, needed, achieved) = match failure {
                    CyclicityFailure::ProbeTooCoarseForV { needed, achieved } => {
                        ("probe_too_coarse_for_v", needed, achieved)
                    }
                    CyclicityFailure::ProbeTooCoarseForY { needed, achieved } => {
                        ("probe_too_coarse_for_y", needed, achieved)
                    }
                    CyclicityFailure::NoWitness { delta, residual, .. } => {
                        ("no_witness", delta, residual)
                    }
                };
                ReportValue::map([
                    ("trial", ReportValue::from(trial)),
                    ("outcome", ReportValue::from(kind)),
                    ("passed", ReportValue::from(false)),
                    ("needed", ReportValue::from(needed)),
                    (
                        "shortfall",
                        ReportValue::from(achieved - needed),
                    ),
                    ("achieved", ReportValue::from(achieved)),
                ])
            }
        };
        rows.push(row);
    }

    let csv_rows: Vec<Vec<ReportValue>> = rows
        .iter()
        .map(|r| {
            let ReportValue::Map(m) = r else { unreachable!() };
            vec![
                m.get("trial").cloned().unwrap_or(ReportValue::Null),
                m.get("outcome").cloned().unwrap_or(ReportValue::Null),
                m.get("passed").cloned().unwrap_or(ReportValue::Null),
                m.get("final_error").cloned().unwrap_or(ReportValue::Null),
                m.get("shortfall").cloned().unwrap_or(ReportValue::Null),
            ]
        })
        .collect();

    emitter.emit(CommandOutput {
        command: "lab cyclicity".into(),
        config: ReportValue::map([
            ("config", config_str(&args.config)),
            ("eta", ReportValue::from(eta_path.display().to_string())),
            ("pi", pi_desc),
            ("trials", ReportValue::from(trials)),
            ("seed", ReportValue::from(seed)),
            ("epsilon", ReportValue::from(epsilon)),
            ("probes", ReportValue::from(probes_n)),
            ("budget", ReportValue::from(budget)),
            ("v_offset", ReportValue::from(v_offset)),
            ("y_offset", ReportValue::from(y_offset)),
            ("norm_source", ReportValue::from(norm_source_name(source))),
        ]),
        input_digests: digests,
        result: ReportValue::map([
            ("trials", ReportValue::from(trials)),
            ("passed", ReportValue::from(passed_count)),
            (
                "passed_fraction",
                ReportValue::from(passed_count as f64 / trials as f64),
            ),
            ("rows", ReportValue::List(rows)),
        ]),
        artifact: None,
        csv: Some((
            vec!["trial", "outcome", "passed", "final_error", "shortfall"],
            csv_rows,
        )),
    })
}

// ---------------------------------------------------------------- density

#[derive(Args, Debug)]
pub struct DensityArgs {
    #[arg(long, env = "FREP_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    pi: Option<PathBuf>,
    #[arg(long)]
    pi_haar_dim: Option<usize>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated block sizes.
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long, env = "FREP_SEED")]
    seed: Option<u64>,
    #[arg(long, value_parser = ["rep-norm", "lambda-interval-upper"])]
    norm_source: Option<String>,
    #[arg(long, env = "FREP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "FREP_CSV")]
    csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct DensityConfig {
    eta: Option<PathBuf>,
    pi: Option<PathBuf>,
    pi_haar_dim: Option<usize>,
    j: Option<usize>,
    k: Option<usize>,
    delta: Option<f64>,
    dims: Option<Vec<usize>>,
    budget: Option<usize>,
    probes: Option<usize>,
    seed: Option<u64>,
    norm_source: Option<String>,
}

pub fn density(args: DensityArgs) -> CliResult<()> {
    let cfg: DensityConfig = load_config(&args.config)?;
    let emitter = Emitter::prepare(args.out.clone(), args.csv.clone())?;
    let eta_path = require(args.eta.or(cfg.eta), "eta")?;
    let eta = load_representation_default(&eta_path)?;
    let seed = require(args.seed.or(cfg.seed), "seed")?;
    let j = require(args.j.or(cfg.j), "j")?;
    let k = require(args.k.or(cfg.k), "k")?;
    let delta = positive(require(args.delta.or(cfg.delta), "delta")?, "delta")?;
    let budget = args.budget.or(cfg.budget).unwrap_or(6);
    let probes_n = args.probes.or(cfg.probes).unwrap_or(32);
    let source = norm_source_from_flag(
        args.norm_source
            .or(cfg.norm_source)
            .as_deref()
            .unwrap_or("rep-norm"),
    )?;

    let mut digests = BTreeMap::new();
    digests.insert(eta_path.display().to_string(), representation_digest(&eta));
    let (pi, pi_desc) = match (args.pi.or(cfg.pi), args.pi_haar_dim.or(cfg.pi_haar_dim)) {
        (Some(path), _) => {
            let rep = load_representation_default(&path)?;
            digests.insert(path.display().to_string(), representation_digest(&rep));
            (rep, ReportValue::from(path.display().to_string()))
        }
        (None, Some(d)) => (
            random_haar_rep(eta.k(), d, derive_seed(seed, 1))?,
            ReportValue::from(format!("haar(d={d})")),
        ),
        (None, None) => return Err(CliError::input("provide `pi` or `pi_haar_dim`")),
    };
    let dims = args
        .dims
        .or(cfg.dims)
        .unwrap_or_else(|| (1..=pi.dim()).collect());

    let metric_probes = ProbeSequence::generate(derive_seed(seed, 2), pi.dim(), probes_n)?;
    let tensor_probes =
        ProbeSequence::generate(derive_seed(seed, 3), eta.dim() * pi.dim(), probes_n)?;
    let query = MembershipQuery {
        j,
        k,
        delta,
        f: None,
    };
    let rows = density_probe(
        &pi,
        &eta,
        &query,
        &dims,
        budget,
        source,
        &metric_probes,
        &tensor_probes,
    )?;
    let csv_rows: Vec<Vec<ReportValue>> = rows
        .iter()
        .map(|r| {
            vec![
                ReportValue::from(r.block_dim),
                ReportValue::from(r.distance),
                ReportValue::from(r.witness_found),
                r.residual.map(ReportValue::from).unwrap_or(ReportValue::Null),
            ]
        })
        .collect();
    emitter.emit(CommandOutput {
        command: "lab density".into(),
        config: ReportValue::map([
            ("config", config_str(&args.config)),
            ("eta", ReportValue::from(eta_path.display().to_string())),
            ("pi", pi_desc),
            ("j", ReportValue::from(j)),
            ("k", ReportValue::from(k)),
            ("delta", ReportValue::from(delta)),
            (
                "dims",
                ReportValue::list(dims.iter().map(|&d| ReportValue::from(d))),
            ),
            ("budget", ReportValue::from(budget)),
            ("probes", ReportValue::from(probes_n)),
            ("seed", ReportValue::from(seed)),
            ("norm_source", ReportValue::from(norm_source_name(source))),
        ]),
        input_digests: digests,
        result: ReportValue::list(rows.iter().map(|r| {
            ReportValue::map([
                ("block_dim", ReportValue::from(r.block_dim)),
                ("distance", ReportValue::from(r.distance)),
                ("witness_found", ReportValue::from(r.witness_found)),
                (
                    "residual",
                    r.residual.map(ReportValue::from).unwrap_or(ReportValue::Null),
                ),
                (
                    "capped",
                    r.capped.map(ReportValue::from).unwrap_or(ReportValue::Null),
                ),
            ])
        })),
        artifact: None,
        csv: Some((
            vec!["block_dim", "distance", "witness_found", "residual"],
            csv_rows,
        )),
    })
}

// ---------------------------------------------------------------- membership

#[derive(Args, Debug)]
pub struct MembershipArgs {
    #[arg(long, env = "FREP_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long)]
    eta: Option<PathBuf>,
    #[arg(long)]
    pi: Option<PathBuf>,
    #[arg(long)]
    pi_haar_dim: Option<usize>,
    /// Element JSON: runs the direct check instead of a witness search.
    #[arg(long)]
    f: Option<PathBuf>,
    #[arg(long)]
    j: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Witness-search grid: probe indices for the source side.
    #[arg(long, value_delimiter = ',')]
    j_list: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    k_list: Option<Vec<usize>>,
    /// Dyadic accuracy exponents m (delta = 2^-m).
    #[arg(long, value_delimiter = ',')]
    dyadic: Option<Vec<u32>>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    probes: Option<usize>,
    #[arg(long, env = "FREP_SEED")]
    seed: Option<u64>,
    #[arg(long, value_parser = ["rep-norm", "lambda-interval-upper"])]
    norm_source: Option<String>,
    #[arg(long, env = "FREP_OUT")]
    out: Option<PathBuf>,
    #[arg(long, env = "FREP_CSV")]
    csv: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct MembershipConfig {
    eta: Option<PathBuf>,
    pi: Option<PathBuf>,
    pi_haar_dim: Option<usize>,
    f: Option<PathBuf>,
    j: Option<usize>,
    k: Option<usize>,
    delta: Option<f64>,
    j_list: Option<Vec<usize>>,
    k_list: Option<Vec<usize>>,
    dyadic: Option<Vec<u32>>,
    budget: Option<usize>,
    probes: Option<usize>,
    seed: Option<u64>,
    norm_source: Option<String>,
}

pub fn membership(args: MembershipArgs) -> CliResult<()> {
    let cfg: MembershipConfig = load_config(&args.config)?;
    let emitter = Emitter::prepare(args.out.clone(), args.csv.clone())?;
    let eta_path = require(args.eta.or(cfg.eta), "eta")?;
    let eta = load_representation_default(&eta_path)?;
    let seed = require(args.seed.or(cfg.seed), "seed")?;
    let probes_n = args.probes.or(cfg.probes).unwrap_or(32);
    let budget = args.budget.or(cfg.budget).unwrap_or(4);
    let source = norm_source_from_flag(
        args.norm_source
            .or(cfg.norm_source)
            .as_deref()
            .unwrap_or("rep-norm"),
    )?;

    let mut digests = BTreeMap::new();
    digests.insert(eta_path.display().to_string(), representation_digest(&eta));
    let (pi, pi_desc) = match (args.pi.or(cfg.pi), args.pi_haar_dim.or(cfg.pi_haar_dim)) {
        (Some(path), _) => {
            let rep = load_representation_default(&path)?;
            digests.insert(path.display().to_string(), representation_digest(&rep));
            (rep, ReportValue::from(path.display().to_string()))
        }
        (None, Some(d)) => (
            random_haar_rep(eta.k(), d, derive_seed(seed, 1))?,
            ReportValue::from(format!("haar(d={d})")),
        ),
        (None, None) => return Err(CliError::input("provide `pi` or `pi_haar_dim`")),
    };
    let probes = ProbeSequence::generate(derive_seed(seed, 2), eta.dim() * pi.dim(), probes_n)?;

    let base_config = |extra: Vec<(String, ReportValue)>| {
        let mut entries = vec![
            ("config".to_string(), config_str(&args.config)),
            (
                "eta".to_string(),
                ReportValue::from(eta_path.display().to_string()),
            ),
            ("pi".to_string(), pi_desc.clone()),
            ("probes".to_string(), ReportValue::from(probes_n)),
            ("seed".to_string(), ReportValue::from(seed)),
            ("budget".to_string(), ReportValue::from(budget)),
            (
                "norm_source".to_string(),
                ReportValue::from(norm_source_name(source)),
            ),
        ];
        entries.extend(extra);
        ReportValue::map(entries)
    };

    if let Some(f_path) = args.f.or(cfg.f) {
        // Direct check of a supplied element.
        let f = crate::formats::load_element(&f_path)?;
        digests.insert(f_path.display().to_string(), crate::digest::element_digest(&f));
        let j = require(args.j.or(cfg.j), "j")?;
        let k = require(args.k.or(cfg.k), "k")?;
        let delta = require(args.delta.or(cfg.delta), "delta")?;
        let query = MembershipQuery {
            j,
            k,
            delta,
            f: Some(f),
        };
        let holds = check_transport(&eta, &pi, &query, &probes)?;
        return emitter.emit(CommandOutput {
            command: "lab membership".into(),
            config: base_config(vec![
                ("mode".into(), ReportValue::from("direct")),
                ("f".into(), ReportValue::from(f_path.display().to_string())),
                ("j".into(), ReportValue::from(j)),
                ("k".into(), ReportValue::from(k)),
                ("delta".into(), ReportValue::from(delta)),
            ]),
            input_digests: digests,
            result: ReportValue::map([("holds", ReportValue::from(holds))]),
            artifact: None,
        csv: Some((
                vec!["j", "k", "delta", "holds"],
                vec![vec![
                    ReportValue::from(j),
                    ReportValue::from(k),
                    ReportValue::from(delta),
                    ReportValue::from(holds),
                ]],
            )),
        });
    }

    // Witness-search grid; single queries are one-cell grids.
    let js = args
        .j_list
        .or(cfg.j_list)
        .or_else(|| args.j.or(cfg.j).map(|v| vec![v]));
    let js = require(js, "j or j_list")?;
    let ks = args
        .k_list
        .or(cfg.k_list)
        .or_else(|| args.k.or(cfg.k).map(|v| vec![v]));
    let ks = require(ks, "k or k_list")?;
    let dyadic = args.dyadic.or(cfg.dyadic).unwrap_or_else(|| vec![1, 2, 3]);
    let report = membership_grid(&eta, &pi, &js, &ks, &dyadic, &probes, budget, source)?;
    let csv_rows: Vec<Vec<ReportValue>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                ReportValue::from(c.j),
                ReportValue::from(c.k),
                ReportValue::from(c.delta),
                ReportValue::from(c.witness_found),
                ReportValue::from(c.residual),
                ReportValue::from(c.op_norm),
                ReportValue::from(c.capped),
            ]
        })
        .collect();
    emitter.emit(CommandOutput {
        command: "lab membership".into(),
        config: base_config(vec![
            ("mode".into(), ReportValue::from("witness-grid")),
            (
                "j_list".into(),
                ReportValue::list(js.iter().map(|&v| ReportValue::from(v))),
            ),
            (
                "k_list".into(),
                ReportValue::list(ks.iter().map(|&v| ReportValue::from(v))),
            ),
            (
                "dyadic".into(),
                ReportValue::list(dyadic.iter().map(|&m| ReportValue::from(m as u64))),
            ),
        ]),
        input_digests: digests,
        result: ReportValue::map([
            ("all_found", ReportValue::from(report.all_found)),
            (
                "cells",
                ReportValue::list(report.cells.iter().map(|c| {
                    ReportValue::map([
                        ("j", ReportValue::from(c.j)),
                        ("k", ReportValue::from(c.k)),
                        ("delta", ReportValue::from(c.delta)),
                        ("witness_found", ReportValue::from(c.witness_found)),
                        ("residual", ReportValue::from(c.residual)),
                        ("op_norm", ReportValue::from(c.op_norm)),
                        ("capped", ReportValue::from(c.capped)),
                    ])
                })),
            ),
        ]),
        artifact: None,
        csv: Some((
            vec!["j", "k", "delta", "witness_found", "residual", "op_norm", "capped"],
            csv_rows,
        )),
    })
}

pub fn run(cmd: LabCmd) -> CliResult<()> {
    match cmd {
        LabCmd::Genericity(args) => genericity(args),
        LabCmd::Chain(args) => chain(args),
        LabCmd::Cyclicity(args) => cyclicity(args),
        LabCmd::Density(args) => density(args),
        LabCmd::Membership(args) => membership(args),
    }
}
