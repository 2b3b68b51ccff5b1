//! `frep rep` subcommands: validation, tensor, direct sum, identity
//! extension, Haar sampling, and the strong-operator metric surrogate.

use super::{positive, CommandOutput, Emitter};
use crate::digest::representation_digest;
use crate::error::CliResult;
use crate::formats::{load_representation, representation_value};
use crate::report::ReportValue;
use clap::Subcommand;
use frep_core::rep::{random_haar_rep, rep_distance, ProbeSequence, DEFAULT_UNITARITY_TOL};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Subcommand, Debug)]
pub enum RepCmd {
    /// Validate a representation file and echo it with its digest.
    Make {
        #[arg(long)]
        input: PathBuf,
        /// Unitarity tolerance in Frobenius norm.
        #[arg(long, default_value_t = DEFAULT_UNITARITY_TOL, env = "FREP_UNITARITY_TOL")]
        tol: f64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Tensor product of two representations.
    Tensor {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Direct sum of two representations.
    Dsum {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Extend by the identity on a larger space.
    Extend {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        total_dim: usize,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Sample a Haar-random representation.
    Haar {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, env = "FREP_SEED")]
        seed: u64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Metric-surrogate distance between two representations.
    Distance {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, env = "FREP_PROBE_SEED")]
        probe_seed: u64,
        #[arg(long, default_value_t = 32)]
        probes: usize,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
}

pub fn run(cmd: RepCmd) -> CliResult<()> {
    match cmd {
        RepCmd::Make { input, tol, out } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let tol = positive(tol, "tol")?;
            let rep = load_representation(&input, tol)?;
            let digest = representation_digest(&rep);
            let mut digests = BTreeMap::new();
            digests.insert(input.display().to_string(), digest.clone());
            emitter.emit(CommandOutput {
                command: "rep make".into(),
                config: ReportValue::map([
                    ("input", ReportValue::from(input.display().to_string())),
                    ("tol", ReportValue::from(tol)),
                ]),
                input_digests: digests,
                result: ReportValue::map([
                    ("d", ReportValue::from(rep.dim())),
                    ("digest", ReportValue::from(digest)),
                    ("k", ReportValue::from(rep.k())),
                ]),
                csv: None,
                artifact: Some(representation_value(&rep)),
            })
        }
        RepCmd::Tensor { a, b, out } => binary_op(&a, &b, out, true),
        RepCmd::Dsum { a, b, out } => binary_op(&a, &b, out, false),
        RepCmd::Extend {
            input,
            total_dim,
            out,
        } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let rep = load_representation(&input, DEFAULT_UNITARITY_TOL)?;
            let extended = rep.extend_with_identity(total_dim)?;
            let mut digests = BTreeMap::new();
            digests.insert(input.display().to_string(), representation_digest(&rep));
            emitter.emit(CommandOutput {
                command: "rep extend".into(),
                config: ReportValue::map([
                    ("input", ReportValue::from(input.display().to_string())),
                    ("total_dim", ReportValue::from(total_dim)),
                ]),
                input_digests: digests,
                result: ReportValue::map([
                    ("d", ReportValue::from(extended.dim())),
                    (
                        "digest",
                        ReportValue::from(representation_digest(&extended)),
                    ),
                ]),
                csv: None,
                artifact: Some(representation_value(&extended)),
            })
        }
        RepCmd::Haar { k, d, seed, out } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let rep = random_haar_rep(k, d, seed)?;
            emitter.emit(CommandOutput {
                command: "rep haar".into(),
                config: ReportValue::map([
                    ("k", ReportValue::from(k)),
                    ("d", ReportValue::from(d)),
                    ("seed", ReportValue::from(seed)),
                ]),
                input_digests: BTreeMap::new(),
                result: ReportValue::map([
                    ("d", ReportValue::from(rep.dim())),
                    (
                        "digest",
                        ReportValue::from(representation_digest(&rep)),
                    ),
                    ("k", ReportValue::from(rep.k())),
                ]),
                csv: None,
                artifact: Some(representation_value(&rep)),
            })
        }
        RepCmd::Distance {
            a,
            b,
            probe_seed,
            probes,
            out,
        } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let ra = load_representation(&a, DEFAULT_UNITARITY_TOL)?;
            let rb = load_representation(&b, DEFAULT_UNITARITY_TOL)?;
            let seq = ProbeSequence::generate(probe_seed, ra.dim(), probes)?;
            let dist = rep_distance(&ra, &rb, &seq)?;
            let mut digests = BTreeMap::new();
            digests.insert(a.display().to_string(), representation_digest(&ra));
            digests.insert(b.display().to_string(), representation_digest(&rb));
            emitter.emit(CommandOutput {
                command: "rep distance".into(),
                config: ReportValue::map([
                    ("a", ReportValue::from(a.display().to_string())),
                    ("b", ReportValue::from(b.display().to_string())),
                    ("probe_seed", ReportValue::from(probe_seed)),
                    ("probes", ReportValue::from(probes)),
                ]),
                input_digests: digests,
                result: ReportValue::map([("distance", ReportValue::from(dist))]),
                csv: None,
                artifact: None,
            })
        }
    }
}

fn binary_op(a: &std::path::Path, b: &std::path::Path, out: Option<PathBuf>, tensor: bool) -> CliResult<()> {
    let emitter = Emitter::prepare(out, None)?;
    let ra = load_representation(a, DEFAULT_UNITARITY_TOL)?;
    let rb = load_representation(b, DEFAULT_UNITARITY_TOL)?;
    let combined = if tensor {
        ra.tensor(&rb)?
    } else {
        ra.direct_sum(&rb)?
    };
    let mut digests = BTreeMap::new();
    digests.insert(a.display().to_string(), representation_digest(&ra));
    digests.insert(b.display().to_string(), representation_digest(&rb));
    emitter.emit(CommandOutput {
        command: if tensor { "rep tensor" } else { "rep dsum" }.into(),
        config: ReportValue::map([
            ("a", ReportValue::from(a.display().to_string())),
            ("b", ReportValue::from(b.display().to_string())),
        ]),
        input_digests: digests,
        result: ReportValue::map([
            ("d", ReportValue::from(combined.dim())),
            (
                "digest",
                ReportValue::from(representation_digest(&combined)),
            ),
        ]),
        csv: None,
        artifact: Some(representation_value(&combined)),
    })
}
