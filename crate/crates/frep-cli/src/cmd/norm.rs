//! `frep norm` subcommands: the certified enclosure of the
//! regular-representation norm and the weak-containment deficit.

use super::{CommandOutput, Emitter};
use crate::digest::{element_digest, representation_digest};
use crate::error::{CliError, CliResult};
use crate::formats::{load_element, load_element_list, load_representation_default};
use crate::report::ReportValue;
use clap::Subcommand;
use frep_core::algebra::random_element;
use frep_core::lambda::{lambda_norm_interval, weak_containment_deficit, DEFAULT_POWER_ITERS};
use frep_core::seed::rng_from_seed;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Subcommand, Debug)]
pub enum NormCmd {
    /// Two-sided enclosure of the regular-representation norm.
    Interval {
        /// Element JSON.
        #[arg(long)]
        f: PathBuf,
        /// Ball radius for the compression lower bound.
        #[arg(long, env = "FREP_RADIUS")]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_POWER_ITERS, env = "FREP_ITERS")]
        iters: usize,
        #[arg(long, env = "FREP_SEED")]
        seed: u64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Compare representation norms against the certified enclosure on
    /// a sample of elements.
    Deficit {
        #[arg(long)]
        rep: PathBuf,
        /// Element list JSON; omit to sample random elements.
        #[arg(long)]
        fs: Option<PathBuf>,
        /// Number of random sample elements when --fs is not given.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 2)]
        sample_radius: usize,
        #[arg(long, default_value_t = 5)]
        sample_terms: usize,
        #[arg(long, env = "FREP_RADIUS")]
        radius: usize,
        #[arg(long, default_value_t = DEFAULT_POWER_ITERS, env = "FREP_ITERS")]
        iters: usize,
        #[arg(long, env = "FREP_SEED")]
        seed: u64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
        /// Per-element CSV rows.
        #[arg(long, env = "FREP_CSV")]
        csv: Option<PathBuf>,
    },
}

pub fn run(cmd: NormCmd) -> CliResult<()> {
    match cmd {
        NormCmd::Interval {
            f,
            radius,
            iters,
            seed,
            out,
        } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            if iters == 0 {
                return Err(CliError::input("field `iters` must be at least 1"));
            }
            let ff = load_element(&f)?;
            let interval = lambda_norm_interval(&ff, radius, iters, seed)?;
            let mut digests = BTreeMap::new();
            digests.insert(f.display().to_string(), element_digest(&ff));
            emitter.emit(CommandOutput {
                command: "norm interval".into(),
                config: ReportValue::map([
                    ("f", ReportValue::from(f.display().to_string())),
                    ("radius", ReportValue::from(radius)),
                    ("iters", ReportValue::from(iters)),
                    ("seed", ReportValue::from(seed)),
                ]),
                input_digests: digests,
                result: ReportValue::map([
                    ("lower", ReportValue::from(interval.lower)),
                    ("upper", ReportValue::from(interval.upper)),
                    ("ball_radius", ReportValue::from(interval.ball_radius)),
                    ("iterations", ReportValue::from(interval.iterations)),
                    ("scalar", ReportValue::from(interval.scalar)),
                ]),
                csv: None,
                artifact: None,
            })
        }
        NormCmd::Deficit {
            rep,
            fs,
            sample,
            sample_radius,
            sample_terms,
            radius,
            iters,
            seed,
            out,
            csv,
        } => {
            let emitter = Emitter::prepare(out.clone(), csv.clone())?;
            let r = load_representation_default(&rep)?;
            let mut digests = BTreeMap::new();
            digests.insert(rep.display().to_string(), representation_digest(&r));
            let elements = match (&fs, sample) {
                (Some(path), _) => load_element_list(path)?,
                (None, Some(n)) => {
                    if n == 0 {
                        return Err(CliError::input("field `sample` must be at least 1"));
                    }
                    let mut rng = rng_from_seed(seed);
                    (0..n)
                        .map(|_| random_element(r.k(), sample_radius, sample_terms, &mut rng))
                        .collect()
                }
                (None, None) => {
                    return Err(CliError::input(
                        "provide `--fs <file>` or `--sample <count>`",
                    ))
                }
            };
            let report = weak_containment_deficit(&r, &elements, radius, iters, seed)?;
            let rows: Vec<Vec<ReportValue>> = report
                .rows
                .iter()
                .map(|row| {
                    vec![
                        ReportValue::from(row.index),
                        ReportValue::from(row.l1),
                        ReportValue::from(row.op_norm),
                        ReportValue::from(row.lambda_lower),
                        ReportValue::from(row.lambda_upper),
                        ReportValue::from(row.deficit_vs_upper),
                        ReportValue::from(row.deficit_vs_lower),
                    ]
                })
                .collect();
            let result = ReportValue::map([
                ("max_deficit", ReportValue::from(report.max_deficit)),
                ("ball_radius", ReportValue::from(report.ball_radius)),
                ("iterations", ReportValue::from(report.iterations)),
                (
                    "rows",
                    ReportValue::list(report.rows.iter().map(|row| {
                        ReportValue::map([
                            ("index", ReportValue::from(row.index)),
                            ("l1", ReportValue::from(row.l1)),
                            ("op_norm", ReportValue::from(row.op_norm)),
                            ("lambda_lower", ReportValue::from(row.lambda_lower)),
                            ("lambda_upper", ReportValue::from(row.lambda_upper)),
                            ("deficit_vs_upper", ReportValue::from(row.deficit_vs_upper)),
                            ("deficit_vs_lower", ReportValue::from(row.deficit_vs_lower)),
                        ])
                    })),
                ),
            ]);
            emitter.emit(CommandOutput {
                command: "norm deficit".into(),
                config: ReportValue::map([
                    ("rep", ReportValue::from(rep.display().to_string())),
                    (
                        "fs",
                        fs.map(|p| ReportValue::from(p.display().to_string()))
                            .unwrap_or(ReportValue::Null),
                    ),
                    (
                        "sample",
                        sample.map(ReportValue::from).unwrap_or(ReportValue::Null),
                    ),
                    ("sample_radius", ReportValue::from(sample_radius)),
                    ("sample_terms", ReportValue::from(sample_terms)),
                    ("radius", ReportValue::from(radius)),
                    ("iters", ReportValue::from(iters)),
                    ("seed", ReportValue::from(seed)),
                ]),
                input_digests: digests,
                result,
                artifact: None,
                csv: Some((
                    vec![
                        "index",
                        "l1",
                        "op_norm",
                        "lambda_lower",
                        "lambda_upper",
                        "deficit_vs_upper",
                        "deficit_vs_lower",
                    ],
                    rows,
                )),
            })
        }
    }
}
