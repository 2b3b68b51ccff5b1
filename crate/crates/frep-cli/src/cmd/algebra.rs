//! `frep algebra` subcommands: convolution, involution, norms.

use super::{CommandOutput, Emitter};
use crate::digest::element_digest;
use crate::error::CliResult;
use crate::formats::{element_value, load_element};
use crate::report::ReportValue;
use clap::Subcommand;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Subcommand, Debug)]
pub enum AlgebraCmd {
    /// Convolution product of two elements.
    Convolve {
        /// Left factor (element JSON).
        #[arg(long)]
        a: PathBuf,
        /// Right factor (element JSON).
        #[arg(long)]
        b: PathBuf,
        /// Drop result coefficients with modulus at or below this.
        #[arg(long, default_value_t = 0.0)]
        prune: f64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Involution `f*(w) = conj(f(w^-1))`.
    Involution {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// l1 and l2 norms and the support radius.
    Norms {
        #[arg(long)]
        f: PathBuf,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
}

pub fn run(cmd: AlgebraCmd) -> CliResult<()> {
    match cmd {
        AlgebraCmd::Convolve { a, b, prune, out } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let fa = load_element(&a)?;
            let fb = load_element(&b)?;
            let product = fa.convolve(&fb)?.pruned(prune);
            let mut digests = BTreeMap::new();
            digests.insert(a.display().to_string(), element_digest(&fa));
            digests.insert(b.display().to_string(), element_digest(&fb));
            emitter.emit(CommandOutput {
                command: "algebra convolve".into(),
                config: ReportValue::map([
                    ("a", ReportValue::from(a.display().to_string())),
                    ("b", ReportValue::from(b.display().to_string())),
                    ("prune", ReportValue::from(prune)),
                ]),
                input_digests: digests,
                result: element_value(&product),
                csv: None,
                artifact: Some(element_value(&product)),
            })
        }
        AlgebraCmd::Involution { f, out } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let ff = load_element(&f)?;
            let mut digests = BTreeMap::new();
            digests.insert(f.display().to_string(), element_digest(&ff));
            emitter.emit(CommandOutput {
                command: "algebra involution".into(),
                config: ReportValue::map([("f", ReportValue::from(f.display().to_string()))]),
                input_digests: digests,
                result: element_value(&ff.involution()),
                csv: None,
                artifact: Some(element_value(&ff.involution())),
            })
        }
        AlgebraCmd::Norms { f, out } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let ff = load_element(&f)?;
            let (l1, l2, radius) = ff.norms();
            let mut digests = BTreeMap::new();
            digests.insert(f.display().to_string(), element_digest(&ff));
            emitter.emit(CommandOutput {
                command: "algebra norms".into(),
                config: ReportValue::map([("f", ReportValue::from(f.display().to_string()))]),
                input_digests: digests,
                result: ReportValue::map([
                    ("l1", ReportValue::from(l1)),
                    ("l2", ReportValue::from(l2)),
                    ("radius", ReportValue::from(radius)),
                ]),
                csv: None,
                artifact: None,
            })
        }
    }
}
