//! `frep irr` subcommands: irreducibility report, commutant basis,
//! cyclic-vector defect.

use super::{positive, CommandOutput, Emitter};
use crate::digest::representation_digest;
use crate::error::CliResult;
use crate::formats::{load_representation_default, load_vector, matrix_value};
use crate::report::ReportValue;
use clap::Subcommand;
use frep_core::irred::{
    commutant_basis, cyclic_defect, default_burnside_budget, is_irreducible, DEFAULT_RANK_TOL,
};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Subcommand, Debug)]
pub enum IrrCmd {
    /// Full irreducibility report (commutant + algebra dimension).
    Test {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL, env = "FREP_RANK_TOL")]
        tol: f64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Orthonormal commutant basis.
    Commutant {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL, env = "FREP_RANK_TOL")]
        tol: f64,
        /// Include the basis matrices in the report.
        #[arg(long, default_value_t = false)]
        full: bool,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
    /// Cyclic defect of a vector under a word-length budget.
    Cyclic {
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        vector: PathBuf,
        /// Word-length budget; defaults to twice the dimension.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL, env = "FREP_RANK_TOL")]
        tol: f64,
        #[arg(long, env = "FREP_OUT")]
        out: Option<PathBuf>,
    },
}

pub fn run(cmd: IrrCmd) -> CliResult<()> {
    match cmd {
        IrrCmd::Test { rep, tol, out } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let tol = positive(tol, "tol")?;
            let r = load_representation_default(&rep)?;
            let report = is_irreducible(&r, tol);
            let mut digests = BTreeMap::new();
            digests.insert(rep.display().to_string(), representation_digest(&r));
            emitter.emit(CommandOutput {
                command: "irr test".into(),
                config: ReportValue::map([
                    ("rep", ReportValue::from(rep.display().to_string())),
                    ("tol", ReportValue::from(tol)),
                ]),
                input_digests: digests,
                result: ReportValue::map([
                    ("commutant_dim", ReportValue::from(report.commutant_dim)),
                    ("algebra_dim", ReportValue::from(report.algebra_dim)),
                    ("is_irreducible", ReportValue::from(report.is_irreducible)),
                    (
                        "smallest_retained_singular_value",
                        ReportValue::from(report.smallest_retained_singular_value),
                    ),
                    ("tolerance_used", ReportValue::from(report.tolerance_used)),
                ]),
                csv: None,
                artifact: None,
            })
        }
        IrrCmd::Commutant {
            rep,
            tol,
            full,
            out,
        } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let tol = positive(tol, "tol")?;
            let r = load_representation_default(&rep)?;
            let basis = commutant_basis(&r, tol);
            let mut digests = BTreeMap::new();
            digests.insert(rep.display().to_string(), representation_digest(&r));
            let mut result = vec![("dim".to_string(), ReportValue::from(basis.len()))];
            if full {
                result.push((
                    "basis".to_string(),
                    ReportValue::list(basis.iter().map(matrix_value)),
                ));
            }
            emitter.emit(CommandOutput {
                command: "irr commutant".into(),
                config: ReportValue::map([
                    ("rep", ReportValue::from(rep.display().to_string())),
                    ("tol", ReportValue::from(tol)),
                    ("full", ReportValue::from(full)),
                ]),
                input_digests: digests,
                result: ReportValue::map(result),
                csv: None,
                artifact: None,
            })
        }
        IrrCmd::Cyclic {
            rep,
            vector,
            budget,
            tol,
            out,
        } => {
            let emitter = Emitter::prepare(out.clone(), None)?;
            let tol = positive(tol, "tol")?;
            let r = load_representation_default(&rep)?;
            let v = load_vector(&vector)?;
            let budget = budget.unwrap_or_else(|| default_burnside_budget(r.dim()));
            let defect = cyclic_defect(&r, &v, budget, tol)?;
            let mut digests = BTreeMap::new();
            digests.insert(rep.display().to_string(), representation_digest(&r));
            emitter.emit(CommandOutput {
                command: "irr cyclic".into(),
                config: ReportValue::map([
                    ("rep", ReportValue::from(rep.display().to_string())),
                    ("vector", ReportValue::from(vector.display().to_string())),
                    ("budget", ReportValue::from(budget)),
                    ("tol", ReportValue::from(tol)),
                ]),
                input_digests: digests,
                result: ReportValue::map([
                    ("defect", ReportValue::from(defect)),
                    ("cyclic", ReportValue::from(defect == 0)),
                ]),
                csv: None,
                artifact: None,
            })
        }
    }
}
