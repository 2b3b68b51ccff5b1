//! Subcommand implementations. Every command resolves its inputs,
//! runs one operation from the core crate, and emits a run report:
//! a JSON document with the artifact version, the resolved
//! configuration (sufficient for an exact re-run), input digests, the
//! result, and the wall time. Lab commands additionally emit a CSV
//! summary with one row per trial or cell.

pub mod algebra;
pub mod irr;
pub mod lab;
pub mod norm;
pub mod rep;

use crate::error::{CliError, CliResult};
use crate::report::{csv_table, to_json, ReportValue};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Everything a command produces besides its exit status.
pub struct CommandOutput {
    pub command: String,
    pub config: ReportValue,
    pub input_digests: BTreeMap<String, String>,
    pub result: ReportValue,
    pub csv: Option<(Vec<&'static str>, Vec<Vec<ReportValue>>)>,
    /// Constructed object in its bare file format. Written to the
    /// output path instead of the run report, so commands chain:
    /// the file a command produces is a file other commands load.
    pub artifact: Option<ReportValue>,
}

/// Output destinations, checked writable before the run starts.
pub struct Emitter {
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
    started: Instant,
}

impl Emitter {
    pub fn prepare(out: Option<PathBuf>, csv: Option<PathBuf>) -> CliResult<Self> {
        for path in [&out, &csv].into_iter().flatten() {
            check_writable(path)?;
        }
        Ok(Emitter {
            out,
            csv,
            started: Instant::now(),
        })
    }

    pub fn emit(&self, output: CommandOutput) -> CliResult<()> {
        let digests = ReportValue::Map(
            output
                .input_digests
                .into_iter()
                .map(|(k, v)| (k, ReportValue::Str(v)))
                .collect(),
        );
        let report = ReportValue::map([
            (
                "tool",
                ReportValue::map([
                    ("name", ReportValue::from("frep")),
                    ("version", ReportValue::from(env!("CARGO_PKG_VERSION"))),
                ]),
            ),
            ("command", ReportValue::from(output.command)),
            ("config", output.config),
            ("input_digests", digests),
            ("result", output.result),
            (
                "wall_time_s",
                ReportValue::from(self.started.elapsed().as_secs_f64()),
            ),
        ]);
        let text = to_json(&report);
        match (&output.artifact, &self.out) {
            // Constructed objects land in the output file in their bare
            // format; the run report then goes to stdout.
            (Some(artifact), Some(path)) => {
                std::fs::write(path, to_json(artifact)).map_err(|e| {
                    CliError::input(format!("cannot write {}: {e}", path.display()))
                })?;
                print!("{text}");
            }
            (Some(artifact), None) => {
                // No output path: the bare object is the stdout payload.
                print!("{}", to_json(artifact));
            }
            (None, Some(path)) => std::fs::write(path, text)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?,
            (None, None) => print!("{text}"),
        }
        if let (Some((header, rows)), Some(path)) = (output.csv, &self.csv) {
            let text = csv_table(&header, &rows);
            std::fs::write(path, text)
                .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display())))?;
        }
        Ok(())
    }
}

fn check_writable(path: &Path) -> CliResult<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() && !parent.exists() {
            return Err(CliError::input(format!(
                "output directory {} does not exist",
                parent.display()
            )));
        }
    }
    std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::input(format!("output path {} not writable: {e}", path.display())))?;
    Ok(())
}

/// Tolerances and accuracies must be positive and finite.
pub fn positive(v: f64, field: &str) -> CliResult<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::input(format!(
            "field `{field}` must be positive and finite, got {v}"
        )))
    }
}

/// Resolves a field that may come from a flag, the environment, or a
/// config file; a missing value is an input error naming the field.
pub fn require<T>(value: Option<T>, field: &str) -> CliResult<T> {
    value.ok_or_else(|| {
        CliError::input(format!(
            "missing required field `{field}` (flag, FREP_* environment variable, or config file)"
        ))
    })
}

pub fn norm_source_from_flag(s: &str) -> CliResult<frep_core::lab::NormSource> {
    match s {
        "rep-norm" => Ok(frep_core::lab::NormSource::RepNorm),
        "lambda-interval-upper" => Ok(frep_core::lab::NormSource::LambdaIntervalUpper),
        other => Err(CliError::input(format!(
            "unknown norm source {other:?} (expected rep-norm or lambda-interval-upper)"
        ))),
    }
}

pub fn norm_source_name(s: frep_core::lab::NormSource) -> &'static str {
    match s {
        frep_core::lab::NormSource::RepNorm => "rep-norm",
        frep_core::lab::NormSource::LambdaIntervalUpper => "lambda-interval-upper",
    }
}
