//! JSON file formats for algebra elements, representations, and
//! vectors, with loader-side validation.
//!
//! * Element: `{"k": 2, "terms": [{"word": "aB", "re": 1.0, "im": 0.0}, ...]}`;
//!   words must arrive reduced or the loader rejects them.
//! * Representation: `{"k": 2, "d": 2, "gens": [[[[re, im], ...], ...], ...]}`
//!   with row-major generator matrices of `[re, im]` pairs; unitarity is
//!   enforced within a configurable tolerance (default 1e-8).
//! * Vector: `{"dim": 4, "entries": [[re, im], ...]}`.

use crate::error::{CliError, CliResult};
use crate::report::ReportValue;
use frep_core::rep::DEFAULT_UNITARITY_TOL;
use frep_core::word::Word;
use frep_core::{GroupAlgebraElement, Representation, C64};
use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use std::path::Path;

#[derive(Deserialize)]
struct TermJson {
    word: String,
    re: f64,
    im: f64,
}

#[derive(Deserialize)]
struct ElementJson {
    k: usize,
    terms: Vec<TermJson>,
}

#[derive(Deserialize)]
struct RepJson {
    k: usize,
    d: usize,
    gens: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Deserialize)]
struct VectorJson {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, path: &Path) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        CliError::input(format!(
            "{}: malformed JSON at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

pub fn load_element(path: &Path) -> CliResult<GroupAlgebraElement> {
    let text = read_file(path)?;
    let dto: ElementJson = parse_json(&text, path)?;
    let mut pairs = Vec::with_capacity(dto.terms.len());
    for (i, t) in dto.terms.iter().enumerate() {
        let w = Word::parse_reduced(&t.word, dto.k).map_err(|e| {
            CliError::input(format!("{}: terms[{i}].word: {e}", path.display()))
        })?;
        pairs.push((w, C64::new(t.re, t.im)));
    }
    Ok(GroupAlgebraElement::from_terms(dto.k, pairs))
}

/// Loads a list of elements from `{"elements": [...]}` or a bare array.
pub fn load_element_list(path: &Path) -> CliResult<Vec<GroupAlgebraElement>> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum ListJson {
        Bare(Vec<ElementJson>),
        Wrapped { elements: Vec<ElementJson> },
    }
    let text = read_file(path)?;
    let dto: ListJson = parse_json(&text, path)?;
    let items = match dto {
        ListJson::Bare(v) => v,
        ListJson::Wrapped { elements } => elements,
    };
    items
        .into_iter()
        .enumerate()
        .map(|(idx, e)| {
            let mut pairs = Vec::with_capacity(e.terms.len());
            for (i, t) in e.terms.iter().enumerate() {
                let w = Word::parse_reduced(&t.word, e.k).map_err(|err| {
                    CliError::input(format!(
                        "{}: elements[{idx}].terms[{i}].word: {err}",
                        path.display()
                    ))
                })?;
                pairs.push((w, C64::new(t.re, t.im)));
            }
            Ok(GroupAlgebraElement::from_terms(e.k, pairs))
        })
        .collect()
}

pub fn load_representation(path: &Path, tol: f64) -> CliResult<Representation> {
    let text = read_file(path)?;
    let dto: RepJson = parse_json(&text, path)?;
    let mut gens = Vec::with_capacity(dto.gens.len());
    for (gi, rows) in dto.gens.iter().enumerate() {
        if rows.len() != dto.d || rows.iter().any(|r| r.len() != dto.d) {
            return Err(CliError::input(format!(
                "{}: gens[{gi}] is not a {d}x{d} matrix",
                path.display(),
                d = dto.d
            )));
        }
        let m = DMatrix::from_fn(dto.d, dto.d, |r, c| {
            C64::new(rows[r][c][0], rows[r][c][1])
        });
        gens.push(m);
    }
    Representation::new_with_tol(dto.k, gens, tol)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_representation_default(path: &Path) -> CliResult<Representation> {
    load_representation(path, DEFAULT_UNITARITY_TOL)
}

pub fn load_vector(path: &Path) -> CliResult<DVector<C64>> {
    let text = read_file(path)?;
    let dto: VectorJson = parse_json(&text, path)?;
    if dto.entries.len() != dto.dim {
        return Err(CliError::input(format!(
            "{}: vector says dim {} but has {} entries",
            path.display(),
            dto.dim,
            dto.entries.len()
        )));
    }
    Ok(DVector::from_fn(dto.dim, |i, _| {
        C64::new(dto.entries[i][0], dto.entries[i][1])
    }))
}

pub fn element_value(f: &GroupAlgebraElement) -> ReportValue {
    ReportValue::map([
        ("k", ReportValue::from(f.k())),
        (
            "terms",
            ReportValue::list(f.terms().map(|(w, c)| {
                ReportValue::map([
                    ("word", ReportValue::from(w.to_string())),
                    ("re", ReportValue::from(c.re)),
                    ("im", ReportValue::from(c.im)),
                ])
            })),
        ),
    ])
}

pub fn matrix_value(m: &DMatrix<C64>) -> ReportValue {
    ReportValue::list((0..m.nrows()).map(|r| {
        ReportValue::list((0..m.ncols()).map(|c| {
            ReportValue::list([
                ReportValue::from(m[(r, c)].re),
                ReportValue::from(m[(r, c)].im),
            ])
        }))
    }))
}

pub fn representation_value(rep: &Representation) -> ReportValue {
    ReportValue::map([
        ("k", ReportValue::from(rep.k())),
        ("d", ReportValue::from(rep.dim())),
        (
            "gens",
            ReportValue::list(rep.generators().iter().map(matrix_value)),
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(name: &str, contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join("frep-format-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn element_loader_validates_words() {
        let good = write_tmp(
            "good.json",
            r#"{"k": 2, "terms": [{"word": "aB", "re": 1.0, "im": 0.0}]}"#,
        );
        let f = load_element(&good).unwrap();
        assert_eq!(f.term_count(), 1);

        let unreduced = write_tmp(
            "unreduced.json",
            r#"{"k": 2, "terms": [{"word": "aA", "re": 1.0, "im": 0.0}]}"#,
        );
        let err = load_element(&unreduced).unwrap_err();
        assert!(err.to_string().contains("not reduced"), "{err}");

        let bad_range = write_tmp(
            "range.json",
            r#"{"k": 2, "terms": [{"word": "c", "re": 1.0, "im": 0.0}]}"#,
        );
        assert!(load_element(&bad_range).is_err());

        let malformed = write_tmp("broken.json", r#"{"k": 2, "terms": ["#);
        let err = load_element(&malformed).unwrap_err();
        assert!(err.to_string().contains("line"), "{err}");
    }

    #[test]
    fn representation_loader_checks_unitarity() {
        let shear = write_tmp(
            "shear.json",
            r#"{"k": 2, "d": 2, "gens": [
                [[[1.0,0.0],[1.0,0.0]],[[0.0,0.0],[1.0,0.0]]],
                [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[1.0,0.0]]]
            ]}"#,
        );
        let err = load_representation(&shear, 1e-8).unwrap_err();
        assert!(err.to_string().contains("not unitary"), "{err}");

        let pauli = write_tmp(
            "pauli.json",
            r#"{"k": 2, "d": 2, "gens": [
                [[[0.0,0.0],[1.0,0.0]],[[1.0,0.0],[0.0,0.0]]],
                [[[1.0,0.0],[0.0,0.0]],[[0.0,0.0],[-1.0,0.0]]]
            ]}"#,
        );
        let rep = load_representation(&pauli, 1e-8).unwrap();
        assert_eq!(rep.dim(), 2);
        assert_eq!(rep.generators()[0][(0, 1)], C64::new(1.0, 0.0));
    }
}
