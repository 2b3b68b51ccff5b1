//! Deterministic report emission.
//!
//! Reports are trees of [`ReportValue`]; maps are ordered, floats are
//! printed with 17 significant digits (`{:+.16e}` style round-trips f64
//! exactly), so the same report always serializes to the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub enum ReportValue {
    Null,
    Bool(bool),
    Int(i64),
    UInt(u64),
    Float(f64),
    Str(String),
    List(Vec<ReportValue>),
    Map(BTreeMap<String, ReportValue>),
}

impl ReportValue {
    pub fn map<I, K>(entries: I) -> ReportValue
    where
        I: IntoIterator<Item = (K, ReportValue)>,
        K: Into<String>,
    {
        ReportValue::Map(entries.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn list<I>(items: I) -> ReportValue
    where
        I: IntoIterator<Item = ReportValue>,
    {
        ReportValue::List(items.into_iter().collect())
    }
}

impl From<bool> for ReportValue {
    fn from(v: bool) -> Self {
        ReportValue::Bool(v)
    }
}
impl From<usize> for ReportValue {
    fn from(v: usize) -> Self {
        ReportValue::UInt(v as u64)
    }
}
impl From<u64> for ReportValue {
    fn from(v: u64) -> Self {
        ReportValue::UInt(v)
    }
}
impl From<i64> for ReportValue {
    fn from(v: i64) -> Self {
        ReportValue::Int(v)
    }
}
impl From<f64> for ReportValue {
    fn from(v: f64) -> Self {
        ReportValue::Float(v)
    }
}
impl From<&str> for ReportValue {
    fn from(v: &str) -> Self {
        ReportValue::Str(v.to_string())
    }
}
impl From<String> for ReportValue {
    fn from(v: String) -> Self {
        ReportValue::Str(v)
    }
}

/// 17-significant-digit float format; parses back to the identical f64.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        return "null".to_string();
    }
    if v.is_infinite() {
        // JSON has no infinities; encode as the IEEE boundary string.
        return if v > 0.0 { "1e999".into() } else { "-1e999".into() };
    }
    format!("{v:.16e}")
}

fn escape_json(s: &str, out: &mut String) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

fn write_value(v: &ReportValue, indent: usize, out: &mut String) {
    match v {
        ReportValue::Null => out.push_str("null"),
        ReportValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ReportValue::Int(i) => {
            let _ = write!(out, "{i}");
        }
        ReportValue::UInt(u) => {
            let _ = write!(out, "{u}");
        }
        ReportValue::Float(f) => out.push_str(&format_float(*f)),
        ReportValue::Str(s) => escape_json(s, out),
        ReportValue::List(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                write_value(item, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push(']');
        }
        ReportValue::Map(entries) => {
            if entries.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, val)) in entries.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent + 1));
                escape_json(k, out);
                out.push_str(": ");
                write_value(val, indent + 1, out);
            }
            out.push('\n');
            out.push_str(&"  ".repeat(indent));
            out.push('}');
        }
    }
}

/// Serializes with sorted keys, two-space indent, trailing newline.
pub fn to_json(v: &ReportValue) -> String {
    let mut out = String::new();
    write_value(v, 0, &mut out);
    out.push('\n');
    out
}

/// CSV cell for the fixed float format; other cells print plainly
/// (no field in any report contains commas or quotes).
pub fn csv_table(header: &[&str], rows: &[Vec<ReportValue>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|v| match v {
                ReportValue::Null => String::new(),
                ReportValue::Bool(b) => b.to_string(),
                ReportValue::Int(i) => i.to_string(),
                ReportValue::UInt(u) => u.to_string(),
                ReportValue::Float(f) => format_float(*f),
                ReportValue::Str(s) => s.clone(),
                other => panic!("nested value in CSV cell: {other:?}"),
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emission_is_deterministic_and_sorted() {
        let v = ReportValue::map([
            ("zeta", ReportValue::from(1.5f64)),
            ("alpha", ReportValue::from("x")),
            ("mid", ReportValue::list([ReportValue::from(2u64)])),
        ]);
        let a = to_json(&v);
        let b = to_json(&v);
        assert_eq!(a, b);
        let alpha_pos = a.find("alpha").unwrap();
        let zeta_pos = a.find("zeta").unwrap();
        assert!(alpha_pos < zeta_pos);
    }

    #[test]
    fn floats_round_trip_exactly() {
        for &x in &[
            0.1f64,
            -3.4111353174766963,
            1.0 / 3.0,
            2.0f64.sqrt(),
            6.02e23,
            -1.7976931348623157e308,
            5e-324,
            0.0,
        ] {
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x} -> {s}");
        }
    }

    #[test]
    fn emitted_json_parses() {
        let v = ReportValue::map([
            ("a", ReportValue::Float(0.1)),
            ("b", ReportValue::Str("he\"llo\n".into())),
            ("c", ReportValue::list([ReportValue::Null, ReportValue::Bool(true)])),
        ]);
        let text = to_json(&v);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["a"].as_f64().unwrap(), 0.1);
        assert_eq!(parsed["b"].as_str().unwrap(), "he\"llo\n");
        assert!(parsed["c"][0].is_null());
    }

    #[test]
    fn csv_shape() {
        let rows = vec![
            vec![ReportValue::UInt(0), ReportValue::Float(1.0), ReportValue::Bool(true)],
            vec![ReportValue::UInt(1), ReportValue::Float(0.5), ReportValue::Bool(false)],
        ];
        let text = csv_table(&["trial", "value", "ok"], &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "trial,value,ok");
        assert!(lines[1].starts_with("0,1.0000000000000000e0,true"));
    }
}
