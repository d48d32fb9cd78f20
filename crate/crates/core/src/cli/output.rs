//! Serialization for the command-line tool: JSON with 17 significant digits,
//! CSV with 12, and atomic file output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde_json::{json, Map, Value};

/// A complex number as `{"re": .., "im": ..}`.
pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// The stable envelope every result object carries.
pub fn record(op: &str, inputs: Value, value: Value, error_estimate: Value, certified: bool, method: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("op".into(), Value::String(op.into()));
    m.insert("inputs".into(), inputs);
    m.insert("value".into(), value);
    m.insert("error_estimate".into(), error_estimate);
    m.insert("certified".into(), Value::Bool(certified));
    m.insert("method".into(), Value::String(method.into()));
    m
}

fn float_json(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    format!("{x:.16e}")
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&float_json(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                let _ = write!(out, "{}{}: ", pad(indent + 1), Value::String(key.clone()));
                write_json(item, indent + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Pretty JSON with every float at 17 significant digits; key order is the
/// sorted order of the map, so identical inputs give identical bytes.
pub fn to_json(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out.push('\n');
    out
}

pub fn csv_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "nan".into()
    }
}

/// Rows of a CSV table; `blocks` are separated by one blank line.
pub fn to_csv(header: &[&str], blocks: &[Vec<Vec<String>>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for (k, block) in blocks.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        for row in block {
            out.push_str(&row.join(","));
            out.push('\n');
        }
    }
    out
}

/// Write to `path` through a temporary file in the same directory, or to
/// standard output when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> std::io::Result<()> {
    match path {
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(text.as_bytes())?;
            lock.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(text.as_bytes())?;
            tmp.flush()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
