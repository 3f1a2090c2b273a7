//! Byte-stable serialization: sorted keys, floats at 12 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::Failure;

/// Shortest decimal form of `x` rounded to 12 significant digits. Integral
/// values keep a trailing `.0` so they read back as floats.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded == 0.0 {
        return "0.0".into();
    }
    let a = rounded.abs();
    let s = if !(1e-5..1e16).contains(&a) { format!("{rounded:e}") } else { format!("{rounded}") };
    if s.contains(['.', 'e', 'E']) {
        s
    } else {
        format!("{s}.0")
    }
}

fn write_number(out: &mut String, n: &serde_json::Number) {
    if n.is_f64() {
        out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
    } else {
        let _ = write!(out, "{n}");
    }
}

fn write_string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).unwrap_or_else(|_| "\"\"".into()));
}

fn write_value(out: &mut String, v: &Value, indent: Option<usize>, level: usize) {
    let newline = |out: &mut String, level: usize| {
        if let Some(w) = indent {
            out.push('\n');
            out.push_str(&" ".repeat(w * level));
        }
    };
    let sep = if indent.is_some() { "," } else { ", " };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => write_number(out, n),
        Value::String(s) => write_string(out, s),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                newline(out, level + 1);
                write_value(out, item, indent, level + 1);
            }
            newline(out, level);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                newline(out, level + 1);
                write_string(out, k);
                out.push_str(": ");
                write_value(out, &map[k], indent, level + 1);
            }
            newline(out, level);
            out.push('}');
        }
    }
}

/// One-line canonical JSON, e.g. `{"degree": -1, "value": "Z/2:1"}`.
pub fn to_line(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, None, 0);
    s
}

/// Indented canonical JSON with a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = String::new();
    write_value(&mut s, v, Some(2), 0);
    s.push('\n');
    s
}

/// CSV with the given header; every row must have the header's width.
pub fn to_csv(header: &[&str], rows: &[Vec<String>], seed: u64) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    let _ = writeln!(s, "# seed={seed}");
    s
}

/// Writes `contents` to `dir/name`, creating `dir` as needed.
pub fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Failure::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_to_twelve_digits() {
        assert_eq!(format_float(std::f64::consts::SQRT_2), "1.41421356237");
        assert_eq!(format_float(20.0), "20.0");
        assert_eq!(format_float(-0.0), "0.0");
        assert_eq!(format_float(1.0e-9), "1e-9");
        assert_eq!(format_float(f64::NAN), "null");
    }

    #[test]
    fn keys_are_sorted_and_spaced() {
        let v = json!({"value": "Z/2:1", "degree": -1});
        assert_eq!(to_line(&v), r#"{"degree": -1, "value": "Z/2:1"}"#);
        assert_eq!(to_pretty(&json!({"b": [1, 2.5], "a": {}})), "{\n  \"a\": {},\n  \"b\": [\n    1,\n    2.5\n  ]\n}\n");
    }

    #[test]
    fn csv_has_header_first_and_seed_last() {
        let s = to_csv(&["index", "eigenvalue"], &[vec!["0".into(), "1.0".into()]], 9);
        assert_eq!(s, "index,eigenvalue\n0,1.0\n# seed=9\n");
    }
}
