//! Byte-stable report encodings.

use std::fmt::Write as _;

use serde_json::Value;

use crate::suite::{OutputFormat, Report};

/// C-style `%.12e`: `1.234567890123e-05`.
pub fn format_float(x: f64) -> String {
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

fn write_string(out: &mut String, s: &str) {
    out.push_str(&serde_json::to_string(s).expect("strings serialize"));
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) => write!(out, "{u}").unwrap(),
            (_, Some(i), _) => write!(out, "{i}").unwrap(),
            (_, _, Some(f)) if f.is_finite() => out.push_str(&format_float(f)),
            _ => out.push_str("null"),
        },
        Value::String(s) => write_string(out, s),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_string(out, k);
                out.push_str(": ");
                write_value(out, &map[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Sorted keys, two-space indent, every float as `%.12e`, non-finite as `null`.
pub fn canonical_json(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

pub fn to_json(report: &Report) -> String {
    canonical_json(&serde_json::to_value(report).expect("report serializes"))
}

const CSV_HEADER: [&str; 13] = [
    "name", "c", "connection", "point_index", "point", "residual", "tolerance", "pass", "control", "detected",
    "error", "note", "anchor",
];

fn float_cell(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        String::new()
    }
}

/// One row per check result; points are `;`-separated.
pub fn to_csv(report: &Report) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in &report.records {
        let point: Vec<String> = r.point.iter().map(|&x| float_cell(x)).collect();
        w.write_record([
            r.name.clone(),
            r.c.map(float_cell).unwrap_or_default(),
            r.connection.clone().unwrap_or_default(),
            r.point_index.to_string(),
            point.join(";"),
            float_cell(r.residual),
            float_cell(r.tolerance),
            r.pass.to_string(),
            r.control.to_string(),
            if r.control { r.detected().to_string() } else { String::new() },
            r.error.clone().unwrap_or_default(),
            r.note.clone().unwrap_or_default(),
            r.anchor.clone(),
        ])
        .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

pub fn emit_report(report: &Report, format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Json => to_json(report).into_bytes(),
        OutputFormat::Csv => to_csv(report),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_style_exponent() {
        assert_eq!(format_float(1.0), "1.000000000000e+00");
        assert_eq!(format_float(-2.5e-17), "-2.500000000000e-17");
        assert_eq!(format_float(0.0), "0.000000000000e+00");
        assert_eq!(format_float(1.5e300), "1.500000000000e+300");
    }

    #[test]
    fn canonical_json_sorts_and_nulls() {
        let v = serde_json::json!({"b": 1.5, "a": [1, f64::NAN], "c": {"z": true, "y": "s"}});
        let s = canonical_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.500000000000e+00"));
        assert!(s.contains("null"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(1.5));
    }
}
