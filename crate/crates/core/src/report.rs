//! JSON and CSV output with every float printed to 17 significant digits,
//! so identical inputs give byte-identical files.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

/// Float formatting shared by both writers.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |out: &mut String, level: usize| {
        for _ in 0..level {
            out.push_str("  ");
        }
    };
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => write!(out, "{i}").unwrap(),
            (_, Some(u)) => write!(out, "{u}").unwrap(),
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                pad(out, indent + 1);
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                pad(out, indent + 1);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, item, indent + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(out, indent);
            out.push('}');
        }
    }
}

/// Pretty JSON document terminated by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidGate(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::Number(n)) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.to_string(),
            (_, Some(u)) => u.to_string(),
            _ => format_float(n.as_f64().unwrap_or(f64::NAN)),
        },
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// CSV with the given columns taken by name from each serialized row.
pub fn to_csv<T: Serialize>(rows: &[T], columns: &[&str]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns)?;
    for row in rows {
        let v = serde_json::to_value(row).map_err(|e| Error::InvalidGate(e.to_string()))?;
        let record: Vec<String> = columns.iter().map(|c| cell(v.get(*c))).collect();
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Column order for optimizer tables.
pub const TABLE_COLUMNS: [&str; 10] = [
    "n",
    "epsilon",
    "m",
    "delta0",
    "delta1",
    "t_depth",
    "t_count",
    "ancilla_clean",
    "ancilla_persistent",
    "qft_share",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        n: usize,
        epsilon: f64,
        label: &'static str,
    }

    #[test]
    fn floats_carry_17_digits() {
        assert_eq!(format_float(1700.0), "1.7000000000000000e3");
        assert_eq!(format_float(f64::NAN), "null");
        let json = to_json(&Row { n: 3, epsilon: 0.1, label: "x" }).unwrap();
        assert!(json.contains("\"epsilon\": 1.0000000000000001e-1"));
        assert!(json.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["epsilon"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_follows_column_order() {
        let rows = [Row { n: 1, epsilon: 1e-9, label: "a" }, Row { n: 2, epsilon: 0.5, label: "b" }];
        let text = to_csv(&rows, &["label", "n", "epsilon", "missing"]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "label,n,epsilon,missing");
        assert_eq!(lines[1], "a,1,1.0000000000000001e-9,");
        assert_eq!(to_csv(&rows, &["n"]).unwrap(), to_csv(&rows, &["n"]).unwrap());
    }
}
