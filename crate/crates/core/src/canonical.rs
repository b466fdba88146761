//! Canonical JSON: object keys sorted, two-space indentation, integers
//! written as integers and every other number with exactly four decimals.
//!
//! Equal values always render to identical bytes.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

pub const REAL_DECIMALS: usize = 4;

/// Rounds to the precision canonical JSON keeps, so a rendered real parses
/// back to the same `f64`.
pub fn quantize(x: f64) -> f64 {
    let q = (x * 1e4).round() / 1e4;
    // Avoid rendering "-0.0000".
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &value, 0);
    out.push('\n');
    Ok(out)
}

fn indent(out: &mut String, depth: usize) {
    out.extend(std::iter::repeat_n("  ", depth));
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                let x = quantize(n.as_f64().unwrap_or(0.0));
                write!(out, "{x:.prec$}", prec = REAL_DECIMALS).unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                indent(out, depth + 1);
                out.push_str(&Value::String((*key).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*key], depth + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, depth);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_keys_and_fixed_reals() {
        let v = json!({"b": 1, "a": [0.8, 2, -3], "c": {"z": true, "y": null}, "d": 1.0});
        let s = to_canonical_string(&v).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": [\n    0.8000,\n    2,\n    -3\n  ],\n  \"b\": 1,\n  \"c\": {\n    \"y\": null,\n    \"z\": true\n  },\n  \"d\": 1.0000\n}\n"
        );
    }

    #[test]
    fn empty_containers_and_escapes() {
        let v = json!({"rows": [], "m": {}, "s": "a\"b\n"});
        let s = to_canonical_string(&v).unwrap();
        assert!(s.contains("\"rows\": []"));
        assert!(s.contains("\"m\": {}"));
        assert!(s.contains(r#""s": "a\"b\n""#));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn quantized_values_survive_parsing() {
        for x in [1.0 / 3.0, 0.8, 96.52, 88.286_666, -0.000_01, 12_345.678_91] {
            let q = quantize(x);
            let s = to_canonical_string(&q).unwrap();
            let back: f64 = serde_json::from_str(&s).unwrap();
            assert_eq!(back, q, "{s}");
        }
        assert_eq!(to_canonical_string(&-0.00001).unwrap(), "0.0000\n");
    }
}
