//! Canonical JSON: sorted keys, floats with 17 significant digits, two-space indent.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's Map is a BTreeMap without the preserve_order feature, so keys come out sorted
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").expect("string write");
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").expect("string write");
            } else {
                write!(out, "{:.16e}", n.as_f64().expect("finite float")).expect("string write");
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string escape")),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
                if i + 1 < items.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                indent(out, depth + 1);
                out.push_str(&serde_json::to_string(k).expect("string escape"));
                out.push_str(": ");
                write_value(out, item, depth + 1);
                if i + 1 < map.len() {
                    out.push(',');
                }
                out.push('\n');
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
    fn sorted_keys_and_fixed_floats() {
        let s = to_canonical_json(&json!({"b": 0.1, "a": [1, -2.5e-7], "c": null})).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": [\n    1,\n    -2.4999999999999999e-7\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": null\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"], json!(0.1));
    }
}
