//! Canonical JSON: sorted keys, integers verbatim, floats in `{:.16e}`
//! (17 significant digits), two-space indentation, trailing newline.

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};

pub fn to_canonical<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write_value(&v, 0, &mut out)?;
    out.push('\n');
    Ok(out)
}

/// Parses and re-emits a document canonically.
pub fn canonicalize(text: &str) -> Result<String> {
    let v: Value = serde_json::from_str(text)?;
    to_canonical(&v)
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn indent(level: usize, out: &mut String) {
    out.push('\n');
    out.extend(std::iter::repeat_n("  ", level));
}

fn write_value(v: &Value, level: usize, out: &mut String) -> Result<()> {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_u64() {
                out.push_str(&i.to_string());
            } else if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else {
                let x = n.as_f64().ok_or_else(|| Error::input("unrepresentable number"))?;
                if !x.is_finite() {
                    return Err(Error::input("non-finite number in JSON output"));
                }
                out.push_str(&format_float(x));
            }
        }
        Value::String(s) => out.push_str(&serde_json::to_string(s)?),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return Ok(());
            }
            let flat = items.iter().all(|i| !(i.is_array() || i.is_object()));
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                    if flat {
                        out.push(' ');
                    }
                }
                if !flat {
                    indent(level + 1, out);
                }
                write_value(item, level + 1, out)?;
            }
            if !flat {
                indent(level, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return Ok(());
            }
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (k, key) in keys.into_iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                indent(level + 1, out);
                out.push_str(&serde_json::to_string(key)?);
                out.push_str(": ");
                write_value(&map[key], level + 1, out)?;
            }
            indent(level, out);
            out.push('}');
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_and_ints() {
        let v = serde_json::json!({"b": [1, 2.5, -3], "a": {"z": 0.1, "y": []}, "c": "x"});
        let s = to_canonical(&v).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": {\n    \"y\": [],\n    \"z\": 1.0000000000000001e-1\n  },\n  \"b\": [1, 2.5000000000000000e0, -3],\n  \"c\": \"x\"\n}\n"
        );
        assert_eq!(canonicalize(&s).unwrap(), s);
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.0f64.sqrt()] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
