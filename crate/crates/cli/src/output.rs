use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Rounds to 12 significant digits and prints it the way JSON output does.
pub fn fmt_float(x: f64) -> String {
    let r = round12(x);
    if r.is_finite() {
        serde_json::Number::from_f64(r).map_or_else(|| "nan".into(), |n| n.to_string())
    } else if r.is_nan() {
        "nan".into()
    } else if r > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                let r = round12(x);
                *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}

/// Standard output when `path` is absent.
pub fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(-0.0), "0.0");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(1e-20 / 3.0), "3.33333333333e-21");
        assert_eq!(fmt_float(2.0 - 1e-15), "2.0");
    }

    #[test]
    fn json_rounding_keeps_integers() {
        let s = to_json(&serde_json::json!({"n": 3, "x": [0.1 + 0.2]})).unwrap();
        assert!(s.contains("\"n\": 3"));
        assert!(s.contains("0.3"));
        assert!(!s.contains("0.30000000000000004"));
    }
}
