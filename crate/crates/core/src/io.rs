//! File formats: spaces and functions as JSON, functions as two-column
//! CSV, restriction curves as CSV.
//!
//! JSON output has lexicographically ordered keys and prints every number
//! as the shortest decimal that reads back to the same `f64`, so
//! `parse(serialize(x)) == x` bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ghp::CurveSegment;
use crate::space::{validate_space_with, RawSpace, Space, TRIANGLE_TOL};
use crate::tree::SampledFunction;

/// Finds a bare `NaN` or `Infinity` token outside strings and reports its
/// line, since JSON parsers otherwise give a generic syntax error.
fn non_finite_token(text: &str) -> Option<(usize, &'static str)> {
    let bytes = text.as_bytes();
    let mut in_string = false;
    let mut line = 1;
    let mut k = 0;
    while k < bytes.len() {
        let b = bytes[k];
        if in_string {
            match b {
                b'\\' => k += 1,
                b'"' => in_string = false,
                b'\n' => line += 1,
                _ => {}
            }
        } else {
            match b {
                b'"' => in_string = true,
                b'\n' => line += 1,
                _ => {
                    for token in ["NaN", "Infinity", "inf", "nan"] {
                        if text[k..].starts_with(token) {
                            return Some((line, token));
                        }
                    }
                }
            }
        }
        k += 1;
    }
    None
}

fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| match non_finite_token(text) {
        Some((line, token)) => Error::NonFinite(format!(
            "{what}: `{token}` on line {line}; JSON numbers must be finite"
        )),
        None => Error::Json(e),
    })
}

/// Parses and validates a space with the default triangle tolerance.
pub fn space_from_json(text: &str) -> Result<Space> {
    space_from_json_with(text, TRIANGLE_TOL)
}

pub fn space_from_json_with(text: &str, triangle_tol: f64) -> Result<Space> {
    let raw: RawSpace = parse_json(text, "space")?;
    validate_space_with(raw, triangle_tol).map_err(Error::InvalidSpace)
}

/// Canonical JSON: keys `distances`, `labels`, `masses`, `root`.
pub fn space_to_json(space: &Space) -> String {
    serde_json::to_string_pretty(&space.to_raw()).expect("finite data always serializes")
}

pub fn parse_space(path: impl AsRef<Path>) -> Result<Space> {
    space_from_json(&fs::read_to_string(path)?)
}

pub fn serialize_space(space: &Space, path: impl AsRef<Path>) -> Result<()> {
    let mut text = space_to_json(space);
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Reads `{"grid": [...], "values": [...]}` or two numeric columns
/// `time,value` (an optional non-numeric header line is skipped).
pub fn function_from_str(text: &str) -> Result<SampledFunction> {
    if text.trim_start().starts_with('{') {
        return parse_json(text, "function");
    }
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split([',', ';', '\t', ' ']).filter(|c| !c.is_empty()).collect();
        let nums: std::result::Result<Vec<f64>, _> = cols.iter().map(|c| c.parse::<f64>()).collect();
        match nums {
            Ok(v) if v.len() == 2 => {
                if !v.iter().all(|x| x.is_finite()) {
                    return Err(Error::NonFinite(format!("function: line {}", k + 1)));
                }
                grid.push(v[0]);
                values.push(v[1]);
            }
            Err(_) if grid.is_empty() && values.is_empty() && k == 0 => continue,
            _ => {
                return Err(Error::Malformed(format!(
                    "line {}: expected two numeric columns",
                    k + 1
                )))
            }
        }
    }
    SampledFunction::new(grid, values)
}

pub fn parse_function(path: impl AsRef<Path>) -> Result<SampledFunction> {
    function_from_str(&fs::read_to_string(path)?)
}

pub fn function_to_json(f: &SampledFunction) -> String {
    serde_json::to_string_pretty(f).expect("finite data always serializes")
}

/// One row `r_lo,r_hi,lower,upper` per curve segment, with `inf` for the
/// unbounded end.
pub fn curve_to_csv(curve: &[CurveSegment]) -> String {
    let mut out = String::from("r_lo,r_hi,lower,upper\n");
    for seg in curve {
        let hi = if seg.r_hi.is_finite() {
            format!("{:?}", seg.r_hi)
        } else {
            "inf".to_string()
        };
        let _ = writeln!(
            out,
            "{:?},{},{:?},{:?}",
            seg.r_lo, hi, seg.bound.lower, seg.bound.upper
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let x = Space::new(
            vec!["a".into(), "b".into(), "c".into()],
            vec![
                vec![0.0, 0.1, 0.30000000000000004],
                vec![0.1, 0.0, 0.2],
                vec![0.30000000000000004, 0.2, 0.0],
            ],
            1,
            vec![1.0 / 3.0, 0.0, 2.5e-17],
        )
        .unwrap();
        let text = space_to_json(&x);
        assert_eq!(space_from_json(&text).unwrap(), x);
        let keys: Vec<usize> = ["distances", "labels", "masses", "root"]
            .iter()
            .map(|k| text.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn asymmetric_matrix_names_the_pair() {
        let text = r#"{"distances": [[0, 1], [2, 0]], "labels": ["a", "b"], "masses": [1, 1], "root": 0}"#;
        let err = space_from_json(text).unwrap_err().to_string();
        assert!(err.contains("(0,1)") || err.contains("d(0,1)"), "{err}");
    }

    #[test]
    fn nan_is_rejected_explicitly() {
        let text = "{\"distances\": [[0, NaN],\n [NaN, 0]], \"labels\": [1, 2], \"masses\": [1, 1], \"root\": 0}";
        let err = space_from_json(text).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
        assert!(err.to_string().contains("NaN"));
        // A label string containing NaN is not a number.
        let ok = r#"{"distances": [[0]], "labels": ["NaN"], "masses": [1], "root": 0}"#;
        assert!(space_from_json(ok).is_ok());
    }

    #[test]
    fn function_formats() {
        let json = r#"{"grid": [0, 0.5, 1], "values": [0, 0.25, 0]}"#;
        let f = function_from_str(json).unwrap();
        let csv = "t,f\n0,0\n0.5,0.25\n1,0\n";
        assert_eq!(function_from_str(csv).unwrap(), f);
        assert_eq!(function_from_str(&function_to_json(&f)).unwrap(), f);
        assert!(function_from_str("0,0\n1\n").is_err());
        assert!(function_from_str("0,0\n0.5,-1\n1,0\n").is_err());
    }
}
