//! Number formatting shared by every JSON document the crate writes.
//!
//! Finite doubles are written with 17 significant digits so that a read-back
//! reproduces the exact bit pattern. JSON has no infinities, so the two
//! infinite sentinels are written as the strings `"inf"` and `"-inf"`.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats a finite double with 17 significant digits as a JSON number.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "null".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    format!("{x:.16e}")
}

/// A double that serializes through [`format_f64`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format_f64(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

pub fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

/// Reads a number written by [`format_f64`], accepting the infinity strings.
pub fn parse_real(value: &serde_json::Value) -> Option<f64> {
    match value {
        serde_json::Value::Number(n) => n.as_f64(),
        serde_json::Value::String(s) if s == "inf" => Some(f64::INFINITY),
        serde_json::Value::String(s) if s == "-inf" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}
