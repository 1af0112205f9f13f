//! JSON helpers for the report formats.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::linalg::C64;

/// An `f64` that serializes with 17 significant digits in scientific
/// notation, so every value round-trips bit-exactly and the text is stable
/// across platforms. Non-finite values serialize as `null`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Exact(pub f64);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        Option::<f64>::deserialize(deserializer).map(|v| Exact(v.unwrap_or(f64::NAN)))
    }
}

impl From<f64> for Exact {
    fn from(v: f64) -> Self {
        Exact(v)
    }
}

/// Complex number as `[re, im]`.
pub type ExactComplex = [Exact; 2];

pub fn complex_to_json(c: C64) -> ExactComplex {
    [Exact(c.re), Exact(c.im)]
}

pub fn complex_from_json(c: ExactComplex) -> C64 {
    C64::new(c[0].0, c[1].0)
}
