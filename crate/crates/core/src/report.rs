//! JSON rendering helpers shared by every report type.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A float that serializes as a JSON number with 17 significant digits,
/// e.g. `4.6145956776795835e1`. Non-finite values serialize as `null`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Real(pub f64);

impl Real {
    pub fn render(self) -> Option<String> {
        self.0.is_finite().then(|| format!("{:.16e}", self.0))
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real(x)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.render() {
            Some(text) => RawValue::from_string(text)
                .map_err(serde::ser::Error::custom)?
                .serialize(s),
            None => s.serialize_none(),
        }
    }
}

pub(crate) fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    Real(*x).serialize(s)
}

pub(crate) fn serialize_display<T: std::fmt::Display, S: Serializer>(
    x: &T,
    s: S,
) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}
