//! Exact rationals written as `"p/q"` strings in JSON documents.

use num_bigint::BigInt;
use serde::de::Error;
use serde::{Deserialize, Deserializer, Serializer};

pub use crate::graph::{parse_ratio, Ratio};

pub fn ratio(p: i64, q: i64) -> Ratio {
    Ratio::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(p))
}

pub fn format_ratio(r: &Ratio) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Lossy conversion for display and sampling.
pub fn to_f64(r: &Ratio) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
    let text = String::deserialize(d)?;
    parse_ratio(&text).ok_or_else(|| D::Error::custom(format!("bad rational {text:?}")))
}
