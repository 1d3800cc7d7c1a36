//! Serialization helpers: exact rationals travel as `p` / `p/q` strings,
//! decimals as fixed 17-significant-digit strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{de, Deserialize, Deserializer, Serializer};
use std::fmt;

pub fn rational_to_string(q: &BigRational) -> String {
    q.to_string()
}

pub fn rational_from_str(s: &str) -> Result<BigRational, String> {
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = numer
        .trim()
        .parse()
        .map_err(|_| format!("bad rational numerator in {:?}", s))?;
    let d: BigInt = denom
        .trim()
        .parse()
        .map_err(|_| format!("bad rational denominator in {:?}", s))?;
    if d.is_zero() {
        return Err(format!("zero denominator in {:?}", s));
    }
    Ok(BigRational::new(n, d))
}

pub mod rat {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(q)
    }
}

pub mod rat_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&rational_to_string(q))?;
        }
        seq.end()
    }
}

pub mod rat_mat {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Vec<BigRational>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for row in v {
            let row: Vec<String> = row.iter().map(rational_to_string).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigRational>>, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        rows.iter()
            .map(|row| {
                row.iter()
                    .map(|t| rational_from_str(t).map_err(de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// An `f64` that serializes as a string with 17 significant digits, the
/// shortest width that survives a round trip byte-identically.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decimal17(pub f64);

impl fmt::Display for Decimal17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

impl serde::Serialize for Decimal17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Decimal17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse::<f64>()
            .map(Decimal17)
            .map_err(de::Error::custom)
    }
}
