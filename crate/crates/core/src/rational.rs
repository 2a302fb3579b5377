//! Exact rationals and their string encoding (`"1/3"`, `"4"`).

use num_rational::Ratio;
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Ratio::from_integer(n)
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (n.trim().parse().ok()?, d.trim().parse::<i64>().ok()?);
            (d != 0).then(|| Ratio::new(n, d))
        }
        None => s.parse().ok().map(Ratio::from_integer),
    }
}

/// Smallest integer not below `r`.
pub fn ceil(r: Rational) -> i64 {
    r.ceil().to_integer()
}

pub mod as_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}

/// `None` encodes infinity as `"inf"`.
pub mod opt_as_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_str("inf"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let s = String::deserialize(d)?;
        if s == "inf" {
            return Ok(None);
        }
        parse_rational(&s)
            .map(Some)
            .ok_or_else(|| serde::de::Error::custom(format!("bad rational {s:?}")))
    }
}
