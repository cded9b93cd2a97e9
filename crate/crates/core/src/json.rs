//! Lossless JSON encodings for exact rationals.
//!
//! Rationals are written as `{"num": "...", "den": "..."}` with decimal
//! strings. On input an integer, a `"p/q"` string or the object form are
//! all accepted.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numerics::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: String,
    pub den: String,
}

impl From<&Rational> for RationalJson {
    fn from(r: &Rational) -> Self {
        RationalJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyRational {
    Int(i64),
    Text(String),
    Pair { num: StringOrInt, den: StringOrInt },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum StringOrInt {
    Int(i64),
    Text(String),
}

fn parse_int(s: &str) -> Result<BigInt, String> {
    s.trim().parse::<BigInt>().map_err(|_| format!("not an integer: {s:?}"))
}

fn from_parts(num: BigInt, den: BigInt) -> Result<Rational, String> {
    if den.is_zero() {
        return Err("zero denominator".into());
    }
    Ok(Rational::new(num, den))
}

impl StringOrInt {
    fn value(self) -> Result<BigInt, String> {
        match self {
            StringOrInt::Int(i) => Ok(BigInt::from(i)),
            StringOrInt::Text(s) => parse_int(&s),
        }
    }
}

impl AnyRational {
    fn value(self) -> Result<Rational, String> {
        match self {
            AnyRational::Int(i) => Ok(Rational::from_integer(BigInt::from(i))),
            AnyRational::Text(s) => match s.split_once('/') {
                Some((n, d)) => from_parts(parse_int(n)?, parse_int(d)?),
                None => Ok(Rational::from_integer(parse_int(&s)?)),
            },
            AnyRational::Pair { num, den } => from_parts(num.value()?, den.value()?),
        }
    }
}

pub fn parse_rational_value(v: &serde_json::Value) -> Result<Rational, String> {
    AnyRational::deserialize(v)
        .map_err(|e| e.to_string())?
        .value()
}

/// A rational vector with the lossless encoding, usable inside `Option`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExactVec(#[serde(with = "rational_vec")] pub Vec<Rational>);

/// `#[serde(with = "json::rational")]`
pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        RationalJson::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        AnyRational::deserialize(d)?.value().map_err(D::Error::custom)
    }
}

/// `#[serde(with = "json::rational_vec")]`
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<RationalJson> = v.iter().map(RationalJson::from).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<AnyRational>::deserialize(d)?
            .into_iter()
            .map(|a| a.value().map_err(D::Error::custom))
            .collect()
    }
}

/// `#[serde(with = "json::rational_matrix")]` for a list of rational vectors.
pub mod rational_matrix {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        let out: Vec<Vec<RationalJson>> = v.iter().map(|r| r.iter().map(RationalJson::from).collect()).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        Vec::<Vec<AnyRational>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(|a| a.value().map_err(D::Error::custom)).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::rat_frac;

    #[derive(Serialize, Deserialize, PartialEq, Debug)]
    struct Holder {
        #[serde(with = "rational")]
        x: Rational,
        #[serde(with = "rational_vec")]
        v: Vec<Rational>,
    }

    #[test]
    fn accepts_all_input_forms() {
        let h: Holder = serde_json::from_str(r#"{"x": "-6/4", "v": [3, {"num": "1", "den": "3"}, {"num": 2, "den": 4}]}"#).unwrap();
        assert_eq!(h.x, rat_frac(-3, 2));
        assert_eq!(h.v, vec![rat_frac(3, 1), rat_frac(1, 3), rat_frac(1, 2)]);
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(
            s,
            r#"{"x":{"num":"-3","den":"2"},"v":[{"num":"3","den":"1"},{"num":"1","den":"3"},{"num":"1","den":"2"}]}"#
        );
        assert_eq!(serde_json::from_str::<Holder>(&s).unwrap(), h);
        assert!(serde_json::from_str::<Holder>(r#"{"x": "1/0", "v": []}"#).is_err());
    }
}
