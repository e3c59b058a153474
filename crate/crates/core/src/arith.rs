//! Integer and rational helpers shared by every module.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(v: i64) -> Rat {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> Rat {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn to_rat(v: &Int) -> Rat {
    BigRational::from_integer(v.clone())
}

/// Returns the integer value of `r`, or `None` when the denominator is not 1.
pub fn as_int(r: &Rat) -> Option<Int> {
    if r.is_integer() {
        Some(r.to_integer())
    } else {
        None
    }
}

pub fn require_int(r: &Rat, what: &str) -> Result<Int> {
    as_int(r).ok_or_else(|| Error::NonIntegral(format!("{what} = {}", format_rat(r))))
}

/// Exact halving; fails on odd input.
pub fn half(v: &Int) -> Result<Int> {
    let (q, rem) = v.div_rem(&int(2));
    if rem.is_zero() {
        Ok(q)
    } else {
        Err(Error::NonIntegral(format!("{v}/2")))
    }
}

/// Canonical `p/q` rendering: `q > 0`, `gcd(p, q) = 1`, denominator always shown.
pub fn format_rat(r: &Rat) -> String {
    // BigRational is kept reduced with a positive denominator.
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p`, `-p`, or `p/q`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: Int = p.trim().parse().map_err(|_| bad())?;
            let q: Int = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => {
            let p: Int = s.parse().map_err(|_| bad())?;
            Ok(BigRational::from_integer(p))
        }
    }
}

/// Sign used to normalize vectors "up to overall sign": the sign of the first
/// nonzero entry.
pub fn leading_sign<'a>(entries: impl IntoIterator<Item = &'a Rat>) -> i32 {
    for e in entries {
        if e.is_positive() {
            return 1;
        }
        if e.is_negative() {
            return -1;
        }
    }
    0
}

pub fn is_one(r: &Rat) -> bool {
    r.is_one()
}

pub mod serde_rat {
    //! Serde adapter writing rationals as canonical `"p/q"` strings.
    use super::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rat_vec {
    use super::{format_rat, parse_rat, Rat};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rat))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rat>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_rat(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// An integer that serializes as a plain number when it fits in `i64` and
/// as a decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JsonInt(pub Int);

impl serde::Serialize for JsonInt {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> serde::Deserialize<'de> for JsonInt {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl serde::de::Visitor<'_> for V {
            type Value = JsonInt;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an integer")
            }
            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<JsonInt, E> {
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<JsonInt, E> {
                Ok(JsonInt(Int::from(v)))
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<JsonInt, E> {
                v.trim()
                    .parse::<Int>()
                    .map(JsonInt)
                    .map_err(|_| E::custom(format!("invalid integer `{v}`")))
            }
        }
        d.deserialize_any(V)
    }
}

pub mod serde_int {
    use super::{Int, JsonInt};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Int, s: S) -> Result<S::Ok, S::Error> {
        JsonInt(v.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        JsonInt::deserialize(d).map(|j| j.0)
    }
}

pub mod serde_int_vec {
    use super::{Int, JsonInt};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Int], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| JsonInt(x.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Int>, D::Error> {
        Ok(Vec::<JsonInt>::deserialize(d)?.into_iter().map(|j| j.0).collect())
    }
}

pub mod serde_int_matrix {
    use super::{Int, JsonInt};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &[Vec<Int>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(|x| JsonInt(x.clone())).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Int>>, D::Error> {
        Ok(Vec::<Vec<JsonInt>>::deserialize(d)?
            .into_iter()
            .map(|row| row.into_iter().map(|j| j.0).collect())
            .collect())
    }
}

pub mod serde_int_map {
    use super::{Int, JsonInt};
    use serde::{Deserialize, Deserializer, Serializer};
    use std::collections::BTreeMap;

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Vec<Int>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(m.iter().map(|(k, v)| {
            (k, v.iter().map(|x| JsonInt(x.clone())).collect::<Vec<_>>())
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, Vec<Int>>, D::Error> {
        Ok(BTreeMap::<String, Vec<JsonInt>>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().map(|j| j.0).collect()))
            .collect())
    }
}
