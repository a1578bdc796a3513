//! JSON shapes shared by the library and the command-line tool.

use serde::{Deserialize, Serialize};

/// Serializes a [`num_bigint::BigUint`] as a decimal string.
pub mod big_decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&x.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(de)?;
        BigUint::parse_bytes(s.as_bytes(), 10)
            .ok_or_else(|| D::Error::custom(format!("not a decimal integer: {s:?}")))
    }
}

/// The `{"m", "s"}` header carried by every serialized ring object.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingHeader {
    pub m: usize,
    pub s: u32,
}

impl From<crate::residue::RingParams> for RingHeader {
    fn from(p: crate::residue::RingParams) -> Self {
        RingHeader { m: p.m(), s: p.s() }
    }
}
