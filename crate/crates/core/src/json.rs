// SPDX-License-Identifier: Apache-2.0

//! Arbitrary-precision integers as bare JSON numbers.

use std::str::FromStr;

use serde::de::Error as _;
use serde::ser::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Int;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JsonInt(pub Int);

impl Serialize for JsonInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let n = serde_json::Number::from_str(&self.0.to_string()).map_err(S::Error::custom)?;
        n.serialize(s)
    }
}

impl<'de> Deserialize<'de> for JsonInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let n = serde_json::Number::deserialize(d)?;
        Int::from_str(&n.to_string())
            .map(JsonInt)
            .map_err(|e| D::Error::custom(format!("expected an integer, got {n}: {e}")))
    }
}

impl From<Int> for JsonInt {
    fn from(v: Int) -> Self {
        JsonInt(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn big_values_stay_exact() {
        let v = JsonInt(Int::from_str("-123456789012345678901234567890").unwrap());
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, "-123456789012345678901234567890");
        let back: JsonInt = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<JsonInt>("1.5").is_err());
    }
}
