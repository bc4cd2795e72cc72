//! Lowercase-hex JSON representation of binary fields.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn decode_lower<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
    let s = String::deserialize(d)?;
    if s.bytes().any(|b| b.is_ascii_uppercase()) {
        return Err(D::Error::custom("hex must be lowercase"));
    }
    hex::decode(&s).map_err(D::Error::custom)
}

/// Fixed-width binary value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hex<const N: usize>(pub [u8; N]);

impl<const N: usize> fmt::Debug for Hex<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl<const N: usize> Serialize for Hex<N> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de, const N: usize> Deserialize<'de> for Hex<N> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = decode_lower(d)?;
        let n = v.len();
        v.try_into()
            .map(Hex)
            .map_err(|_| D::Error::custom(format!("expected {N} bytes, got {n}")))
    }
}

/// Variable-length binary value.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct HexVec(pub Vec<u8>);

impl fmt::Debug for HexVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(&self.0))
    }
}

impl Serialize for HexVec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(&self.0))
    }
}

impl<'de> Deserialize<'de> for HexVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        decode_lower(d).map(HexVec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowercase_only() {
        assert_eq!(serde_json::to_string(&Hex([0xab, 0x01])).unwrap(), "\"ab01\"");
        assert_eq!(serde_json::from_str::<Hex<2>>("\"ab01\"").unwrap(), Hex([0xab, 1]));
        assert!(serde_json::from_str::<Hex<2>>("\"AB01\"").is_err());
        assert!(serde_json::from_str::<Hex<3>>("\"ab01\"").is_err());
        assert_eq!(serde_json::from_str::<HexVec>("\"\"").unwrap(), HexVec(vec![]));
    }
}
