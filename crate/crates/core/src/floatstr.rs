//! Serde adapters writing `f64` parameters as decimal strings.
//!
//! `{:?}` on `f64` produces the shortest representation that parses back to
//! the identical bit pattern, so models survive save/load bit-for-bit.

use serde::{Deserialize, Deserializer, Serializer};

fn encode(x: f64) -> String {
    format!("{x:?}")
}

fn decode<E: serde::de::Error>(s: &str) -> Result<f64, E> {
    let v: f64 = s
        .parse()
        .map_err(|_| E::custom(format!("invalid decimal string {s:?}")))?;
    if !v.is_finite() {
        return Err(E::custom(format!("non-finite parameter {s:?}")));
    }
    Ok(v)
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(values.iter().map(|&x| encode(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter().map(|s| decode(s)).collect()
    }
}

pub mod matrix {
    use super::*;

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            rows.iter()
                .map(|row| row.iter().map(|&x| encode(x)).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let raw = Vec::<Vec<String>>::deserialize(d)?;
        raw.iter()
            .map(|row| row.iter().map(|s| decode(s)).collect())
            .collect()
    }
}

pub mod option {
    use super::*;

    pub fn serialize<S: Serializer>(value: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match value {
            Some(x) => s.serialize_some(&encode(*x)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        match Option::<String>::deserialize(d)? {
            Some(s) => decode(&s).map(Some),
            None => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shortest_repr_round_trips_bits() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            let back: f64 = decode::<serde_json::Error>(&encode(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(decode::<serde_json::Error>("inf").is_err());
        assert!(decode::<serde_json::Error>("NaN").is_err());
        assert!(decode::<serde_json::Error>("abc").is_err());
    }
}
