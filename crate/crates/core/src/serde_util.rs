//! Serializers for arbitrary-precision values: machine-sized values become JSON
//! numbers, anything larger becomes a decimal string.

use std::fmt::Display;

use num_bigint::{BigInt, BigUint};
use serde::Serializer;

pub fn display<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

pub fn int<S: Serializer>(value: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    match i64::try_from(value) {
        Ok(v) => s.serialize_i64(v),
        Err(_) => s.collect_str(value),
    }
}

pub fn uint<S: Serializer>(value: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match u64::try_from(value) {
        Ok(v) => s.serialize_u64(v),
        Err(_) => s.collect_str(value),
    }
}

pub fn ints<S: Serializer>(values: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&Int(v))?;
    }
    seq.end()
}

/// Borrowing wrapper that serializes through [`int`].
pub struct Int<'a>(pub &'a BigInt);

impl serde::Serialize for Int<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        int(self.0, s)
    }
}

pub fn opt_int<S: Serializer>(value: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(v) => int(v, s),
        None => s.serialize_none(),
    }
}

/// A pair of displayable values as a two-element array of strings.
pub fn display_pair<T: Display, S: Serializer>(value: &(T, T), s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&value.0.to_string())?;
    t.serialize_element(&value.1.to_string())?;
    t.end()
}
