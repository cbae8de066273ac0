//! The three integer sequences the spiral is built from.
//!
//! * `a016789(n) = 3n - 1`, the halved first Collatz iterate of the odd number `2n - 1`;
//! * `a075677(n)`, the odd part of `a016789(n)`;
//! * `a329480(n)`, the spiral label of `a075677(n)`.
//!
//! Indices are 1-based. Every term is computed directly from its index.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A 1-based position in one of the sequences. Also used as the ray position on the spiral.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "String")]
pub struct SequenceIndex(BigUint);

/// Ray positions on the spiral are sequence positions.
pub type RayIndex = SequenceIndex;

impl SequenceIndex {
    pub fn new(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIndex(0));
        }
        Ok(SequenceIndex(BigUint::from(n)))
    }

    pub fn from_big(n: BigUint) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidIndex(0));
        }
        Ok(SequenceIndex(n))
    }

    pub fn from_signed(n: &BigInt) -> Result<Self> {
        match n.to_biguint() {
            Some(u) if !u.is_zero() => Ok(SequenceIndex(u)),
            _ => Err(Error::InvalidIndex(
                i128::try_from(n.clone()).unwrap_or(i128::MIN),
            )),
        }
    }

    pub fn get(&self) -> &BigUint {
        &self.0
    }

    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }
}

impl fmt::Display for SequenceIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<SequenceIndex> for String {
    fn from(n: SequenceIndex) -> String {
        n.to_string()
    }
}

/// One revolution of the spiral: a contiguous block of `2^(2k-1)` indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    pub k: u32,
    #[serde(serialize_with = "crate::serde_util::uint")]
    pub first_index: BigUint,
    #[serde(serialize_with = "crate::serde_util::uint")]
    pub last_index: BigUint,
}

impl Level {
    /// Level `k` (k >= 1).
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::OutOfRange {
                name: "level",
                min: 1,
                got: 0,
            });
        }
        Ok(Level {
            k,
            first_index: last_index_of(k - 1) + 1u32,
            last_index: last_index_of(k),
        })
    }

    pub fn len(&self) -> BigUint {
        &self.last_index - &self.first_index + 1u32
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: &SequenceIndex) -> bool {
        self.first_index <= n.0 && n.0 <= self.last_index
    }

    pub fn indices(&self) -> impl Iterator<Item = SequenceIndex> + '_ {
        num_iter(&self.first_index, &self.last_index).map(SequenceIndex)
    }
}

fn num_iter(lo: &BigUint, hi: &BigUint) -> impl Iterator<Item = BigUint> {
    let hi = hi.clone();
    std::iter::successors(Some(lo.clone()), |n| Some(n + 1u32)).take_while(move |n| *n <= hi)
}

// (2/3)(4^k - 1); zero for k = 0.
fn last_index_of(k: u32) -> BigUint {
    let four_k = BigUint::one() << (2 * k as u64);
    (four_k - 1u32) * 2u32 / 3u32
}

/// 2-adic valuation of a nonzero integer.
pub fn two_adic_valuation(n: &BigInt) -> u64 {
    n.trailing_zeros().expect("valuation of zero")
}

/// `3n - 1`.
pub fn a016789(n: &SequenceIndex) -> BigInt {
    BigInt::from(n.0.clone()) * 3 - 1
}

/// Odd part of `3n - 1`.
pub fn a075677(n: &SequenceIndex) -> BigInt {
    let t = a016789(n);
    let v = two_adic_valuation(&t);
    t >> v
}

/// Spiral label of the `n`-th odd part: `(1 - t)/6` when `t = 1 mod 6`, `(t + 1)/6` when `t = 5 mod 6`.
pub fn a329480(n: &SequenceIndex) -> BigInt {
    let t = a075677(n);
    let r = t.mod_floor(&BigInt::from(6));
    if r.is_one() {
        (BigInt::one() - t) / 6
    } else {
        debug_assert_eq!(r, BigInt::from(5));
        (t + 1) / 6
    }
}

/// The level whose index range contains `n`.
pub fn level_of_index(n: &SequenceIndex) -> Level {
    let mut k = 1;
    while last_index_of(k) < n.0 {
        k += 1;
    }
    Level::new(k).expect("k >= 1")
}

/// Which of the three sequences to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sequence {
    A016789,
    A075677,
    A329480,
}

impl Sequence {
    pub fn term(self, n: &SequenceIndex) -> BigInt {
        match self {
            Sequence::A016789 => a016789(n),
            Sequence::A075677 => a075677(n),
            Sequence::A329480 => a329480(n),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Sequence::A016789 => "A016789",
            Sequence::A075677 => "A075677",
            Sequence::A329480 => "A329480",
        }
    }

    /// Terms `1..=count` as `(index, value)` pairs.
    pub fn terms(self, count: u64) -> impl Iterator<Item = (u64, BigInt)> {
        (1..=count).map(move |n| {
            let idx = SequenceIndex::new(n).expect("n >= 1");
            (n, self.term(&idx))
        })
    }
}

impl std::str::FromStr for Sequence {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "A016789" => Ok(Sequence::A016789),
            "A075677" => Ok(Sequence::A075677),
            "A329480" => Ok(Sequence::A329480),
            other => Err(format!("unknown sequence `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: u64) -> SequenceIndex {
        SequenceIndex::new(n).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn index_zero_rejected() {
        assert_eq!(SequenceIndex::new(0), Err(Error::InvalidIndex(0)));
        assert!(SequenceIndex::from_signed(&big(-3)).is_err());
    }

    #[test]
    fn listed_terms() {
        assert_eq!(a016789(&idx(1)), big(2));
        assert_eq!(a016789(&idx(2)), big(5));
        assert_eq!(a016789(&idx(100)), big(299));

        let a075677_listing = [
            1, 5, 1, 11, 7, 17, 5, 23, 13, 29, 1, 35, 19, 41, 11, 47, 25, 53, 7, 59, 31, 65, 17,
            71, 37, 77, 5, 83, 43, 89, 23, 95, 49, 101, 13, 107, 55, 113, 29, 119, 61, 125, 1,
            131, 67, 137, 35,
        ];
        for (i, &t) in a075677_listing.iter().enumerate() {
            assert_eq!(a075677(&idx(i as u64 + 1)), big(t), "index {}", i + 1);
        }

        let a329480_listing = [
            0, 1, 0, 2, -1, 3, 1, 4, -2, 5, 0, 6, -3, 7, 2, 8, -4, 9, -1, 10, -5, 11, 3, 12, -6,
            13, 1, 14, -7, 15, 4, 16, -8, 17, -2, 18, -9, 19, 5, 20, -10, 21, 0, 22, -11, 23,
        ];
        for (i, &t) in a329480_listing.iter().enumerate() {
            assert_eq!(a329480(&idx(i as u64 + 1)), big(t), "index {}", i + 1);
        }
    }

    #[test]
    fn levels() {
        let l1 = level_of_index(&idx(1));
        assert_eq!((l1.k, l1.first_index.clone(), l1.last_index.clone()), (1, 1u32.into(), 2u32.into()));
        let l2 = level_of_index(&idx(3));
        assert_eq!((l2.k, l2.first_index.clone(), l2.last_index.clone()), (2, 3u32.into(), 10u32.into()));
        let l3 = level_of_index(&idx(11));
        assert_eq!((l3.k, l3.first_index.clone(), l3.last_index.clone()), (3, 11u32.into(), 42u32.into()));
        assert_eq!(level_of_index(&idx(42)).k, 3);
        assert_eq!(level_of_index(&idx(43)).k, 4);
        assert!(Level::new(0).is_err());
    }

    #[test]
    fn level_sizes_are_odd_powers_of_two() {
        for k in 1..=20u32 {
            let level = Level::new(k).unwrap();
            assert_eq!(level.len(), BigUint::one() << (2 * k - 1) as u64);
        }
    }

    #[test]
    fn level_starts_with_one() {
        for k in 1..=8u32 {
            let level = Level::new(k).unwrap();
            let first = SequenceIndex(level.first_index.clone());
            assert_eq!(a075677(&first), big(1));
            assert_eq!(a329480(&first), big(0));
        }
    }

    #[test]
    fn level_values_nest() {
        use std::collections::BTreeSet;
        let values = |k: u32| -> BTreeSet<BigInt> {
            Level::new(k).unwrap().indices().map(|n| a075677(&n)).collect()
        };
        let mut prev = values(1);
        for k in 2..=6 {
            let cur = values(k);
            assert!(prev.is_subset(&cur), "level {} not contained in level {}", k - 1, k);
            prev = cur;
        }
    }

    #[test]
    fn large_index_does_not_overflow() {
        let n = SequenceIndex::from_big(BigUint::from(u64::MAX) * 1000u32).unwrap();
        let t = a016789(&n);
        assert_eq!(t, BigInt::from(u64::MAX) * 3000 - 1);
        assert!(a075677(&n).is_odd());
    }
}
