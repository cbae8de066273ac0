//! The family of step maps `f_k` / `f_{-k}`: one odd-to-odd Collatz step in
//! spiral coordinates, where `|k|` is the number of halvings.
//!
//! For `k >= 1`:
//!
//! ```text
//! f_k(x)  = (-1)^(k-1) 3/2^k x + c_k/2^k,   c_k = (2^k - 2(-1)^(k-1))/6,   x > 0
//! f_-k(x) = (-1)^k     3/2^k x + d_k/2^k,   d_k = (2^k + 4(-1)^(k-1))/6,   x <= 0
//! ```
//!
//! `f_k` is integral exactly on one residue class modulo `2^k`; that class is its domain.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::affine::AffineMap;
use crate::dyadic::DyadicRational;
use crate::error::{Error, Result};
use crate::residue::{inverse_mod_pow2, ResidueClass, SignConstraint};
use crate::sequences::two_adic_valuation;
use crate::spiral::SpiralValue;

/// Signed subscript of a step map; never zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct FamilyIndex(i64);

impl FamilyIndex {
    pub fn new(k: i64) -> Result<Self> {
        if k == 0 || k.unsigned_abs() > u32::MAX as u64 {
            return Err(Error::ZeroFamilyIndex);
        }
        Ok(FamilyIndex(k))
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// Number of halvings.
    pub fn halvings(self) -> u32 {
        self.0.unsigned_abs() as u32
    }

    /// Positive-side (`x > 0`) family.
    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Whether outputs are positive spiral values. Odd `|k|` gives positive outputs on both sides.
    pub fn output_positive(self) -> bool {
        self.halvings() % 2 == 1
    }

    pub fn input_sign(self) -> SignConstraint {
        if self.is_positive() {
            SignConstraint::Positive
        } else {
            SignConstraint::NonPositive
        }
    }
}

impl fmt::Display for FamilyIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for FamilyIndex {
    type Err = Error;

    /// Accepts `4`, `-3`, `f4`, `f-3`, `f_{-3}`, `f_-3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let t = t.strip_prefix('f').or_else(|| t.strip_prefix('F')).unwrap_or(t);
        let t = t.strip_prefix('_').unwrap_or(t);
        let t = t.trim_start_matches('{').trim_end_matches('}');
        let k: i64 = t.parse().map_err(|_| Error::ParseIndex(s.to_string()))?;
        FamilyIndex::new(k)
    }
}

/// Numerator of the positive-side constant: `(2^k - 2(-1)^(k-1))/6`, the Jacobsthal numbers.
pub fn jacobsthal_c(k: u32) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            min: 1,
            got: 0,
        });
    }
    let alt = if k % 2 == 1 { 1 } else { -1 };
    let num: BigInt = (BigInt::one() << k) - 2 * alt;
    debug_assert!(num.is_multiple_of(&BigInt::from(6)));
    Ok(num / 6)
}

/// Numerator of the non-positive-side constant: `(2^k + 4(-1)^(k-1))/6`.
pub fn jacobsthal_d(k: u32) -> Result<BigInt> {
    if k == 0 {
        return Err(Error::OutOfRange {
            name: "k",
            min: 1,
            got: 0,
        });
    }
    let alt = if k % 2 == 1 { 1 } else { -1 };
    let num: BigInt = (BigInt::one() << k) + 4 * alt;
    debug_assert!(num.is_multiple_of(&BigInt::from(6)));
    Ok(num / 6)
}

/// True iff `k` is a prime `>= 5` dividing `c_k`.
pub fn prime_divides_c(k: u64) -> bool {
    if k < 5 || !is_prime(k) || k > u32::MAX as u64 {
        return false;
    }
    let c = jacobsthal_c(k as u32).expect("k >= 5");
    c.is_multiple_of(&BigInt::from(k))
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// One member of the family with its exact domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StepMap {
    pub index: FamilyIndex,
    pub map: AffineMap,
    pub domain: ResidueClass,
}

impl StepMap {
    pub fn apply(&self, x: &SpiralValue) -> Result<SpiralValue> {
        if !self.domain.contains(x.get()) {
            return Err(Error::OutsideDomain {
                index: self.index.get(),
                x: x.get().clone(),
            });
        }
        let y = self
            .map
            .eval_integer(x.get())
            .expect("step maps are integral on their domain");
        Ok(SpiralValue(y))
    }

    /// Numerator of the constant over `2^|k|` (`c_k` or `d_k`).
    pub fn constant_numerator(&self) -> BigInt {
        self.map.constant_numerator()
    }

    /// The first `count` domain values, nearest zero first.
    pub fn first_inputs(&self, count: usize) -> Vec<BigInt> {
        self.domain.elements(count)
    }

    pub fn first_outputs(&self, count: usize) -> Vec<BigInt> {
        self.first_inputs(count)
            .iter()
            .map(|x| self.map.eval_integer(x).expect("in domain"))
            .collect()
    }
}

/// Builds `f_index` and its domain.
pub fn step_map(index: FamilyIndex) -> StepMap {
    let k = index.halvings();
    let odd_power = k % 2 == 1;
    let (sign, numerator) = if index.is_positive() {
        (if odd_power { 1 } else { -1 }, jacobsthal_c(k))
    } else {
        (if odd_power { -1 } else { 1 }, jacobsthal_d(k))
    };
    let numerator = numerator.expect("k >= 1");
    let map = AffineMap::new(sign, 1, k, DyadicRational::new(numerator.clone(), k));

    // integral iff sign*3*x + numerator = 0 (mod 2^k)
    let modulus = BigInt::one() << k;
    let residue = (-numerator * inverse_mod_pow2(&BigInt::from(3 * sign as i64), k)).mod_floor(&modulus);
    let domain = ResidueClass::new(residue, k, index.input_sign());
    StepMap { index, map, domain }
}

pub fn step_map_i(k: i64) -> Result<StepMap> {
    Ok(step_map(FamilyIndex::new(k)?))
}

/// Applies `f_index` to `x`, rejecting inputs outside its domain.
pub fn apply(index: FamilyIndex, x: &SpiralValue) -> Result<SpiralValue> {
    step_map(index).apply(x)
}

/// The unique family member whose domain holds `x`: `|k|` is the 2-adic valuation of `3 decode(x) + 1`.
pub fn classify(x: &SpiralValue) -> FamilyIndex {
    let successor = x.decode() * 3 + 1;
    let k = two_adic_valuation(&successor) as i64;
    if x.is_positive() {
        FamilyIndex(k)
    } else {
        FamilyIndex(-k)
    }
}

/// Same answer as [`classify`], found by testing domains `|k| = 1, 2, ...` in turn.
pub fn classify_by_residue(x: &SpiralValue) -> FamilyIndex {
    let sign = if x.is_positive() { 1 } else { -1 };
    (1..)
        .map(|k| FamilyIndex(sign * k))
        .find(|&idx| step_map(idx).domain.contains(x.get()))
        .expect("every integer lies in some domain")
}

/// One step of the spiral dynamics.
pub fn next(x: &SpiralValue) -> SpiralValue {
    next_with_index(x).1
}

/// One step together with the family member that took it.
pub fn next_with_index(x: &SpiralValue) -> (FamilyIndex, SpiralValue) {
    let index = classify(x);
    let k = index.halvings();
    // f(x) = (sign 3 x + N) / 2^k, evaluated without rebuilding the map
    let odd_power = k % 2 == 1;
    let (sign, numerator) = if index.is_positive() {
        (if odd_power { 1 } else { -1 }, jacobsthal_c(k))
    } else {
        (if odd_power { -1 } else { 1 }, jacobsthal_d(k))
    };
    let total: BigInt = x.get() * (3 * sign) + numerator.expect("k >= 1");
    debug_assert!(total.trailing_zeros().is_none_or(|t| t >= k as u64));
    (index, SpiralValue(total >> k))
}

/// The six output progressions: every family member's range is exactly one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OutputFamily {
    /// {3, 6, 9, ...}
    I,
    /// {-2, -5, -8, ...}
    II,
    /// {2, 5, 8, ...}
    III,
    /// {0, -3, -6, ...}
    IV,
    /// {1, 4, 7, ...}
    V,
    /// {-1, -4, -7, ...}
    VI,
}

impl OutputFamily {
    pub const ALL: [OutputFamily; 6] = [
        OutputFamily::I,
        OutputFamily::II,
        OutputFamily::III,
        OutputFamily::IV,
        OutputFamily::V,
        OutputFamily::VI,
    ];

    /// The progression holding `v`.
    pub fn containing(v: &BigInt) -> OutputFamily {
        let r = v.mod_floor(&BigInt::from(3));
        let r = u8::try_from(&r).expect("residue mod 3");
        match (v.is_positive(), r) {
            (true, 0) => OutputFamily::I,
            (true, 2) => OutputFamily::III,
            (true, _) => OutputFamily::V,
            (false, 0) => OutputFamily::IV,
            (false, 1) => OutputFamily::II,
            (false, _) => OutputFamily::VI,
        }
    }

    pub fn contains(self, v: &BigInt) -> bool {
        OutputFamily::containing(v) == self
    }

    /// First element (closest to zero) of the progression.
    pub fn first(self) -> i64 {
        match self {
            OutputFamily::I => 3,
            OutputFamily::II => -2,
            OutputFamily::III => 2,
            OutputFamily::IV => 0,
            OutputFamily::V => 1,
            OutputFamily::VI => -1,
        }
    }

    pub fn roman(self) -> &'static str {
        match self {
            OutputFamily::I => "i",
            OutputFamily::II => "ii",
            OutputFamily::III => "iii",
            OutputFamily::IV => "iv",
            OutputFamily::V => "v",
            OutputFamily::VI => "vi",
        }
    }
}

impl fmt::Display for OutputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.roman())
    }
}

/// Which progression the range of `f_index` is.
pub fn output_family(index: FamilyIndex) -> OutputFamily {
    let first = step_map(index).first_outputs(1).remove(0);
    OutputFamily::containing(&first)
}

/// One row of the family table: the map, its constant numerator and its first inputs/outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub index: FamilyIndex,
    pub expression: String,
    pub coefficient: String,
    /// Constant numerator over `2^|k|`, unreduced.
    #[serde(serialize_with = "crate::serde_util::int")]
    pub constant_numerator: BigInt,
    pub denominator_exp: u32,
    #[serde(serialize_with = "crate::serde_util::ints")]
    pub inputs: Vec<BigInt>,
    #[serde(serialize_with = "crate::serde_util::ints")]
    pub outputs: Vec<BigInt>,
}

/// Rows for `f_1, f_-1, ..., f_kmax, f_-kmax`.
pub fn family_table(kmax: u32, samples: usize) -> Result<Vec<TableRow>> {
    if kmax == 0 {
        return Err(Error::OutOfRange {
            name: "kmax",
            min: 1,
            got: 0,
        });
    }
    let mut rows = Vec::with_capacity(2 * kmax as usize);
    for k in 1..=kmax as i64 {
        for idx in [k, -k] {
            let step = step_map(FamilyIndex(idx));
            rows.push(TableRow {
                index: step.index,
                expression: step.map.to_string(),
                coefficient: step.map.coefficient().to_string(),
                constant_numerator: step.constant_numerator(),
                denominator_exp: step.index.halvings(),
                inputs: step.first_inputs(samples),
                outputs: step.first_outputs(samples),
            });
        }
    }
    Ok(rows)
}

pub fn family_table_csv(rows: &[TableRow]) -> String {
    let join = |v: &[BigInt]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
    let mut out = String::from("index,coefficient,constant_numerator,denominator,inputs,outputs\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.index,
            r.coefficient,
            r.constant_numerator,
            BigInt::one() << r.denominator_exp,
            join(&r.inputs),
            join(&r.outputs)
        ));
    }
    out
}

/// True when every `x` in the closed range is accepted by exactly one of the
/// family members with `|k| <= kmax`, and that member is `classify(x)`.
pub fn check_domain_partition(lo: i64, hi: i64) -> std::result::Result<u64, BigInt> {
    let mut checked = 0;
    // no valuation of 3 decode(x) + 1 can exceed its bit length
    let reach = lo.unsigned_abs().max(hi.unsigned_abs()) as u128 * 18 + 4;
    let kmax = (128 - reach.leading_zeros()) as i64 + 1;
    let maps: Vec<StepMap> = (1..=kmax)
        .flat_map(|k| [step_map(FamilyIndex(k)), step_map(FamilyIndex(-k))])
        .collect();
    for x in lo..=hi {
        let xb = BigInt::from(x);
        let mut owners = maps.iter().filter(|m| m.domain.contains(&xb));
        let first = owners.next();
        let sv = SpiralValue(xb.clone());
        match (first, owners.next()) {
            (Some(m), None) if m.index == classify(&sv) => checked += 1,
            _ => return Err(xb),
        }
    }
    Ok(checked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spiral::canonical_index;
    use num_rational::BigRational;

    fn sv(v: i64) -> SpiralValue {
        SpiralValue::from(v)
    }

    fn fi(k: i64) -> FamilyIndex {
        FamilyIndex::new(k).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn zero_index_rejected() {
        assert_eq!(FamilyIndex::new(0), Err(Error::ZeroFamilyIndex));
        assert!(step_map_i(0).is_err());
    }

    #[test]
    fn parse_index() {
        assert_eq!("f-2".parse::<FamilyIndex>().unwrap(), fi(-2));
        assert_eq!("f_{-13}".parse::<FamilyIndex>().unwrap(), fi(-13));
        assert_eq!(" 4".parse::<FamilyIndex>().unwrap(), fi(4));
        assert!("f0".parse::<FamilyIndex>().is_err());
        assert!("g2".parse::<FamilyIndex>().is_err());
    }

    #[test]
    fn step_map_examples() {
        let f1 = step_map(fi(1));
        assert_eq!(f1.map.coefficient(), q(3, 2));
        assert!(f1.map.constant().is_zero());
        assert_eq!(f1.first_inputs(4), ints(&[2, 4, 6, 8]));

        let fm3 = step_map(fi(-3));
        assert_eq!(fm3.map.coefficient(), q(-3, 8));
        assert_eq!(fm3.map.constant().to_rational(), q(2, 8));
        assert_eq!(fm3.first_inputs(3), ints(&[-2, -10, -18]));

        let f4 = step_map(fi(4));
        assert_eq!(f4.map.coefficient(), q(-3, 16));
        assert_eq!(f4.map.constant().to_rational(), q(3, 16));
        assert_eq!(f4.first_inputs(4), ints(&[1, 17, 33, 49]));
    }

    #[test]
    fn apply_examples() {
        assert_eq!(apply(fi(4), &sv(17)).unwrap(), sv(-3));
        assert_eq!(apply(fi(-3), &sv(-10)).unwrap(), sv(4));
        assert_eq!(apply(fi(-2), &sv(0)).unwrap(), sv(0));
    }

    #[test]
    fn apply_rejects_outside_domain() {
        assert_eq!(
            apply(fi(4), &sv(18)),
            Err(Error::OutsideDomain {
                index: 4,
                x: BigInt::from(18)
            })
        );
        // right residue, wrong sign
        assert!(apply(fi(1), &sv(-2)).is_err());
        assert!(apply(fi(-2), &sv(4)).is_err());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&sv(17)), fi(4));
        assert_eq!(classify(&sv(-10)), fi(-3));
        assert_eq!(classify(&sv(0)), fi(-2));
    }

    #[test]
    fn classify_routes_agree() {
        for x in -3000..=3000 {
            assert_eq!(classify(&sv(x)), classify_by_residue(&sv(x)), "x = {x}");
        }
    }

    #[test]
    fn next_examples() {
        assert_eq!(next(&sv(11)), sv(-8));
        assert_eq!(next(&sv(-1)), sv(2));
        assert_eq!(next(&sv(0)), sv(0));
    }

    #[test]
    fn next_matches_checked_apply() {
        for x in -5000..=5000 {
            let x = sv(x);
            assert_eq!(next(&x), apply(classify(&x), &x).unwrap());
        }
    }

    #[test]
    fn jacobsthal_values() {
        let expected = [0, 1, 1, 3, 5, 11, 21, 43, 85, 171, 341, 683, 1365];
        for (i, &c) in expected.iter().enumerate() {
            assert_eq!(jacobsthal_c(i as u32 + 1).unwrap(), BigInt::from(c));
        }
        assert!(jacobsthal_c(0).is_err());
        for k in 3..=64 {
            assert_eq!(
                jacobsthal_c(k).unwrap(),
                jacobsthal_c(k - 1).unwrap() + 2 * jacobsthal_c(k - 2).unwrap()
            );
        }
    }

    #[test]
    fn prime_divisibility() {
        assert!(prime_divides_c(13));
        assert!(prime_divides_c(7));
        assert!(prime_divides_c(11));
        assert!(!prime_divides_c(4));
        assert!(!prime_divides_c(3));
        assert!(!prime_divides_c(9));
        for p in (5..=61).filter(|&p| is_prime(p)) {
            assert!(prime_divides_c(p), "p = {p}");
        }
    }

    #[test]
    fn output_families() {
        assert_eq!(output_family(fi(1)), OutputFamily::I);
        assert_eq!(output_family(fi(4)), OutputFamily::IV);
        assert_eq!(output_family(fi(-7)), OutputFamily::III);
        for k in 1..=60i64 {
            for s in [1, -1] {
                let idx = fi(s * k);
                assert_eq!(output_family(idx), output_family(fi(s * (k + 6))), "{idx}");
            }
        }
    }

    #[test]
    fn range_is_whole_progression() {
        // consecutive outputs step by 3 away from zero and start at the progression's first element
        for k in 1..=20i64 {
            for s in [1, -1] {
                let step = step_map(fi(s * k));
                let out = step.first_outputs(5);
                let fam = OutputFamily::containing(&out[0]);
                assert_eq!(out[0], BigInt::from(fam.first()), "f_{}", s * k);
                let dir = if out[0].is_positive() { 3 } else { -3 };
                for w in out.windows(2) {
                    assert_eq!(&w[1] - &w[0], BigInt::from(dir));
                }
            }
        }
    }

    #[test]
    fn domain_is_valuation_class() {
        // x in dom(f_k) iff v2(3 decode(x) + 1) = k with the matching sign
        for k in 1..=12i64 {
            for s in [1, -1] {
                let step = step_map(fi(s * k));
                for x in -4000..=4000 {
                    let v = sv(x);
                    let by_valuation = classify(&v) == fi(s * k);
                    assert_eq!(step.domain.contains(v.get()), by_valuation, "f_{} at {x}", s * k);
                }
            }
        }
    }

    #[test]
    fn movement_rules() {
        for x in -10_000i64..=10_000 {
            let v = sv(x);
            let y = next(&v);
            if x > 0 && x % 2 == 0 {
                assert_eq!(y.get() * 2, BigInt::from(3 * x));
            }
            if x < 0 && x % 2 != 0 {
                assert_eq!(y.get() * 2, BigInt::from(-3 * x + 1));
            }
            if x > 0 && x % 4 == 3 {
                assert!(!y.is_positive(), "x = {x}");
            }
            assert_eq!(y.is_positive(), classify(&v).output_positive(), "x = {x}");
        }
    }

    #[test]
    fn canonical_index_monotonicity() {
        for x in -10_000i64..=10_000 {
            let v = sv(x);
            if v.is_zero() {
                continue;
            }
            let (idx, y) = next_with_index(&v);
            let (before, after) = (canonical_index(&v), canonical_index(&y));
            if idx == fi(1) || idx == fi(2) {
                assert!(after > before, "x = {x}");
            } else {
                assert!(after < before, "x = {x} via f_{idx}");
            }
        }
    }

    #[test]
    fn partition_small_range() {
        assert_eq!(check_domain_partition(-2000, 2000), Ok(4001));
    }
}
