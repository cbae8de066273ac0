//! Spiral coordinates: the signed encoding of `6x +- 1` numbers, the polar
//! curve `r = 2 * 2^(theta/pi)` and the ray positions that carry the labels.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sequences::{a329480, RayIndex, SequenceIndex};

/// A natural number `6x - 1` (encoded as `x > 0`), `6x + 1` (encoded as `-x <= 0`), or 1 (encoded as 0).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct SpiralValue(#[serde(serialize_with = "crate::serde_util::int")] pub BigInt);

impl SpiralValue {
    pub fn new(v: impl Into<BigInt>) -> Self {
        SpiralValue(v.into())
    }

    pub fn zero() -> Self {
        SpiralValue(BigInt::zero())
    }

    pub fn get(&self) -> &BigInt {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The natural number this value stands for.
    pub fn decode(&self) -> BigInt {
        if self.0.is_positive() {
            &self.0 * 6 - 1
        } else {
            1 - &self.0 * 6
        }
    }
}

impl fmt::Display for SpiralValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<i64> for SpiralValue {
    fn from(v: i64) -> Self {
        SpiralValue(BigInt::from(v))
    }
}

/// Encodes `n = 1` or `n = +-1 mod 6` as a spiral value.
pub fn encode(n: &BigInt) -> Result<SpiralValue> {
    if !n.is_positive() {
        return Err(Error::NotSixXPlusMinusOne(n.clone()));
    }
    let (q, r) = n.div_mod_floor(&BigInt::from(6));
    match u8::try_from(&r).expect("residue mod 6") {
        5 => Ok(SpiralValue(q + 1)),
        1 => Ok(SpiralValue(-q)),
        _ => Err(Error::NotSixXPlusMinusOne(n.clone())),
    }
}

/// Inverse of [`encode`].
pub fn decode(v: &SpiralValue) -> BigInt {
    v.decode()
}

/// First position at which `v` appears in A329480: `2v` for `v > 0`, `1 - 4v` otherwise.
pub fn canonical_index(v: &SpiralValue) -> RayIndex {
    let n = if v.0.is_positive() {
        &v.0 * 2
    } else {
        1 - &v.0 * 4
    };
    SequenceIndex::from_signed(&n).expect("canonical index is positive")
}

/// Ray angle `ln((3n - 1)/2) * pi / ln 2`.
pub fn theta(n: &RayIndex) -> f64 {
    let three_n_minus_one = n.get() * 3u32 - 1u32;
    let value = three_n_minus_one.to_f64().unwrap_or(f64::INFINITY) / 2.0;
    value.log2() * PI
}

/// Spiral radius `2 * 2^(theta/pi)`.
pub fn radius(theta: f64) -> f64 {
    2.0 * (theta / PI).exp2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarPoint {
    pub theta: f64,
    pub r: f64,
}

/// One ray: its position, where it meets the curve, and its A329480 label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarRow {
    #[serde(serialize_with = "crate::serde_util::display")]
    pub n: RayIndex,
    #[serde(flatten)]
    pub point: PolarPoint,
    pub label: SpiralValue,
}

pub fn export_polar(n_max: u64) -> Result<Vec<PolarRow>> {
    if n_max == 0 {
        return Err(Error::OutOfRange {
            name: "n_max",
            min: 1,
            got: 0,
        });
    }
    Ok((1..=n_max)
        .map(|n| {
            let n = SequenceIndex::new(n).expect("n >= 1");
            let t = theta(&n);
            PolarRow {
                point: PolarPoint {
                    theta: t,
                    r: radius(t),
                },
                label: SpiralValue(a329480(&n)),
                n,
            }
        })
        .collect())
}

pub fn polar_csv(rows: &[PolarRow]) -> String {
    let mut out = String::from("n,theta,r,label\n");
    for row in rows {
        let _ = writeln!(out, "{},{},{},{}", row.n, row.point.theta, row.point.r, row.label);
    }
    out
}

/// Default angular step of the sampled curve.
pub const SVG_ANGLE_STEP: f64 = PI / 64.0;

/// Draws the spiral as a polyline, each ray as a segment from the curve to the
/// viewport edge, and the label at the foot of each ray.
pub fn polar_svg(rows: &[PolarRow], angle_step: f64) -> String {
    let theta_max = rows.iter().map(|r| r.point.theta).fold(0.0, f64::max) + 2.0 * PI;
    let extent = radius(theta_max) * 1.05;
    let size = 800.0;
    let scale = size / (2.0 * extent);
    let to_xy = |theta: f64, r: f64| -> (f64, f64) {
        (size / 2.0 + r * theta.cos() * scale, size / 2.0 - r * theta.sin() * scale)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let mut points = String::new();
    let steps = (theta_max / angle_step).ceil() as usize;
    for i in 0..=steps {
        let t = i as f64 * angle_step;
        let (x, y) = to_xy(t, radius(t));
        let _ = write!(points, "{x:.3},{y:.3} ");
    }
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="black" stroke-width="1" points="{}"/>"#,
        points.trim_end()
    );

    for row in rows {
        let (x0, y0) = to_xy(row.point.theta, row.point.r);
        let (x1, y1) = to_xy(row.point.theta, extent);
        let _ = writeln!(
            svg,
            r#"<line x1="{x0:.3}" y1="{y0:.3}" x2="{x1:.3}" y2="{y1:.3}" stroke="steelblue" stroke-width="0.5"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x0:.3}" y="{y0:.3}" font-size="8" fill="firebrick">{}</text>"#,
            row.label
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Converts a ray index to a float, for plotting only.
pub fn ray_index_f64(n: &RayIndex) -> f64 {
    let n: &BigUint = n.get();
    n.to_f64().unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{level_of_index, Level};
    use proptest::prelude::*;

    fn sv(v: i64) -> SpiralValue {
        SpiralValue::from(v)
    }

    fn idx(n: u64) -> RayIndex {
        SequenceIndex::new(n).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&BigInt::from(65)).unwrap(), sv(11));
        assert_eq!(encode(&BigInt::from(61)).unwrap(), sv(-10));
        assert_eq!(encode(&BigInt::from(1)).unwrap(), sv(0));
        for bad in [0, -5, 2, 3, 9, 15] {
            assert!(encode(&BigInt::from(bad)).is_err(), "{bad}");
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(sv(11).decode(), BigInt::from(65));
        assert_eq!(sv(-10).decode(), BigInt::from(61));
        assert_eq!(sv(0).decode(), BigInt::from(1));
    }

    #[test]
    fn canonical_index_examples() {
        assert_eq!(canonical_index(&sv(11)), idx(22));
        assert_eq!(canonical_index(&sv(-8)), idx(33));
        assert_eq!(canonical_index(&sv(0)), idx(1));
    }

    #[test]
    fn canonical_index_hits_first_occurrence() {
        use std::collections::HashMap;
        let mut first: HashMap<BigInt, u64> = HashMap::new();
        for n in 1..=4000u64 {
            first.entry(a329480(&idx(n))).or_insert(n);
        }
        for v in -500i64..=500 {
            let n = canonical_index(&sv(v));
            assert_eq!(a329480(&n), BigInt::from(v));
            assert_eq!(n.to_u64(), first.get(&BigInt::from(v)).copied(), "v = {v}");
        }
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&idx(1)), 0.0);
        assert!((theta(&idx(2)) - 4.15296).abs() < 5e-6);
        assert!((theta(&idx(11)) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn radius_examples() {
        assert_eq!(radius(0.0), 2.0);
        assert!((radius(4.15296) - 5.0).abs() < 1e-4);
        assert!((radius(PI) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn radius_inverts_theta() {
        for n in 1..=10_000u64 {
            let r = radius(theta(&idx(n)));
            let expected = (3 * n - 1) as f64;
            assert!(((r - expected) / expected).abs() < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn levels_fill_angular_bands() {
        for k in 1..=8 {
            let level = Level::new(k).unwrap();
            let first = SequenceIndex::from_big(level.first_index.clone()).unwrap();
            let last = SequenceIndex::from_big(level.last_index.clone()).unwrap();
            let lo = 2.0 * PI * (k as f64 - 1.0);
            assert!(theta(&first) >= lo - 1e-9);
            assert!(theta(&last) < 2.0 * PI * k as f64);
        }
        // the label 2 appears first on level 2 and one revolution later on level 3.
        assert_eq!(level_of_index(&canonical_index(&sv(2))).k, 2);
    }

    #[test]
    fn export_rows() {
        assert!(export_polar(0).is_err());
        let one = export_polar(1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].point.theta, 0.0);
        assert_eq!(one[0].point.r, 2.0);
        assert_eq!(one[0].label, sv(0));
        let two = export_polar(2).unwrap();
        assert!((two[1].point.r - 5.0).abs() < 1e-12);
        let csv = polar_csv(&two);
        assert!(csv.starts_with("n,theta,r,label\n1,0,2,0\n2,"));
    }

    #[test]
    fn svg_is_well_formed() {
        let rows = export_polar(42).unwrap();
        let svg = polar_svg(&rows, SVG_ANGLE_STEP);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<line").count(), 42);
        assert_eq!(svg.matches("<text").count(), 42);
    }

    proptest! {
        #[test]
        fn encode_decode_round_trip(v in any::<i64>()) {
            let v = SpiralValue::new(v);
            prop_assert_eq!(encode(&v.decode()).unwrap(), v);
        }

        #[test]
        fn decode_encode_round_trip(x in 0u64..u64::MAX / 8, plus in any::<bool>()) {
            let n = if plus { BigInt::from(x) * 6 + 1 } else { BigInt::from(x) * 6 + 5 };
            prop_assert_eq!(encode(&n).unwrap().decode(), n);
        }

        #[test]
        fn canonical_index_injective(a in -1_000_000i64..1_000_000, b in -1_000_000i64..1_000_000) {
            prop_assume!(a != b);
            prop_assert_ne!(canonical_index(&sv(a)), canonical_index(&sv(b)));
        }
    }
}
