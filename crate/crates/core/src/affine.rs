//! Affine maps `x -> sign * 3^m / 2^e * x + c` with a dyadic constant `c`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::dyadic::DyadicRational;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineMap {
    sign: i8,
    pow3: u32,
    pow2: u32,
    konst: DyadicRational,
}

impl AffineMap {
    /// `sign * 3^pow3 / 2^pow2 * x + konst`. Panics if `konst` needs a denominator larger than `2^pow2`.
    pub fn new(sign: i8, pow3: u32, pow2: u32, konst: DyadicRational) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be +-1");
        assert!(konst.denominator_exp() <= pow2, "constant {konst} finer than 2^{pow2}");
        AffineMap {
            sign,
            pow3,
            pow2,
            konst,
        }
    }

    pub fn identity() -> Self {
        AffineMap::new(1, 0, 0, DyadicRational::zero())
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn pow3(&self) -> u32 {
        self.pow3
    }

    pub fn pow2(&self) -> u32 {
        self.pow2
    }

    pub fn constant(&self) -> &DyadicRational {
        &self.konst
    }

    /// `sign * 3^pow3`, the coefficient's numerator over `2^pow2`.
    pub fn coefficient_numerator(&self) -> BigInt {
        let p = BigInt::from(3u32).pow(self.pow3);
        if self.sign < 0 {
            -p
        } else {
            p
        }
    }

    /// The constant's numerator over `2^pow2`.
    pub fn constant_numerator(&self) -> BigInt {
        self.konst.numerator_over(self.pow2)
    }

    pub fn coefficient(&self) -> BigRational {
        BigRational::new(self.coefficient_numerator(), BigInt::one() << self.pow2)
    }

    /// `outer . inner`: apply `inner` first.
    pub fn compose(outer: &AffineMap, inner: &AffineMap) -> AffineMap {
        AffineMap {
            sign: outer.sign * inner.sign,
            pow3: outer.pow3 + inner.pow3,
            pow2: outer.pow2 + inner.pow2,
            konst: outer.eval_dyadic(&inner.konst),
        }
    }

    /// `self . inner`.
    pub fn after(&self, inner: &AffineMap) -> AffineMap {
        AffineMap::compose(self, inner)
    }

    pub fn eval_dyadic(&self, x: &DyadicRational) -> DyadicRational {
        let scaled = (x * &self.coefficient_numerator()).halve(self.pow2);
        &scaled + &self.konst
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coefficient() * x + self.konst.to_rational()
    }

    /// `(sign 3^m x + N) / 2^e` when it is an integer.
    pub fn eval_integer(&self, x: &BigInt) -> Option<BigInt> {
        let numerator = self.coefficient_numerator() * x + self.constant_numerator();
        let divisor = BigInt::one() << self.pow2;
        let (q, r) = numerator.div_mod_floor(&divisor);
        r.is_zero().then_some(q)
    }

    pub fn category(&self) -> Category {
        Category::of(self)
    }

    /// Coefficient in `(0, 1)` or `(-1/2, 0)`.
    pub fn is_sink(&self) -> bool {
        let three_m = BigInt::from(3u32).pow(self.pow3);
        let two_e = BigInt::one() << self.pow2;
        if self.sign > 0 {
            three_m < two_e
        } else {
            three_m * 2 < two_e
        }
    }

    /// Solves `x = a x + c` exactly.
    pub fn fixed_point(&self) -> FixedPoint {
        let one_minus_a = BigRational::one() - self.coefficient();
        if one_minus_a.is_zero() {
            return if self.konst.is_zero() {
                FixedPoint::Identity
            } else {
                FixedPoint::None
            };
        }
        FixedPoint::Point(self.konst.to_rational() / one_minus_a)
    }
}

impl fmt::Display for AffineMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let den = BigInt::one() << self.pow2;
        let num = BigInt::from(3u32).pow(self.pow3);
        let sign = if self.sign < 0 { "-" } else { "" };
        if self.pow2 == 0 {
            write!(f, "{sign}{num}x")?;
        } else {
            write!(f, "{sign}{num}/{den}x")?;
        }
        match self.konst.signum() {
            0 => Ok(()),
            1 => write!(f, " + {}", self.konst),
            _ => write!(f, " - {}", -&self.konst),
        }
    }
}

impl Serialize for AffineMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("AffineMap", 5)?;
        st.serialize_field("coefficient", &self.coefficient().to_string())?;
        st.serialize_field("constant", &self.konst.to_string())?;
        st.serialize_field("pow3", &self.pow3)?;
        st.serialize_field("pow2", &self.pow2)?;
        st.serialize_field("expression", &self.to_string())?;
        st.end()
    }
}

/// Sign class of a composite. A zero constant counts as positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Category {
    /// positive coefficient, positive constant
    Cat1,
    /// positive coefficient, negative constant
    Cat2,
    /// negative coefficient, positive constant
    Cat3,
    /// negative coefficient, negative constant
    Cat4,
}

impl Category {
    pub fn of(map: &AffineMap) -> Category {
        let negative_constant = map.konst.signum() < 0;
        match (map.sign > 0, negative_constant) {
            (true, false) => Category::Cat1,
            (true, true) => Category::Cat2,
            (false, false) => Category::Cat3,
            (false, true) => Category::Cat4,
        }
    }

    pub const ALL: [Category; 4] = [
        Category::Cat1,
        Category::Cat2,
        Category::Cat3,
        Category::Cat4,
    ];
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Category::Cat1 => 1,
            Category::Cat2 => 2,
            Category::Cat3 => 3,
            Category::Cat4 => 4,
        };
        write!(f, "Cat{n}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPoint {
    Point(BigRational),
    /// Coefficient 1 with a nonzero constant.
    None,
    /// The identity map.
    Identity,
}

impl FixedPoint {
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            FixedPoint::Point(q) if q.is_integer() => Some(q.to_integer()),
            _ => None,
        }
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixedPoint::Point(q) => write!(f, "{q}"),
            FixedPoint::None => f.write_str("none"),
            FixedPoint::Identity => f.write_str("identity"),
        }
    }
}
