use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact rational `num / 2^exp`, kept reduced: `num` is odd whenever `exp > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    num: BigInt,
    exp: u32,
}

impl DyadicRational {
    pub fn new(num: impl Into<BigInt>, exp: u32) -> Self {
        let mut num = num.into();
        let mut exp = exp;
        if num.is_zero() {
            return DyadicRational { num, exp: 0 };
        }
        let tz = num.trailing_zeros().unwrap_or(0).min(exp as u64) as u32;
        if tz > 0 {
            num >>= tz;
            exp -= tz;
        }
        DyadicRational { num, exp }
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        DyadicRational {
            num: n.into(),
            exp: 0,
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    /// Exponent of the reduced denominator.
    pub fn denominator_exp(&self) -> u32 {
        self.exp
    }

    /// Numerator over the (possibly unreduced) denominator `2^exp`; requires `exp >= denominator_exp()`.
    pub fn numerator_over(&self, exp: u32) -> BigInt {
        assert!(exp >= self.exp, "denominator 2^{exp} too small for {self}");
        &self.num << (exp - self.exp)
    }

    pub fn is_integer(&self) -> bool {
        self.exp == 0
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.num.clone())
    }

    pub fn signum(&self) -> i8 {
        if self.num.is_positive() {
            1
        } else if self.num.is_negative() {
            -1
        } else {
            0
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Divides by `2^k`.
    pub fn halve(&self, k: u32) -> Self {
        Self::new(self.num.clone(), self.exp + k)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), BigInt::one() << self.exp)
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for DyadicRational {
    fn from(v: i64) -> Self {
        Self::integer(v)
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;

    fn add(self, rhs: &DyadicRational) -> DyadicRational {
        let exp = self.exp.max(rhs.exp);
        DyadicRational::new(self.numerator_over(exp) + rhs.numerator_over(exp), exp)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;

    fn sub(self, rhs: &DyadicRational) -> DyadicRational {
        self + &(-rhs)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;

    fn mul(self, rhs: &DyadicRational) -> DyadicRational {
        DyadicRational::new(&self.num * &rhs.num, self.exp + rhs.exp)
    }
}

impl Mul<&BigInt> for &DyadicRational {
    type Output = DyadicRational;

    fn mul(self, rhs: &BigInt) -> DyadicRational {
        DyadicRational::new(&self.num * rhs, self.exp)
    }
}

impl Neg for &DyadicRational {
    type Output = DyadicRational;

    fn neg(self) -> DyadicRational {
        DyadicRational {
            num: -&self.num,
            exp: self.exp,
        }
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.numerator_over(exp).cmp(&other.numerator_over(exp))
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, BigInt::one() << self.exp)
        }
    }
}
