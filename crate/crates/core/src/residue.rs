//! Residue classes modulo powers of two, with sign and threshold constraints.
//!
//! These are the exact domains of step maps and of composition chains. The
//! preimage of such a class under an integer-valued affine map with an odd
//! 3-power numerator is again such a class, which is what makes chain domains
//! computable without enumeration.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::affine::AffineMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignConstraint {
    Positive,
    NonPositive,
    Any,
}

impl SignConstraint {
    pub fn admits(self, x: &BigInt) -> bool {
        match self {
            SignConstraint::Positive => x.is_positive(),
            SignConstraint::NonPositive => !x.is_positive(),
            SignConstraint::Any => true,
        }
    }
}

/// `{ x : x = residue (mod 2^exp) }` restricted by `sign`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    exp: u32,
    residue: BigInt,
    sign: SignConstraint,
}

impl ResidueClass {
    pub fn new(residue: impl Into<BigInt>, exp: u32, sign: SignConstraint) -> Self {
        let modulus = BigInt::one() << exp;
        ResidueClass {
            exp,
            residue: residue.into().mod_floor(&modulus),
            sign,
        }
    }

    pub fn all_integers() -> Self {
        ResidueClass::new(0, 0, SignConstraint::Any)
    }

    pub fn modulus_exp(&self) -> u32 {
        self.exp
    }

    pub fn modulus(&self) -> BigInt {
        BigInt::one() << self.exp
    }

    pub fn residue(&self) -> &BigInt {
        &self.residue
    }

    pub fn sign(&self) -> SignConstraint {
        self.sign
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.sign.admits(x) && self.congruent(x)
    }

    /// Congruence only, ignoring the sign constraint.
    pub fn congruent(&self, x: &BigInt) -> bool {
        if self.exp == 0 {
            return true;
        }
        x.mod_floor(&self.modulus()) == self.residue
    }

    /// Smallest member `>= x`, ignoring sign.
    fn ceil_member(&self, x: &BigInt) -> BigInt {
        let m = self.modulus();
        let delta = (&self.residue - x).mod_floor(&m);
        x + delta
    }

    /// Largest member `<= x`, ignoring sign.
    fn floor_member(&self, x: &BigInt) -> BigInt {
        let m = self.modulus();
        let delta = (x - &self.residue).mod_floor(&m);
        x - delta
    }

    /// The first `count` members ordered by distance from zero (ties: the non-negative one first).
    pub fn elements(&self, count: usize) -> Vec<BigInt> {
        Domain::from_class(self.clone()).elements(count)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x = {} mod {}", self.residue, self.modulus())?;
        match self.sign {
            SignConstraint::Positive => f.write_str(", x > 0"),
            SignConstraint::NonPositive => f.write_str(", x <= 0"),
            SignConstraint::Any => Ok(()),
        }
    }
}

impl Serialize for ResidueClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("ResidueClass", 3)?;
        st.serialize_field("modulus", &self.modulus().to_string())?;
        st.serialize_field("residue", &self.residue.to_string())?;
        st.serialize_field("sign", &self.sign)?;
        st.end()
    }
}

/// A residue class further cut by optional inclusive thresholds.
///
/// Bounds are always snapped to members of the class, so a present `lower`
/// (resp. `upper`) is itself the least (resp. greatest) element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    class: ResidueClass,
    lower: Option<BigInt>,
    upper: Option<BigInt>,
}

impl Domain {
    pub fn from_class(class: ResidueClass) -> Domain {
        Domain {
            class,
            lower: None,
            upper: None,
        }
        .normalized()
        .expect("a sign-restricted residue class is never empty")
    }

    pub fn class(&self) -> &ResidueClass {
        &self.class
    }

    /// Threshold beyond the sign constraint, if any.
    pub fn lower(&self) -> Option<&BigInt> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&BigInt> {
        self.upper.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.effective_lower().is_some() && self.effective_upper().is_some()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.class.contains(x)
            && self.lower.as_ref().is_none_or(|l| x >= l)
            && self.upper.as_ref().is_none_or(|u| x <= u)
    }

    // Folds the sign constraint into the bounds, snaps them, and drops the
    // ones the sign already implies. Returns None when empty.
    fn normalized(self) -> Option<Domain> {
        let Domain {
            class,
            mut lower,
            mut upper,
        } = self;
        let sign_lower = match class.sign {
            SignConstraint::Positive => Some(BigInt::one()),
            _ => None,
        };
        let sign_upper = match class.sign {
            SignConstraint::NonPositive => Some(BigInt::zero()),
            _ => None,
        };
        let eff_lower = max_opt(lower.take(), sign_lower.clone()).map(|l| class.ceil_member(&l));
        let eff_upper = min_opt(upper.take(), sign_upper.clone()).map(|u| class.floor_member(&u));
        if let (Some(l), Some(u)) = (&eff_lower, &eff_upper) {
            if l > u {
                return None;
            }
        }
        // keep a bound only if it is stricter than the one implied by the sign
        lower = eff_lower.filter(|l| sign_lower.as_ref().is_none_or(|s| *l > class.ceil_member(s)));
        upper = eff_upper.filter(|u| sign_upper.as_ref().is_none_or(|s| *u < class.floor_member(s)));
        Some(Domain {
            class,
            lower,
            upper,
        })
    }

    fn effective_lower(&self) -> Option<BigInt> {
        self.lower.clone().or_else(|| match self.class.sign {
            SignConstraint::Positive => Some(self.class.ceil_member(&BigInt::one())),
            _ => None,
        })
    }

    fn effective_upper(&self) -> Option<BigInt> {
        self.upper.clone().or_else(|| match self.class.sign {
            SignConstraint::NonPositive => Some(self.class.floor_member(&BigInt::zero())),
            _ => None,
        })
    }

    /// Least element, when bounded below.
    pub fn min_element(&self) -> Option<BigInt> {
        self.effective_lower()
    }

    /// Greatest element, when bounded above.
    pub fn max_element(&self) -> Option<BigInt> {
        self.effective_upper()
    }

    /// Up to `count` members ordered by distance from zero.
    pub fn elements(&self, count: usize) -> Vec<BigInt> {
        let m = self.class.modulus();
        let lo = self.effective_lower();
        let hi = self.effective_upper();
        let zero = BigInt::zero();

        // non-negative members ascending, negative members descending
        let start_up = self.class.ceil_member(&max_opt(lo.clone(), Some(zero.clone())).unwrap());
        let start_down = self.class.floor_member(&min_opt(hi.clone(), Some(BigInt::from(-1))).unwrap());
        let mut up = Some(start_up).filter(|x| hi.as_ref().is_none_or(|h| x <= h));
        let mut down = Some(start_down).filter(|x| lo.as_ref().is_none_or(|l| x >= l));

        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let take_up = match (&up, &down) {
                (Some(u), Some(d)) => u.magnitude() <= d.magnitude(),
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if take_up {
                let u = up.take().unwrap();
                let next = &u + &m;
                up = Some(next).filter(|x| hi.as_ref().is_none_or(|h| x <= h));
                out.push(u);
            } else {
                let d = down.take().unwrap();
                let next = &d - &m;
                down = Some(next).filter(|x| lo.as_ref().is_none_or(|l| x >= l));
                out.push(d);
            }
        }
        out
    }

    /// Restricts the domain to the `x` for which `map(x)` lands in `target`.
    ///
    /// `map` must be integer-valued on every member of `self`. Returns `None`
    /// when no member qualifies.
    pub fn pull_back(&self, map: &AffineMap, target: &ResidueClass) -> Option<Domain> {
        let class = self.pull_back_congruence(map, target)?;
        let mut lower = self.lower.clone();
        let mut upper = self.upper.clone();

        // sign of map(x) = sign of (a x + n) with a = sign * 3^m, n = numerator of constant
        let a = map.coefficient_numerator();
        let n = map.constant_numerator();
        let three_m = a.magnitude().clone().into();
        match target.sign() {
            SignConstraint::Any => {}
            SignConstraint::Positive => {
                if a.is_positive() {
                    // x > -n / 3^m
                    let b = (-&n).div_floor(&three_m) + 1;
                    lower = max_opt(lower, Some(b));
                } else {
                    // x < n / 3^m
                    let b = Integer::div_ceil(&n, &three_m) - 1;
                    upper = min_opt(upper, Some(b));
                }
            }
            SignConstraint::NonPositive => {
                if a.is_positive() {
                    let b = (-&n).div_floor(&three_m);
                    upper = min_opt(upper, Some(b));
                } else {
                    let b = Integer::div_ceil(&n, &three_m);
                    lower = max_opt(lower, Some(b));
                }
            }
        }
        Domain {
            class,
            lower,
            upper,
        }
        .normalized()
    }

    fn pull_back_congruence(&self, map: &AffineMap, target: &ResidueClass) -> Option<ResidueClass> {
        // x = rho + 2^E t ; map(x) = B + A t with A = sign 3^m 2^(E - e)
        let big_e = self.class.exp;
        let e = map.pow2();
        let rho = self.class.residue.clone();
        let b = map
            .eval_integer(&rho)
            .expect("map must be integral on the domain");
        let a = if big_e >= e {
            map.coefficient_numerator() << (big_e - e)
        } else {
            // map is integral on the whole class only if the class is fine enough
            panic!("domain modulus 2^{big_e} coarser than map denominator 2^{e}");
        };
        let k = target.modulus_exp();
        if k == 0 {
            return Some(ResidueClass::new(rho, big_e, self.class.sign));
        }
        let need = (target.residue() - &b).mod_floor(&(BigInt::one() << k));
        // A t = need (mod 2^k)
        let v = a.trailing_zeros().unwrap_or(0) as u32;
        if v >= k {
            return need.is_zero().then(|| ResidueClass::new(rho, big_e, self.class.sign));
        }
        if !need.is_zero() && (need.trailing_zeros().unwrap_or(0) as u32) < v {
            return None;
        }
        let reduced_exp = k - v;
        let odd_a = &a >> v;
        let t = ((&need >> v) * inverse_mod_pow2(&odd_a, reduced_exp))
            .mod_floor(&(BigInt::one() << reduced_exp));
        let residue = rho + (t << big_e);
        Some(ResidueClass::new(residue, big_e + reduced_exp, self.class.sign))
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.class)?;
        if let Some(l) = &self.lower {
            write!(f, ", x >= {l}")?;
        }
        if let Some(u) = &self.upper {
            write!(f, ", x <= {u}")?;
        }
        Ok(())
    }
}

impl Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Domain", 3)?;
        st.serialize_field("class", &self.class)?;
        st.serialize_field("lower", &self.lower.as_ref().map(|v| v.to_string()))?;
        st.serialize_field("upper", &self.upper.as_ref().map(|v| v.to_string()))?;
        st.end()
    }
}

fn max_opt(a: Option<BigInt>, b: Option<BigInt>) -> Option<BigInt> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    }
}

fn min_opt(a: Option<BigInt>, b: Option<BigInt>) -> Option<BigInt> {
    match (a, b) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// Inverse of an odd `a` modulo `2^k` by Newton iteration.
pub fn inverse_mod_pow2(a: &BigInt, k: u32) -> BigInt {
    assert!(a.is_odd(), "{a} has no inverse modulo a power of two");
    if k == 0 {
        return BigInt::zero();
    }
    let modulus = BigInt::one() << k;
    let a = a.mod_floor(&modulus);
    // a * a = 1 (mod 8) for odd a; each step doubles the number of correct bits
    let mut inv = a.clone();
    let mut bits = 3u32;
    while bits < k {
        inv = (&inv * (BigInt::from(2) - &a * &inv)).mod_floor(&modulus);
        bits *= 2;
    }
    inv.mod_floor(&modulus)
}
