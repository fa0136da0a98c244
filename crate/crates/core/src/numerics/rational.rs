//! Arbitrary-precision rationals in canonical form.
//!
//! Corner-evolution denominators grow without bound, so fixed-width
//! arithmetic is not an option: a silent overflow would corrupt an
//! identity check. Everything here is exact; there is no rounding
//! anywhere.

use alloc::string::String;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// An exact rational with positive denominator and `gcd(p, q) = 1`.
///
/// Backed by [`num_rational::BigRational`], which maintains the canonical
/// form after every operation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// Canonical form of `numer / denom`; errors when `denom` is zero.
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self, Error> {
        let numer = numer.into();
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_int(v: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Exact division; `Pole` when `rhs` is zero.
    pub fn try_div(&self, rhs: &Rational, what: &'static str) -> Result<Self, Error> {
        if rhs.is_zero() {
            return Err(Error::Pole { what });
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    pub fn recip(&self, what: &'static str) -> Result<Self, Error> {
        Rational::one().try_div(self, what)
    }

    /// Small non-negative integer power by repeated multiplication.
    pub fn powi(&self, exp: u32) -> Self {
        let mut out = Rational::one();
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }

    /// Exact square root when both numerator and denominator are perfect
    /// squares; `None` otherwise (including all negative inputs).
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let np = self.0.numer().sqrt();
        let dp = self.0.denom().sqrt();
        if &(&np * &np) == self.0.numer() && &(&dp * &dp) == self.0.denom() {
            Some(Rational(BigRational::new(np, dp)))
        } else {
            None
        }
    }

    /// Nearest `f64`; only used when a window is explicitly cast to the
    /// float kind.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Exact rational value of a finite float (every finite `f64` is a
    /// dyadic rational).
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Rational)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Reports always render rationals as `p/q`, including `p/1`, so the
/// records stay uniform for machine consumers.
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Accepts `p`, `p/q`, and plain decimals like `-0.25` (converted
/// exactly in base 10).
impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let numer = BigInt::from_str(p.trim()).map_err(|_| Error::InvalidParameters {
                what: "unparsable rational numerator",
            })?;
            let denom = BigInt::from_str(q.trim()).map_err(|_| Error::InvalidParameters {
                what: "unparsable rational denominator",
            })?;
            return Rational::new(numer, denom);
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let digits: String = [int_part, frac_part].concat();
            let numer = BigInt::from_str(&digits).map_err(|_| Error::InvalidParameters {
                what: "unparsable decimal",
            })?;
            let mut denom = BigInt::one();
            for _ in 0..frac_part.len() {
                denom *= 10;
            }
            return Rational::new(numer, denom);
        }
        let numer = BigInt::from_str(s).map_err(|_| Error::InvalidParameters {
            what: "unparsable integer",
        })?;
        Ok(Rational(BigRational::from_integer(numer)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn normalizes_gcd() {
        assert_eq!(rat(2, 4), rat(1, 2));
        assert_eq!(rat(2, 4).numer(), &BigInt::from(1));
        assert_eq!(rat(2, 4).denom(), &BigInt::from(2));
    }

    #[test]
    fn normalizes_sign() {
        assert_eq!(rat(3, -6), rat(-1, 2));
        assert!(rat(3, -6).is_negative());
        assert_eq!(rat(3, -6).denom(), &BigInt::from(2));
    }

    #[test]
    fn zero_canonical_form() {
        let z = rat(0, 5);
        assert!(z.is_zero());
        assert_eq!(z.denom(), &BigInt::from(1));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(Rational::new(1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn division_by_zero_is_a_pole() {
        let err = rat(1, 2).try_div(&Rational::zero(), "d").unwrap_err();
        assert_eq!(err, Error::Pole { what: "d" });
    }

    #[test]
    fn display_and_parse_round_trip() {
        use alloc::string::ToString;
        let v = rat(-7, 3);
        assert_eq!(v.to_string(), "-7/3");
        assert_eq!("-7/3".parse::<Rational>().unwrap(), v);
        assert_eq!("5".parse::<Rational>().unwrap(), rat(5, 1));
        assert_eq!("-0.25".parse::<Rational>().unwrap(), rat(-1, 4));
        assert_eq!("0.5".parse::<Rational>().unwrap(), rat(1, 2));
    }

    #[test]
    fn exact_sqrt() {
        assert_eq!(rat(1, 4).sqrt_exact(), Some(rat(1, 2)));
        assert_eq!(rat(9, 16).sqrt_exact(), Some(rat(3, 4)));
        assert_eq!(rat(2, 1).sqrt_exact(), None);
        assert_eq!(rat(-1, 4).sqrt_exact(), None);
    }

    fn arb_rat() -> impl Strategy<Value = Rational> {
        (-200i64..=200, 1i64..=60).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn field_axioms(a in arb_rat(), b in arb_rat(), c in arb_rat()) {
            // associativity
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            // commutativity
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            // distributivity
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            // additive inverse
            prop_assert!((&a + &(-&a)).is_zero());
            // multiplicative inverse
            if !a.is_zero() {
                prop_assert_eq!(&a * &a.recip("a").unwrap(), Rational::one());
            }
        }

        #[test]
        fn exactness_of_div(a in arb_rat(), b in arb_rat()) {
            if !b.is_zero() {
                let q = a.try_div(&b, "b").unwrap();
                prop_assert_eq!(&q * &b, a);
            }
        }
    }
}
