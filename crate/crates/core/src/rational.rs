//! Exact rational numbers backing every unit exponent and matrix entry.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::DivisionByZero;

/// Arbitrary-precision rational kept in lowest terms with a positive
/// denominator. Zero is `0/1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    /// `numer / denom`, reduced. Fails when `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Result<Self, DivisionByZero> {
        if denom == 0 {
            return Err(DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer.into(), denom.into())))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self, DivisionByZero> {
        if denom.is_zero() {
            return Err(DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn integer(n: i64) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    /// Multiplicative inverse; the sign stays on the numerator.
    pub fn inv(&self) -> Result<Self, DivisionByZero> {
        if self.is_zero() {
            return Err(DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, DivisionByZero> {
        Ok(self * &rhs.inv()?)
    }

    /// Nearest `f64`, for human-facing ratios only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }

        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn add_reduces() {
        assert_eq!(&r(1, 2) + &r(1, 3), r(5, 6));
    }

    #[test]
    fn mul_of_unreduced_inputs() {
        let product = &r(4, 6) * &r(3, 2);
        assert_eq!(product, Rational::one());
        assert_eq!(product.to_string(), "1");
        assert_eq!(r(4, 6).to_string(), "2/3");
    }

    #[test]
    fn inverse_keeps_sign_on_numerator() {
        let inv = r(-2, 3).inv().unwrap();
        assert_eq!(inv.to_string(), "-3/2");
        assert_eq!(inv.denom(), &BigInt::from(2));
    }

    #[test]
    fn inverse_of_zero_fails() {
        assert_eq!(Rational::zero().inv(), Err(DivisionByZero));
        assert_eq!(Rational::new(1, 0), Err(DivisionByZero));
    }

    #[test]
    fn negative_denominator_is_normalized() {
        let x = r(3, -6);
        assert_eq!(x.to_string(), "-1/2");
        assert_eq!(x.denom(), &BigInt::from(2));
        assert_eq!(r(0, -5).to_string(), "0");
    }

    proptest! {
        #[test]
        fn times_reciprocal_is_one(p in -1000i64..1000, q in -1000i64..1000) {
            prop_assume!(p != 0 && q != 0);
            let x = r(p, q);
            let y = r(q, p);
            let product = &x * &y;
            prop_assert!(product.is_one());
            prop_assert_eq!(product.denom(), &BigInt::from(1));
        }

        #[test]
        fn canonical_form(p in -1000i64..1000, q in 1i64..1000, k in 1i64..50) {
            prop_assert_eq!(r(p, q), r(p * k, q * k));
            prop_assert!(r(p, q).denom() > &BigInt::from(0));
        }
    }
}
