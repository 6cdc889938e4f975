//! Scalar abstractions shared by the symbolic and numeric halves of the crate.
//!
//! [`Field`] is what the exact code paths need: a field with conversions to and
//! from `f64`. It is implemented for the machine floats and for the rational
//! types from `num-rational`. [`Real`] is the floating-point subset used by the
//! group backends, where transcendental functions are required.

use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// A field of coefficients.
pub trait Field:
    Clone
    + PartialEq
    + PartialOrd
    + Debug
    + Display
    + FromStr
    + Num
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// `num / den`. Panics if `den == 0`.
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact conversion of a big integer ratio, `None` if it does not fit.
    fn from_big_ratio(num: &BigInt, den: &BigInt) -> Option<Self>;

    fn from_real(x: f64) -> Option<Self>;

    fn to_real(&self) -> f64;

    fn magnitude(&self) -> Self;

    /// Whether arithmetic in this field is exact.
    fn is_exact() -> bool;
}

macro_rules! float_field {
    ($t:ty) => {
        impl Field for $t {
            fn from_ratio(num: i64, den: i64) -> Self {
                assert!(den != 0, "zero denominator");
                num as $t / den as $t
            }

            fn from_big_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
                Some((num.to_f64()? / den.to_f64()?) as $t)
            }

            fn from_real(x: f64) -> Option<Self> {
                x.is_finite().then_some(x as $t)
            }

            fn to_real(&self) -> f64 {
                *self as f64
            }

            fn magnitude(&self) -> Self {
                Float::abs(*self)
            }

            fn is_exact() -> bool {
                false
            }
        }
    };
}

float_field!(f32);
float_field!(f64);

impl Field for BigRational {
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(num.into(), den.into())
    }

    fn from_big_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        (!den.is_zero()).then(|| BigRational::new(num.clone(), den.clone()))
    }

    fn from_real(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_real(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }

    fn is_exact() -> bool {
        true
    }
}

impl Field for Ratio<i64> {
    fn from_ratio(num: i64, den: i64) -> Self {
        Ratio::new(num, den)
    }

    fn from_big_ratio(num: &BigInt, den: &BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Ratio::new(num.to_i64()?, den.to_i64()?))
    }

    fn from_real(x: f64) -> Option<Self> {
        let big = BigRational::from_float(x)?;
        Some(Ratio::new(big.numer().to_i64()?, big.denom().to_i64()?))
    }

    fn to_real(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }

    fn magnitude(&self) -> Self {
        Signed::abs(self)
    }

    fn is_exact() -> bool {
        true
    }
}

/// Floating-point scalar for the numeric group backends.
pub trait Real: Float + FromPrimitive + Field + Copy {
    fn c(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("representable constant")
    }
}

impl Real for f32 {}
impl Real for f64 {}
