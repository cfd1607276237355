//! Scalar abstractions.
//!
//! [`Real`] is the floating-point bound used by the geometric code. [`Field`]
//! is the ordered-field bound used by the linear-programming layer, which also
//! runs over exact rationals.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Signed, ToPrimitive, Zero};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + serde::Serialize
    + serde::de::DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    /// A tolerance of `v`, floored at a small multiple of machine epsilon.
    fn tol(v: f64) -> Self {
        let floor = Self::epsilon().to_f64().unwrap_or(0.0) * 64.0;
        Self::lit(v.max(floor))
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field used by the simplex solver.
///
/// Floating implementations compare with a small absolute tolerance; the
/// rational implementation is exact.
pub trait Field:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Absolute tolerance for pivoting and sign tests; zero when exact.
    fn eps() -> Self;
    fn is_exact() -> bool;
    fn from_f64(v: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;

    fn is_pos(&self) -> bool {
        *self > Self::eps()
    }
    fn is_neg(&self) -> bool {
        *self < -Self::eps()
    }
    fn is_negligible(&self) -> bool {
        !self.is_pos() && !self.is_neg()
    }
}

macro_rules! float_field {
    ($t:ty, $eps:expr) => {
        impl Field for $t {
            fn eps() -> Self {
                $eps
            }
            fn is_exact() -> bool {
                false
            }
            fn from_f64(v: f64) -> Option<Self> {
                v.is_finite().then_some(v as $t)
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn abs_val(&self) -> Self {
                self.abs()
            }
        }
    };
}

float_field!(f64, 1e-12);
float_field!(f32, 1e-5);

impl Field for BigRational {
    fn eps() -> Self {
        BigRational::zero()
    }
    fn is_exact() -> bool {
        true
    }
    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let n = self.numer().to_f64().unwrap_or(f64::NAN);
            let d = self.denom().to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
}

/// Exact rational from an integer.
pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}
