//! Scalar abstractions shared by the numeric modules.
//!
//! Training code (embeddings, the surrogate classifier, topic-word
//! distributions) is written against [`Real`], so the same routines run in
//! `f32` for speed and `f64` for gradient checks. Metric code only needs
//! field arithmetic and ordering, so it is written against [`Scalar`], which
//! `num_rational::Ratio<i64>` also satisfies; fixtures can then be checked
//! with exact rationals.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Floating point type used for training: `f32` or `f64`.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Real")
    }

    /// Lossless-enough conversion to `f64` for reporting.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Ordered field element used by the metrics. Floats and exact rationals both qualify.
pub trait Scalar: Num + Clone + PartialOrd + FromPrimitive + Debug {
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count is representable")
    }

    /// `num / den`, or zero when the denominator is zero.
    fn ratio(num: usize, den: usize) -> Self {
        if den == 0 {
            Self::zero()
        } else {
            Self::from_count(num) / Self::from_count(den)
        }
    }

    /// Harmonic mean of two values, zero when both are zero.
    fn harmonic(a: &Self, b: &Self) -> Self {
        let sum = a.clone() + b.clone();
        if sum == Self::zero() {
            Self::zero()
        } else {
            (Self::one() + Self::one()) * a.clone() * b.clone() / sum
        }
    }
}

impl<T: Num + Clone + PartialOrd + FromPrimitive + Debug> Scalar for T {}

/// Exact rational type used to check metric fixtures.
pub type Rational = num_rational::Ratio<i64>;

/// Numerically stable logistic function.
pub fn sigmoid<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}
