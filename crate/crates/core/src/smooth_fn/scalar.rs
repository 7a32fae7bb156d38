//! Number types an expression can be evaluated over.
//!
//! `f64` is the working type. `BigRational` gives exact arithmetic for
//! polynomial and rational-function expressions; it has no transcendental
//! functions, so any `exp`/`log`/`sin`/... node fails to evaluate over it.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::Func;

/// A field that expression trees and truncated Taylor series can be
/// evaluated over.
pub trait Scalar:
    Clone
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Exact conversion of a literal. `None` if the literal has no
    /// representation (non-finite values).
    fn from_f64(c: f64) -> Option<Self>;

    fn from_i64(n: i64) -> Self;

    /// Elementary function at a point. `None` when the type cannot
    /// represent the result.
    fn apply(func: Func, x: &Self) -> Option<Self>;
}

impl Scalar for f64 {
    fn from_f64(c: f64) -> Option<Self> {
        c.is_finite().then_some(c)
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn apply(func: Func, x: &Self) -> Option<Self> {
        Some(match func {
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Sinh => x.sinh(),
            Func::Cosh => x.cosh(),
        })
    }
}

impl Scalar for BigRational {
    fn from_f64(c: f64) -> Option<Self> {
        BigRational::from_float(c)
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn apply(_func: Func, _x: &Self) -> Option<Self> {
        None
    }
}

/// Shorthand for an exact rational `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
