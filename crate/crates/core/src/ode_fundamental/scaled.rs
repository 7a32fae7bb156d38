//! Mantissa/exponent numbers that cannot overflow in practice.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::Serialize;

/// `mantissa * 2^exponent` with `1 <= |mantissa| < 2` (or the value zero).
#[derive(Clone, Copy, PartialEq, Serialize)]
pub struct ScaledReal {
    mantissa: f64,
    exponent: i32,
}

/// Splits a finite float into `(m, e)` with `1 <= |m| < 2`, `x = m * 2^e`.
pub fn frexp(x: f64) -> (f64, i32) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let (x, bias) = if x.abs() < f64::MIN_POSITIVE {
        (x * 2f64.powi(64), -64)
    } else {
        (x, 0)
    };
    let bits = x.to_bits();
    let e = ((bits >> 52) & 0x7ff) as i32 - 1023;
    let m = f64::from_bits((bits & !(0x7ff << 52)) | (1023 << 52));
    (m, e + bias)
}

/// `m * 2^e` without intermediate overflow; saturates to infinity / zero.
pub fn ldexp(m: f64, e: i32) -> f64 {
    let mut v = m;
    let mut e = e;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * 2f64.powi(e)
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn new(value: f64) -> Self {
        Self::from_parts(value, 0)
    }

    /// Normalizes `value * 2^exponent`.
    pub fn from_parts(value: f64, exponent: i32) -> Self {
        let (m, e) = frexp(value);
        if m == 0.0 {
            return Self::ZERO;
        }
        ScaledReal {
            mantissa: m,
            exponent: exponent.saturating_add(e),
        }
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn signum(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.mantissa.signum()
        }
    }

    /// The native value, or `None` when it exceeds the `f64` range.
    pub fn to_f64(&self) -> Option<f64> {
        let v = ldexp(self.mantissa, self.exponent);
        v.is_finite().then_some(v)
    }

    /// `ln |self|`; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        self.mantissa.abs().ln() + f64::from(self.exponent) * std::f64::consts::LN_2
    }

    pub fn abs(&self) -> Self {
        ScaledReal {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Magnitude comparison.
    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.exponent.cmp(&other.exponent).then(
                self.mantissa
                    .abs()
                    .partial_cmp(&other.mantissa.abs())
                    .unwrap_or(Ordering::Equal),
            ),
        }
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;
    fn mul(self, rhs: ScaledReal) -> ScaledReal {
        ScaledReal::from_parts(
            self.mantissa * rhs.mantissa,
            self.exponent.saturating_add(rhs.exponent),
        )
    }
}

impl Add for ScaledReal {
    type Output = ScaledReal;
    fn add(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let e = self.exponent.max(rhs.exponent);
        let a = ldexp(self.mantissa, self.exponent - e);
        let b = ldexp(rhs.mantissa, rhs.exponent - e);
        ScaledReal::from_parts(a + b, e)
    }
}

impl Sub for ScaledReal {
    type Output = ScaledReal;
    fn sub(self, rhs: ScaledReal) -> ScaledReal {
        self + (-rhs)
    }
}

/// Division by zero yields a non-finite mantissa.
impl Div for ScaledReal {
    type Output = ScaledReal;
    fn div(self, rhs: ScaledReal) -> ScaledReal {
        if self.is_zero() {
            return ScaledReal::ZERO;
        }
        ScaledReal::from_parts(
            self.mantissa / rhs.mantissa,
            self.exponent.saturating_sub(rhs.exponent),
        )
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;
    fn neg(self) -> ScaledReal {
        ScaledReal {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl fmt::Debug for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}
