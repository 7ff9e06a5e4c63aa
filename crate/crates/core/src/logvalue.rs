//! Nonnegative reals stored as base-2 logarithms.
//!
//! Capacities of the sets `D(n, κ)` and the Φ indices grow like `2^{n(p'-1)}`
//! and overflow `f64` long before the interesting range of `n`. Every
//! magnitude in the crate is therefore a [`LogValue`].

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

const LN_2: f64 = std::f64::consts::LN_2;

/// `log2(1 + 2^y)` without overflow or cancellation.
pub fn log2_1p_exp2(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp2().ln_1p() / LN_2
    } else {
        y.exp2().ln_1p() / LN_2
    }
}

/// `log2(1 - 2^y)` for `y < 0`.
pub fn log2_1m_exp2(y: f64) -> f64 {
    debug_assert!(y <= 0.0);
    (-(y * LN_2).exp_m1()).ln() / LN_2
}

/// `log2(2^y - 1)` for `y > 0`.
pub fn log2_exp2_m1(y: f64) -> f64 {
    y + log2_1m_exp2(-y)
}

/// A nonnegative real `2^log2`, with an explicit zero.
#[derive(Clone, Copy, Serialize, Deserialize)]
pub struct LogValue {
    #[serde(rename = "value_log2")]
    log2: f64,
    is_zero: bool,
}

/// The binary operations of [`log_combine`].
#[derive(Clone, Copy, Debug)]
pub enum Combine {
    Add(LogValue),
    Mul(LogValue),
    PowScale(f64),
}

pub fn log_combine(u: LogValue, op: Combine) -> LogValue {
    match op {
        Combine::Add(v) => u.add(v),
        Combine::Mul(v) => u.mul(v),
        Combine::PowScale(k) => u.powf(k),
    }
}

#[allow(clippy::should_implement_trait)]
impl LogValue {
    pub const ZERO: LogValue = LogValue { log2: 0.0, is_zero: true };
    pub const ONE: LogValue = LogValue { log2: 0.0, is_zero: false };

    /// `2^log2`. A log of `-inf` is the zero value; NaN is rejected.
    pub fn from_log2(log2: f64) -> LogValue {
        assert!(!log2.is_nan(), "NaN logarithm");
        if log2 == f64::NEG_INFINITY {
            LogValue::ZERO
        } else {
            LogValue { log2, is_zero: false }
        }
    }

    pub fn from_f64(x: f64) -> LogValue {
        assert!(x >= 0.0, "LogValue::from_f64 of negative {x}");
        if x == 0.0 {
            LogValue::ZERO
        } else {
            LogValue { log2: x.log2(), is_zero: false }
        }
    }

    pub fn pow2(k: f64) -> LogValue {
        LogValue::from_log2(k)
    }

    pub fn is_zero(self) -> bool {
        self.is_zero
    }

    /// The base-2 logarithm; `-inf` for zero.
    pub fn log2(self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log2
        }
    }

    /// Linear value; `inf` or `0` outside the double range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero {
            0.0
        } else {
            self.log2.exp2()
        }
    }

    /// Linear value if it is representable as a normal double.
    pub fn to_f64_checked(self) -> Option<f64> {
        if self.is_zero {
            return Some(0.0);
        }
        let v = self.to_f64();
        v.is_normal().then_some(v)
    }

    pub fn add(self, other: LogValue) -> LogValue {
        match (self.is_zero, other.is_zero) {
            (true, _) => other,
            (_, true) => self,
            _ => {
                let (hi, lo) = if self.log2 >= other.log2 {
                    (self.log2, other.log2)
                } else {
                    (other.log2, self.log2)
                };
                if hi == f64::INFINITY {
                    return LogValue::from_log2(hi);
                }
                LogValue::from_log2(hi + log2_1p_exp2(lo - hi))
            }
        }
    }

    pub fn mul(self, other: LogValue) -> LogValue {
        if self.is_zero || other.is_zero {
            LogValue::ZERO
        } else {
            LogValue::from_log2(self.log2 + other.log2)
        }
    }

    pub fn div(self, other: LogValue) -> LogValue {
        assert!(!other.is_zero, "division by zero LogValue");
        if self.is_zero {
            LogValue::ZERO
        } else {
            LogValue::from_log2(self.log2 - other.log2)
        }
    }

    /// `self^k`; `0^0 = 1`.
    pub fn powf(self, k: f64) -> LogValue {
        assert!(k.is_finite(), "non-finite exponent");
        if self.is_zero {
            if k == 0.0 {
                LogValue::ONE
            } else {
                LogValue::ZERO
            }
        } else {
            LogValue::from_log2(self.log2 * k)
        }
    }

    /// `1 + self`.
    pub fn one_plus(self) -> LogValue {
        if self.is_zero {
            LogValue::ONE
        } else {
            LogValue::from_log2(log2_1p_exp2(self.log2))
        }
    }

    /// Relative distance `|self/other - 1|`, computed from the logarithms.
    pub fn rel_diff(self, other: LogValue) -> f64 {
        match (self.is_zero, other.is_zero) {
            (true, true) => 0.0,
            (true, false) | (false, true) => 1.0,
            _ => ((self.log2 - other.log2) * LN_2).exp_m1().abs(),
        }
    }

    pub fn max(self, other: LogValue) -> LogValue {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: LogValue) -> LogValue {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl PartialEq for LogValue {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.log2().partial_cmp(&other.log2())
    }
}

impl fmt::Debug for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero {
            write!(f, "LogValue(0)")
        } else {
            write!(f, "LogValue(2^{})", self.log2)
        }
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_f64_checked() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "2^{}", self.log2),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn doubling() {
        let u = LogValue::pow2(10.0);
        assert_eq!(u.add(u).log2(), 11.0);
    }

    #[test]
    fn product_beyond_double_range() {
        let u = LogValue::pow2(1000.0);
        let v = log_combine(u, Combine::Mul(u));
        assert_eq!(v.log2(), 2000.0);
        assert!(v.to_f64_checked().is_none());
    }

    #[test]
    fn zero_is_additive_identity() {
        let one = LogValue::pow2(0.0);
        assert_eq!(one.add(LogValue::ZERO), one);
        assert!(LogValue::ZERO.mul(one).is_zero());
        assert_eq!(LogValue::ZERO.powf(0.0), LogValue::ONE);
        assert!(LogValue::from_log2(f64::NEG_INFINITY).is_zero());
    }

    #[test]
    fn stable_helpers() {
        assert!((log2_1p_exp2(0.0) - 1.0).abs() < 1e-15);
        assert!((log2_1p_exp2(2000.0) - 2000.0).abs() < 1e-12);
        assert!((log2_exp2_m1(1.0) - 0.0).abs() < 1e-15);
        assert!((log2_1m_exp2(-1.0) + 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn matches_linear_arithmetic(x in -50.0f64..50.0, y in -50.0f64..50.0) {
            let (u, v) = (LogValue::from_log2(x), LogValue::from_log2(y));
            let (a, b) = (x.exp2(), y.exp2());
            let s = u.add(v).to_f64();
            prop_assert!(((s - (a + b)) / (a + b)).abs() <= 1e-12);
            let m = u.mul(v).to_f64();
            prop_assert!(((m - a * b) / (a * b)).abs() <= 1e-12);
        }

        #[test]
        fn add_commutes_and_associates(x in -50.0f64..50.0, y in -50.0f64..50.0, z in -50.0f64..50.0) {
            let (u, v, w) = (LogValue::from_log2(x), LogValue::from_log2(y), LogValue::from_log2(z));
            prop_assert!(u.add(v).rel_diff(v.add(u)) <= 1e-12);
            prop_assert!(u.add(v).add(w).rel_diff(u.add(v.add(w))) <= 1e-12);
        }

        #[test]
        fn order_is_preserved(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let (u, v) = (LogValue::from_log2(x), LogValue::from_log2(y));
            prop_assert_eq!(x < y, u < v);
        }
    }
}
