use std::cmp::Ordering;

use crate::error::{Error, Result};

use super::Real;

/// Extra mantissa bits carried by stored logarithms, so that `exp(ln m)`
/// reproduces `m` to the working precision even when `|ln m|` is large.
pub const GUARD_BITS: usize = 64;

/// A nonnegative magnitude stored as its natural logarithm.
#[derive(Clone, Debug)]
pub struct LogMagnitude {
    is_zero: bool,
    log_value: Real,
}

impl LogMagnitude {
    pub fn zero(bits: usize) -> Self {
        LogMagnitude {
            is_zero: true,
            log_value: Real::zero(bits + GUARD_BITS),
        }
    }

    /// Magnitude `e^log_value`.
    pub fn from_log(log_value: Real) -> Self {
        LogMagnitude {
            is_zero: false,
            log_value,
        }
    }

    pub fn from_log_f64(log_value: f64, bits: usize) -> Self {
        Self::from_log(Real::from_f64(log_value, bits + GUARD_BITS))
    }

    /// Magnitude `|m|`.
    pub fn from_real(m: &Real) -> Self {
        if m.is_zero() {
            return Self::zero(m.precision());
        }
        let wide = m.abs().with_precision(m.precision() + GUARD_BITS);
        Self::from_log(wide.ln())
    }

    pub fn from_f64(m: f64, bits: usize) -> Self {
        Self::from_real(&Real::from_f64(m, bits))
    }

    /// The magnitude itself, rounded to `bits`. Overflows only past the
    /// backing format's exponent range.
    pub fn to_real(&self, bits: usize) -> Real {
        if self.is_zero {
            return Real::zero(bits);
        }
        self.log_value
            .with_precision(bits + GUARD_BITS)
            .exp()
            .with_precision(bits)
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero
    }

    pub fn log_value(&self) -> Option<&Real> {
        if self.is_zero {
            None
        } else {
            Some(&self.log_value)
        }
    }

    /// Natural log in machine precision; `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero {
            f64::NEG_INFINITY
        } else {
            self.log_value.to_f64()
        }
    }

    pub fn precision(&self) -> usize {
        self.log_value.precision().saturating_sub(GUARD_BITS).max(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        logmag_add(self, other)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero || other.is_zero {
            return Self::zero(self.precision());
        }
        Self::from_log(&self.log_value + &other.log_value)
    }

    /// `self / other`; fails when `other` is zero.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero {
            return Err(Error::InvalidArgument("division by a zero magnitude".into()));
        }
        if self.is_zero {
            return Ok(self.clone());
        }
        Ok(Self::from_log(&self.log_value - &other.log_value))
    }

    pub fn sqrt(&self) -> Self {
        if self.is_zero {
            return self.clone();
        }
        Self::from_log(self.log_value.mul_pow2(-1))
    }

    pub fn square(&self) -> Self {
        if self.is_zero {
            return self.clone();
        }
        Self::from_log(self.log_value.mul_pow2(1))
    }

    pub fn scale(&self, c: &Real) -> Result<Self> {
        logmag_scale(self, c)
    }
}

impl PartialEq for LogMagnitude {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for LogMagnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_zero, other.is_zero) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => self.log_value.partial_cmp(&other.log_value),
        }
    }
}

/// `m_a + m_b` as `max + ln(1 + e^(min - max))`.
pub fn logmag_add(a: &LogMagnitude, b: &LogMagnitude) -> LogMagnitude {
    if a.is_zero {
        return b.clone();
    }
    if b.is_zero {
        return a.clone();
    }
    let (hi, lo) = if a.log_value >= b.log_value {
        (&a.log_value, &b.log_value)
    } else {
        (&b.log_value, &a.log_value)
    };
    let gap = (lo - hi).exp();
    LogMagnitude::from_log(hi + &gap.ln_1p())
}

/// `c · m_a` for `c > 0`.
pub fn logmag_scale(a: &LogMagnitude, c: &Real) -> Result<LogMagnitude> {
    if !c.is_positive() || !c.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "magnitude scale factor must be positive, got {c}"
        )));
    }
    if a.is_zero {
        return Ok(a.clone());
    }
    let ln_c = c.with_precision(a.log_value.precision()).ln();
    Ok(LogMagnitude::from_log(&a.log_value + &ln_c))
}
