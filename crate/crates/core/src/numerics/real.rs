//! Extended-precision real scalar.
//!
//! A thin value type over [`astro_float::BigFloat`] that remembers its own
//! mantissa width, so binary operators can pick `max(p_lhs, p_rhs)` without
//! threading a precision argument through every expression. The exponent range
//! of the backing type is about `2^(±5·10^8)`, far beyond the `e^(10^7)` norms
//! the resolvent engine produces.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> =
        RefCell::new(Consts::new().expect("astro-float constants cache"));
}

fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Multiplies `x` by `2^e` without intermediate overflow.
fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    bits: usize,
}

impl Real {
    pub fn from_f64(x: f64, bits: usize) -> Self {
        Real {
            v: BigFloat::from_f64(x, bits),
            bits,
        }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_f64(0.0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_f64(1.0, bits)
    }

    pub fn pi(bits: usize) -> Self {
        Real {
            v: with_consts(|cc| cc.pi(bits, RM)),
            bits,
        }
    }

    pub fn ln2(bits: usize) -> Self {
        Real {
            v: with_consts(|cc| cc.ln_2(bits, RM)),
            bits,
        }
    }

    /// `1/k` for a positive integer weight index.
    pub fn recip_int(k: u64, bits: usize) -> Self {
        Self::one(bits).div_ref(&Self::from_f64(k as f64, bits))
    }

    pub fn precision(&self) -> usize {
        self.bits
    }

    /// Rounds (or widens) to `bits` of mantissa.
    pub fn with_precision(&self, bits: usize) -> Self {
        let mut v = self.v.clone();
        if !v.is_zero() && v.set_precision(bits, RM).is_err() {
            return Self::from_f64(f64::NAN, bits);
        }
        Real { v, bits }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.v.is_nan() && !self.v.is_inf()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative() && !self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.v.is_positive() && !self.v.is_zero()
    }

    /// Binary exponent `e` with `2^(e-1) <= |x| < 2^e`; `None` for zero and
    /// non-finite values.
    pub fn exponent(&self) -> Option<i64> {
        if self.v.is_zero() || !self.is_finite() {
            return None;
        }
        self.v.exponent().map(i64::from)
    }

    /// Exact multiplication by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        match self.exponent() {
            Some(e) => {
                let mut v = self.v.clone();
                v.set_exponent((e + k) as astro_float::Exponent);
                Real { v, bits: self.bits }
            }
            None => self.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_nan() {
            return f64::NAN;
        }
        if self.v.is_inf() {
            return if self.v.is_inf_pos() {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
        }
        if self.v.is_zero() {
            return 0.0;
        }
        let (m, _, s, e, _) = match self.v.as_raw_parts() {
            Some(parts) => parts,
            None => return f64::NAN,
        };
        let top = *m.last().expect("normalized mantissa");
        let frac = top as f64 / 2f64.powi(64);
        let x = ldexp(frac, i64::from(e));
        if s == Sign::Neg {
            -x
        } else {
            x
        }
    }

    fn wrap(&self, v: BigFloat) -> Self {
        Real { v, bits: self.bits }
    }

    pub fn abs(&self) -> Self {
        self.wrap(self.v.abs())
    }

    pub fn sqrt(&self) -> Self {
        self.wrap(self.v.sqrt(self.bits, RM))
    }

    pub fn ln(&self) -> Self {
        let v = with_consts(|cc| self.v.ln(self.bits, RM, cc));
        self.wrap(v)
    }

    pub fn exp(&self) -> Self {
        let v = with_consts(|cc| self.v.exp(self.bits, RM, cc));
        self.wrap(v)
    }

    pub fn sin(&self) -> Self {
        let v = with_consts(|cc| self.v.sin(self.bits, RM, cc));
        self.wrap(v)
    }

    pub fn cos(&self) -> Self {
        let v = with_consts(|cc| self.v.cos(self.bits, RM, cc));
        self.wrap(v)
    }

    /// `ln(1 + x)` without cancellation for small `|x|`.
    pub fn ln_1p(&self) -> Self {
        let one = Self::one(self.bits);
        if self.is_zero() {
            return self.clone();
        }
        if self.abs().to_f64() >= 0.5 {
            return (&one + self).ln();
        }
        // ln(1+x) = 2 atanh(y), y = x / (2 + x), |y| < 1/3
        let y = self / &(&Self::from_f64(2.0, self.bits) + self);
        let y2 = &y * &y;
        let mut term = y.clone();
        let mut sum = y.clone();
        let mut k = 1u64;
        loop {
            term = &term * &y2;
            k += 2;
            let add = &term / &Self::from_f64(k as f64, self.bits);
            if add.is_zero() || add.rel_negligible(&sum) {
                break;
            }
            sum = &sum + &add;
        }
        sum.mul_pow2(1)
    }

    /// `e^x - 1` without cancellation for small `|x|`.
    pub fn exp_m1(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        if self.abs().to_f64() >= 0.5 {
            return &self.exp() - &Self::one(self.bits);
        }
        let mut term = self.clone();
        let mut sum = self.clone();
        let mut k = 1u64;
        loop {
            k += 1;
            term = &(&term * self) / &Self::from_f64(k as f64, self.bits);
            if term.is_zero() || term.rel_negligible(&sum) {
                break;
            }
            sum = &sum + &term;
        }
        sum
    }

    fn rel_negligible(&self, reference: &Self) -> bool {
        match (self.exponent(), reference.exponent()) {
            (Some(a), Some(b)) => b - a > self.bits as i64 + 2,
            _ => false,
        }
    }

    pub fn max(&self, other: &Self) -> Self {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn min(&self, other: &Self) -> Self {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub(crate) fn add_ref(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real {
            v: self.v.add(&rhs.v, p, RM),
            bits: p,
        }
    }

    pub(crate) fn sub_ref(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real {
            v: self.v.sub(&rhs.v, p, RM),
            bits: p,
        }
    }

    pub(crate) fn mul_ref(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real {
            v: self.v.mul(&rhs.v, p, RM),
            bits: p,
        }
    }

    pub(crate) fn div_ref(&self, rhs: &Self) -> Self {
        let p = self.bits.max(rhs.bits);
        Real {
            v: self.v.div(&rhs.v, p, RM),
            bits: p,
        }
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e}; {} bits)", self.to_f64(), self.bits)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.v.cmp(&other.v) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.v.cmp(&other.v).map(|c| c.cmp(&0))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl<'a> $tr<&'a Real> for &'a Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                self.$inner(rhs)
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$inner(&rhs)
            }
        }
        impl<'a> $tr<&'a Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &'a Real) -> Real {
                self.$inner(rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        self.wrap(-self.v.clone())
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            v: -self.v,
            bits: self.bits,
        }
    }
}
