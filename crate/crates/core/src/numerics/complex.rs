use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::Real;

/// Extended-precision complex scalar.
#[derive(Clone, PartialEq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64, bits: usize) -> Self {
        Complex {
            re: Real::from_f64(re, bits),
            im: Real::from_f64(im, bits),
        }
    }

    pub fn from_real(re: Real) -> Self {
        let im = Real::zero(re.precision());
        Complex { re, im }
    }

    pub fn zero(bits: usize) -> Self {
        Self::from_f64(0.0, 0.0, bits)
    }

    pub fn one(bits: usize) -> Self {
        Self::from_f64(1.0, 0.0, bits)
    }

    /// `r·e^{iθ}` with modulus and angle given in machine precision.
    pub fn from_polar(r: f64, theta: f64, bits: usize) -> Self {
        let t = Real::from_f64(theta, bits);
        let r = Real::from_f64(r, bits);
        Complex {
            re: &r * &t.cos(),
            im: &r * &t.sin(),
        }
    }

    pub fn precision(&self) -> usize {
        self.re.precision().max(self.im.precision())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Complex {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    pub fn norm_sqr(&self) -> Real {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, c: &Real) -> Self {
        Complex {
            re: &self.re * c,
            im: &self.im * c,
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        Complex {
            re: self.re.mul_pow2(k),
            im: self.im.mul_pow2(k),
        }
    }

    /// `e^z`.
    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        Complex {
            re: &m * &self.im.cos(),
            im: &m * &self.im.sin(),
        }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        Complex {
            re: &self.re / &d,
            im: &(-&self.im) / &d,
        }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    fn add_ref(&self, rhs: &Complex) -> Complex {
        Complex {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }

    fn sub_ref(&self, rhs: &Complex) -> Complex {
        Complex {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }

    fn mul_ref(&self, rhs: &Complex) -> Complex {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Complex {
                re: &self.re * &rhs.re,
                im: Real::zero(self.precision().max(rhs.precision())),
            };
        }
        Complex {
            re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        }
    }

    fn div_ref(&self, rhs: &Complex) -> Complex {
        if rhs.im.is_zero() {
            return Complex {
                re: &self.re / &rhs.re,
                im: &self.im / &rhs.re,
            };
        }
        let d = rhs.norm_sqr();
        let re = &(&self.re * &rhs.re) + &(&self.im * &rhs.im);
        let im = &(&self.im * &rhs.re) - &(&self.re * &rhs.im);
        Complex {
            re: &re / &d,
            im: &im / &d,
        }
    }
}

impl fmt::Debug for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = self.to_f64();
        write!(f, "({re:e} {im:+e}i)")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl<'a> $tr<&'a Complex> for &'a Complex {
            type Output = Complex;
            fn $method(self, rhs: &'a Complex) -> Complex {
                self.$inner(rhs)
            }
        }
        impl $tr<Complex> for Complex {
            type Output = Complex;
            fn $method(self, rhs: Complex) -> Complex {
                self.$inner(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_ref);
forward_binop!(Sub, sub, sub_ref);
forward_binop!(Mul, mul, mul_ref);
forward_binop!(Div, div, div_ref);

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex {
            re: -&self.re,
            im: -&self.im,
        }
    }
}
