//! Double-double reals: an unevaluated sum `hi + lo` of two `f64`s with
//! `|lo| <= ulp(hi)/2`, giving roughly 32 significant decimal digits.
//!
//! Only the operations the estimators need are provided: field arithmetic,
//! `sqrt`, `ln`, `exp`, and exact conversion from integers and rationals.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

#[derive(Clone, Copy, Default)]
pub struct Real {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Real {
    pub const ZERO: Real = Real { hi: 0.0, lo: 0.0 };
    pub const ONE: Real = Real { hi: 1.0, lo: 0.0 };
    pub const LN_2: Real = Real {
        hi: std::f64::consts::LN_2,
        lo: 2.319_046_813_846_299_6e-17,
    };
    pub const PI: Real = Real {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };
    pub const E: Real = Real {
        hi: std::f64::consts::E,
        lo: 1.445_646_891_729_250_2e-16,
    };

    pub const fn from_parts(hi: f64, lo: f64) -> Real {
        Real { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn is_nan(self) -> bool {
        self.hi.is_nan()
    }

    pub fn abs(self) -> Real {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn from_i64(v: i64) -> Real {
        let hi = v as f64;
        // `v - hi` is exact in i128 and fits in an f64 exactly
        let lo = (v as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Real { hi, lo }
    }

    pub fn from_u64(v: u64) -> Real {
        let hi = v as f64;
        let lo = (v as i128 - hi as i128) as f64;
        let (hi, lo) = quick_two_sum(hi, lo);
        Real { hi, lo }
    }

    /// Nearest double-double to a big integer (top 128 bits kept, scaled by a power of two).
    pub fn from_biguint(v: &BigUint) -> Real {
        let bits = v.bits();
        if bits <= 128 {
            let x = v.to_u128().unwrap_or(0);
            return Real::from_u128(x);
        }
        let shift = bits - 128;
        let top = (v >> shift).to_u128().unwrap_or(0);
        Real::from_u128(top).ldexp(shift as i32)
    }

    pub fn from_bigint(v: &BigInt) -> Real {
        let m = Real::from_biguint(v.magnitude());
        if v.sign() == Sign::Minus {
            -m
        } else {
            m
        }
    }

    pub fn from_rational(r: &BigRational) -> Real {
        if r.numer().is_zero() {
            return Real::ZERO;
        }
        // Scale so both parts keep full precision even for huge numerators/denominators.
        let nb = r.numer().magnitude().bits() as i64;
        let db = r.denom().magnitude().bits() as i64;
        let (num, num_shift) = scaled_bigint(r.numer(), nb);
        let (den, den_shift) = scaled_bigint(r.denom(), db);
        (num / den).ldexp((num_shift - den_shift) as i32)
    }

    fn from_u128(x: u128) -> Real {
        let hi = x as f64;
        // the f64 rounding may round up past x; compute the signed remainder
        let hi_int = hi as u128;
        let lo = if hi_int >= x {
            -((hi_int - x) as f64)
        } else {
            (x - hi_int) as f64
        };
        let (hi, lo) = quick_two_sum(hi, lo);
        Real { hi, lo }
    }

    /// Multiply by `2^k` exactly.
    pub fn ldexp(self, k: i32) -> Real {
        let f = 2f64.powi(k);
        if f.is_finite() && f != 0.0 {
            Real {
                hi: self.hi * f,
                lo: self.lo * f,
            }
        } else {
            // split large exponents to avoid intermediate overflow of 2^k
            let half = k / 2;
            self.ldexp(half).ldexp(k - half)
        }
    }

    pub fn recip(self) -> Real {
        Real::ONE / self
    }

    pub fn sqr(self) -> Real {
        self * self
    }

    pub fn powi(self, mut n: i32) -> Real {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut acc = Real::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base = base.sqr();
            n >>= 1;
        }
        acc
    }

    pub fn sqrt(self) -> Real {
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return Real::ZERO;
            }
            return Real::from(f64::NAN);
        }
        let y = self.hi.sqrt();
        let y = Real::from(y);
        // one Newton step from a correctly rounded double doubles the precision
        y + (self - y.sqr()) / (y * 2.0)
    }

    pub fn exp(self) -> Real {
        if self.hi > 709.8 {
            return Real::from(f64::INFINITY);
        }
        if self.hi < -745.2 {
            return Real::ZERO;
        }
        if self.hi == 0.0 {
            return Real::ONE;
        }
        // x = k ln 2 + r, |r| <= ln2/2, then r is scaled down by 2^-10
        let k = (self.hi / std::f64::consts::LN_2).round();
        let r = self - Real::LN_2 * k;
        let r = r.ldexp(-10);
        // Taylor series of exp(r) - 1
        let mut term = r;
        let mut sum = r;
        let mut i = 2.0;
        loop {
            term = term * r / i;
            sum += term;
            if term.hi.abs() < 1e-36 * sum.hi.abs().max(1e-300) {
                break;
            }
            i += 1.0;
            if i > 40.0 {
                break;
            }
        }
        // (1 + s)^2 - 1 = s(2 + s), applied ten times keeps precision near 1
        for _ in 0..10 {
            sum = sum * (sum + 2.0);
        }
        (sum + 1.0).ldexp(k as i32)
    }

    pub fn ln(self) -> Real {
        if self.hi <= 0.0 {
            if self.hi == 0.0 {
                return Real::from(f64::NEG_INFINITY);
            }
            return Real::from(f64::NAN);
        }
        if self.hi == 1.0 && self.lo == 0.0 {
            return Real::ZERO;
        }
        // Newton on exp(y) = x: y <- y + x exp(-y) - 1, quadratic convergence
        let mut y = Real::from(self.hi.ln());
        for _ in 0..2 {
            y = y + self * (-y).exp() - 1.0;
        }
        y
    }

    /// `self^e` for positive `self`.
    pub fn pow(self, e: Real) -> Real {
        (self.ln() * e).exp()
    }

    /// `x ln x`, continuously extended by 0 at x = 0.
    pub fn xlnx(self) -> Real {
        if self.hi == 0.0 {
            Real::ZERO
        } else {
            self * self.ln()
        }
    }

    pub fn max(self, other: Real) -> Real {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Real) -> Real {
        if self <= other {
            self
        } else {
            other
        }
    }
}

fn scaled_bigint(v: &BigInt, bits: i64) -> (Real, i64) {
    if bits <= 1000 {
        (Real::from_bigint(v), 0)
    } else {
        let shift = bits - 200;
        (Real::from_bigint(&(v >> shift as usize)), shift)
    }
}

impl From<f64> for Real {
    fn from(hi: f64) -> Real {
        Real { hi, lo: 0.0 }
    }
}

impl From<i64> for Real {
    fn from(v: i64) -> Real {
        Real::from_i64(v)
    }
}

impl From<u64> for Real {
    fn from(v: u64) -> Real {
        Real::from_u64(v)
    }
}

impl From<u32> for Real {
    fn from(v: u32) -> Real {
        Real::from(v as f64)
    }
}

impl From<i32> for Real {
    fn from(v: i32) -> Real {
        Real::from(v as f64)
    }
}

impl From<usize> for Real {
    fn from(v: usize) -> Real {
        Real::from_u64(v as u64)
    }
}

impl From<&BigRational> for Real {
    fn from(r: &BigRational) -> Real {
        Real::from_rational(r)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, b: Real) -> Real {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Real { hi, lo }
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, b: Real) -> Real {
        self + (-b)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, b: Real) -> Real {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Real { hi, lo }
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, b: Real) -> Real {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (q1, q2) = quick_two_sum(q1, q2);
        Real { hi: q1, lo: q2 } + Real::from(q3)
    }
}

macro_rules! scalar_ops {
    ($($tr:ident $method:ident $atr:ident $amethod:ident),*) => {$(
        impl $tr<f64> for Real {
            type Output = Real;
            fn $method(self, b: f64) -> Real {
                $tr::$method(self, Real::from(b))
            }
        }
        impl $tr<Real> for f64 {
            type Output = Real;
            fn $method(self, b: Real) -> Real {
                $tr::$method(Real::from(self), b)
            }
        }
        impl $atr for Real {
            fn $amethod(&mut self, b: Real) {
                *self = $tr::$method(*self, b);
            }
        }
        impl $atr<f64> for Real {
            fn $amethod(&mut self, b: f64) {
                *self = $tr::$method(*self, Real::from(b));
            }
        }
    )*};
}

scalar_ops!(
    Add add AddAssign add_assign,
    Sub sub SubAssign sub_assign,
    Mul mul MulAssign mul_assign,
    Div div DivAssign div_assign
);

impl PartialEq for Real {
    fn eq(&self, other: &Real) -> bool {
        self.hi == other.hi && self.lo == other.lo
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Real) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Sum for Real {
    fn sum<I: Iterator<Item = Real>>(iter: I) -> Real {
        iter.fold(Real::ZERO, |a, b| a + b)
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_f64(), f)
    }
}

impl fmt::LowerExp for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerExp::fmt(&self.to_f64(), f)
    }
}
