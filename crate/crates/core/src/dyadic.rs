//! Exact dyadic rationals `numerator / 2^exponent`.

use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `numerator / 2^exponent`, kept canonical: the numerator is odd, or it is zero with
/// exponent zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    numerator: BigInt,
    exponent: u32,
}

impl DyadicRational {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut numerator = numerator.into();
        if numerator.is_zero() {
            return Self::zero();
        }
        let tz = numerator
            .trailing_zeros()
            .unwrap_or(0)
            .min(u64::from(exponent)) as u32;
        numerator >>= tz;
        Self {
            numerator,
            exponent: exponent - tz,
        }
    }

    pub fn zero() -> Self {
        Self {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_integer(v: i64) -> Self {
        Self::new(v, 0)
    }

    /// `2^{-k}`.
    pub fn pow2_inv(k: u32) -> Self {
        Self::new(1, k)
    }

    /// Exact value of a finite `f64` (every finite double is dyadic).
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mantissa, exp2) = if biased == 0 {
            (fraction, -1074)
        } else {
            (fraction | 1 << 52, biased - 1075)
        };
        let mut num = BigInt::from(mantissa);
        if negative {
            num = -num;
        }
        Some(if exp2 >= 0 {
            Self::new(num << exp2 as usize, 0)
        } else {
            Self::new(num, (-exp2) as u32)
        })
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.numerator.is_positive()
    }

    pub fn denominator(&self) -> BigUint {
        BigUint::one() << self.exponent as usize
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), BigInt::from(self.denominator()))
    }

    /// Nearest-ish `f64`; exact whenever the value is representable.
    pub fn to_f64(&self) -> f64 {
        let (top, shift) = top_bits(&self.numerator);
        let mag = libm::ldexp(top as f64, shift as i32 - self.exponent as i32);
        if self.numerator.sign() == Sign::Minus {
            -mag
        } else {
            mag
        }
    }

    /// `log2` of a positive value, accurate to f64 precision for any size.
    pub fn log2(&self) -> Option<f64> {
        if !self.is_positive() {
            return None;
        }
        let (top, shift) = top_bits(&self.numerator);
        Some(libm::log2(top as f64) + f64::from(shift) - f64::from(self.exponent))
    }

    fn align(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let e = self.exponent.max(other.exponent);
        (
            &self.numerator << (e - self.exponent) as usize,
            &other.numerator << (e - other.exponent) as usize,
            e,
        )
    }

    pub fn pow(&self, k: u32) -> Self {
        Self::new(
            num_traits::pow(self.numerator.clone(), k as usize),
            self.exponent * k,
        )
    }
}

/// Top (at most 64) significant bits of `|v|` and the shift they were taken at.
fn top_bits(v: &BigInt) -> (u64, u32) {
    let mag = v.magnitude();
    let bits = mag.bits();
    if bits <= 64 {
        (mag.to_u64().unwrap_or(0), 0)
    } else {
        let shift = bits - 64;
        (
            (mag >> shift as usize).to_u64().unwrap_or(u64::MAX),
            shift as u32,
        )
    }
}

impl Default for DyadicRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.align(other);
        a.cmp(&b)
    }
}

impl Add for &DyadicRational {
    type Output = DyadicRational;
    fn add(self, rhs: Self) -> DyadicRational {
        let (a, b, e) = self.align(rhs);
        DyadicRational::new(a + b, e)
    }
}

impl Sub for &DyadicRational {
    type Output = DyadicRational;
    fn sub(self, rhs: Self) -> DyadicRational {
        let (a, b, e) = self.align(rhs);
        DyadicRational::new(a - b, e)
    }
}

impl Mul for &DyadicRational {
    type Output = DyadicRational;
    fn mul(self, rhs: Self) -> DyadicRational {
        DyadicRational::new(
            &self.numerator * &rhs.numerator,
            self.exponent + rhs.exponent,
        )
    }
}

impl Neg for DyadicRational {
    type Output = DyadicRational;
    fn neg(self) -> DyadicRational {
        DyadicRational {
            numerator: -self.numerator,
            exponent: self.exponent,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for DyadicRational {
            type Output = DyadicRational;
            fn $m(self, rhs: Self) -> DyadicRational {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl fmt::Display for DyadicRational {
    /// `n` for integers, otherwise `n/d` with `d = 2^exponent` written out.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator())
        }
    }
}
