//! Scalar abstraction shared by every numerical kernel.
//!
//! `Real` covers `f32`, `f64` and the software float [`Mp`]; `Scalar` adds the
//! complex field on top so dense linear algebra can be written once.

use std::cell::Cell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, RemAssign, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use rug::ops::Pow;
use rug::Float;

pub trait Real:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + RemAssign
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn erf(&self) -> Self;
    fn erfc(&self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn pi() -> Self;
    /// Unit roundoff of the current working precision.
    fn epsilon() -> Self;
    fn mantissa_bits() -> u32;
    fn is_finite(&self) -> bool;
    /// `ln|x|` as an `f64`, usable even when `x` is outside the `f64` range.
    fn ln_abs_f64(&self) -> f64;

    fn from_usize(k: usize) -> Self {
        if k < (1usize << 52) {
            Self::from_f64(k as f64)
        } else {
            let hi = Self::from_f64((k >> 26) as f64);
            hi * Self::from_f64((1u64 << 26) as f64) + Self::from_f64((k & ((1 << 26) - 1)) as f64)
        }
    }

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_f64(p as f64) / Self::from_f64(q as f64)
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

macro_rules! impl_real_native {
    ($t:ty, $erf:path, $erfc:path, $bits:expr) => {
        impl Real for $t {
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn erf(&self) -> Self {
                $erf(*self)
            }
            fn erfc(&self) -> Self {
                $erfc(*self)
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn floor(&self) -> Self {
                <$t>::floor(*self)
            }
            fn pi() -> Self {
                std::f64::consts::PI as $t
            }
            fn epsilon() -> Self {
                <$t>::EPSILON
            }
            fn mantissa_bits() -> u32 {
                $bits
            }
            fn is_finite(&self) -> bool {
                <$t>::is_finite(*self)
            }
            fn ln_abs_f64(&self) -> f64 {
                (*self as f64).abs().ln()
            }
            fn powi(&self, k: u32) -> Self {
                <$t>::powi(*self, k as i32)
            }
        }
    };
}

impl_real_native!(f64, libm::erf, libm::erfc, 53);
impl_real_native!(f32, libm::erff, libm::erfcf, 24);

pub const DEFAULT_PRECISION_BITS: u32 = 256;

thread_local! {
    static WORKING_PRECISION: Cell<u32> = const { Cell::new(DEFAULT_PRECISION_BITS) };
}

/// Mantissa width used by [`Mp`] constructors and arithmetic on this thread.
pub fn working_precision() -> u32 {
    WORKING_PRECISION.with(|p| p.get())
}

/// Runs `f` with the [`Mp`] working precision set to `bits`, restoring the
/// previous value afterwards (also on unwind).
pub fn with_precision<R>(bits: u32, f: impl FnOnce() -> R) -> R {
    struct Restore(u32);
    impl Drop for Restore {
        fn drop(&mut self) {
            WORKING_PRECISION.with(|p| p.set(self.0));
        }
    }
    let prev = WORKING_PRECISION.with(|p| p.replace(bits.max(64)));
    let _guard = Restore(prev);
    f()
}

/// Arbitrary precision binary float backed by MPFR.
///
/// Every result is rounded to the thread's [`working_precision`].
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mp(pub Float);

impl Mp {
    pub fn from_float(x: Float) -> Self {
        Mp(Float::with_val(working_precision(), x))
    }

    pub fn inner(&self) -> &Float {
        &self.0
    }

    /// Parses a decimal string at the working precision.
    pub fn parse(s: &str) -> Option<Self> {
        Float::parse(s).ok().map(|v| Mp(Float::with_val(working_precision(), v)))
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
}

impl fmt::Debug for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mp({})", self.0.to_string_radix(10, Some(20)))
    }
}

impl fmt::Display for Mp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string_radix(10, Some(20)))
    }
}

macro_rules! mp_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident, $op:tt) => {
        impl $tr for Mp {
            type Output = Mp;
            fn $m(self, rhs: Mp) -> Mp {
                Mp(Float::with_val(working_precision(), &self.0 $op &rhs.0))
            }
        }
        impl<'a> $tr<&'a Mp> for &'a Mp {
            type Output = Mp;
            fn $m(self, rhs: &'a Mp) -> Mp {
                Mp(Float::with_val(working_precision(), &self.0 $op &rhs.0))
            }
        }
        impl $atr for Mp {
            fn $am(&mut self, rhs: Mp) {
                let v = Float::with_val(working_precision(), &self.0 $op &rhs.0);
                self.0 = v;
            }
        }
    };
}

mp_binop!(Add, add, AddAssign, add_assign, +);
mp_binop!(Sub, sub, SubAssign, sub_assign, -);
mp_binop!(Mul, mul, MulAssign, mul_assign, *);
mp_binop!(Div, div, DivAssign, div_assign, /);

impl Rem for Mp {
    type Output = Mp;
    fn rem(self, rhs: Mp) -> Mp {
        let q = Float::with_val(working_precision(), &self.0 / &rhs.0).trunc();
        Mp(Float::with_val(working_precision(), &self.0 - &(q * &rhs.0)))
    }
}

impl RemAssign for Mp {
    fn rem_assign(&mut self, rhs: Mp) {
        let v = self.clone() % rhs;
        *self = v;
    }
}

impl Neg for Mp {
    type Output = Mp;
    fn neg(self) -> Mp {
        Mp(-self.0)
    }
}

impl Zero for Mp {
    fn zero() -> Self {
        Mp(Float::new(working_precision()))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for Mp {
    fn one() -> Self {
        Mp(Float::with_val(working_precision(), 1))
    }
}

impl Num for Mp {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(Mp(Float::with_val(working_precision(), parsed)))
    }
}

impl Real for Mp {
    fn from_f64(x: f64) -> Self {
        Mp(Float::with_val(working_precision(), x))
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
    fn sqrt(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.sqrt_ref()))
    }
    fn exp(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.exp_ref()))
    }
    fn ln(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.ln_ref()))
    }
    fn erf(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.erf_ref()))
    }
    fn erfc(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.erfc_ref()))
    }
    fn abs(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.abs_ref()))
    }
    fn floor(&self) -> Self {
        Mp(Float::with_val(working_precision(), self.0.floor_ref()))
    }
    fn pi() -> Self {
        Mp(Float::with_val(working_precision(), rug::float::Constant::Pi))
    }
    fn epsilon() -> Self {
        let p = working_precision();
        Mp(Float::with_val(p, Float::i_exp(1, 1 - p as i32)))
    }
    fn mantissa_bits() -> u32 {
        working_precision()
    }
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }
    fn ln_abs_f64(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let a = Float::with_val(working_precision(), self.0.abs_ref());
        Float::with_val(64, a.ln_ref()).to_f64()
    }
    fn from_usize(k: usize) -> Self {
        Mp(Float::with_val(working_precision(), k))
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        let prec = working_precision();
        let num = Float::with_val(prec.max(64), p);
        let den = Float::with_val(prec.max(64), q);
        Mp(Float::with_val(prec, &num / &den))
    }
    fn powi(&self, k: u32) -> Self {
        Mp(Float::with_val(working_precision(), (&self.0).pow(k)))
    }
}

/// Field of matrix entries: a [`Real`] or a `Complex` over one.
pub trait Scalar:
    Clone + fmt::Debug + Send + Sync + 'static + Num + Neg<Output = Self> + AddAssign + SubAssign
{
    type Re: Real;
    fn conj(&self) -> Self;
    fn re(&self) -> Self::Re;
    fn im(&self) -> Self::Re;
    fn abs_sqr(&self) -> Self::Re;
    fn from_re(r: Self::Re) -> Self;
    fn mul_re(&self, r: &Self::Re) -> Self;
    /// `true` when the field has an imaginary unit.
    fn is_complex() -> bool;
    /// `re + i·im`; the imaginary part is dropped for real fields.
    fn from_parts(re: Self::Re, im: Self::Re) -> Self;

    fn modulus(&self) -> Self::Re {
        self.abs_sqr().sqrt()
    }
}

macro_rules! impl_scalar_real {
    ($t:ty) => {
        impl Scalar for $t {
            type Re = $t;
            fn conj(&self) -> Self {
                self.clone()
            }
            fn re(&self) -> Self::Re {
                self.clone()
            }
            fn im(&self) -> Self::Re {
                <$t>::zero()
            }
            fn abs_sqr(&self) -> Self::Re {
                self.clone() * self.clone()
            }
            fn from_re(r: Self::Re) -> Self {
                r
            }
            fn mul_re(&self, r: &Self::Re) -> Self {
                self.clone() * r.clone()
            }
            fn is_complex() -> bool {
                false
            }
            fn from_parts(re: Self::Re, _im: Self::Re) -> Self {
                re
            }
            fn modulus(&self) -> Self::Re {
                Real::abs(self)
            }
        }
    };
}

impl_scalar_real!(f32);
impl_scalar_real!(f64);
impl_scalar_real!(Mp);

impl<T: Real> Scalar for Complex<T> {
    type Re = T;
    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }
    fn re(&self) -> T {
        self.re.clone()
    }
    fn im(&self) -> T {
        self.im.clone()
    }
    fn abs_sqr(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }
    fn from_re(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn mul_re(&self, r: &T) -> Self {
        Complex::new(self.re.clone() * r.clone(), self.im.clone() * r.clone())
    }
    fn is_complex() -> bool {
        true
    }
    fn from_parts(re: T, im: T) -> Self {
        Complex::new(re, im)
    }
}

/// Total order helper for reals that are known to be finite.
pub fn cmp_real<T: Real>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

/// Converts between real types through a decimal-exact path.
///
/// `f64 -> Mp` is exact; `Mp -> f64` rounds to nearest.
pub trait ConvertReal<U> {
    fn convert(&self) -> U;
}

impl<T: Real> ConvertReal<T> for T {
    fn convert(&self) -> T {
        self.clone()
    }
}

impl ConvertReal<Mp> for f64 {
    fn convert(&self) -> Mp {
        Mp::from_f64(*self)
    }
}

impl ConvertReal<f64> for Mp {
    fn convert(&self) -> f64 {
        self.to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_arithmetic_tracks_precision() {
        with_precision(200, || {
            let third = Mp::one() / Mp::from_f64(3.0);
            let back = third.clone() * Mp::from_f64(3.0) - Mp::one();
            assert!(back.abs() <= Mp::epsilon() * Mp::from_f64(4.0));
            assert_eq!(third.0.prec(), 200);
        });
        assert_eq!(working_precision(), DEFAULT_PRECISION_BITS);
    }

    #[test]
    fn erf_agrees_between_backends() {
        for x in [-2.5, -0.3, 0.0, 0.7, 1.0, 3.2] {
            let a = Real::erf(&x);
            let b = Mp::from_f64(x).erf().to_f64();
            assert!((a - b).abs() < 1e-15, "{x}: {a} vs {b}");
        }
    }

    #[test]
    fn ln_abs_survives_underflow() {
        let tiny = Mp::from_f64(1e-300) * Mp::from_f64(1e-300);
        assert_eq!(tiny.to_f64(), 0.0);
        let l = tiny.ln_abs_f64();
        assert!((l + 600.0 * std::f64::consts::LN_10).abs() < 1e-9);
    }

    #[test]
    fn powi_matches_repeated_product() {
        assert_eq!(Real::powi(&3.0f64, 5), 243.0);
        assert_eq!(Mp::from_f64(1.5).powi(4).to_f64(), 5.0625);
    }

    #[test]
    fn complex_scalar_basics() {
        let z = Complex::new(3.0f64, -4.0);
        assert_eq!(z.abs_sqr(), 25.0);
        assert_eq!(Scalar::conj(&z), Complex::new(3.0, 4.0));
        assert_eq!(z.modulus(), 5.0);
    }
}
