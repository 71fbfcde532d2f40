//! Numeric backends.
//!
//! Machines built from integer matrices run on [`Exact`] (arbitrary precision
//! rationals) and report probabilities with no rounding at all. Machines that
//! contain rotations need sines and cosines of irrational angles and run on
//! [`HpFloat`], an MPFR float whose precision travels with every value.

use std::fmt;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Float, Integer, Rational};
use serde::Serialize;

use crate::error::{AfaError, Result};

/// Exact rational scalar.
pub type Exact = Rational;

/// Binary floating point scalar with a configurable mantissa width.
pub type HpFloat = Float;

/// Smallest float precision accepted anywhere in the crate.
pub const MIN_PRECISION_BITS: u32 = 64;

/// Precision used when nothing else asks for more.
pub const DEFAULT_PRECISION_BITS: u32 = 128;

/// Runtime description of a numeric backend.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NumericField {
    ExactRational,
    HighPrecisionFloat { precision_bits: u32 },
}

impl NumericField {
    pub fn float(precision_bits: u32) -> Result<Self> {
        check_precision(precision_bits)?;
        Ok(NumericField::HighPrecisionFloat { precision_bits })
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NumericField::ExactRational)
    }

    /// Allowed deviation of a column or entry sum from 1.
    pub fn tolerance(&self) -> f64 {
        match *self {
            NumericField::ExactRational => 0.0,
            NumericField::HighPrecisionFloat { precision_bits } => {
                2f64.powi(-((precision_bits / 2) as i32))
            }
        }
    }
}

impl fmt::Display for NumericField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericField::ExactRational => write!(f, "exact-rational"),
            NumericField::HighPrecisionFloat { precision_bits } => {
                write!(f, "float{precision_bits}")
            }
        }
    }
}

pub(crate) fn check_precision(precision_bits: u32) -> Result<()> {
    if precision_bits < MIN_PRECISION_BITS {
        return Err(AfaError::Precision {
            bits: precision_bits,
            min: MIN_PRECISION_BITS,
        });
    }
    Ok(())
}

/// Arithmetic contract shared by both backends.
///
/// New values are created from a [`Scalar::Context`]: nothing for rationals,
/// the precision in bits for floats.
pub trait Scalar:
    Clone + PartialEq + PartialOrd + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    type Context: Copy + fmt::Debug + PartialEq + Send + Sync;

    fn field(ctx: Self::Context) -> NumericField;
    fn context(&self) -> Self::Context;

    fn from_i64(value: i64, ctx: Self::Context) -> Self;
    fn from_integer(value: &Integer, ctx: Self::Context) -> Self;
    fn from_rational(value: &Rational, ctx: Self::Context) -> Self;

    fn zero(ctx: Self::Context) -> Self {
        Self::from_i64(0, ctx)
    }
    fn one(ctx: Self::Context) -> Self {
        Self::from_i64(1, ctx)
    }

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// `None` on division by zero.
    fn checked_div(&self, rhs: &Self) -> Option<Self>;
    fn neg(&self) -> Self;
    fn abs(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn set_zero(&mut self);
    fn add_assign_ref(&mut self, rhs: &Self);
    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    fn to_f64(&self) -> f64;

    /// `|self - 1| <= tolerance`, where the tolerance is zero for exact backends.
    fn is_one_within_tolerance(&self) -> bool {
        let ctx = self.context();
        let dev = self.sub(&Self::one(ctx)).abs();
        match Self::field(ctx) {
            NumericField::ExactRational => dev.is_zero(),
            field => dev.to_f64() <= field.tolerance(),
        }
    }
}

/// Exact context marker.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExactCtx;

impl Scalar for Rational {
    type Context = ExactCtx;

    fn field(_: ExactCtx) -> NumericField {
        NumericField::ExactRational
    }
    fn context(&self) -> ExactCtx {
        ExactCtx
    }
    fn from_i64(value: i64, _: ExactCtx) -> Self {
        Rational::from(value)
    }
    fn from_integer(value: &Integer, _: ExactCtx) -> Self {
        Rational::from(value)
    }
    fn from_rational(value: &Rational, _: ExactCtx) -> Self {
        value.clone()
    }
    fn add(&self, rhs: &Self) -> Self {
        Rational::from(self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Rational::from(self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Rational::from(self * rhs)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.cmp0().is_eq() {
            None
        } else {
            Some(Rational::from(self / rhs))
        }
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn abs(&self) -> Self {
        Rational::from(self.abs_ref())
    }
    fn is_zero(&self) -> bool {
        self.cmp0().is_eq()
    }
    fn set_zero(&mut self) {
        self.assign(0);
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        // Integer fast path: every machine built from integer gadgets stays here.
        if *a.denom() == 1 && *b.denom() == 1 && *self.denom() == 1 {
            let mut num = Integer::from(a.numer() * b.numer());
            num += self.numer();
            *self = Rational::from(num);
        } else {
            *self += Rational::from(a * b);
        }
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
}

impl Scalar for Float {
    type Context = u32;

    fn field(ctx: u32) -> NumericField {
        NumericField::HighPrecisionFloat {
            precision_bits: ctx,
        }
    }
    fn context(&self) -> u32 {
        self.prec()
    }
    fn from_i64(value: i64, ctx: u32) -> Self {
        Float::with_val(ctx, value)
    }
    fn from_integer(value: &Integer, ctx: u32) -> Self {
        Float::with_val(ctx, value)
    }
    fn from_rational(value: &Rational, ctx: u32) -> Self {
        Float::with_val(ctx, value)
    }
    fn add(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self + rhs)
    }
    fn sub(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self - rhs)
    }
    fn mul(&self, rhs: &Self) -> Self {
        Float::with_val(self.prec(), self * rhs)
    }
    fn checked_div(&self, rhs: &Self) -> Option<Self> {
        if rhs.is_zero() {
            None
        } else {
            Some(Float::with_val(self.prec(), self / rhs))
        }
    }
    fn neg(&self) -> Self {
        Float::with_val(self.prec(), -self)
    }
    fn abs(&self) -> Self {
        Float::with_val(self.prec(), self.abs_ref())
    }
    fn is_zero(&self) -> bool {
        Float::is_zero(self)
    }
    fn set_zero(&mut self) {
        self.assign(0);
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        // fused: one rounding
        *self += a * b;
    }
    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
}

/// Transcendental operations, available on the float backend only.
pub trait Real: Scalar {
    fn pi(ctx: Self::Context) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn square(&self) -> Self {
        self.mul(self)
    }
}

impl Real for Float {
    fn pi(ctx: u32) -> Self {
        Float::with_val(ctx, Constant::Pi)
    }
    fn sin(&self) -> Self {
        Float::with_val(self.prec(), self.sin_ref())
    }
    fn cos(&self) -> Self {
        Float::with_val(self.prec(), self.cos_ref())
    }
}

/// `2^(-precision_bits/2)` as a float of the given precision.
pub fn float_tolerance(precision_bits: u32) -> Float {
    let two = Float::with_val(precision_bits, 2);
    two.pow(-((precision_bits / 2) as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_has_no_rounding() {
        let third = Rational::from((1, 3));
        let sum = third.add(&third).add(&third);
        assert_eq!(sum, Rational::from(1));
        assert!(sum.is_one_within_tolerance());
        let mut acc = Rational::from((1, 2));
        acc.mul_add_assign(&Rational::from((1, 3)), &Rational::from(3));
        assert_eq!(acc, Rational::from((3, 2)));
        let mut int_acc = Rational::from(4);
        int_acc.mul_add_assign(&Rational::from(-3), &Rational::from(5));
        assert_eq!(int_acc, Rational::from(-11));
    }

    #[test]
    fn exact_one_check_is_strict() {
        let almost = Rational::from((1_000_000_000_001i64, 1_000_000_000_000i64));
        assert!(!almost.is_one_within_tolerance());
    }

    #[test]
    fn division_by_zero_is_reported() {
        assert!(Rational::from(1).checked_div(&Rational::from(0)).is_none());
        assert!(Float::with_val(64, 1)
            .checked_div(&Float::with_val(64, 0))
            .is_none());
    }

    #[test]
    fn float_precision_floor() {
        assert!(NumericField::float(63).is_err());
        assert!(NumericField::float(64).is_ok());
        assert_eq!(
            NumericField::float(128).unwrap().tolerance(),
            2f64.powi(-64)
        );
    }

    #[test]
    fn float_tolerance_matches_field() {
        assert_eq!(float_tolerance(128).to_f64(), 2f64.powi(-64));
        let near_one = Float::with_val(128, 1) + float_tolerance(256);
        assert!(Float::with_val(128, near_one).is_one_within_tolerance());
    }

    #[test]
    fn trig_at_configured_precision() {
        let pi = Float::pi(256);
        assert_eq!(pi.prec(), 256);
        let quarter = Float::with_val(256, &pi / 4);
        let s = Real::sin(&quarter);
        let c = Real::cos(&quarter);
        let diff = s.sub(&c).abs();
        assert!(diff.to_f64() < 1e-70);
    }
}
