//! Arbitrary-precision reals, exact rationals, constants and quadrature.
//!
//! Reals are MPFR floats (`rug::Float`); every value carries its own
//! precision, and all routines here take an explicit [`Precision`] so results
//! are deterministic functions of their inputs.

mod quadrature;
mod zeta;

pub use quadrature::{
    integrate_finite, integrate_finite_with, integrate_semi_infinite, Envelope, QuadratureOptions,
    QuadratureResult,
};
pub use zeta::{bernoulli, even_zeta_ratio, zeta_value};

use rug::float::{Constant, Round};
use rug::ops::AssignRound;
use rug::Float;
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision real.
pub type HpReal = Float;

/// Exact rational, always in lowest terms.
pub type BigRational = rug::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericError {
    #[error(
        "quadrature did not converge after {levels} levels (last difference {last_difference:e})"
    )]
    NonConvergence { levels: u32, last_difference: f64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "no split point up to 2^20 satisfies the tail envelope bound (last bound {last_bound:e})"
    )]
    Envelope { last_bound: f64 },
    #[error("precision of {bits} bits is below the minimum of {min}")]
    PrecisionTooLow { bits: u32, min: u32 },
}

/// Binary working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Precision(u32);

impl Precision {
    pub const MIN_BITS: u32 = 64;
    pub const DEFAULT: Precision = Precision(256);

    pub fn new(bits: u32) -> Result<Self, NumericError> {
        if bits < Self::MIN_BITS {
            return Err(NumericError::PrecisionTooLow {
                bits,
                min: Self::MIN_BITS,
            });
        }
        Ok(Precision(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn doubled(self) -> Self {
        Precision(self.0 * 2)
    }

    pub fn plus(self, extra: u32) -> Self {
        Precision(self.0 + extra)
    }

    /// Number of decimal digits carried, rounded down.
    pub fn decimal_digits(self) -> u32 {
        (f64::from(self.0) * std::f64::consts::LOG10_2).floor() as u32
    }

    /// Smallest precision carrying at least `digits` decimal digits.
    pub fn from_decimal_digits(digits: u32) -> Self {
        let bits = (f64::from(digits) / std::f64::consts::LOG10_2).ceil() as u32;
        Precision(bits.max(Self::MIN_BITS))
    }

    pub fn zero(self) -> HpReal {
        Float::new(self.0)
    }

    /// `2^e` at this precision.
    pub fn pow2(self, e: i32) -> HpReal {
        let mut x = Float::with_val(self.0, 1);
        x <<= e;
        x
    }

    pub fn rational(self, q: &BigRational) -> HpReal {
        Float::with_val(self.0, q)
    }
}

impl Default for Precision {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} bits", self.0)
    }
}

/// `log 2` at the requested precision (correctly rounded).
pub fn log2_value(prec: Precision) -> HpReal {
    Float::with_val(prec.bits(), Constant::Log2)
}

pub fn pi_value(prec: Precision) -> HpReal {
    Float::with_val(prec.bits(), Constant::Pi)
}

/// Rounds `x` to `prec` (nearest).
pub fn round_to(x: &HpReal, prec: Precision) -> HpReal {
    let mut y = Float::new(prec.bits());
    y.assign_round(x, Round::Nearest);
    y
}

/// Decimal digits needed so that a decimal string round-trips at `prec`.
fn round_trip_digits(prec: Precision) -> usize {
    (f64::from(prec.bits()) * std::f64::consts::LOG10_2).ceil() as usize + 2
}

/// Scientific decimal rendering that parses back to the same value at the
/// value's own precision.
pub fn to_decimal(x: &HpReal) -> String {
    let prec = Precision(x.prec().max(Precision::MIN_BITS));
    to_decimal_digits(x, round_trip_digits(prec))
}

/// Scientific decimal rendering with `digits` significant digits.
pub fn to_decimal_digits(x: &HpReal, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let s = x.to_string_radix(10, Some(digits.max(1)));
    normalize_exponent(&s)
}

// MPFR renders exponents as "e-5"; keep that, but strip a redundant "e0".
fn normalize_exponent(s: &str) -> String {
    match s.strip_suffix("e0") {
        Some(head) => head.to_string(),
        None => s.to_string(),
    }
}

pub fn parse_decimal(s: &str, prec: Precision) -> Result<HpReal, NumericError> {
    let parsed = Float::parse(s.trim())
        .map_err(|e| NumericError::Domain(format!("bad decimal {s:?}: {e}")))?;
    Ok(Float::with_val(prec.bits(), parsed))
}

/// `|x - y|` evaluated at the larger of the two precisions.
pub fn abs_diff(x: &HpReal, y: &HpReal) -> HpReal {
    let p = x.prec().max(y.prec());
    Float::with_val(p, x - y).abs()
}

/// `log10 |x|`, or `-inf` for zero, as an `f64` for reporting.
pub fn log10_abs(x: &HpReal) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + f64::from(e) * std::f64::consts::LOG10_2
}

/// Number of significant decimal digits to which `approx` matches `exact`.
pub fn matching_digits(approx: &HpReal, exact: &HpReal) -> f64 {
    let diff = abs_diff(approx, exact);
    if diff.is_zero() {
        return f64::from(Precision(approx.prec().min(exact.prec())).decimal_digits());
    }
    log10_abs(exact) - log10_abs(&diff)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_floor_is_enforced() {
        assert!(Precision::new(63).is_err());
        assert_eq!(Precision::new(64).unwrap().bits(), 64);
        assert_eq!(Precision::from_decimal_digits(60).bits(), 200);
    }

    #[test]
    fn log2_at_64_bits() {
        let l = log2_value(Precision::new(64).unwrap());
        assert!((l.to_f64() - std::f64::consts::LN_2).abs() < 1e-16);
    }

    #[test]
    fn log2_monotone_in_precision() {
        let lo = log2_value(Precision::new(128).unwrap());
        let hi = log2_value(Precision::new(256).unwrap());
        let hi_rounded = round_to(&hi, Precision::new(128).unwrap());
        assert_eq!(lo, hi_rounded);
    }

    #[test]
    fn exp_of_log2_is_two() {
        let p = Precision::new(256).unwrap();
        let two = log2_value(p).exp();
        let err = abs_diff(&two, &Float::with_val(256, 2));
        // 8 ulp of 2 at 256 bits
        assert!(err <= p.pow2(-251));
    }

    #[test]
    fn decimal_strings_drop_trivial_exponent() {
        let x = Float::with_val(64, 1.5);
        assert_eq!(to_decimal_digits(&x, 3), "1.50");
        let y = Float::with_val(64, 0.015625);
        assert!(to_decimal_digits(&y, 3).ends_with("e-2"));
    }
}
