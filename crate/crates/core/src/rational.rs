//! Exact rationals and the numeric backend abstraction.

use core::fmt::Debug;
use core::ops::Neg;

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, Pow, ToPrimitive};
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Numeric backend shared by the metric computations.
///
/// Implemented for [`Rational`] (exact) and `f64` (fast, for large graphs).
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Neg<Output = Self> + FromPrimitive + ToPrimitive
{
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in backend")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// True when the backend computes without rounding.
    fn is_exact() -> bool;

    /// Equality used when cross-checking two algebraic routes to one value.
    fn agrees_with(&self, other: &Self) -> bool;
}

impl Scalar for Rational {
    fn is_exact() -> bool {
        true
    }

    fn agrees_with(&self, other: &Self) -> bool {
        self == other
    }
}

impl Scalar for f64 {
    fn is_exact() -> bool {
        false
    }

    fn agrees_with(&self, other: &Self) -> bool {
        let scale = libm::fmax(1.0, libm::fmax(libm::fabs(*self), libm::fabs(*other)));
        libm::fabs(self - other) <= 1e-12 * scale
    }
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid decimal literal `{0}`")]
pub struct ParseDecimalError(pub alloc::string::String);

/// Parses a plain decimal literal (`-12`, `3.25`, `.5`, `1e-3`) into an exact
/// rational.
pub fn parse_decimal(text: &str) -> Result<Rational, ParseDecimalError> {
    let err = || ParseDecimalError(text.into());
    let s = text.trim();
    let (negative, body) = match s.as_bytes().first() {
        Some(b'-') => (true, &s[1..]),
        Some(b'+') => (false, &s[1..]),
        _ => (false, s),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = body[pos + 1..].parse().map_err(|_| err())?;
            (&body[..pos], exp)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let mut digits = alloc::string::String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let mut numer = BigInt::from_str_radix(&digits, 10).map_err(|_| err())?;
    if negative {
        numer = -numer;
    }
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(numer * Pow::pow(&ten, scale as u32))
    } else {
        Rational::new(numer, Pow::pow(&ten, scale.unsigned_abs()))
    };
    Ok(value)
}

/// Accepts either a decimal literal or a fraction `p/q` (as written by the
/// exact output mode).
pub fn parse_rational(text: &str) -> Result<Rational, ParseDecimalError> {
    let Some((num, den)) = text.split_once('/') else {
        return parse_decimal(text);
    };
    let err = || ParseDecimalError(text.into());
    let num = parse_decimal(num)?;
    let den = parse_decimal(den)?;
    if den == Rational::from_integer(BigInt::from(0)) {
        return Err(err());
    }
    Ok(num / den)
}

/// Exact rational for a finite float (every finite `f64` is a dyadic rational).
pub fn from_f64(value: f64) -> Option<Rational> {
    Rational::from_float(value)
}
