use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

/// Numeric literal: an exact rational whenever the value fits in `i64/i64`,
/// otherwise the nearest double.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Number {
    Rational(Rational64),
    Real(f64),
}

impl Number {
    pub fn int(v: i64) -> Number {
        Number::Rational(Rational64::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Number {
        Number::Rational(Rational64::new(num, den))
    }

    /// Parses a decimal literal such as `12`, `0.25` or `1.5e-3`.
    ///
    /// Literals that do not fit an `i64` rational fall back to `f64`; the
    /// fallback is canonicalized so that printing and re-parsing is stable.
    pub fn from_literal(text: &str) -> Option<Number> {
        if let Some(r) = exact_decimal(text) {
            return Some(Number::Rational(r));
        }
        let value: f64 = text.parse().ok()?;
        if !value.is_finite() {
            return None;
        }
        Some(Number::from_f64(value))
    }

    fn from_f64(value: f64) -> Number {
        match exact_decimal(&format!("{value:e}")) {
            Some(r) => Number::Rational(r),
            None => Number::Real(value),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Real(v) => v,
        }
    }

    pub fn is_zero(self) -> bool {
        match self {
            Number::Rational(r) => r.is_zero(),
            Number::Real(v) => v == 0.0,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Number::Rational(r) => r.is_one(),
            Number::Real(v) => v == 1.0,
        }
    }

    pub fn is_minus_one(self) -> bool {
        match self {
            Number::Rational(r) => r == -Rational64::one(),
            Number::Real(v) => v == -1.0,
        }
    }

    pub fn is_negative(self) -> bool {
        match self {
            Number::Rational(r) => r.is_negative(),
            Number::Real(v) => v < 0.0,
        }
    }

    pub fn as_integer(self) -> Option<i64> {
        match self {
            Number::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    /// True when the printed form is a bare unsigned integer token.
    pub(crate) fn is_atomic(self) -> bool {
        match self {
            Number::Rational(r) => r.is_integer() && !r.is_negative(),
            Number::Real(v) => v >= 0.0,
        }
    }

    // Folding is exact-only: reals are never combined, so folded constants
    // always print back to the same literal.
    pub(crate) fn checked_add(self, other: Number) -> Option<Number> {
        self.both_rational(other, |a, b| a.checked_add(&b))
    }

    pub(crate) fn checked_sub(self, other: Number) -> Option<Number> {
        self.both_rational(other, |a, b| a.checked_sub(&b))
    }

    pub(crate) fn checked_mul(self, other: Number) -> Option<Number> {
        self.both_rational(other, |a, b| a.checked_mul(&b))
    }

    pub(crate) fn checked_div(self, other: Number) -> Option<Number> {
        if other.is_zero() {
            return None;
        }
        self.both_rational(other, |a, b| a.checked_div(&b))
    }

    pub(crate) fn checked_neg(self) -> Option<Number> {
        match self {
            Number::Rational(r) => {
                let num = r.numer().checked_neg()?;
                Some(Number::Rational(Rational64::new_raw(num, *r.denom())))
            }
            Number::Real(v) => Some(Number::Real(-v)),
        }
    }

    pub(crate) fn checked_powi(self, exp: i64) -> Option<Number> {
        let Number::Rational(base) = self else {
            return None;
        };
        if exp.unsigned_abs() > 64 || (base.is_zero() && exp < 0) {
            return None;
        }
        let mut acc = Rational64::one();
        for _ in 0..exp.unsigned_abs() {
            acc = acc.checked_mul(&base)?;
        }
        if exp < 0 {
            acc = Rational64::one().checked_div(&acc)?;
        }
        Some(Number::Rational(acc))
    }

    fn both_rational(
        self,
        other: Number,
        op: impl FnOnce(Rational64, Rational64) -> Option<Rational64>,
    ) -> Option<Number> {
        match (self, other) {
            (Number::Rational(a), Number::Rational(b)) => op(a, b).map(Number::Rational),
            _ => None,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Number::Rational(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Number::Real(v) => write!(f, "{v:e}"),
        }
    }
}

fn exact_decimal(text: &str) -> Option<Rational64> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = match mantissa.find('.') {
        Some(i) => (&mantissa[..i], &mantissa[i + 1..]),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let mut digits: i64 = 0;
    for c in int_part.chars().chain(frac_part.chars()) {
        let d = c.to_digit(10)? as i64;
        digits = digits.checked_mul(10)?.checked_add(d)?;
    }
    if negative {
        digits = -digits;
    }
    let scale = exponent.checked_sub(frac_part.len() as i32)?;
    let pow10 = 10i64.checked_pow(scale.unsigned_abs())?;
    if scale >= 0 {
        Some(Rational64::from_integer(digits.checked_mul(pow10)?))
    } else {
        Some(Rational64::new(digits, pow10))
    }
}
