//! Number type shared by the decision procedures.
//!
//! Inputs given as rationals ("3/10", "0.25") stay exact end to end; inputs
//! given as floating point carry a tolerance that every strict-inequality
//! decision goes through. Mixing the two demotes the result to approximate.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Tolerance for strict-inequality decisions on approximate values.
pub const FLOAT_TOL: f64 = 1e-9;

/// Sign of a quantity after tolerance handling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// An exact rational or an approximate float.
#[derive(Debug, Clone)]
pub enum Scalar {
    Exact(BigRational),
    Approx(f64),
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseScalarError {
    #[error("empty number")]
    Empty,
    #[error("invalid number `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact `num/den`. Panics if `den == 0`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        Scalar::Exact(r)
    }

    pub fn from_f64(x: f64) -> Self {
        Scalar::Approx(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Scalar::Approx(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Approx(_) => None,
        }
    }

    /// Exact value of this scalar as a rational. Floats convert via their
    /// exact binary expansion.
    pub fn to_rational(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Approx(x) => BigRational::from_float(*x)
                .unwrap_or_else(|| panic!("non-finite value {x} has no rational form")),
        }
    }

    /// Sign with the default tolerance for approximate values.
    pub fn sign(&self) -> Sign {
        self.sign_with_tol(FLOAT_TOL)
    }

    pub fn sign_with_tol(&self, tol: f64) -> Sign {
        match self {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    Sign::Zero
                } else if r.is_positive() {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            }
            Scalar::Approx(x) => {
                if x.abs() <= tol {
                    Sign::Zero
                } else if *x > 0.0 {
                    Sign::Positive
                } else {
                    Sign::Negative
                }
            }
        }
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.sign() == Sign::Positive
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.sign() == Sign::Negative
    }

    /// Numeric comparison; exact when both sides are exact.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    /// `self < other` as a strict-inequality decision (tolerance-aware).
    pub fn strictly_less(&self, other: &Scalar) -> bool {
        (self - other).sign() == Sign::Negative
    }

    /// Parses "p/q" or a plain decimal such as "0.25" into an exact rational.
    pub fn parse_exact(text: &str) -> Result<Scalar, ParseScalarError> {
        let s = text.trim();
        if s.is_empty() {
            return Err(ParseScalarError::Empty);
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim())
                .map_err(|_| ParseScalarError::Invalid(text.to_string()))?;
            let d = BigInt::from_str(den.trim())
                .map_err(|_| ParseScalarError::Invalid(text.to_string()))?;
            if d.is_zero() {
                return Err(ParseScalarError::ZeroDenominator(text.to_string()));
            }
            return Ok(Scalar::Exact(BigRational::new(n, d)));
        }
        parse_decimal(s).ok_or_else(|| ParseScalarError::Invalid(text.to_string()))
    }

    pub fn sum<'a>(values: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
        values.into_iter().fold(Scalar::zero(), |acc, v| &acc + v)
    }
}

fn parse_decimal(s: &str) -> Option<Scalar> {
    let (sign, digits) = match s.strip_prefix('-') {
        Some(rest) => (-1i64, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let numerator = BigInt::from_str(if joined.is_empty() { "0" } else { &joined }).ok()?;
    let denominator = BigInt::from(10u32).pow(frac_part.len() as u32);
    Some(Scalar::Exact(
        BigRational::new(numerator, denominator) * BigRational::from_integer(BigInt::from(sign)),
    ))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Approx(x) => write!(f, "{x}"),
        }
    }
}

/// Strict structural equality: exact values compare as rationals, approximate
/// values bitwise; mixed representations are never equal.
impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Approx(a), Scalar::Approx(b)) => a == b,
            _ => false,
        }
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => Scalar::Approx(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl std::ops::$trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, +);
scalar_binop!(Sub, sub, -);
scalar_binop!(Mul, mul, *);
scalar_binop!(Div, div, /);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Approx(x) => Scalar::Approx(-x),
        }
    }
}
