//! Kind-tagged numbers: exact rationals, binary64 reals and binary64 complexes.
//!
//! Binary operations promote along `Exact -> Real -> Complex` and never demote,
//! so an exact computation stays exact until a floating operand enters it.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Exact,
    Real,
    Complex,
}

#[derive(Clone, Debug)]
pub enum Scalar {
    Exact(BigRational),
    Real(f64),
    Complex(Complex64),
}

impl Scalar {
    pub fn kind(&self) -> Kind {
        match self {
            Scalar::Exact(_) => Kind::Exact,
            Scalar::Real(_) => Kind::Real,
            Scalar::Complex(_) => Kind::Complex,
        }
    }

    pub fn int(value: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(value)))
    }

    /// Exact `num/den`. Panics when `den` is zero.
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn zero_of(kind: Kind) -> Self {
        Scalar::zero().promote(kind)
    }

    pub fn one_of(kind: Kind) -> Self {
        Scalar::one().promote(kind)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Real(x) => *x == 0.0,
            Scalar::Complex(z) => z.re == 0.0 && z.im == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Real(x) => *x == 1.0,
            Scalar::Complex(z) => z.re == 1.0 && z.im == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Real(x) => x.is_finite(),
            Scalar::Complex(z) => z.re.is_finite() && z.im.is_finite(),
        }
    }

    /// Converts to `kind` if that is a wider kind; never demotes.
    pub fn promote(&self, kind: Kind) -> Scalar {
        match (self, kind.max(self.kind())) {
            (Scalar::Exact(r), Kind::Real) => Scalar::Real(rational_to_f64(r)),
            (Scalar::Exact(r), Kind::Complex) => {
                Scalar::Complex(Complex64::new(rational_to_f64(r), 0.0))
            }
            (Scalar::Real(x), Kind::Complex) => Scalar::Complex(Complex64::new(*x, 0.0)),
            _ => self.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            _ => None,
        }
    }

    /// Modulus as a binary64 value.
    pub fn abs(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r).abs(),
            Scalar::Real(x) => x.abs(),
            Scalar::Complex(z) => z.norm(),
        }
    }

    /// Real part as a binary64 value.
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Real(x) => *x,
            Scalar::Complex(z) => z.re,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match self.promote(Kind::Complex) {
            Scalar::Complex(z) => z,
            _ => unreachable!(),
        }
    }

    /// Integer power; negative exponents go through one reciprocal.
    pub fn powi(&self, exponent: i64) -> Result<Scalar> {
        if exponent < 0 && self.is_zero() {
            return Err(Error::Domain("negative power of zero".into()));
        }
        let e = i32::try_from(exponent)
            .map_err(|_| Error::InvalidArgument(format!("exponent {exponent} too large")))?;
        Ok(match self {
            Scalar::Exact(r) => Scalar::Exact(Pow::pow(r, e)),
            Scalar::Real(x) => {
                if e < 0 {
                    Scalar::Real(1.0 / x.powi(-e))
                } else {
                    Scalar::Real(x.powi(e))
                }
            }
            Scalar::Complex(z) => {
                if e < 0 {
                    Scalar::Complex(Complex64::new(1.0, 0.0) / z.powi(-e))
                } else {
                    Scalar::Complex(z.powi(e))
                }
            }
        })
    }

    pub fn checked_div(&self, rhs: &Scalar) -> Result<Scalar> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        Ok(self / rhs)
    }

    pub fn recip(&self) -> Result<Scalar> {
        Scalar::one().checked_div(self)
    }

    pub fn exp(&self) -> Scalar {
        match self {
            Scalar::Exact(r) if r.is_zero() => Scalar::one(),
            Scalar::Complex(z) => Scalar::Complex(z.exp()),
            other => Scalar::Real(other.to_f64().exp()),
        }
    }

    pub fn ln(&self) -> Result<Scalar> {
        match self {
            Scalar::Exact(r) if r.is_one() => Ok(Scalar::zero()),
            Scalar::Complex(z) if z.re == 0.0 && z.im == 0.0 => {
                Err(Error::Domain("log of zero".into()))
            }
            Scalar::Complex(z) => Ok(Scalar::Complex(z.ln())),
            other => {
                let x = other.to_f64();
                if x > 0.0 {
                    Ok(Scalar::Real(x.ln()))
                } else {
                    Err(Error::Domain(format!("log of non-positive value {x}")))
                }
            }
        }
    }

    pub fn sin(&self) -> Scalar {
        match self {
            Scalar::Exact(r) if r.is_zero() => Scalar::zero(),
            Scalar::Complex(z) => Scalar::Complex(z.sin()),
            other => Scalar::Real(other.to_f64().sin()),
        }
    }

    pub fn cos(&self) -> Scalar {
        match self {
            Scalar::Exact(r) if r.is_zero() => Scalar::one(),
            Scalar::Complex(z) => Scalar::Complex(z.cos()),
            other => Scalar::Real(other.to_f64().cos()),
        }
    }
}

/// Closest binary64 to an arbitrary-precision rational.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Exact value of a finite binary64.
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Parses `p`, `p/q` or a decimal such as `-0.125` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let num = parse_digits(num)?;
        let den = parse_digits(den)?;
        if den.is_zero() {
            return None;
        }
        BigRational::new(num, den)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        let int = if int.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(int)?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac = if frac.is_empty() {
            BigInt::zero()
        } else {
            parse_digits(frac)?
        };
        BigRational::new(int * &scale + frac, scale)
    } else {
        BigRational::from_integer(parse_digits(body)?)
    };
    Some(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts exact rationals (`3`, `-1/2`, `0.25`) and complexes written
    /// `a+bi`, `a-bi`, `bi` or `i`.
    fn from_str(text: &str) -> Result<Self> {
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::InvalidArgument(format!("cannot parse number '{text}'"));
        let Some(body) = text.strip_suffix('i') else {
            return parse_rational(&text).map(Scalar::Exact).ok_or_else(bad);
        };
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            s => parse_rational(s).ok_or_else(bad)?,
        };
        let re = parse_rational(re).ok_or_else(bad)?;
        Ok(Scalar::Complex(Complex64::new(
            rational_to_f64(&re),
            rational_to_f64(&im),
        )))
    }
}

/// Binary64 rendered with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..16).contains(&exponent) {
        let decimals = (16 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.16e}")
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Real(x) => f.write_str(&format_f64(*x)),
            Scalar::Complex(z) => {
                let sign = if z.im.is_sign_negative() { '-' } else { '+' };
                write!(f, "{}{}{}i", format_f64(z.re), sign, format_f64(z.im.abs()))
            }
        }
    }
}

impl PartialEq for Scalar {
    /// Value equality after promotion to the wider kind.
    fn eq(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let kind = self.kind().max(other.kind());
                match (self.promote(kind), other.promote(kind)) {
                    (Scalar::Real(a), Scalar::Real(b)) => a == b,
                    (Scalar::Complex(a), Scalar::Complex(b)) => a == b,
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl PartialOrd for Scalar {
    /// Orders real-valued scalars; complex values are unordered.
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            (Scalar::Complex(_), _) | (_, Scalar::Complex(_)) => None,
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Self {
        Scalar::int(v)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Real(v)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex(z)
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a $op b),
                    _ => {
                        let kind = self.kind().max(rhs.kind());
                        match (self.promote(kind), rhs.promote(kind)) {
                            (Scalar::Real(a), Scalar::Real(b)) => Scalar::Real(a $op b),
                            (Scalar::Complex(a), Scalar::Complex(b)) => Scalar::Complex(a $op b),
                            _ => unreachable!(),
                        }
                    }
                }
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                &self $op rhs
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);
binary_op!(Div, div, /);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Real(x) => Scalar::Real(-x),
            Scalar::Complex(z) => Scalar::Complex(-z),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |acc, x| acc * x)
    }
}
