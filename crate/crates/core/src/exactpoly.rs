//! Exact q-derivative calculus on polynomials with rational coefficients.
//!
//! Everything here is computed in exact arithmetic and serves as the ground
//! truth for the floating paths in [`crate::qoperator`].

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::jets::TaylorJet;
use crate::qsymbols::{factorial, q_binomial, q_integer, theorem_constant};
use crate::scalar::{parse_rational, Scalar};

/// `c_0 + c_1 x + ... + c_d x^d` over exact rationals; trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

fn exact(q: &BigRational) -> Scalar {
    Scalar::Exact(q.clone())
}

fn unwrap_exact(s: Scalar) -> BigRational {
    match s {
        Scalar::Exact(r) => r,
        other => unreachable!("exact inputs produced {other:?}"),
    }
}

fn check_q(q: &BigRational) -> Result<()> {
    if q.is_one() {
        Err(Error::QIsOne)
    } else {
        Ok(())
    }
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Polynomial::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// `x^m`.
    pub fn monomial(m: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); m + 1];
        coeffs[m] = BigRational::one();
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> BigRational {
        self.coeffs.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Exact value at `x`, by Horner over integers: with `x = a/b` and `L` the
    /// common denominator of the coefficients,
    /// `p(x) = sum (L c_m) a^m b^{d-m} / (L b^d)`, reduced once at the end.
    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let Some(d) = self.degree() else {
            return BigRational::zero();
        };
        let lcm = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let (a, b) = (x.numer(), x.denom());
        let mut acc = BigInt::zero();
        let mut b_pow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            let scaled = c.numer() * (&lcm / c.denom());
            acc = acc * a + scaled * &b_pow;
            b_pow *= b;
        }
        BigRational::new(acc, lcm * Pow::pow(b, d as u32))
    }

    /// Horner evaluation at any scalar kind.
    pub fn eval(&self, x: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(Scalar::zero_of(x.kind()), |acc, c| acc * x + exact(c))
    }

    /// `p^(k)(0) = k! c_k`.
    pub fn derivative_at_zero(&self, k: usize) -> BigRational {
        self.coeff(k) * BigRational::from_integer(factorial(k))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn scale(&self, factor: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Coefficients as an exact jet at center 0 of the given order
    /// (truncating or zero-padding).
    pub fn to_jet(&self, order: usize) -> TaylorJet {
        let coeffs = (0..=order).map(|m| Scalar::Exact(self.coeff(m))).collect();
        TaylorJet::from_coeffs(Scalar::zero(), coeffs).expect("order + 1 coefficients")
    }

    /// Reads back an exact jet centered at 0. Fails on floating coefficients.
    pub fn from_jet(jet: &TaylorJet) -> Result<Polynomial> {
        if !jet.center().is_zero() {
            return Err(Error::InvalidArgument("jet must be centered at 0".into()));
        }
        jet.coeffs()
            .iter()
            .map(|c| {
                c.as_exact()
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument("jet has floating coefficients".into()))
            })
            .collect::<Result<Vec<_>>>()
            .map(Polynomial::new)
    }
}

/// `D_q p`: `x^m -> [m]_q x^{m-1}`. The constant term of the result is
/// `c_1 = p'(0)`, the value the operator takes at the origin.
pub fn poly_qderiv(p: &Polynomial, q: &BigRational) -> Result<Polynomial> {
    check_q(q)?;
    let qs = exact(q);
    Ok(Polynomial::new(
        p.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, c)| c * unwrap_exact(q_integer(m, &qs)))
            .collect(),
    ))
}

/// n-fold application of [`poly_qderiv`].
pub fn poly_qderiv_n(p: &Polynomial, q: &BigRational, n: usize) -> Result<Polynomial> {
    check_q(q)?;
    (0..n).try_fold(p.clone(), |acc, _| poly_qderiv(&acc, q))
}

/// Closed form of `D_q^n p(x)` for `x != 0`:
/// `(1-q)^{-n} x^{-n} sum_{k=0}^{n} (-1)^k q^{-k(n-1)+C(k,2)} [n k]_q p(q^k x)`.
///
/// `q = 0` is rejected (the weights carry negative powers of `q`); use
/// [`qzero_nth`] there.
pub fn poly_closed_form(
    p: &Polynomial,
    q: &BigRational,
    n: usize,
    x: &BigRational,
) -> Result<BigRational> {
    check_q(q)?;
    if q.is_zero() {
        return Err(Error::Domain("closed form needs q != 0; use the q = 0 remainder form".into()));
    }
    if x.is_zero() {
        return Err(Error::Domain("closed form is only valid for x != 0".into()));
    }
    let n_i = n as i64;
    let qs = exact(q);
    let mut sum = BigRational::zero();
    let mut qk_x = x.clone();
    for k in 0..=n_i {
        let exponent = -k * (n_i - 1) + k * (k - 1) / 2;
        let weight = Pow::pow(q, exponent as i32) * unwrap_exact(q_binomial(n, k, &qs));
        let term = weight * p.eval_exact(&qk_x);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        qk_x *= q;
    }
    let denom = Pow::pow(&(BigRational::one() - q), n as i32) * Pow::pow(x, n as i32);
    Ok(sum / denom)
}

/// `D_0^n p(x) = x^{-n} (p(x) - sum_{k<n} p^(k)(0)/k! x^k)` for `x != 0`.
pub fn qzero_nth(p: &Polynomial, n: usize, x: &BigRational) -> Result<BigRational> {
    if x.is_zero() {
        return Err(Error::Domain(
            "the q = 0 remainder form is only valid for x != 0; use poly_theorem_value".into(),
        ));
    }
    let head = Polynomial::new((0..n).map(|k| p.coeff(k)).collect());
    let remainder = p.eval_exact(x) - head.eval_exact(x);
    Ok(remainder / Pow::pow(x, n as i32))
}

/// `c_n(q) p^(n)(0)`, the value of `D_q^n p` at the origin.
pub fn poly_theorem_value(p: &Polynomial, q: &BigRational, n: usize) -> Result<BigRational> {
    let c = unwrap_exact(theorem_constant(n, &exact(q))?);
    Ok(c * p.derivative_at_zero(n))
}

impl fmt::Display for Polynomial {
    /// Space-free `c*x^m` terms in ascending degree, e.g. `5-2*x+1/2*x^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            f.write_str(sign)?;
            let coeff = if mag.is_integer() {
                mag.numer().to_string()
            } else {
                format!("{}/{}", mag.numer(), mag.denom())
            };
            match m {
                0 => f.write_str(&coeff)?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{coeff}*")?;
                    }
                    f.write_str("x")?;
                    if m > 1 {
                        write!(f, "^{m}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}

impl FromStr for Polynomial {
    type Err = Error;

    /// Parses sums of terms `c*x^m`, `c*x`, `x^m`, `x` or `c`, where `c` is an
    /// integer, `p/q` or decimal; e.g. `1/2*x^3-2*x+5`.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |why: &str| Error::InvalidArgument(format!("bad polynomial '{text}': {why}"));
        if text.is_empty() {
            return Err(bad("empty"));
        }
        // Split into signed terms at top-level '+' / '-'.
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in text.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&text[start..i]);
                start = i;
            }
        }
        terms.push(&text[start..]);

        let mut coeffs: Vec<BigRational> = Vec::new();
        for term in terms {
            let (negative, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            if body.is_empty() {
                return Err(bad("dangling sign"));
            }
            let (coeff_text, power_text) = match body.find('x') {
                None => (body, None),
                Some(pos) => {
                    let coeff = &body[..pos];
                    let coeff = if coeff.is_empty() {
                        "1"
                    } else {
                        coeff.strip_suffix('*').ok_or_else(|| bad("expected '*' before x"))?
                    };
                    let rest = &body[pos + 1..];
                    let power = if rest.is_empty() {
                        "1"
                    } else {
                        rest.strip_prefix('^').ok_or_else(|| bad("expected '^' after x"))?
                    };
                    (coeff, Some(power))
                }
            };
            let mut coeff = parse_rational(coeff_text).ok_or_else(|| bad("bad coefficient"))?;
            if coeff_text.starts_with(['-', '+']) {
                return Err(bad("unexpected sign"));
            }
            if negative {
                coeff = -coeff;
            }
            let power: usize = match power_text {
                None => 0,
                Some(p) if !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()) => {
                    p.parse().map_err(|_| bad("exponent too large"))?
                }
                Some(_) => return Err(bad("exponent must be a non-negative integer")),
            };
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigRational::zero());
            }
            coeffs[power] += coeff;
        }
        Ok(Polynomial::new(coeffs))
    }
}
