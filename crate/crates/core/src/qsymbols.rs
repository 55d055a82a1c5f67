//! q-Pochhammer symbols, Gaussian binomial coefficients and the constant
//! `c_n(q) = (q;q)_n / ((1-q)^n n!)` that multiplies `f^(n)(0)` in the
//! value of `D_q^n f` at the origin.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Polynomial in `q` with arbitrary-precision integer coefficients,
/// indexed by power. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        IntPolynomial::default()
    }

    pub fn one() -> Self {
        IntPolynomial::new(vec![BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Horner evaluation; the result has the kind of `q`.
    pub fn eval(&self, q: &Scalar) -> Scalar {
        let zero = Scalar::zero_of(q.kind());
        self.coeffs.iter().rev().fold(zero, |acc, c| {
            acc * q + Scalar::Exact(BigRational::from_integer(c.clone()))
        })
    }

    fn shifted_add(&self, other: &IntPolynomial, shift: usize) -> IntPolynomial {
        let len = self.coeffs.len().max(other.coeffs.len() + shift);
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            out[i + shift] += c;
        }
        IntPolynomial::new(out)
    }
}

/// `(a;q)_n = (1-a)(1-aq)...(1-aq^{n-1})`; the empty product is 1.
pub fn q_pochhammer(a: &Scalar, q: &Scalar, n: usize) -> Scalar {
    let kind = a.kind().max(q.kind());
    let one = Scalar::one_of(kind);
    let mut product = one.clone();
    let mut term = a.promote(kind);
    for _ in 0..n {
        product = product * (&one - &term);
        term = term * q;
    }
    product
}

/// Gaussian polynomial `[n k]` via the q-Pascal rule
/// `[n k] = [n-1 k-1] + q^k [n-1 k]`. Zero outside `0 <= k <= n`.
pub fn gaussian_binomial_poly(n: usize, k: i64) -> IntPolynomial {
    let Ok(k) = usize::try_from(k) else {
        return IntPolynomial::zero();
    };
    if k > n {
        return IntPolynomial::zero();
    }
    // row[j] holds [m j] for the current m; only j <= k is needed.
    let mut row = vec![IntPolynomial::zero(); k + 1];
    row[0] = IntPolynomial::one();
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = row[j - 1].shifted_add(&row[j], j);
        }
    }
    row.swap_remove(k)
}

/// `[n k]_q`, evaluated from the Gaussian polynomial so that `q = 0` and
/// `q = -1` need no special handling.
pub fn q_binomial(n: usize, k: i64, q: &Scalar) -> Scalar {
    gaussian_binomial_poly(n, k).eval(q)
}

/// `[m]_q = 1 + q + ... + q^{m-1}`.
pub fn q_integer(m: usize, q: &Scalar) -> Scalar {
    let one = Scalar::one_of(q.kind());
    let mut sum = Scalar::zero_of(q.kind());
    let mut power = one;
    for _ in 0..m {
        sum = sum + &power;
        power = power * q;
    }
    sum
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial(n: usize, q: &Scalar) -> Scalar {
    (1..=n).fold(Scalar::one_of(q.kind()), |acc, m| acc * q_integer(m, q))
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, m| acc * BigInt::from(m))
}

pub(crate) fn reject_q_one(q: &Scalar) -> Result<()> {
    if q.is_one() {
        Err(Error::QIsOne)
    } else {
        Ok(())
    }
}

/// `c_n(q) = (q;q)_n / ((1-q)^n n!)`, computed as `[n]_q! / n!` so it stays
/// well conditioned as `q` approaches 1.
pub fn theorem_constant(n: usize, q: &Scalar) -> Result<Scalar> {
    reject_q_one(q)?;
    let nfact = Scalar::Exact(BigRational::from_integer(factorial(n)));
    Ok(q_factorial(n, q) / nfact)
}

/// `sum_{k=0}^{n} (-1)^k q^{k(m-n+1) + C(k,2)} [n k]_q`, term by term.
///
/// Equals `(q^{m-n+1};q)_n`, hence `(q;q)_n` when `m = n` and zero for `m < n`.
pub fn alternating_qbinomial_sum(m: usize, n: usize, q: &Scalar) -> Result<Scalar> {
    let shift = m as i64 - n as i64 + 1;
    if q.is_zero() && shift < 0 {
        return Err(Error::Domain(format!(
            "q = 0 with m = {m} < n - 1 = {} needs a negative power of zero",
            n - 1
        )));
    }
    let mut sum = Scalar::zero_of(q.kind());
    for k in 0..=n {
        let k_i = k as i64;
        let exponent = k_i * shift + k_i * (k_i - 1) / 2;
        let term = q.powi(exponent)? * q_binomial(n, k_i, q);
        sum = if k % 2 == 0 { sum + term } else { sum - term };
    }
    Ok(sum)
}
