//! Seeded random sampling of rationals and polynomials, and the randomized
//! exact identity sweeps built on them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::Result;
use crate::exactpoly::{
    poly_closed_form, poly_qderiv_n, poly_theorem_value, qzero_nth, Polynomial,
};
use crate::qsymbols::{alternating_qbinomial_sum, q_binomial, q_pochhammer};
use crate::scalar::Scalar;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Uniform numerator in `[-bound*den, bound*den]` over a denominator in
/// `1..=max_den`, so the value lies in `[-bound, bound]`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64, max_den: i64) -> BigRational {
    let den = rng.gen_range(1..=max_den);
    let num = rng.gen_range(-bound * den..=bound * den);
    rat(num, den)
}

/// Random rational `q` in `[-3, 3]` other than 1.
pub fn random_q<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    loop {
        let q = random_rational(rng, 3, 9);
        if !q.is_one() {
            return q;
        }
    }
}

/// Random `q` with `|q| != 1` and `q != 0`.
pub fn random_q_off_unit_circle<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    loop {
        let q = random_q(rng);
        if !q.abs().is_one() && !q.is_zero() {
            return q;
        }
    }
}

pub fn random_nonzero_rational<R: Rng + ?Sized>(rng: &mut R, bound: i64, max_den: i64) -> BigRational {
    loop {
        let x = random_rational(rng, bound, max_den);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Polynomial of exact degree `degree` with coefficients in `[-bound, bound]`.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, degree: usize, bound: i64) -> Polynomial {
    let mut coeffs: Vec<BigRational> = (0..=degree).map(|_| random_rational(rng, bound, 12)).collect();
    if coeffs[degree].is_zero() {
        coeffs[degree] = BigRational::one();
    }
    Polynomial::new(coeffs)
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// `(a;q)_n = sum_k q^{C(k,2)} [n k]_q (-a)^k`.
    Gauss,
    /// `sum_k (-1)^k q^{k(m-n+1)+C(k,2)} [n k]_q = (q^{m-n+1};q)_n`, plus the
    /// `(q;q)_n delta_{mn}` specialization for every `m <= n`.
    SumDelta,
    /// `D_{-1}^2 p = 0` and `(D_{-1}^n p)(0) = 0` for `n >= 2`.
    QMinusOne,
    /// Closed-form `k`-sum equals the iterated q-derivative at `x != 0`.
    ClosedForm,
}

impl Identity {
    pub const ALL: [Identity; 4] = [
        Identity::Gauss,
        Identity::SumDelta,
        Identity::QMinusOne,
        Identity::ClosedForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Gauss => "gauss",
            Identity::SumDelta => "sumdelta",
            Identity::QMinusOne => "qminus1",
            Identity::ClosedForm => "closedform",
        }
    }

    pub fn from_name(name: &str) -> Option<Identity> {
        Identity::ALL.into_iter().find(|i| i.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trial {
    pub description: String,
    pub holds: bool,
}

/// Draws one random instance of `identity` and checks it exactly.
pub fn identity_trial<R: Rng + ?Sized>(identity: Identity, rng: &mut R) -> Result<Trial> {
    match identity {
        Identity::Gauss => {
            let n = rng.gen_range(0..=12usize);
            let q = Scalar::Exact(random_q_off_unit_circle(rng));
            let a = Scalar::Exact(random_rational(rng, 5, 9));
            let lhs = q_pochhammer(&a, &q, n);
            let neg_a = -&a;
            let mut rhs = Scalar::zero();
            for k in 0..=n {
                let k_i = k as i64;
                rhs = rhs
                    + q.powi(k_i * (k_i - 1) / 2)? * q_binomial(n, k_i, &q) * neg_a.powi(k_i)?;
            }
            Ok(Trial {
                description: format!("a={a} q={q} n={n}"),
                holds: lhs == rhs,
            })
        }
        Identity::SumDelta => {
            let n = rng.gen_range(1..=10usize);
            let m = rng.gen_range(0..=2 * n);
            let q = Scalar::Exact(random_q(rng));
            let mut holds = true;
            if !(q.is_zero() && m + 1 < n) {
                let shifted = q.powi(m as i64 - n as i64 + 1)?;
                holds &= alternating_qbinomial_sum(m, n, &q)? == q_pochhammer(&shifted, &q, n);
            }
            for m in 0..=n {
                if q.is_zero() && m + 1 < n {
                    continue;
                }
                let want = if m == n { q_pochhammer(&q, &q, n) } else { Scalar::zero() };
                holds &= alternating_qbinomial_sum(m, n, &q)? == want;
            }
            Ok(Trial {
                description: format!("q={q} n={n} m={m}"),
                holds,
            })
        }
        Identity::QMinusOne => {
            let degree = rng.gen_range(0..=8usize);
            let p = random_polynomial(rng, degree, 10);
            let q = rat(-1, 1);
            let mut holds = poly_qderiv_n(&p, &q, 2)?.is_zero();
            for n in 2..=8 {
                holds &= poly_theorem_value(&p, &q, n)?.is_zero();
            }
            Ok(Trial {
                description: format!("p={p}"),
                holds,
            })
        }
        Identity::ClosedForm => {
            let degree = rng.gen_range(1..=8usize);
            let p = random_polynomial(rng, degree, 10);
            let n = rng.gen_range(1..=degree);
            let x = random_nonzero_rational(rng, 3, 9);
            let q = loop {
                let q = random_q(rng);
                if !q.is_zero() {
                    break q;
                }
            };
            let iterate = poly_qderiv_n(&p, &q, n)?.eval_exact(&x);
            let mut holds = poly_closed_form(&p, &q, n, &x)? == iterate;
            let zero = BigRational::zero();
            holds &= qzero_nth(&p, n, &x)? == poly_qderiv_n(&p, &zero, n)?.eval_exact(&x);
            Ok(Trial {
                description: format!("p={p} q={q} n={n} x={x}"),
                holds,
            })
        }
    }
}
