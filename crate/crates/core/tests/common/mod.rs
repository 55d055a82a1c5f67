//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use qcalc_core::expr::parse;
use qcalc_core::{PointFn, Polynomial};
use rand::Rng;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn pow(q: &BigRational, e: i64) -> BigRational {
    let mut out = BigRational::one();
    let base = if e < 0 { q.recip() } else { q.clone() };
    for _ in 0..e.unsigned_abs() {
        out *= &base;
    }
    out
}

/// Coefficients of `[n k]_q` by counting `k`-subsets of `{0..n-1}` by the
/// sum of their elements minus `C(k,2)`.
pub fn gaussian_by_subsets(n: usize, k: usize) -> Vec<u64> {
    if k > n {
        return Vec::new();
    }
    let mut counts = vec![0u64; k * (n - k) + 1];
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let sum: usize = (0..n).filter(|i| mask & (1 << i) != 0).sum();
        counts[sum - k * k.saturating_sub(1) / 2] += 1;
    }
    counts
}

pub fn eval_counts(counts: &[u64], q: &BigRational) -> BigRational {
    counts
        .iter()
        .enumerate()
        .map(|(j, c)| BigRational::from_integer(BigInt::from(*c)) * pow(q, j as i64))
        .sum()
}

/// `prod_{k<n} (1 - a q^k)` term by term.
pub fn pochhammer(a: &BigRational, q: &BigRational, n: usize) -> BigRational {
    (0..n).map(|k| BigRational::one() - a * pow(q, k as i64)).product()
}

/// `[m]_q = 1 + q + ... + q^{m-1}`, by Horner.
pub fn q_int(m: usize, q: &BigRational) -> BigRational {
    (0..m).fold(BigRational::zero(), |acc, _| acc * q + BigRational::one())
}

/// `D_q` on coefficient vectors via `D_q x^m = [m]_q x^{m-1}`.
pub fn qderiv_coeffs(coeffs: &[BigRational], q: &BigRational) -> Vec<BigRational> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| c * q_int(m, q))
        .collect()
}

pub fn qderiv_n_coeffs(p: &Polynomial, q: &BigRational, n: usize) -> Vec<BigRational> {
    let mut c = p.coeffs().to_vec();
    for _ in 0..n {
        c = qderiv_coeffs(&c, q);
    }
    c
}

pub fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// `f^(n)(0)/n! (q;q)_n/(1-q)^n`, written as `a_n prod_{m<=n} [m]_q`.
pub fn theorem_oracle(p: &Polynomial, q: &BigRational, n: usize) -> BigRational {
    let a_n = p.coeff(n);
    (1..=n).fold(a_n, |acc, m| acc * q_int(m, q))
}

/// The four reference functions with the radius each needs.
pub const TEST_FUNCTIONS: [(&str, Option<f64>); 4] = [
    ("exp(x)", None),
    ("sin(x)", None),
    ("log(1+x)", Some(1.0)),
    ("1/(1-x)", Some(1.0)),
];

pub fn test_function(text: &str, radius: Option<f64>) -> PointFn {
    parse(text).unwrap().to_point_fn(radius).unwrap()
}

/// Random expression, smooth on the whole real line.
pub fn random_smooth_expr<R: Rng>(rng: &mut R, depth: u32) -> String {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => "x".to_string(),
            1 => format!("{}", rng.gen_range(1..=9)),
            _ => format!("{}/{}*x", rng.gen_range(-9..=9), rng.gen_range(1..=5)),
        };
    }
    let a = random_smooth_expr(rng, depth - 1);
    match rng.gen_range(0..9) {
        0 => format!("({a})+({})", random_smooth_expr(rng, depth - 1)),
        1 => format!("({a})-({})", random_smooth_expr(rng, depth - 1)),
        2 => format!("({a})*({})", random_smooth_expr(rng, depth - 1)),
        3 => format!("({a})/(2+({})^2)", random_smooth_expr(rng, depth - 1)),
        4 => format!("sin({a})"),
        5 => format!("cos({a})"),
        6 => format!("exp(({a})/4)"),
        7 => format!("log(1+({a})^2)"),
        _ => format!("({a})^{}", rng.gen_range(0..=3)),
    }
}

/// Random token soup over the grammar's alphabet plus stray characters.
pub fn random_soup<R: Rng>(rng: &mut R) -> String {
    const TOKENS: [&str; 24] = [
        "x", "1", "0", "2.5", "1/3", "+", "-", "*", "/", "^", "(", ")", "exp(", "log(", "sin(",
        "cos(", "^-2", "^99999", " ", ".", "e", "ln(", "#", "0.",
    ];
    let len = rng.gen_range(0..24);
    (0..len).map(|_| TOKENS[rng.gen_range(0..TOKENS.len())]).collect()
}

/// A valid expression with a few random characters deleted, duplicated or replaced.
pub fn random_mutation<R: Rng>(rng: &mut R) -> String {
    const ALPHABET: &[u8] = b"x0123456789.+-*/^() esxpinlogc";
    let mut chars: Vec<char> = random_smooth_expr(rng, 3).chars().collect();
    for _ in 0..rng.gen_range(0..=3) {
        if chars.is_empty() {
            break;
        }
        let i = rng.gen_range(0..chars.len());
        match rng.gen_range(0..3) {
            0 => {
                chars.remove(i);
            }
            1 => chars.insert(i, chars[i]),
            _ => chars[i] = ALPHABET[rng.gen_range(0..ALPHABET.len())] as char,
        }
    }
    chars.into_iter().collect()
}
