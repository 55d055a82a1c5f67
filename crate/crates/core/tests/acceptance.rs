//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//!
//! Run with `cargo test -p qcalc-core --test acceptance`.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use qcalc_core::exactpoly::{poly_closed_form, poly_qderiv_n, poly_theorem_value, qzero_nth};
use qcalc_core::expr::parse;
use qcalc_core::qoperator::{
    default_pass_tolerance, qderiv_n_value, qderiv_value, theorem_verify, verify_grid,
};
use qcalc_core::qseries::series_qderiv_n;
use qcalc_core::qsymbols::{alternating_qbinomial_sum, q_binomial, q_pochhammer};
use qcalc_core::random::{
    identity_trial, random_nonzero_rational, random_polynomial, random_q, random_rational,
    random_q_off_unit_circle, Identity,
};
use qcalc_core::{Kind, Polynomial, PowerSeries, Scalar, VerifyOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

const CORPUS_SEED: u64 = 0x5eed_0001;
const CORPUS_SIZE: usize = 200;
const RANDOM_Q_COUNT: usize = 20;
const X_PER_CASE: usize = 5;
const IDENTITY_TRIALS: usize = 500;
const Q_MINUS_ONE_REL: f64 = 1e-12;
const SLOPE_SPREAD: f64 = 2.0;
const SERIES_ORDER: usize = 16;
const COMPLEX_REL: f64 = 1e-6;
const FUZZ_INPUTS: usize = 1000;
const FD_EXPRESSIONS: usize = 50;
const FD_REL: f64 = 1e-6;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Corpus {
    polys: Vec<Polynomial>,
    qs: Vec<BigRational>,
    xs: ChaCha8Rng,
}

fn corpus() -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let polys = (0..CORPUS_SIZE)
        .map(|_| {
            let degree = rng.gen_range(1..=8);
            random_polynomial(&mut rng, degree, 10)
        })
        .collect();
    let mut qs = vec![rat(0, 1), rat(-1, 1), rat(2, 1), rat(-1, 2), rat(3, 7), rat(-5, 3)];
    qs.extend((0..RANDOM_Q_COUNT).map(|_| random_q(&mut rng)));
    Corpus {
        polys,
        qs,
        xs: ChaCha8Rng::seed_from_u64(CORPUS_SEED + 1),
    }
}

fn degree(p: &Polynomial) -> usize {
    p.degree().unwrap_or(0)
}

fn exact_theorem_suite(c: &Corpus) -> Outcome {
    let mut checks = 0;
    let mut bad = Vec::new();
    for p in &c.polys {
        for q in &c.qs {
            for n in 1..=degree(p) {
                let lhs = poly_qderiv_n(p, q, n).unwrap().coeff(0);
                let oracle = qderiv_n_coeffs(p, q, n)[0].clone();
                let value = poly_theorem_value(p, q, n).unwrap();
                let predicted = theorem_oracle(p, q, n);
                checks += 1;
                if lhs != oracle || value != predicted || lhs != value {
                    bad.push(format!("p={p} q={q} n={n}"));
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{checks} exact checks, mismatches {bad:?}"))
}

fn closed_form_suite(c: &mut Corpus) -> Outcome {
    let mut checks = 0;
    let mut bad = Vec::new();
    for p in &c.polys {
        for q in c.qs.iter().filter(|q| !q.is_zero()) {
            for _ in 0..X_PER_CASE {
                let x = random_nonzero_rational(&mut c.xs, 3, 9);
                for n in 1..=degree(p) {
                    let want = horner(&qderiv_n_coeffs(p, q, n), &x);
                    checks += 1;
                    if poly_closed_form(p, q, n, &x).unwrap() != want {
                        bad.push(format!("p={p} q={q} n={n} x={x}"));
                    }
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{checks} exact checks, mismatches {bad:?}"))
}

fn q_zero_suite(c: &mut Corpus) -> Outcome {
    let zero = BigRational::zero();
    let mut checks = 0;
    let mut bad = Vec::new();
    for p in &c.polys {
        for _ in 0..X_PER_CASE {
            let x = random_nonzero_rational(&mut c.xs, 3, 9);
            for n in 1..=degree(p) {
                let want = horner(&qderiv_n_coeffs(p, &zero, n), &x);
                checks += 1;
                if qzero_nth(p, n, &x).unwrap() != want {
                    bad.push(format!("p={p} n={n} x={x}"));
                }
            }
        }
    }
    Outcome::new(bad.is_empty(), format!("{checks} exact checks, mismatches {bad:?}"))
}

fn identity_suite() -> Outcome {
    let counts: Vec<Vec<Vec<u64>>> = (0..=12)
        .map(|n| (0..=n).map(|k| gaussian_by_subsets(n, k)).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0004);
    let mut failures = Vec::new();

    for id in [Identity::Gauss, Identity::SumDelta] {
        for _ in 0..IDENTITY_TRIALS {
            let trial = identity_trial(id, &mut rng).unwrap();
            if !trial.holds {
                failures.push(format!("{}: {}", id.name(), trial.description));
            }
        }
    }

    // Cross-check against the subset-count Gaussian coefficients.
    for _ in 0..IDENTITY_TRIALS {
        let n = rng.gen_range(0..=12usize);
        let q = random_q_off_unit_circle(&mut rng);
        let a = random_rational(&mut rng, 5, 9);
        let gauss: BigRational = (0..=n)
            .map(|k| {
                let k_i = k as i64;
                pow(&q, k_i * (k_i - 1) / 2) * eval_counts(&counts[n][k], &q) * pow(&-&a, k_i)
            })
            .sum();
        let lib = q_pochhammer(&Scalar::Exact(a.clone()), &Scalar::Exact(q.clone()), n);
        if lib != Scalar::Exact(gauss.clone()) || gauss != pochhammer(&a, &q, n) {
            failures.push(format!("gauss oracle: a={a} q={q} n={n}"));
        }
    }
    for _ in 0..IDENTITY_TRIALS {
        let n = rng.gen_range(1..=12usize);
        let q = random_q(&mut rng);
        let qs = Scalar::Exact(q.clone());
        for m in 0..=2 * n {
            if q.is_zero() && m + 1 < n {
                continue;
            }
            let sum = alternating_qbinomial_sum(m, n, &qs).unwrap();
            let shifted = pochhammer(&pow(&q, m as i64 - n as i64 + 1), &q, n);
            let delta = match m.cmp(&n) {
                std::cmp::Ordering::Less => Some(BigRational::zero()),
                std::cmp::Ordering::Equal => Some(pochhammer(&q, &q, n)),
                std::cmp::Ordering::Greater => None,
            };
            let ok = sum == Scalar::Exact(shifted.clone()) && delta.is_none_or(|d| d == shifted);
            if !ok {
                failures.push(format!("sumdelta oracle: q={q} n={n} m={m}"));
            }
        }
        for (k, subsets) in counts[n].iter().enumerate() {
            if q_binomial(n, k as i64, &qs) != Scalar::Exact(eval_counts(subsets, &q)) {
                failures.push(format!("q-binomial oracle: q={q} n={n} k={k}"));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("{IDENTITY_TRIALS} trials per sweep, failures {failures:?}"),
    )
}

fn numeric_limit_suite() -> Outcome {
    let qs: Vec<Scalar> = [(-1, 1), (-1, 2), (0, 1), (1, 2), (2, 1)]
        .iter()
        .map(|&(a, b)| Scalar::ratio(a, b))
        .collect();
    let ns: Vec<usize> = (1..=5).collect();
    let mut worst: (f64, String) = (0.0, String::new());
    let mut failures = Vec::new();
    let mut runs = 0;
    for (text, radius) in TEST_FUNCTIONS {
        let f = test_function(text, radius);
        for report in verify_grid(&f, &qs, &ns, &VerifyOptions::default()) {
            let r = report.unwrap();
            runs += 1;
            let tol = default_pass_tolerance(r.n);
            let tag = format!("{text} q={} n={} rel={:.3e}", r.q, r.n, r.rel_err);
            if r.rel_err / tol > worst.0 {
                worst = (r.rel_err / tol, tag.clone());
            }
            if !r.pass {
                failures.push(tag);
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!(
            "{runs} runs, worst rel/tol {:.3} ({}), failures {failures:?}",
            worst.0, worst.1
        ),
    )
}

fn q_minus_one_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let q = Scalar::int(-1);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (text, radius) in TEST_FUNCTIONS {
        let f = test_function(text, radius);
        for _ in 0..20 {
            let x = loop {
                let x: f64 = rng.gen_range(-0.9..0.9);
                if x != 0.0 {
                    break Scalar::Real(x);
                }
            };
            let value = qderiv_n_value(&f, &q, 2, &x).unwrap().abs();
            let scale = f.eval(&x).unwrap().abs().max(f.eval(&-&x).unwrap().abs());
            worst = worst.max(value / scale);
            if value > Q_MINUS_ONE_REL * scale {
                failures.push(format!("{text} x={x} value={value:e}"));
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        format!("80 points, worst |D^2|/max|f| {worst:e}, failures {failures:?}"),
    )
}

fn slope_suite() -> Outcome {
    let f = test_function("exp(x)", None);
    let x = Scalar::ratio(1, 2);
    let fprime = 0.5f64.exp();
    let ratios: Vec<f64> = [(9, 10), (99, 100), (999, 1000)]
        .iter()
        .map(|&(a, b)| {
            let q = Scalar::ratio(a, b);
            let dq = qderiv_value(&f, &q, &x).unwrap().to_f64();
            (dq - fprime).abs() / (1.0 - a as f64 / b as f64)
        })
        .collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    Outcome::new(
        max / min < SLOPE_SPREAD,
        format!("ratios {ratios:?}, spread {:.6}", max / min),
    )
}

fn series_semigroup_suite() -> Outcome {
    let qs = [Scalar::ratio(1, 2), Scalar::ratio(-1, 3), Scalar::int(2)];
    let mut checks = 0;
    let mut failures = Vec::new();
    for (text, radius) in TEST_FUNCTIONS {
        let f = test_function(text, radius);
        let jet = f.jet(&Scalar::zero(), SERIES_ORDER, "series").unwrap();
        if jet.kind() != Kind::Exact {
            failures.push(format!("{text}: jet is not exact"));
            continue;
        }
        let s = PowerSeries::new(jet, f.radius()).unwrap();
        for q in &qs {
            let mut stepped = s.clone();
            for n in 1..=SERIES_ORDER {
                stepped = series_qderiv_n(&stepped, q, 1).unwrap();
                let direct = series_qderiv_n(&s, q, n).unwrap();
                checks += 1;
                let exact = stepped.coeffs().iter().all(|c| c.kind() == Kind::Exact);
                if !exact || stepped.coeffs() != direct.coeffs() {
                    failures.push(format!("{text} q={q} n={n}"));
                }
            }
        }
    }
    Outcome::new(failures.is_empty(), format!("{checks} exact checks, failures {failures:?}"))
}

fn complex_suite() -> Outcome {
    let f = test_function("exp(x)", None);
    let q = Scalar::Complex(Complex64::new(0.0, 0.5));
    let opts = VerifyOptions {
        pass_tol: Some(COMPLEX_REL),
        ..VerifyOptions::default()
    };
    let r = theorem_verify(&f, &q, 2, &opts).unwrap();
    Outcome::new(
        r.pass,
        format!(
            "estimate {}, predicted {}, rel {:e}",
            r.limit.estimate, r.predicted, r.rel_err
        ),
    )
}

/// Central difference with one Richardson step.
fn central_difference(f: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    let h = 1e-3;
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn parser_jet_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000a);
    let mut panics = Vec::new();
    let mut parsed = 0;
    let previous_hook = panic::take_hook();
    panic::set_hook(Box::new(|_| {}));
    for _ in 0..FUZZ_INPUTS {
        let text = if rng.gen_bool(0.5) {
            random_soup(&mut rng)
        } else {
            random_mutation(&mut rng)
        };
        let result = panic::catch_unwind(AssertUnwindSafe(|| {
            let Ok(e) = parse(&text) else {
                return false;
            };
            let x = Scalar::ratio(3, 10);
            let _ = e.eval(&x);
            let _ = e.eval_jet(&x, 3, Kind::Real);
            let _ = e.to_point_fn(Some(1.0));
            assert_eq!(parse(&e.to_string()).as_ref(), Ok(&e), "round trip of {text:?}");
            true
        }));
        match result {
            Ok(ok) => parsed += usize::from(ok),
            Err(_) => panics.push(text),
        }
    }
    panic::set_hook(previous_hook);

    let mut worst = 0.0f64;
    let mut fd_failures = Vec::new();
    let mut tested = 0;
    while tested < FD_EXPRESSIONS {
        let text = random_smooth_expr(&mut rng, 4);
        let e = parse(&text).unwrap();
        let eval = |x: f64| e.eval(&Scalar::Real(x)).unwrap().to_f64();
        let slope_at = |x: f64| {
            e.eval_jet(&Scalar::Real(x), 1, Kind::Real)
                .unwrap()
                .derivative(1)
                .unwrap()
                .to_f64()
        };
        // A near-vanishing slope makes the relative error meaningless; constant
        // expressions are redrawn.
        let Some((x, jet_slope)) = (0..20)
            .map(|_| rng.gen_range(-1.0..1.0))
            .map(|x| (x, slope_at(x)))
            .find(|(_, s)| s.abs() > 1e-2)
        else {
            continue;
        };
        tested += 1;
        let fd = central_difference(&eval, x);
        let rel = (jet_slope - fd).abs() / jet_slope.abs();
        worst = worst.max(rel);
        if rel > FD_REL {
            fd_failures.push(format!("{text} at x={x}: jet {jet_slope} fd {fd}"));
        }
    }
    Outcome::new(
        panics.is_empty() && fd_failures.is_empty(),
        format!(
            "{FUZZ_INPUTS} fuzz inputs ({parsed} parsed), panics {panics:?}; \
             {FD_EXPRESSIONS} slopes, worst rel {worst:e}, failures {fd_failures:?}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("exact theorem on random polynomials", Box::new(|| exact_theorem_suite(&corpus()))),
        ("closed-form k-sum equals the iterate", Box::new(|| closed_form_suite(&mut corpus()))),
        ("q = 0 remainder form", Box::new(|| q_zero_suite(&mut corpus()))),
        ("Gauss and alternating q-binomial sums", Box::new(identity_suite)),
        ("numeric limit matches the prediction", Box::new(numeric_limit_suite)),
        ("q = -1 second iterate vanishes", Box::new(q_minus_one_suite)),
        ("first-order slope as q -> 1", Box::new(slope_suite)),
        ("series semigroup in exact arithmetic", Box::new(series_semigroup_suite)),
        ("complex q = i/2", Box::new(complex_suite)),
        ("parser fuzz and jet slopes", Box::new(parser_jet_suite)),
    ];
    let mut failed = 0;
    for (i, (title, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!outcome.pass);
        println!(
            "criterion {:>2}  {verdict}  {title} [{:.2}s]: {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
