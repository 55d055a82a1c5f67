//! The q-derivative on black-box functions.
//!
//! `D_q f(x) = (f(x) - f(qx)) / ((1-q) x)` for `x != 0` and `(D_q f)(0) = f'(0)`.
//! Iterates away from the origin use the closed-form `k`-sum (or the Taylor
//! remainder form when `q = 0`); at the origin they are read off the series
//! of `D_q^n f`, which needs derivative information from a jet oracle.

use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Pow, Signed};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactpoly::Polynomial;
use crate::jets::TaylorJet;
use crate::qseries::{series_qderiv_n, PowerSeries};
use crate::qsymbols::{q_binomial, reject_q_one, theorem_constant};
use crate::scalar::{f64_to_rational, Kind, Scalar};

pub type Evaluator = Arc<dyn Fn(&Scalar) -> Result<Scalar> + Send + Sync>;
pub type JetOracle = Arc<dyn Fn(&Scalar, usize) -> Result<TaylorJet> + Send + Sync>;

/// Extra jet order requested beyond what a degree-`n` query strictly needs.
pub const JET_HEADROOM: usize = 4;

/// A function defined on the open disc `|x| < radius`, optionally with
/// access to its Taylor jets.
#[derive(Clone)]
pub struct PointFn {
    evaluator: Evaluator,
    radius: f64,
    jet_oracle: Option<JetOracle>,
}

impl fmt::Debug for PointFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PointFn")
            .field("radius", &self.radius)
            .field("jet_oracle", &self.jet_oracle.is_some())
            .finish()
    }
}

impl PointFn {
    pub fn new<F>(evaluator: F, radius: f64) -> Result<Self>
    where
        F: Fn(&Scalar) -> Result<Scalar> + Send + Sync + 'static,
    {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(PointFn {
            evaluator: Arc::new(evaluator),
            radius,
            jet_oracle: None,
        })
    }

    pub fn with_jet_oracle<J>(mut self, oracle: J) -> Self
    where
        J: Fn(&Scalar, usize) -> Result<TaylorJet> + Send + Sync + 'static,
    {
        self.jet_oracle = Some(Arc::new(oracle));
        self
    }

    /// Entire function with exact evaluation and exact jets at 0.
    pub fn from_polynomial(p: Polynomial) -> Self {
        let p = Arc::new(p);
        let eval_p = Arc::clone(&p);
        let evaluator: Evaluator = Arc::new(move |x: &Scalar| Ok(eval_p.eval(x)));
        let oracle: JetOracle = Arc::new(move |center: &Scalar, order: usize| {
            let mut jet = TaylorJet::constant(Scalar::zero_of(center.kind()), center.clone(), order);
            for c in p.coeffs().iter().rev() {
                let x = TaylorJet::variable(center.clone(), order);
                let c = TaylorJet::constant(Scalar::Exact(c.clone()), center.clone(), order);
                jet = jet.mul(&x)?.add(&c)?;
            }
            Ok(jet)
        });
        PointFn {
            evaluator,
            radius: f64::INFINITY,
            jet_oracle: Some(oracle),
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn has_jet_oracle(&self) -> bool {
        self.jet_oracle.is_some()
    }

    fn check_domain(&self, x: &Scalar) -> Result<()> {
        let modulus = x.abs();
        if modulus < self.radius {
            Ok(())
        } else {
            Err(Error::OutsideDomain {
                argument: modulus,
                radius: self.radius,
            })
        }
    }

    /// Evaluates `f(x)`; the evaluator is never called outside the domain.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        self.check_domain(x)?;
        (self.evaluator)(x)
    }

    pub fn jet(&self, center: &Scalar, order: usize, why: &'static str) -> Result<TaylorJet> {
        self.check_domain(center)?;
        let oracle = self.jet_oracle.as_ref().ok_or(Error::NoJetOracle(why))?;
        oracle(center, order)
    }

    /// Jet at the origin in at least the requested kind.
    fn jet_at_zero(&self, kind: Kind, order: usize, why: &'static str) -> Result<TaylorJet> {
        self.jet(&Scalar::zero_of(kind), order, why)
    }
}

/// `D_q f(x)`, with `(D_q f)(0) = f'(0)` taken from the jet oracle.
pub fn qderiv_value(f: &PointFn, q: &Scalar, x: &Scalar) -> Result<Scalar> {
    reject_q_one(q)?;
    if x.is_zero() {
        let jet = f.jet_at_zero(x.kind().max(q.kind()), 1, "(D_q f)(0) is f'(0)")?;
        return jet.derivative(1);
    }
    let qx = q * x;
    let numerator = f.eval(x)? - f.eval(&qx)?;
    numerator.checked_div(&((Scalar::one() - q) * x))
}

/// Weights `w_k = (-1)^k q^{-k(n-1)+C(k,2)} [n k]_q` of the closed form
/// `(1-q)^n x^n D_q^n f(x) = sum_k w_k f(q^k x)`.
pub fn closed_form_weights(q: &Scalar, n: usize) -> Result<Vec<Scalar>> {
    let n_i = n as i64;
    (0..=n_i)
        .map(|k| {
            let w = q.powi(-k * (n_i - 1) + k * (k - 1) / 2)? * q_binomial(n, k, q);
            Ok(if k % 2 == 0 { w } else { -w })
        })
        .collect()
}

/// `D_q^n f(x)`.
///
/// * `x != 0, q != 0`: closed-form weighted sum of `f(q^k x)`, `k = 0..=n`.
/// * `x != 0, q = 0`: `x^{-n} (f(x) - sum_{k<n} f^(k)(0)/k! x^k)`.
/// * `x = 0`: leading coefficient of the series of `D_q^n f`.
pub fn qderiv_n_value(f: &PointFn, q: &Scalar, n: usize, x: &Scalar) -> Result<Scalar> {
    qderiv_n_with_noise(f, q, n, x).map(|(value, _)| value)
}

/// Rounding-error bound of a floating sum: `eps` times the sum of the moduli
/// of its terms.
fn rounding_bound(terms: &[Scalar]) -> f64 {
    if terms.iter().all(|t| t.kind() == Kind::Exact) {
        return 0.0;
    }
    f64::EPSILON * terms.len() as f64 * terms.iter().map(Scalar::abs).sum::<f64>()
}

/// `D_q^n f(x)` together with a bound on the rounding error of its evaluation.
fn qderiv_n_with_noise(f: &PointFn, q: &Scalar, n: usize, x: &Scalar) -> Result<(Scalar, f64)> {
    reject_q_one(q)?;
    if n == 0 {
        return Ok((f.eval(x)?, 0.0));
    }
    let kind = x.kind().max(q.kind());
    if x.is_zero() {
        let jet = f.jet_at_zero(kind, n + JET_HEADROOM, "D_q^n f at x = 0 needs f^(n)(0)")?;
        let series = PowerSeries::new(jet, f.radius())?;
        let derived = series_qderiv_n(&series, q, n)?;
        return Ok((derived.coeffs()[0].clone(), 0.0));
    }
    if q.is_zero() {
        f.check_domain(x)?;
        let jet = f.jet_at_zero(kind, n - 1, "the q = 0 iterate needs f^(k)(0), k < n")?;
        let head = jet.eval_offset(x);
        let fx = f.eval(x)?;
        let scale = x.powi(n as i64)?;
        let noise = rounding_bound(&[fx.clone(), head.clone()]) / scale.abs();
        return Ok(((fx - head).checked_div(&scale)?, noise));
    }
    // Validate every sample point before evaluating any of them.
    let points: Vec<Scalar> = std::iter::successors(Some(x.clone()), |p| Some(p * q))
        .take(n + 1)
        .collect();
    for p in &points {
        f.check_domain(p)?;
    }
    let weights = closed_form_weights(q, n)?;
    let terms = weights
        .iter()
        .zip(&points)
        .map(|(w, p)| Ok(w * f.eval(p)?))
        .collect::<Result<Vec<_>>>()?;
    let denom = ((Scalar::one() - q) * x).powi(n as i64)?;
    let noise = rounding_bound(&terms) / denom.abs();
    let sum = terms.into_iter().fold(Scalar::zero_of(kind), |acc, t| acc + t);
    Ok((sum.checked_div(&denom)?, noise))
}

/// Reference value of `D_q^n f(x)` from the truncated series of `f` at 0,
/// avoiding the subtractive cancellation of the closed form.
pub fn series_reference_value(
    f: &PointFn,
    q: &Scalar,
    n: usize,
    x: &Scalar,
    order: usize,
) -> Result<Scalar> {
    reject_q_one(q)?;
    let kind = q.kind();
    let jet = f.jet_at_zero(kind, order.max(n), "series reference needs the jet of f at 0")?;
    let series = PowerSeries::new(jet, f.radius())?;
    Ok(series_qderiv_n(&series, q, n)?.eval(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LimitOptions {
    /// First sample point; defaults to `min(rho, 1)/4`, shrunk by `|q|^n` when `|q| > 1`.
    pub x0: Option<Scalar>,
    /// Geometric step between samples, `0 < |ratio| < 1`.
    pub ratio: Scalar,
    pub max_steps: usize,
    /// Relative stopping tolerance on consecutive extrapolants.
    pub tol: f64,
    /// Number of Richardson eliminations (`x`, `x^2`, ...); 0 uses raw samples.
    pub levels: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        LimitOptions {
            x0: None,
            ratio: Scalar::ratio(1, 2),
            max_steps: 40,
            tol: 1e-13,
            levels: DEFAULT_RICHARDSON_LEVELS,
        }
    }
}

pub const DEFAULT_RICHARDSON_LEVELS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct LimitReport {
    pub estimate: Scalar,
    /// `|R_j - R_{j-1}| / (1 + |R_j|)` at the reported extrapolant.
    pub uncertainty: f64,
    pub samples: Vec<(Scalar, Scalar)>,
    pub converged: bool,
}

/// Default first sample point for `lim_{x->0} D_q^n f(x)`.
pub fn default_x0(f: &PointFn, q: &Scalar, n: usize) -> Scalar {
    let base = f.radius().min(1.0) / 4.0;
    match q.kind() {
        Kind::Exact => {
            let mut x0 = Scalar::Exact(f64_to_rational(base).expect("finite base"));
            if let Some(q) = q.as_exact().filter(|q| q.abs() > BigRational::one()) {
                x0 = x0 / Scalar::Exact(Pow::pow(q.abs(), n as i32));
            }
            x0
        }
        _ => Scalar::Real(base / q.abs().powi(n as i32).max(1.0)),
    }
}

/// The search stops once the deepest column drifts this far above the best
/// error estimate ...
const FLOOR_GROWTH: f64 = 2.0;
/// ... for this many consecutive samples.
const FLOOR_PATIENCE: usize = 2;

/// Estimates `lim_{x->0} D_q^n f(x)` from samples at `x_j = x0 ratio^j`.
///
/// Samples feed a Richardson tableau under the ansatz
/// `v(x) = L + A_1 x + A_2 x^2 + ...`, eliminating up to `opts.levels` terms.
/// Every entry gets an error estimate from its two neighbours (previous
/// column, previous row) and the entry with the smallest estimate is kept.
/// Sampling stops once that estimate drops to `tol`, or once the deepest
/// column has been drifting away from it, or once the rounding bound of a
/// fresh sample alone exceeds it. Entries are never credited with less error
/// than the rounding bound of the samples they combine, so a run of samples
/// that cancel to exactly zero is not mistaken for convergence. Without
/// convergence the best entry is reported with `converged = false`.
pub fn qlimit_estimate(
    f: &PointFn,
    q: &Scalar,
    n: usize,
    opts: &LimitOptions,
) -> Result<LimitReport> {
    reject_q_one(q)?;
    let ratio = &opts.ratio;
    if ratio.is_zero() || ratio.abs() >= 1.0 {
        return Err(Error::InvalidArgument("sample ratio must satisfy 0 < |ratio| < 1".into()));
    }
    if opts.levels == 0 {
        return Err(Error::InvalidArgument("at least one Richardson level is required".into()));
    }
    let x0 = opts.x0.clone().unwrap_or_else(|| default_x0(f, q, n));
    if x0.is_zero() {
        return Err(Error::InvalidArgument("x0 must be nonzero".into()));
    }
    // factors[k-1] = (r^k, 1 - r^k)
    let factors: Vec<(Scalar, Scalar)> = (1..=opts.levels as i64)
        .map(|k| {
            let rk = ratio.powi(k).expect("ratio is nonzero");
            let denom = Scalar::one() - &rk;
            (rk, denom)
        })
        .collect();
    // gain[k]: bound on how much column k amplifies rounding noise in the samples.
    let mut gain = vec![1.0];
    for (rk, denom) in &factors {
        let last = gain[gain.len() - 1];
        gain.push(last * (1.0 + rk.abs()) / denom.abs());
    }
    let scaled = |a: &Scalar, b: &Scalar| (a - b).abs() / (1.0 + a.abs());

    let mut samples: Vec<(Scalar, Scalar)> = Vec::new();
    // Last row of the tableau; row[k] eliminates the first k error terms.
    let mut row: Vec<Scalar> = Vec::new();
    let mut best: Option<(f64, Scalar)> = None;
    let mut drifting = 0;
    let mut x = x0;
    for _ in 0..opts.max_steps.max(2) {
        let (value, noise) = qderiv_n_with_noise(f, q, n, &x)?;
        if !value.is_finite() {
            break;
        }
        // Every later entry carries at least this much rounding noise.
        let noise_floor = noise / (1.0 + value.abs());
        if best.as_ref().is_some_and(|(b, _)| noise_floor > *b) {
            break;
        }
        let mut next = vec![value.clone()];
        for (k, (rk, denom)) in factors.iter().enumerate().take(row.len()) {
            next.push((&next[k] - rk * &row[k]) / denom);
        }
        samples.push((x.clone(), value));
        x = &x * ratio;

        for k in 1..next.len() {
            let err = scaled(&next[k], &next[k - 1])
                .max(scaled(&next[k], &row[k - 1]))
                .max(gain[k] * noise / (1.0 + next[k].abs()));
            if best.as_ref().is_none_or(|(b, _)| err <= *b) {
                best = Some((err, next[k].clone()));
            }
        }
        let deepest = next.len() - 1;
        let drift = (deepest >= 1 && deepest < row.len())
            .then(|| scaled(&next[deepest], &row[deepest]));
        row = next;

        let Some((best_err, estimate)) = &best else {
            continue;
        };
        if *best_err <= opts.tol {
            return Ok(LimitReport {
                estimate: estimate.clone(),
                uncertainty: *best_err,
                samples,
                converged: true,
            });
        }
        match drift {
            Some(d) if d >= FLOOR_GROWTH * best_err => drifting += 1,
            _ => drifting = 0,
        }
        if drifting >= FLOOR_PATIENCE {
            break;
        }
    }
    let (uncertainty, estimate) = match best {
        Some(found) => found,
        None => match samples.last() {
            Some((_, v)) => (f64::INFINITY, v.clone()),
            None => return Err(Error::Domain("no finite samples of D_q^n f".into())),
        },
    };
    Ok(LimitReport {
        estimate,
        uncertainty,
        samples,
        converged: false,
    })
}

/// Pass tolerance for the numeric limit: tighter for low `n`, looser as the
/// cancellation floor of the closed form rises with `n`.
pub fn default_pass_tolerance(n: usize) -> f64 {
    match n {
        0..=2 => 1e-6,
        3 | 4 => 1e-4,
        _ => 1e-3,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    pub limit: LimitOptions,
    /// Overrides [`default_pass_tolerance`].
    pub pass_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub q: Scalar,
    pub n: usize,
    pub limit: LimitReport,
    pub predicted: Scalar,
    pub abs_err: f64,
    /// Relative to `|predicted|`; equal to `abs_err` when the prediction is 0.
    pub rel_err: f64,
    pub pass: bool,
}

/// Compares the numeric limit of `D_q^n f` at 0 with `c_n(q) f^(n)(0)`.
pub fn theorem_verify(
    f: &PointFn,
    q: &Scalar,
    n: usize,
    opts: &VerifyOptions,
) -> Result<VerifyReport> {
    reject_q_one(q)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let jet = f.jet_at_zero(q.kind(), n + JET_HEADROOM, "the prediction needs f^(n)(0)")?;
    let predicted = theorem_constant(n, q)? * jet.derivative(n)?;
    let limit = qlimit_estimate(f, q, n, &opts.limit)?;
    let abs_err = (&limit.estimate - &predicted).abs();
    let scale = predicted.abs();
    let rel_err = if scale == 0.0 { abs_err } else { abs_err / scale };
    let tol = opts.pass_tol.unwrap_or_else(|| default_pass_tolerance(n));
    Ok(VerifyReport {
        q: q.clone(),
        n,
        limit,
        predicted,
        abs_err,
        rel_err,
        pass: rel_err <= tol,
    })
}

/// [`theorem_verify`] over a `(q, n)` grid, in parallel. Results are in
/// row-major input order (`q` outer, `n` inner) regardless of scheduling.
pub fn verify_grid(
    f: &PointFn,
    qs: &[Scalar],
    ns: &[usize],
    opts: &VerifyOptions,
) -> Vec<Result<VerifyReport>> {
    let cases: Vec<(&Scalar, usize)> = qs
        .iter()
        .flat_map(|q| ns.iter().map(move |&n| (q, n)))
        .collect();
    cases
        .par_iter()
        .map(|(q, n)| theorem_verify(f, q, *n, opts))
        .collect()
}
