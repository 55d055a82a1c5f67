mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qcalc_core::expr::parse;
use qcalc_core::qoperator::{
    default_x0, qderiv_n_value, qlimit_estimate, series_reference_value, verify_grid,
    LimitOptions, VerifyOptions, DEFAULT_RICHARDSON_LEVELS, JET_HEADROOM,
};
use qcalc_core::qseries::{series_qderiv_n, PowerSeries};
use qcalc_core::qsymbols::{q_binomial, q_pochhammer};
use qcalc_core::random::{identity_trial, Identity};
use qcalc_core::exactpoly::{poly_qderiv_n, poly_theorem_value};
use qcalc_core::{Error, PointFn, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::output::{Field, Format, Table};

const GRAMMAR: &str = "\
Expressions are functions of one variable x:

  numbers    integers (3), decimals (0.25, read exactly as 1/4); write p/q as a division
  operators  + - * / and ^ with an integer exponent (x^3, x^-2, x^(-2));
             ^ binds tightest and is right-associative, then unary -, then * /, then + -
  functions  exp(...), log(...), sin(...), cos(...)

Numbers on the command line may be exact rationals (1/2, -5/3), decimals (0.3)
or complexes written a+bi (0+0.5i). q = 1 is rejected by every operator command.

Expressions with a variable denominator, a negative power or log(...) need --radius:
the radius of the disc |x| < R on which they are evaluated.

Exit codes: 0 success, 1 verification or identity failure, 2 usage or parse error,
3 domain error.";

#[derive(Parser)]
#[command(name = "qcalc", version, about = "Jackson q-derivative toolkit", long_about = None, after_long_help = GRAMMAR)]
struct Cli {
    /// Output format (also read from QCALC_FORMAT).
    #[arg(long, global = true, value_enum, env = "QCALC_FORMAT", default_value = "plain")]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct FnArgs {
    /// Function of x, e.g. "exp(x)*sin(x)".
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
    /// Domain radius; required for singular or logarithmic expressions.
    #[arg(long)]
    radius: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// q-Pochhammer symbol (a;q)_n.
    Qpoch {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
        n: usize,
    },
    /// Gaussian binomial coefficient [n k]_q.
    Qbinom {
        n: usize,
        #[arg(allow_hyphen_values = true)]
        k: i64,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Value of D_q^n f at x (x = 0 allowed).
    Deriv {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Numeric estimate of lim_{x->0} D_q^n f(x).
    Limit {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        n: usize,
        /// Relative stopping tolerance of the extrapolation.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        /// First sample point (defaults to min(R,1)/4, shrunk by |q|^n if |q| > 1).
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long, default_value_t = 40)]
        max_steps: usize,
        /// Maximum Richardson depth.
        #[arg(long, default_value_t = DEFAULT_RICHARDSON_LEVELS)]
        levels: usize,
    },
    /// Compare the numeric limit with f^(n)(0)/n! (q;q)_n/(1-q)^n over a (q, n) grid.
    Verify {
        #[command(flatten)]
        f: FnArgs,
        /// Comma-separated q values.
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// n values: "3", "1..5" or "1,2,4".
        #[arg(long)]
        n: String,
        /// Exact symbolic check; the expression must be a polynomial.
        #[arg(long)]
        exact: bool,
        /// Relative stopping tolerance of the extrapolation.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
        /// Pass tolerance on rel_err (default: 1e-6 for n <= 2, 1e-4 for n <= 4, else 1e-3).
        #[arg(long)]
        pass_tol: Option<f64>,
    },
    /// Coefficients of the series of D_q^n f about 0.
    Series {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        n: usize,
        /// Order of the input truncation.
        #[arg(long)]
        order: usize,
    },
    /// Randomized exact identity sweep.
    Identity {
        #[arg(long, value_parser = ["gauss", "sumdelta", "qminus1", "closedform"])]
        which: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Error of the closed-form sum against a series reference as x shrinks.
    Bench {
        #[command(flatten)]
        f: FnArgs,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long)]
        n: usize,
        /// Number of decades below x0.
        #[arg(long, default_value_t = 12)]
        decades: u32,
    },
}

enum Failure {
    Usage(String),
    Domain(String),
    Unmet,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        match err {
            Error::OutsideDomain { .. } | Error::Domain(_) | Error::JetDivisionByZero => {
                Failure::Domain(err.to_string())
            }
            _ => Failure::Usage(err.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(err: io::Error) -> Self {
        Failure::Domain(format!("output error: {err}"))
    }
}

fn scalar(text: &str) -> Result<Scalar, Failure> {
    text.parse::<Scalar>().map_err(Failure::from)
}

/// Parses a q for an operator command, rejecting q = 1.
fn operator_q(text: &str) -> Result<Scalar, Failure> {
    let q = scalar(text)?;
    if q.is_one() {
        return Err(Error::QIsOne.into());
    }
    Ok(q)
}

fn positive_n(n: usize) -> Result<usize, Failure> {
    if n == 0 {
        Err(Failure::Usage("n must be a positive integer".into()))
    } else {
        Ok(n)
    }
}

fn parse_n_list(text: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::Usage(format!("bad n list '{text}'"));
    let mut ns = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: usize = lo.parse().map_err(|_| bad())?;
            let hi: usize = hi.parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            ns.extend(lo..=hi);
        } else {
            ns.push(part.parse().map_err(|_| bad())?);
        }
    }
    if ns.is_empty() || ns.contains(&0) {
        return Err(Failure::Usage("n values must be positive integers".into()));
    }
    Ok(ns)
}

fn point_fn(args: &FnArgs) -> Result<PointFn, Failure> {
    let expr = parse(&args.expr)?;
    Ok(expr.to_point_fn(args.radius)?)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let format = cli.format;
    match cli.command {
        Command::Qpoch { a, q, n } => {
            let value = q_pochhammer(&scalar(&a)?, &scalar(&q)?, n);
            Table::single("value", value).write(format, out)?;
        }
        Command::Qbinom { n, k, q } => {
            let value = q_binomial(n, k, &scalar(&q)?);
            Table::single("value", value).write(format, out)?;
        }
        Command::Deriv { f, q, n, x } => {
            let func = point_fn(&f)?;
            let value = qderiv_n_value(&func, &operator_q(&q)?, positive_n(n)?, &scalar(&x)?)?;
            Table::single("value", value).write(format, out)?;
        }
        Command::Limit { f, q, n, tol, x0, max_steps, levels } => {
            let func = point_fn(&f)?;
            let q = operator_q(&q)?;
            let n = positive_n(n)?;
            let opts = LimitOptions {
                x0: x0.as_deref().map(scalar).transpose()?,
                tol,
                max_steps,
                levels,
                ..LimitOptions::default()
            };
            let report = qlimit_estimate(&func, &q, n, &opts)?;
            let mut table =
                Table::new(&["expr", "q", "n", "estimate", "uncertainty", "converged", "samples"]);
            table.push(vec![
                f.expr.as_str().into(),
                q.into(),
                n.into(),
                report.estimate.into(),
                report.uncertainty.into(),
                report.converged.into(),
                report.samples.len().into(),
            ]);
            table.write(format, out)?;
        }
        Command::Verify { f, q, n, exact, tol, pass_tol } => {
            let qs: Vec<Scalar> = q.split(',').map(operator_q).collect::<Result<_, _>>()?;
            let ns = parse_n_list(&n)?;
            let mut table = Table::new(&[
                "expr", "q", "n", "x0", "estimate", "predicted", "abs_err", "rel_err",
                "converged", "pass",
            ]);
            let mut all_pass = true;
            if exact {
                let p = parse(&f.expr)?.to_polynomial()?;
                for q in &qs {
                    let Some(qr) = q.as_exact() else {
                        return Err(Failure::Usage("--exact needs rational q values".into()));
                    };
                    for &n in &ns {
                        let estimate = Scalar::Exact(poly_qderiv_n(&p, qr, n)?.coeff(0));
                        let predicted = Scalar::Exact(poly_theorem_value(&p, qr, n)?);
                        let diff = &estimate - &predicted;
                        let pass = diff.is_zero();
                        all_pass &= pass;
                        let rel = if predicted.is_zero() {
                            diff.clone()
                        } else {
                            (&diff / &predicted).promote(qcalc_core::Kind::Exact)
                        };
                        table.push(vec![
                            f.expr.as_str().into(),
                            q.clone().into(),
                            n.into(),
                            Scalar::zero().into(),
                            estimate.into(),
                            predicted.into(),
                            diff.into(),
                            rel.into(),
                            true.into(),
                            pass.into(),
                        ]);
                    }
                }
            } else {
                let func = point_fn(&f)?;
                let opts = VerifyOptions {
                    limit: LimitOptions {
                        tol,
                        ..LimitOptions::default()
                    },
                    pass_tol,
                };
                for report in verify_grid(&func, &qs, &ns, &opts) {
                    let report = report?;
                    all_pass &= report.pass;
                    let x0 = report.limit.samples.first().map(|(x, _)| x.clone());
                    table.push(vec![
                        f.expr.as_str().into(),
                        report.q.into(),
                        report.n.into(),
                        x0.map_or(Field::Text(String::new()), Field::Scalar),
                        report.limit.estimate.into(),
                        report.predicted.into(),
                        report.abs_err.into(),
                        report.rel_err.into(),
                        report.limit.converged.into(),
                        report.pass.into(),
                    ]);
                }
            }
            table.write(format, out)?;
            if !all_pass {
                return Err(Failure::Unmet);
            }
        }
        Command::Series { f, q, n, order } => {
            let func = point_fn(&f)?;
            let q = operator_q(&q)?;
            let n = positive_n(n)?;
            if n > order {
                return Err(Failure::Usage(format!("--n {n} exceeds --order {order}")));
            }
            let jet = func.jet(&Scalar::zero_of(q.kind()), order, "series needs jets")?;
            let series = series_qderiv_n(&PowerSeries::new(jet, func.radius())?, &q, n)?;
            let mut table = Table::new(&["j", "coefficient", "radius"]);
            for (j, c) in series.coeffs().iter().enumerate() {
                table.push(vec![j.into(), c.clone().into(), series.radius().into()]);
            }
            table.write(format, out)?;
        }
        Command::Identity { which, seed, trials } => {
            let identity = Identity::from_name(&which).expect("validated by clap");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut failures = 0usize;
            for _ in 0..trials {
                let trial = identity_trial(identity, &mut rng)?;
                if !trial.holds {
                    failures += 1;
                    eprintln!("identity {which} failed: {}", trial.description);
                }
            }
            let mut table = Table::new(&["identity", "seed", "trials", "failures", "pass"]);
            table.push(vec![
                which.as_str().into(),
                Field::Text(seed.to_string()),
                trials.into(),
                failures.into(),
                (failures == 0).into(),
            ]);
            table.write(format, out)?;
            if failures > 0 {
                return Err(Failure::Unmet);
            }
        }
        Command::Bench { f, q, n, decades } => {
            let func = point_fn(&f)?;
            let q = operator_q(&q)?;
            let n = positive_n(n)?;
            let x0 = default_x0(&func, &q, n).to_f64();
            let mut table = Table::new(&["x", "value", "reference", "abs_err", "rel_err"]);
            for j in 0..=decades {
                let x = Scalar::Real(x0 * 10f64.powi(-(j as i32)));
                let value = qderiv_n_value(&func, &q, n, &x)?;
                let reference =
                    series_reference_value(&func, &q, n, &x, n + 6 * JET_HEADROOM)?;
                let abs_err = (&value - &reference).abs();
                let rel_err = abs_err / reference.abs();
                table.push(vec![
                    x.into(),
                    value.into(),
                    reference.into(),
                    abs_err.into(),
                    rel_err.into(),
                ]);
            }
            table.write(format, out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(()) => 0,
        Err(Failure::Unmet) => 1,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    };
    let _ = out.flush();
    ExitCode::from(code)
}
