//! q-calculus toolkit: the Jackson q-derivative extended to the origin by
//! `(D_q f)(0) = f'(0)`, its iterates, q-Pochhammer symbols and Gaussian
//! binomials, and exact and numeric checks of
//! `(D_q^n f)(0) = lim_{x->0} D_q^n f(x) = f^(n)(0)/n! * (q;q)_n/(1-q)^n`.

pub mod error;
pub mod exactpoly;
pub mod expr;
pub mod jets;
pub mod qoperator;
pub mod qseries;
pub mod qsymbols;
pub mod random;
pub mod scalar;

pub use error::{Error, Result};
pub use exactpoly::Polynomial;
pub use expr::ExprNode;
pub use jets::TaylorJet;
pub use qoperator::{LimitOptions, LimitReport, PointFn, VerifyOptions, VerifyReport};
pub use qseries::PowerSeries;
pub use scalar::{Kind, Scalar};
