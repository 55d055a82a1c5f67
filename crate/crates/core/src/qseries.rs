//! Action of `D_q^n` on power series about the origin:
//! `D_q^n f(z) = sum_{j>=0} a_{j+n} (q^{j+1};q)_n / (1-q)^n z^j`.

use crate::error::{Error, Result};
use crate::jets::TaylorJet;
use crate::qsymbols::{q_integer, reject_q_one};
use crate::scalar::Scalar;

/// A truncated series centered at 0 together with its domain radius.
#[derive(Clone, Debug, PartialEq)]
pub struct PowerSeries {
    jet: TaylorJet,
    radius: f64,
}

impl PowerSeries {
    /// `radius` may be `f64::INFINITY`; it must be positive.
    pub fn new(jet: TaylorJet, radius: f64) -> Result<Self> {
        if !jet.center().is_zero() {
            return Err(Error::InvalidArgument("power series must be centered at 0".into()));
        }
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
        }
        Ok(PowerSeries { jet, radius })
    }

    pub fn jet(&self) -> &TaylorJet {
        &self.jet
    }

    pub fn coeffs(&self) -> &[Scalar] {
        self.jet.coeffs()
    }

    pub fn order(&self) -> usize {
        self.jet.order()
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, z: &Scalar) -> Scalar {
        self.jet.eval_offset(z)
    }
}

/// Radius on which `D_q^n f` is guaranteed: `min(rho, rho/|q|^n)`, or `rho`
/// itself when `q = 0`.
pub fn series_domain_radius(radius: f64, q: &Scalar, n: usize) -> f64 {
    if q.is_zero() {
        return radius;
    }
    let scale = q.abs().powi(n as i32);
    if scale <= 1.0 {
        radius
    } else {
        radius / scale
    }
}

/// Applies `D_q^n` coefficient-wise. The result has order reduced by `n`.
///
/// `(q^{j+1};q)_n / (1-q)^n` is formed as the product of q-integers
/// `[j+1]_q ... [j+n]_q`, which has no `0/0` as `q -> 1`.
pub fn series_qderiv_n(s: &PowerSeries, q: &Scalar, n: usize) -> Result<PowerSeries> {
    reject_q_one(q)?;
    if n > s.order() {
        return Err(Error::OrderExceeded {
            requested: n,
            available: s.order(),
        });
    }
    let qints: Vec<Scalar> = (1..=s.order()).map(|m| q_integer(m, q)).collect();
    let coeffs = (0..=s.order() - n)
        .map(|j| {
            let factor: Scalar = qints[j..j + n].iter().cloned().product();
            &s.coeffs()[j + n] * factor
        })
        .collect();
    let jet = TaylorJet::from_coeffs(s.jet.center().clone(), coeffs)?;
    Ok(PowerSeries {
        jet,
        radius: series_domain_radius(s.radius, q, n),
    })
}
