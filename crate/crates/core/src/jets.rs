//! Truncated Taylor series `a_0 + a_1 t + ... + a_N t^N` about a center `c`,
//! with `a_m = f^(m)(c) / m!`.
//!
//! Elementary functions keep exact coefficients whenever the constant term
//! lands on a rational special value (`exp(0)`, `log(1)`, `sin(0)`, `cos(0)`);
//! otherwise the jet is promoted to floating kind.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::qsymbols::factorial;
use crate::scalar::{Kind, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorJet {
    center: Scalar,
    coeffs: Vec<Scalar>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum JetFn {
    Exp,
    Log,
    Sin,
    Cos,
    IntPow(i64),
}

fn inv_int(k: usize) -> Scalar {
    Scalar::ratio(1, k as i64)
}

impl TaylorJet {
    /// Builds a jet from explicit coefficients. The coefficient list must be
    /// non-empty; all entries are promoted to their common kind.
    pub fn from_coeffs(center: Scalar, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("a jet needs at least one coefficient".into()));
        }
        Ok(TaylorJet { center, coeffs }.normalized())
    }

    pub fn constant(value: Scalar, center: Scalar, order: usize) -> Self {
        let kind = value.kind();
        let mut coeffs = vec![Scalar::zero_of(kind); order + 1];
        coeffs[0] = value;
        TaylorJet { center, coeffs }
    }

    pub fn variable(center: Scalar, order: usize) -> Self {
        let kind = center.kind();
        let mut coeffs = vec![Scalar::zero_of(kind); order + 1];
        coeffs[0] = center.clone();
        if order >= 1 {
            coeffs[1] = Scalar::one_of(kind);
        }
        TaylorJet { center, coeffs }
    }

    pub fn center(&self) -> &Scalar {
        &self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Option<&Scalar> {
        self.coeffs.get(m)
    }

    pub fn kind(&self) -> Kind {
        self.coeffs.iter().map(Scalar::kind).max().unwrap_or(Kind::Exact)
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    /// Promotes every coefficient to at least `kind`.
    pub fn promote(&self, kind: Kind) -> TaylorJet {
        TaylorJet {
            center: self.center.clone(),
            coeffs: self.coeffs.iter().map(|c| c.promote(kind)).collect(),
        }
    }

    fn normalized(self) -> TaylorJet {
        let kind = self.kind();
        if self.coeffs.iter().all(|c| c.kind() == kind) {
            self
        } else {
            self.promote(kind)
        }
    }

    fn check_compatible(&self, other: &TaylorJet) -> Result<()> {
        if self.order() != other.order() || self.center != other.center {
            return Err(Error::JetMismatch);
        }
        Ok(())
    }

    fn with_coeffs(&self, coeffs: Vec<Scalar>) -> TaylorJet {
        TaylorJet {
            center: self.center.clone(),
            coeffs,
        }
        .normalized()
    }

    pub fn apply_op(&self, op: JetOp, other: &TaylorJet) -> Result<TaylorJet> {
        match op {
            JetOp::Add => self.add(other),
            JetOp::Sub => self.sub(other),
            JetOp::Mul => self.mul(other),
            JetOp::Div => self.div(other),
        }
    }

    pub fn add(&self, other: &TaylorJet) -> Result<TaylorJet> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    pub fn sub(&self, other: &TaylorJet) -> Result<TaylorJet> {
        self.check_compatible(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        Ok(self.with_coeffs(coeffs))
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &TaylorJet) -> Result<TaylorJet> {
        self.check_compatible(other)?;
        let n = self.order();
        let coeffs = (0..=n)
            .map(|k| (0..=k).map(|j| &self.coeffs[j] * &other.coeffs[k - j]).sum())
            .collect();
        Ok(self.with_coeffs(coeffs))
    }

    /// Forward substitution: `w_k = (u_k - sum_{j=1}^{k} v_j w_{k-j}) / v_0`.
    pub fn div(&self, other: &TaylorJet) -> Result<TaylorJet> {
        self.check_compatible(other)?;
        let v0 = &other.coeffs[0];
        if v0.is_zero() {
            return Err(Error::JetDivisionByZero);
        }
        let mut w: Vec<Scalar> = Vec::with_capacity(self.coeffs.len());
        for k in 0..self.coeffs.len() {
            let acc: Scalar = (1..=k).map(|j| &other.coeffs[j] * &w[k - j]).sum();
            w.push((&self.coeffs[k] - acc) / v0);
        }
        Ok(self.with_coeffs(w))
    }

    pub fn scale(&self, factor: &Scalar) -> TaylorJet {
        self.with_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn neg(&self) -> TaylorJet {
        self.with_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn apply(&self, func: JetFn) -> Result<TaylorJet> {
        match func {
            JetFn::Exp => Ok(self.exp()),
            JetFn::Log => self.ln(),
            JetFn::Sin => Ok(self.sin_cos().0),
            JetFn::Cos => Ok(self.sin_cos().1),
            JetFn::IntPow(p) => self.powi(p),
        }
    }

    /// `b_0 = exp(a_0)`, `b_k = (1/k) sum_{j=1}^{k} j a_j b_{k-j}`.
    pub fn exp(&self) -> TaylorJet {
        let a = &self.coeffs;
        let mut b = vec![a[0].exp()];
        for k in 1..a.len() {
            let acc: Scalar = (1..=k).map(|j| Scalar::int(j as i64) * &a[j] * &b[k - j]).sum();
            b.push(acc * inv_int(k));
        }
        self.with_coeffs(b)
    }

    /// `b_k = (a_k - (1/k) sum_{j=1}^{k-1} j b_j a_{k-j}) / a_0`.
    pub fn ln(&self) -> Result<TaylorJet> {
        let a = &self.coeffs;
        let a0 = &a[0];
        let admissible = match a0 {
            Scalar::Exact(r) => r > &BigRational::from_integer(0.into()),
            Scalar::Real(x) => *x > 0.0,
            Scalar::Complex(z) => z.re > 0.0,
        };
        if !admissible {
            return Err(Error::Domain(format!("log of a jet with constant term {a0}")));
        }
        let mut b = vec![a0.ln()?];
        for k in 1..a.len() {
            let acc: Scalar = (1..k).map(|j| Scalar::int(j as i64) * &b[j] * &a[k - j]).sum();
            b.push((&a[k] - acc * inv_int(k)) / a0);
        }
        Ok(self.with_coeffs(b))
    }

    /// Coupled recurrences for sine and cosine.
    pub fn sin_cos(&self) -> (TaylorJet, TaylorJet) {
        let a = &self.coeffs;
        let mut s = vec![a[0].sin()];
        let mut c = vec![a[0].cos()];
        for k in 1..a.len() {
            let ds: Scalar = (1..=k).map(|j| Scalar::int(j as i64) * &a[j] * &c[k - j]).sum();
            let dc: Scalar = (1..=k).map(|j| Scalar::int(j as i64) * &a[j] * &s[k - j]).sum();
            s.push(ds * inv_int(k));
            c.push(-(dc * inv_int(k)));
        }
        (self.with_coeffs(s), self.with_coeffs(c))
    }

    /// Integer power by repeated squaring; negative powers go through `div`.
    pub fn powi(&self, p: i64) -> Result<TaylorJet> {
        let kind = self.kind();
        let one = TaylorJet::constant(Scalar::one_of(kind), self.center.clone(), self.order());
        let mut result = one.clone();
        let mut base = self.clone();
        let mut e = p.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        if p < 0 {
            if self.coeffs[0].is_zero() {
                return Err(Error::Domain("negative power of a jet with zero constant term".into()));
            }
            result = one.div(&result)?;
        }
        Ok(result)
    }

    /// `f^(m)(center) = m! a_m`.
    pub fn derivative(&self, m: usize) -> Result<Scalar> {
        let a = self.coeffs.get(m).ok_or(Error::OrderExceeded {
            requested: m,
            available: self.order(),
        })?;
        Ok(a * Scalar::Exact(BigRational::from_integer(factorial(m))))
    }

    /// Horner evaluation of the truncated series at displacement `t` from the center.
    pub fn eval_offset(&self, t: &Scalar) -> Scalar {
        let zero = Scalar::zero_of(self.kind().max(t.kind()));
        self.coeffs.iter().rev().fold(zero, |acc, c| acc * t + c)
    }
}
