//! Ensemble parameters and regime validation.

use num::{One, Signed};
use thiserror::Error;

use crate::scalar::{format_rational, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    /// `a <= -1`: the weight `x^a` is not integrable at 0.
    #[error("not normalisable: a = {0} must be > -1")]
    NotNormalisableA(String),
    /// `b <= -1`: the weight `(1-x)^b` is not integrable at 1.
    #[error("not normalisable: b = {0} must be > -1")]
    NotNormalisableB(String),
    #[error("beta = {0} must be >= 0")]
    NegativeBeta(String),
    #[error("matrix dimension N = {0} must be >= 1")]
    InvalidDimension(i64),
}

/// The quadruple `(N, a, b, beta)` defining a beta-Jacobi ensemble, with
/// `a, b > -1` and `beta >= 0` enforced at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleParams {
    n: u32,
    a: Rat,
    b: Rat,
    beta: Rat,
}

/// Validates `(N, a, b, beta)`; see [`EnsembleParams::new`].
pub fn validate_params(n: i64, a: Rat, b: Rat, beta: Rat) -> Result<EnsembleParams, ParamError> {
    EnsembleParams::new(n, a, b, beta)
}

impl EnsembleParams {
    pub fn new(n: i64, a: Rat, b: Rat, beta: Rat) -> Result<Self, ParamError> {
        if n < 1 {
            return Err(ParamError::InvalidDimension(n));
        }
        if a <= -Rat::one() {
            return Err(ParamError::NotNormalisableA(format_rational(&a)));
        }
        if b <= -Rat::one() {
            return Err(ParamError::NotNormalisableB(format_rational(&b)));
        }
        if beta.is_negative() {
            return Err(ParamError::NegativeBeta(format_rational(&beta)));
        }
        Ok(EnsembleParams {
            n: n as u32,
            a,
            b,
            beta,
        })
    }

    /// Convenience constructor from integer parameters.
    pub fn from_ints(n: i64, a: i64, b: i64, beta: i64) -> Result<Self, ParamError> {
        Self::new(
            n,
            Rat::from_integer(a.into()),
            Rat::from_integer(b.into()),
            Rat::from_integer(beta.into()),
        )
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn beta(&self) -> &Rat {
        &self.beta
    }

    /// Moments are computable for every valid parameter set.
    pub fn moments_ok(&self) -> bool {
        true
    }

    /// The piecewise assembly of the density requires `b` and `beta` to be
    /// nonnegative integers.
    pub fn assembly_ok(&self) -> bool {
        is_nonneg_integer(&self.b) && is_nonneg_integer(&self.beta)
    }

    /// Every piece is an exact polynomial when additionally `a` is a
    /// nonnegative integer.
    pub fn polynomial_ok(&self) -> bool {
        self.assembly_ok() && is_nonneg_integer(&self.a)
    }

    /// Same ensemble with `a` and `b` swapped (the density reflects as
    /// `t -> N - t`).
    pub fn swapped(&self) -> Self {
        EnsembleParams {
            n: self.n,
            a: self.b.clone(),
            b: self.a.clone(),
            beta: self.beta.clone(),
        }
    }

    /// Same ensemble with `b` raised by one; used internally by the
    /// recurrences, which read the target density off a component of the
    /// shifted system.
    pub(crate) fn with_b_plus_one(&self) -> Self {
        EnsembleParams {
            n: self.n,
            a: self.a.clone(),
            b: &self.b + Rat::one(),
            beta: self.beta.clone(),
        }
    }
}

fn is_nonneg_integer(r: &Rat) -> bool {
    r.is_integer() && !r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_i64};

    #[test]
    fn accepts_integer_case() {
        let p = validate_params(3, rat_i64(0), rat_i64(0), rat_i64(1)).unwrap();
        assert!(p.moments_ok());
        assert!(p.assembly_ok());
        assert!(p.polynomial_ok());
    }

    #[test]
    fn accepts_half_integer_a() {
        let p = validate_params(3, rat(-1, 2), rat_i64(0), rat_i64(1)).unwrap();
        assert!(p.assembly_ok());
        assert!(!p.polynomial_ok());
    }

    #[test]
    fn rejects_boundary_a() {
        let err = validate_params(2, rat_i64(-1), rat_i64(0), rat_i64(1)).unwrap_err();
        assert!(matches!(err, ParamError::NotNormalisableA(_)));
    }

    #[test]
    fn distinct_errors() {
        assert!(matches!(
            validate_params(2, rat_i64(0), rat(-3, 2), rat_i64(1)),
            Err(ParamError::NotNormalisableB(_))
        ));
        assert!(matches!(
            validate_params(2, rat_i64(0), rat_i64(0), rat_i64(-1)),
            Err(ParamError::NegativeBeta(_))
        ));
        assert!(matches!(
            validate_params(0, rat_i64(0), rat_i64(0), rat_i64(1)),
            Err(ParamError::InvalidDimension(0))
        ));
    }

    #[test]
    fn regime_flags() {
        // beta = 1/2 is fine for moments but not for assembly.
        let p = validate_params(2, rat_i64(1), rat_i64(0), rat(1, 2)).unwrap();
        assert!(p.moments_ok());
        assert!(!p.assembly_ok());
    }
}
