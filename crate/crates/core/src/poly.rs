//! Dense polynomials with exact rational coefficients.

use num::{One, Signed, Zero};

use crate::scalar::{rat_to_f64, Rat};

/// Polynomial `c_0 + c_1 x + ... + c_n x^n` over the rationals.
/// Trailing zero coefficients are trimmed; the zero polynomial has no
/// coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalPolynomial {
    coeffs: Vec<Rat>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPolynomial { coeffs }
    }

    pub fn zero() -> Self {
        RationalPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c x^k`.
    pub fn monomial(c: Rat, k: usize) -> Self {
        let mut coeffs = vec![Rat::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + other.coeff(k));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rat::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut out = vec![Rat::zero(); k];
        out.extend(self.coeffs.iter().cloned());
        Self::new(out)
    }

    pub fn evaluate(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn evaluate_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + rat_to_f64(c);
        }
        acc
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Self {
        let mut out = vec![Rat::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k + 1] = c / Rat::from_integer((k as i64 + 1).into());
        }
        Self::new(out)
    }

    /// Exact definite integral over `[lo, hi]`.
    pub fn definite_integral(&self, lo: &Rat, hi: &Rat) -> Rat {
        let f = self.antiderivative();
        f.evaluate(hi) - f.evaluate(lo)
    }

    /// Substitution `x -> offset + slope * x`, computed exactly.
    pub fn compose_linear(&self, offset: &Rat, slope: &Rat) -> Self {
        let mut acc = Self::zero();
        let arg = Self::new(vec![offset.clone(), slope.clone()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&arg).add(&Self::constant(c.clone()));
        }
        acc
    }

    /// Largest absolute coefficient as f64, for scale-aware comparisons.
    pub fn max_coeff_abs_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| rat_to_f64(&c.abs()))
            .fold(0.0, f64::max)
    }
}
