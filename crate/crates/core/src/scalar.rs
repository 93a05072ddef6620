//! Exact scalars: arbitrary-precision rationals, products of Gamma values
//! at rational arguments, and a tagged exact/float union.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision integer.
pub type Int = BigInt;
/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rat = Ratio<BigInt>;

/// Rational from an integer.
pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Rational `n/d`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    InvalidLiteral(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("gamma function requires a positive argument, got {0}")]
    GammaNonPositive(String),
    #[error("gamma residues {0} do not cancel; value is not rational")]
    IrrationalResidues(String),
}

/// Parses a rational from `"num/den"`, an integer literal, or a decimal
/// literal. Decimals convert exactly (`"0.125"` is 1/8), never through a
/// floating-point intermediate.
pub fn parse_rational(s: &str) -> Result<Rat, ScalarError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ScalarError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| ScalarError::InvalidLiteral(s.to_owned()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| ScalarError::InvalidLiteral(s.to_owned()))?;
        if d.is_zero() {
            return Err(ScalarError::ZeroDenominator(s.to_owned()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let (sign, int_digits) = match int_part.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
        };
        if !int_digits.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac_part.is_empty())
        {
            return Err(ScalarError::InvalidLiteral(s.to_owned()));
        }
        let int_val: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits
                .parse()
                .map_err(|_| ScalarError::InvalidLiteral(s.to_owned()))?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac_val: BigInt = if frac_part.is_empty() {
            BigInt::zero()
        } else {
            frac_part
                .parse()
                .map_err(|_| ScalarError::InvalidLiteral(s.to_owned()))?
        };
        let numer = (int_val * &scale + frac_val) * BigInt::from(sign);
        return Ok(Rat::new(numer, scale));
    }
    let n: BigInt = s
        .parse()
        .map_err(|_| ScalarError::InvalidLiteral(s.to_owned()))?;
    Ok(Rat::from_integer(n))
}

/// Canonical serialization: `"num"` when the denominator is 1, else
/// `"num/den"` in lowest terms with a positive denominator.
pub fn format_rational(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lossy conversion to double precision.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Gamma function for positive double arguments (Lanczos approximation,
/// g = 7, nine coefficients; relative accuracy around 1e-15).
pub fn gamma_f64(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // Reflection; only needed for arguments in (0, 1/2).
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma_f64(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut acc = COEFFS[0];
        for (i, c) in COEFFS.iter().enumerate().skip(1) {
            acc += c / (x + i as f64);
        }
        let t = x + 7.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
    }
}

/// An exact scalar of the form
///
/// ```text
///     coeff * prod_r Gamma(r)^{e_r},    r in (0, 1) rational,
/// ```
///
/// with `coeff` rational and integer exponents `e_r`. `Gamma(q)` for any
/// rational `q > 0` is representable: the functional equation peels `q`
/// down to its fractional residue, and Gamma at a positive integer is
/// absorbed into the rational coefficient. Every ratio exposed by this
/// crate has all residues cancel; [`GammaProduct::as_rational`] enforces
/// that at the boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaProduct {
    coeff: Rat,
    residues: BTreeMap<Rat, i64>,
}

impl GammaProduct {
    pub fn one() -> Self {
        Self::from_rational(Rat::one())
    }

    pub fn from_rational(coeff: Rat) -> Self {
        GammaProduct {
            coeff,
            residues: BTreeMap::new(),
        }
    }

    /// Exact `Gamma(q)` for rational `q > 0`.
    pub fn gamma(q: &Rat) -> Result<Self, ScalarError> {
        if !q.is_positive() {
            return Err(ScalarError::GammaNonPositive(format_rational(q)));
        }
        let floor = q.floor();
        let frac = q - &floor;
        if frac.is_zero() {
            // Gamma at a positive integer is (q-1)!.
            let mut acc = Rat::one();
            let mut i = Rat::one();
            while &i < q {
                acc *= &i;
                i += Rat::one();
            }
            return Ok(Self::from_rational(acc));
        }
        // q = frac + m with frac in (0,1): Gamma(q) = prod_{i=0}^{m-1} (frac + i) * Gamma(frac).
        let m = floor.to_integer();
        let mut coeff = Rat::one();
        let mut term = frac.clone();
        let mut i = BigInt::zero();
        while i < m {
            coeff *= &term;
            term += Rat::one();
            i += 1;
        }
        let mut residues = BTreeMap::new();
        residues.insert(frac, 1);
        Ok(GammaProduct { coeff, residues })
    }

    pub fn coeff(&self) -> &Rat {
        &self.coeff
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// True when no Gamma residues remain.
    pub fn is_rational(&self) -> bool {
        self.residues.is_empty() || self.coeff.is_zero()
    }

    /// The exact rational value, or an error if residues remain.
    pub fn as_rational(&self) -> Result<Rat, ScalarError> {
        if self.is_rational() {
            Ok(self.coeff.clone())
        } else {
            let desc = self
                .residues
                .iter()
                .map(|(r, e)| format!("G({})^{}", format_rational(r), e))
                .collect::<Vec<_>>()
                .join(" ");
            Err(ScalarError::IrrationalResidues(desc))
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.coeff.is_zero(), "reciprocal of zero gamma-product");
        GammaProduct {
            coeff: self.coeff.recip(),
            residues: self.residues.iter().map(|(r, e)| (r.clone(), -e)).collect(),
        }
    }

    pub fn powi(&self, n: i64) -> Self {
        if n == 0 {
            return Self::one();
        }
        let base = if n < 0 { self.recip() } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Double-precision value via the Lanczos gamma at each residue.
    pub fn to_f64(&self) -> f64 {
        let mut v = rat_to_f64(&self.coeff);
        for (r, e) in &self.residues {
            v *= gamma_f64(rat_to_f64(r)).powi(*e as i32);
        }
        v
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        let mut residues = self.residues.clone();
        for (r, e) in &other.residues {
            let entry = residues.entry(r.clone()).or_insert(0);
            *entry += sign * e;
            if *entry == 0 {
                residues.remove(r);
            }
        }
        GammaProduct {
            coeff: if sign > 0 {
                &self.coeff * &other.coeff
            } else {
                &self.coeff / &other.coeff
            },
            residues,
        }
    }
}

impl Mul for &GammaProduct {
    type Output = GammaProduct;
    fn mul(self, rhs: &GammaProduct) -> GammaProduct {
        if self.coeff.is_zero() || rhs.coeff.is_zero() {
            return GammaProduct::from_rational(Rat::zero());
        }
        self.combine(rhs, 1)
    }
}

impl Div for &GammaProduct {
    type Output = GammaProduct;
    fn div(self, rhs: &GammaProduct) -> GammaProduct {
        assert!(!rhs.coeff.is_zero(), "division by zero gamma-product");
        if self.coeff.is_zero() {
            return GammaProduct::from_rational(Rat::zero());
        }
        self.combine(rhs, -1)
    }
}

impl Mul<&Rat> for &GammaProduct {
    type Output = GammaProduct;
    fn mul(self, rhs: &Rat) -> GammaProduct {
        GammaProduct {
            coeff: &self.coeff * rhs,
            residues: if self.coeff.is_zero() || rhs.is_zero() {
                BTreeMap::new()
            } else {
                self.residues.clone()
            },
        }
    }
}

impl fmt::Display for GammaProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.coeff))?;
        for (r, e) in &self.residues {
            write!(f, " G({})^{}", format_rational(r), e)?;
        }
        Ok(())
    }
}

/// Exact-or-float tagged union. Arithmetic between two `Exact` values stays
/// exact; any `Float` operand makes the result `Float`.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(GammaProduct),
    Float(f64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::from_rational(Rat::zero())
    }

    pub fn one() -> Self {
        Scalar::from_rational(Rat::one())
    }

    pub fn from_rational(r: Rat) -> Self {
        Scalar::Exact(GammaProduct::from_rational(r))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(g) => g.to_f64(),
            Scalar::Float(v) => *v,
        }
    }

    /// The exact rational value, if this scalar is exact and residue-free.
    pub fn as_rational(&self) -> Result<Rat, ScalarError> {
        match self {
            Scalar::Exact(g) => g.as_rational(),
            Scalar::Float(v) => Err(ScalarError::IrrationalResidues(format!("float {v}"))),
        }
    }

    fn binop(
        &self,
        rhs: &Scalar,
        exact: impl Fn(&GammaProduct, &GammaProduct) -> GammaProduct,
        float: impl Fn(f64, f64) -> f64,
    ) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(exact(a, b)),
            _ => Scalar::Float(float(self.to_f64(), rhs.to_f64())),
        }
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Self {
        Scalar::from_rational(r)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl From<GammaProduct> for Scalar {
    fn from(g: GammaProduct) -> Self {
        Scalar::Exact(g)
    }
}

fn add_exact(a: &GammaProduct, b: &GammaProduct) -> GammaProduct {
    if a.coeff.is_zero() {
        return b.clone();
    }
    if b.coeff.is_zero() {
        return a.clone();
    }
    assert!(
        a.residues == b.residues,
        "cannot add exact gamma-products with different residues: {a} + {b}"
    );
    let coeff = &a.coeff + &b.coeff;
    GammaProduct {
        residues: if coeff.is_zero() {
            BTreeMap::new()
        } else {
            a.residues.clone()
        },
        coeff,
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, add_exact, |x, y| x + y)
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| add_exact(a, &-b), |x, y| x - y)
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a * b, |x, y| x * y)
    }
}

impl Div for &Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self.binop(rhs, |a, b| a / b, |x, y| x / y)
    }
}

impl Neg for &GammaProduct {
    type Output = GammaProduct;
    fn neg(self) -> GammaProduct {
        GammaProduct {
            coeff: -self.coeff.clone(),
            residues: self.residues.clone(),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(-g),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Float(v) => write!(f, "{v:.16e}"),
        }
    }
}
