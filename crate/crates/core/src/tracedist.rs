//! The trace distribution itself.
//!
//! On each interval `[p, p+1]` the density gains one new term,
//!
//! ```text
//!   P(t) = (1/S_N) sum_{p=0}^{N-1} xi_p C(N,p) K_N(a,b,p,beta)
//!             chi_{t >= p} (t - p)^{gamma_p} F_p(t - p),
//! ```
//!
//! valid for `b, beta` nonnegative integers. Each `F_p` (normalized to
//! `F_p(0) = 1`) is carried by a Frobenius-type vector solution of the
//! tridiagonal matrix ODE `(Lambda_p + s I) G' = T G` about the regular
//! singular point `s = 0`.
//!
//! One structural point deserves note. Running the recurrence at the given
//! parameters and reading component `N` (whose indicial exponent is
//! `gamma_p - p`) breaks down at `b = 0`: the subdiagonal entry coupling
//! into the last row is `-N b`, so the leading series coefficient of
//! component `N` vanishes and the connection problem degenerates — yet
//! `b = 0` is the case of main interest. Instead we run the system at
//! `b + 1`, where the binomial-weighted combination `sum_k C(N, N-k) G_k`
//! (row 0 of the similarity transform back to the integral vector) carries
//! the density for the original `b`. Its indicial exponent equals
//! `gamma_p` exactly, its leading coefficient is `C(N,p) != 0`, and for
//! `b >= 1` it reproduces the direct reading identically (tested).

use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jack::{gauss_2f1, gauss_2f1_f64, JackError};
use crate::normalization::{fixed_trace_f, selberg, NormalizationSet};
use crate::params::EnsembleParams;
use crate::poly::RationalPolynomial;
use crate::scalar::{
    format_rational, gamma_f64, parse_rational, rat_i64, rat_to_f64, GammaProduct, Rat, Scalar,
    ScalarError,
};

/// Default truncation order for non-polynomial (series) pieces.
pub const DEFAULT_SERIES_ORDER: usize = 64;

/// Series pieces are trusted only for `t - p` below this fraction of the
/// unit radius of convergence.
pub const SERIES_TRUST_RADIUS: f64 = 0.9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceDistError {
    #[error("piecewise assembly requires b and beta to be nonnegative integers (b = {b}, beta = {beta})")]
    AssemblyUnsupported { b: String, beta: String },
    #[error("operation requires N = {expected}, got N = {got}")]
    WrongDimension { expected: u32, got: u32 },
    #[error("piece index {p} out of range for N = {n}")]
    BadPieceIndex { p: u32, n: u32 },
    #[error("t = {t} lies outside the support [0, N]")]
    OutOfSupport { t: String },
    #[error("series piece {piece} is not trusted at offset s = {s} (radius limit {SERIES_TRUST_RADIUS}); enable the experimental continuation instead")]
    OutsideTrustRegion { piece: u32, s: f64 },
    #[error("exact integration requires a polynomial-mode density")]
    ExactModeRequired,
    #[error("indicial shift v + l = {shift} is not positive; cannot divide")]
    NonpositiveIndicialShift { shift: String },
    #[error("leading Frobenius coefficient vanished for piece {p}: connection problem breakdown")]
    ZeroLeadingCoefficient { p: u32 },
    #[error("piece {p} failed to terminate at its polynomial degree")]
    TerminationFailed { p: u32 },
    #[error("case mismatch: expected {expected}, got {got}")]
    ParameterMismatch { expected: String, got: String },
    #[error("continuation step from s = {s} rejected: series tail failed the ratio test")]
    StepRejected { s: f64 },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Jack(#[from] JackError),
    #[error("invalid piecewise-density document: {0}")]
    Json(String),
}

fn binomial(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    let mut acc = Rat::one();
    for i in 0..k {
        acc = acc * rat_i64((n - i) as i64) / rat_i64((i + 1) as i64);
    }
    acc
}

/// The tridiagonal system `(Lambda_p + s I) G' = T G` obtained by
/// diagonalizing the constant matrix of the time-domain ladder system.
/// Entries are indexed `j = 0..=N`; `sub[j]`, `diag[j]`, `sup[j]` sit in
/// row `j` at columns `j-1`, `j`, `j+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TridiagonalSystem {
    n: usize,
    pub sub: Vec<Rat>,
    pub diag: Vec<Rat>,
    pub sup: Vec<Rat>,
}

impl TridiagonalSystem {
    pub fn new(params: &EnsembleParams) -> Self {
        let n = params.n() as i64;
        let half_beta = params.beta() / rat_i64(2);
        // Recurring combinations: the total diagonal weight and the block
        // coupling scale.
        let row_weight = params.a() + params.b() + Rat::one() + &half_beta * rat_i64(2 * n - 1);
        let coupling = &half_beta * rat_i64(n) + params.b();
        let mut sub = Vec::with_capacity(n as usize + 1);
        let mut diag = Vec::with_capacity(n as usize + 1);
        let mut sup = Vec::with_capacity(n as usize + 1);
        for j in 0..=n {
            let jr = rat_i64(j);
            sub.push(-&jr * &coupling + &half_beta * &jr * &jr);
            diag.push(
                &row_weight * &jr - &half_beta * rat_i64(n - j) * rat_i64(2 * j + 1)
                    + &coupling * rat_i64(n - 2 * j)
                    - Rat::one(),
            );
            sup.push(
                &row_weight * rat_i64(j - n)
                    + &half_beta * rat_i64(n - j) * rat_i64(n - j - 1)
                    + &coupling * rat_i64(n - j),
            );
        }
        TridiagonalSystem {
            n: n as usize,
            sub,
            diag,
            sup,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Diagonal entry `j` of `Lambda_p = p I - diag[N, N-1, ..., 0]`,
    /// i.e. `p - N + j`; zero exactly at `j = N - p`.
    pub fn lambda_p_entry(&self, p: u32, j: usize) -> Rat {
        rat_i64(p as i64 - self.n as i64 + j as i64)
    }

    /// `(T - shift I) v`.
    fn apply_shifted(&self, shift: &Rat, v: &[Rat]) -> Vec<Rat> {
        let n = self.n;
        (0..=n)
            .map(|j| {
                let mut acc = (&self.diag[j] - shift) * &v[j];
                if j > 0 {
                    acc += &self.sub[j] * &v[j - 1];
                }
                if j < n {
                    acc += &self.sup[j] * &v[j + 1];
                }
                acc
            })
            .collect()
    }

    /// Frobenius coefficient vectors about the singular point of index `p`:
    /// returns the indicial exponent `v = diag[N - p]` and the vectors
    /// `g_0..=g_order` with `g_0` the unit vector at `N - p`.
    ///
    /// At every step the row `N - p` of the linear system is a consistency
    /// condition rather than an equation; it is asserted to vanish exactly.
    pub fn frobenius_vectors(
        &self,
        p: u32,
        order: usize,
    ) -> Result<(Rat, Vec<Vec<Rat>>), TraceDistError> {
        let n = self.n;
        let base = n - p as usize;
        let v = self.diag[base].clone();
        let mut g0 = vec![Rat::zero(); n + 1];
        g0[base] = Rat::one();
        let mut vectors = vec![g0];
        for l in 1..=order {
            let lr = rat_i64(l as i64);
            let shift = &v + &lr - Rat::one();
            let rhs = self.apply_shifted(&shift, vectors.last().unwrap());
            // Row N - p of (T - (v + l - 1) I) g_{l-1} must vanish; this is
            // the recurrence's internal consistency identity.
            assert!(
                rhs[base].is_zero(),
                "Frobenius consistency residual nonzero at step {l}"
            );
            let scale = &v + &lr;
            if !scale.is_positive() {
                return Err(TraceDistError::NonpositiveIndicialShift {
                    shift: format_rational(&scale),
                });
            }
            let mut next = vec![Rat::zero(); n + 1];
            for j in 0..=n {
                if j == base {
                    continue;
                }
                let lam = rat_i64(j as i64 - base as i64);
                next[j] = &rhs[j] / (&scale * lam);
            }
            // Component N - p from the next order's consistency condition.
            let mut centre = Rat::zero();
            if base > 0 {
                centre += &self.sub[base] * &next[base - 1];
            }
            if base < n {
                centre += &self.sup[base] * &next[base + 1];
            }
            next[base] = centre / lr;
            vectors.push(next);
        }
        Ok((v, vectors))
    }
}

/// Indicial exponent of the density piece supported on `t >= p`:
///
/// ```text
///   gamma_p = (N-1) + b p + (beta/2) p(p-1) + a(N-p) + (beta/2)(N-p)(N-p-1).
/// ```
pub fn gamma_exponent(params: &EnsembleParams, p: u32) -> Rat {
    let n = params.n() as i64;
    let p = p as i64;
    let half_beta = params.beta() / rat_i64(2);
    rat_i64(n - 1)
        + params.b() * rat_i64(p)
        + &half_beta * rat_i64(p) * rat_i64(p - 1)
        + params.a() * rat_i64(n - p)
        + &half_beta * rat_i64(n - p) * rat_i64(n - p - 1)
}

/// Sign of the piece-`p` term, `(-1)^{p(b+1) + beta p(p-1)/2}`; requires
/// `b` and `beta` nonnegative integers. For `beta` even this reduces to
/// `(-1)^{(b+1)p}`.
pub fn xi_sign(params: &EnsembleParams, p: u32) -> Result<i8, TraceDistError> {
    if !params.assembly_ok() {
        return Err(TraceDistError::AssemblyUnsupported {
            b: format_rational(params.b()),
            beta: format_rational(params.beta()),
        });
    }
    let b = params.b().to_integer();
    let beta = params.beta().to_integer();
    let p = num::BigInt::from(p);
    let one = num::BigInt::from(1);
    let two = num::BigInt::from(2);
    let exponent = &p * (b + &one) + beta * &p * (&p - &one) / &two;
    Ok(if (exponent % two).is_zero() { 1 } else { -1 })
}

/// One Frobenius solution, realized on the `b + 1`-shifted system, together
/// with the normalized series of the density piece it carries.
#[derive(Debug, Clone)]
pub struct FrobeniusPiece {
    /// Piece index, `0..N`.
    pub p: u32,
    /// Exponent `gamma_p` at the original parameters; equals the indicial
    /// root `v` of the shifted system's solution.
    pub gamma: Rat,
    /// Indicial exponent of the realized solution (`= gamma`).
    pub exponent: Rat,
    /// The system the recurrence ran on (parameters with `b + 1`).
    pub system: TridiagonalSystem,
    /// Base index `N - p` of the unit initial vector.
    pub base: usize,
    /// Raw coefficient vectors `g_0..=g_order`.
    pub raw: Vec<Vec<Rat>>,
    /// Binomially combined series `h_l = sum_k C(N, N-k) (g_l)_k`; the
    /// piece function is `s^gamma sum_l h_l s^l` up to one scalar.
    pub series: Vec<Rat>,
    /// Normalized coefficients of `F_p`, `f_0 = 1`.
    pub f: Vec<Rat>,
    /// Exact polynomial degree `a p + b(N-p) + p beta (N-p)` when all of
    /// `a, b, beta` are nonnegative integers.
    pub degree: Option<usize>,
}

/// Polynomial degree of piece `p` when in the all-integer regime.
pub fn piece_degree(params: &EnsembleParams, p: u32) -> Option<usize> {
    if !params.polynomial_ok() {
        return None;
    }
    let n = params.n() as i64;
    let p = p as i64;
    let deg = params.a() * rat_i64(p)
        + params.b() * rat_i64(n - p)
        + rat_i64(p) * params.beta() * rat_i64(n - p);
    deg.to_integer().to_usize()
}

/// Computes the Frobenius data of piece `p` to the given series order.
pub fn frobenius_piece(
    params: &EnsembleParams,
    p: u32,
    order: usize,
) -> Result<FrobeniusPiece, TraceDistError> {
    if !params.assembly_ok() {
        return Err(TraceDistError::AssemblyUnsupported {
            b: format_rational(params.b()),
            beta: format_rational(params.beta()),
        });
    }
    let n = params.n();
    if p >= n {
        return Err(TraceDistError::BadPieceIndex { p, n });
    }
    let gamma = gamma_exponent(params, p);
    let shifted = params.with_b_plus_one();
    let system = TridiagonalSystem::new(&shifted);
    let (v, raw) = system.frobenius_vectors(p, order)?;
    debug_assert_eq!(v, gamma, "shifted indicial root must equal gamma_p");
    let base = n as usize - p as usize;
    let series: Vec<Rat> = raw
        .iter()
        .map(|g| {
            g.iter()
                .enumerate()
                .map(|(k, gk)| binomial(n, n - k as u32) * gk)
                .sum()
        })
        .collect();
    let lead = series[0].clone();
    if lead.is_zero() {
        return Err(TraceDistError::ZeroLeadingCoefficient { p });
    }
    debug_assert_eq!(lead, binomial(n, p));
    let f: Vec<Rat> = series.iter().map(|h| h / &lead).collect();
    Ok(FrobeniusPiece {
        p,
        exponent: v,
        gamma,
        system,
        base,
        raw,
        series,
        f,
        degree: piece_degree(params, p),
    })
}

/// Connection weight of piece `p`:
/// `xi_p C(N,p) K_N(a,b,p,beta) / S_N(a,b,beta)`.
fn piece_weight(
    params: &EnsembleParams,
    norms: &NormalizationSet,
    p: u32,
) -> Result<GammaProduct, TraceDistError> {
    let xi = xi_sign(params, p)?;
    let scale = binomial(params.n(), p) * rat_i64(xi as i64);
    Ok(&(&norms.k[p as usize] / &norms.s) * &scale)
}

/// How a [`PiecewisePDF`] carries its pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfMode {
    /// Every piece is an exact polynomial; evaluation and integration are
    /// exact rational operations.
    Polynomial,
    /// Pieces are truncated power series with unit radius of convergence;
    /// coverage of the support is partial.
    Series { order: usize },
}

/// One term of the piecewise density.
#[derive(Debug, Clone)]
pub struct PdfPiece {
    pub p: u32,
    /// Exponent of `(t - p)` at the left endpoint.
    pub gamma: Rat,
    /// `xi_p C(N,p) K_N(a,b,p,beta) / S_N(a,b,beta)`.
    pub weight: GammaProduct,
    /// Coefficients of `F_p` (exact polynomial, or truncated series).
    pub f: Vec<Rat>,
    /// True when `f` is known to be the complete polynomial.
    pub exact: bool,
}

impl PdfPiece {
    pub fn weight_rational(&self) -> Result<Rat, ScalarError> {
        self.weight.as_rational()
    }

    fn f_poly(&self) -> RationalPolynomial {
        RationalPolynomial::new(self.f.clone())
    }
}

/// The trace density as a list of pieces, supported on `[0, N]`.
#[derive(Debug, Clone)]
pub struct PiecewisePDF {
    params: EnsembleParams,
    pieces: Vec<PdfPiece>,
    mode: PdfMode,
}

/// Assembles the piecewise density. Requires `b, beta` nonnegative
/// integers. With `a` also a nonnegative integer the result is exact
/// (`PdfMode::Polynomial`); otherwise pieces are truncated series flagged
/// as partial coverage, trusted for `t - p < 0.9` only.
pub fn assemble_pdf(
    params: &EnsembleParams,
    order: Option<usize>,
) -> Result<PiecewisePDF, TraceDistError> {
    if !params.assembly_ok() {
        return Err(TraceDistError::AssemblyUnsupported {
            b: format_rational(params.b()),
            beta: format_rational(params.beta()),
        });
    }
    let n = params.n();
    let norms = NormalizationSet::build(params);
    let polynomial = params.polynomial_ok();
    let mut pieces = Vec::with_capacity(n as usize);
    for p in 0..n {
        let weight = piece_weight(params, &norms, p)?;
        let (piece_order, degree) = if polynomial {
            let deg = piece_degree(params, p).expect("polynomial regime");
            (deg + 3, Some(deg))
        } else {
            (order.unwrap_or(DEFAULT_SERIES_ORDER), None)
        };
        let frob = frobenius_piece(params, p, piece_order)?;
        let mut f = frob.f;
        let mut exact = false;
        if let Some(deg) = degree {
            // The guard coefficients past the predicted degree must vanish.
            if f[deg + 1..].iter().any(|c| !c.is_zero()) {
                return Err(TraceDistError::TerminationFailed { p });
            }
            f.truncate(deg + 1);
            exact = true;
        } else if f.len() > 4 && f[f.len() - 4..].iter().all(|c| c.is_zero()) {
            // Series terminated on its own (e.g. the p = 0 piece at b = 0).
            while f.last().is_some_and(|c| c.is_zero()) {
                f.pop();
            }
            exact = true;
        }
        pieces.push(PdfPiece {
            p,
            gamma: frob.gamma,
            weight,
            f,
            exact,
        });
    }
    Ok(PiecewisePDF {
        params: params.clone(),
        pieces,
        mode: if polynomial {
            PdfMode::Polynomial
        } else {
            PdfMode::Series {
                order: order.unwrap_or(DEFAULT_SERIES_ORDER),
            }
        },
    })
}

impl PiecewisePDF {
    pub fn params(&self) -> &EnsembleParams {
        &self.params
    }

    pub fn pieces(&self) -> &[PdfPiece] {
        &self.pieces
    }

    pub fn mode(&self) -> PdfMode {
        self.mode
    }

    /// Partial coverage: true when the pieces are truncated series rather
    /// than exact polynomials.
    pub fn is_partial(&self) -> bool {
        matches!(self.mode, PdfMode::Series { .. })
    }

    fn check_support(&self, t: &Rat) -> Result<(), TraceDistError> {
        let n = rat_i64(self.params.n() as i64);
        if t.is_negative() || *t > n {
            return Err(TraceDistError::OutOfSupport {
                t: format_rational(t),
            });
        }
        Ok(())
    }

    /// Density value at rational `t`. Exact (rational) in polynomial mode;
    /// in series mode the value is floating point and only offsets
    /// `t - p < 0.9` are accepted for non-terminated pieces.
    pub fn eval(&self, t: &Rat) -> Result<Scalar, TraceDistError> {
        self.check_support(t)?;
        match self.mode {
            PdfMode::Polynomial => {
                let mut acc = Rat::zero();
                for piece in &self.pieces {
                    let s = t - rat_i64(piece.p as i64);
                    if s.is_negative() {
                        continue;
                    }
                    let gamma = piece.gamma.to_integer().to_i32().expect("integer exponent");
                    let w = piece.weight_rational()?;
                    let pow = if s.is_zero() && gamma == 0 {
                        Rat::one()
                    } else {
                        s.pow(gamma)
                    };
                    acc += w * pow * piece.f_poly().evaluate(&s);
                }
                Ok(Scalar::from(acc))
            }
            PdfMode::Series { .. } => Ok(Scalar::Float(self.eval_f64(rat_to_f64(t))?)),
        }
    }

    /// Density value in double precision.
    pub fn eval_f64(&self, t: f64) -> Result<f64, TraceDistError> {
        if t < 0.0 || t > self.params.n() as f64 {
            return Err(TraceDistError::OutOfSupport { t: format!("{t}") });
        }
        let mut acc = 0.0;
        for piece in &self.pieces {
            let s = t - piece.p as f64;
            if s < 0.0 {
                continue;
            }
            if !piece.exact && s >= SERIES_TRUST_RADIUS {
                return Err(TraceDistError::OutsideTrustRegion { piece: piece.p, s });
            }
            let gamma = rat_to_f64(&piece.gamma);
            let pow = if s == 0.0 && gamma == 0.0 {
                1.0
            } else {
                s.powf(gamma)
            };
            acc += piece.weight.to_f64() * pow * piece.f_poly().evaluate_f64(s);
        }
        Ok(acc)
    }

    /// Exact cumulative distribution at rational `t` (polynomial mode).
    pub fn cdf(&self, t: &Rat) -> Result<Rat, TraceDistError> {
        if self.mode != PdfMode::Polynomial {
            return Err(TraceDistError::ExactModeRequired);
        }
        self.check_support(t)?;
        let mut acc = Rat::zero();
        for piece in &self.pieces {
            let s = t - rat_i64(piece.p as i64);
            if !s.is_positive() {
                continue;
            }
            let gamma = piece
                .gamma
                .to_integer()
                .to_usize()
                .expect("integer exponent");
            let w = piece.weight_rational()?;
            let integrand = piece.f_poly().shift_up(gamma);
            acc += w * integrand.definite_integral(&Rat::zero(), &s);
        }
        Ok(acc)
    }

    /// CDF in double precision (polynomial mode).
    pub fn cdf_f64(&self, t: f64) -> Result<f64, TraceDistError> {
        if self.mode != PdfMode::Polynomial {
            return Err(TraceDistError::ExactModeRequired);
        }
        let n = self.params.n() as f64;
        let t = t.clamp(0.0, n);
        let mut acc = 0.0;
        for piece in &self.pieces {
            let s = t - piece.p as f64;
            if s <= 0.0 {
                continue;
            }
            let gamma = piece
                .gamma
                .to_integer()
                .to_usize()
                .expect("integer exponent");
            let integrand = piece.f_poly().shift_up(gamma).antiderivative();
            acc += piece.weight.to_f64() * integrand.evaluate_f64(s);
        }
        Ok(acc)
    }

    /// Exact `k`-th moment `int t^k P(t) dt` over the support.
    pub fn moment(&self, k: u32) -> Result<Rat, TraceDistError> {
        if self.mode != PdfMode::Polynomial {
            return Err(TraceDistError::ExactModeRequired);
        }
        let n = self.params.n();
        let mut acc = Rat::zero();
        for piece in &self.pieces {
            let gamma = piece
                .gamma
                .to_integer()
                .to_usize()
                .expect("integer exponent");
            let w = piece.weight_rational()?;
            // int_0^{N-p} (s + p)^k s^gamma f(s) ds
            let mut shift_pow = RationalPolynomial::one();
            let linear = RationalPolynomial::new(vec![rat_i64(piece.p as i64), Rat::one()]);
            for _ in 0..k {
                shift_pow = shift_pow.mul(&linear);
            }
            let integrand = piece.f_poly().shift_up(gamma).mul(&shift_pow);
            let hi = rat_i64((n - piece.p) as i64);
            acc += w * integrand.definite_integral(&Rat::zero(), &hi);
        }
        Ok(acc)
    }

    /// The exact polynomial equal to the density on `[j, j+1]`
    /// (polynomial mode), expanded in the global variable `t`.
    pub fn interval_polynomial(&self, j: u32) -> Result<RationalPolynomial, TraceDistError> {
        if self.mode != PdfMode::Polynomial {
            return Err(TraceDistError::ExactModeRequired);
        }
        if j >= self.params.n() {
            return Err(TraceDistError::BadPieceIndex {
                p: j,
                n: self.params.n(),
            });
        }
        let mut acc = RationalPolynomial::zero();
        for piece in self.pieces.iter().filter(|piece| piece.p <= j) {
            let gamma = piece
                .gamma
                .to_integer()
                .to_usize()
                .expect("integer exponent");
            let w = piece.weight_rational()?;
            let in_s = piece.f_poly().shift_up(gamma).scale(&w);
            // substitute s = t - p
            acc = acc.add(&in_s.compose_linear(&rat_i64(-(piece.p as i64)), &Rat::one()));
        }
        Ok(acc)
    }

    /// Serializes to the canonical JSON document. Fails if a weight is not
    /// rational (irrational constants must not escape serialization).
    pub fn to_json(&self) -> Result<String, TraceDistError> {
        let doc = PiecesDoc {
            n: self.params.n(),
            a: format_rational(self.params.a()),
            b: format_rational(self.params.b()),
            beta: format_rational(self.params.beta()),
            partial: if self.is_partial() { Some(true) } else { None },
            pieces: self
                .pieces
                .iter()
                .map(|piece| {
                    Ok(PieceDoc {
                        p: piece.p,
                        gamma: format_rational(&piece.gamma),
                        weight: format_rational(&piece.weight_rational()?),
                        coeffs: piece.f.iter().map(format_rational).collect(),
                    })
                })
                .collect::<Result<_, ScalarError>>()?,
        };
        serde_json::to_string_pretty(&doc).map_err(|e| TraceDistError::Json(e.to_string()))
    }

    /// Parses a JSON document produced by [`PiecewisePDF::to_json`].
    pub fn from_json(text: &str) -> Result<Self, TraceDistError> {
        let doc: PiecesDoc =
            serde_json::from_str(text).map_err(|e| TraceDistError::Json(e.to_string()))?;
        let params = EnsembleParams::new(
            doc.n as i64,
            parse_rational(&doc.a)?,
            parse_rational(&doc.b)?,
            parse_rational(&doc.beta)?,
        )
        .map_err(|e| TraceDistError::Json(e.to_string()))?;
        let partial = doc.partial.unwrap_or(false);
        let mut pieces = Vec::with_capacity(doc.pieces.len());
        for piece in &doc.pieces {
            let f = piece
                .coeffs
                .iter()
                .map(|c| parse_rational(c))
                .collect::<Result<Vec<_>, _>>()?;
            pieces.push(PdfPiece {
                p: piece.p,
                gamma: parse_rational(&piece.gamma)?,
                weight: GammaProduct::from_rational(parse_rational(&piece.weight)?),
                f,
                exact: !partial,
            });
        }
        Ok(PiecewisePDF {
            params,
            pieces,
            mode: if partial {
                PdfMode::Series {
                    order: DEFAULT_SERIES_ORDER,
                }
            } else {
                PdfMode::Polynomial
            },
        })
    }
}

/// Fast, numerically stable double-precision evaluator for a
/// polynomial-mode density.
///
/// Summing the pieces directly in `f64` is catastrophic for larger
/// parameters: the alternating piece weights reach 1e7 and the raw
/// interval-polynomial coefficients 1e28 while the density itself is O(1).
/// Here each interval polynomial (and its antiderivative) is recentred at
/// the interval midpoint in exact rational arithmetic, where the Taylor
/// terms shrink back to the scale of the values, and only then converted.
#[derive(Debug, Clone)]
pub struct CompiledDensity {
    n: u32,
    /// Per interval `[j, j+1]`: Taylor coefficients in `t - (j + 1/2)` of
    /// the density and of the CDF.
    intervals: Vec<(Vec<f64>, Vec<f64>)>,
}

impl CompiledDensity {
    pub fn new(pdf: &PiecewisePDF) -> Result<Self, TraceDistError> {
        if pdf.mode() != PdfMode::Polynomial {
            return Err(TraceDistError::ExactModeRequired);
        }
        let n = pdf.params().n();
        let mut intervals = Vec::with_capacity(n as usize);
        for j in 0..n {
            let mid = rat_i64(2 * j as i64 + 1) / rat_i64(2);
            let q = pdf.interval_polynomial(j)?;
            let centred = q.compose_linear(&mid, &Rat::one());
            let mut cdf_centred = centred.antiderivative();
            // Constant term: the exact CDF at the midpoint.
            cdf_centred = cdf_centred.add(&RationalPolynomial::constant(pdf.cdf(&mid)?));
            intervals.push((
                centred.coeffs().iter().map(rat_to_f64).collect(),
                cdf_centred.coeffs().iter().map(rat_to_f64).collect(),
            ));
        }
        Ok(CompiledDensity { n, intervals })
    }

    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if t < 0.0 || t > self.n as f64 {
            return None;
        }
        let j = (t.floor() as usize).min(self.n as usize - 1);
        Some((j, t - (j as f64 + 0.5)))
    }

    pub fn eval(&self, t: f64) -> Result<f64, TraceDistError> {
        let (j, u) = self
            .locate(t)
            .ok_or(TraceDistError::OutOfSupport { t: format!("{t}") })?;
        Ok(horner(&self.intervals[j].0, u))
    }

    pub fn cdf(&self, t: f64) -> Result<f64, TraceDistError> {
        if t <= 0.0 {
            return Ok(0.0);
        }
        if t >= self.n as f64 {
            return Ok(1.0);
        }
        let (j, u) = self.locate(t).expect("range checked");
        Ok(horner(&self.intervals[j].1, u))
    }
}

fn horner(coeffs: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

#[derive(Serialize, Deserialize)]
struct PiecesDoc {
    #[serde(rename = "N")]
    n: u32,
    a: String,
    b: String,
    beta: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    partial: Option<bool>,
    pieces: Vec<PieceDoc>,
}

#[derive(Serialize, Deserialize)]
struct PieceDoc {
    p: u32,
    gamma: String,
    weight: String,
    coeffs: Vec<String>,
}

/// The density of the ensemble with `a` and `b` swapped, whose graph is the
/// reflection `t -> N - t` of this one. The reflection identity itself is
/// verified exactly through [`PiecewisePDF::interval_polynomial`].
pub fn reflect(pdf: &PiecewisePDF) -> Result<PiecewisePDF, TraceDistError> {
    let order = match pdf.mode {
        PdfMode::Polynomial => None,
        PdfMode::Series { order } => Some(order),
    };
    assemble_pdf(&pdf.params().swapped(), order)
}

/// Closed form for `N = 2`, valid for arbitrary `a, b > -1`, `beta >= 0`:
///
/// ```text
///   P(t) = C t^{2a+1+beta} (1 - t/2)^{2b}
///          2F1((beta+1)/2, -b; a + (beta+3)/2; (t/(2-t))^2),   0 < t < 1,
/// ```
///
/// extended to `1 < t < 2` by the reflection symmetry. The result is exact
/// when `b` is a nonnegative integer (terminating series) and the constant's
/// gamma residues cancel; floating point otherwise.
pub fn closed_form_n2(params: &EnsembleParams, t: &Rat) -> Result<Scalar, TraceDistError> {
    if params.n() != 2 {
        return Err(TraceDistError::WrongDimension {
            expected: 2,
            got: params.n(),
        });
    }
    let two = rat_i64(2);
    if t.is_negative() || *t > two {
        return Err(TraceDistError::OutOfSupport {
            t: format_rational(t),
        });
    }
    if *t > Rat::one() {
        return closed_form_n2(&params.swapped(), &(&two - t));
    }
    let (a, b, beta) = (params.a(), params.b(), params.beta());
    let half_beta = beta / &two;
    let constant = &(&GammaProduct::gamma(&(a + b + &two + &half_beta))?
        * &GammaProduct::gamma(&(a + b + &two + beta))?)
        / &(&(&GammaProduct::gamma(&(a * &two + &two + beta))?
            * &GammaProduct::gamma(&(b + Rat::one()))?)
            * &GammaProduct::gamma(&(b + Rat::one() + &half_beta))?);
    let x = (t / (&two - t)).pow(2);
    let hyp = gauss_2f1(
        &Scalar::from((beta + Rat::one()) / &two),
        &Scalar::from(-b.clone()),
        &Scalar::from(a + (beta + rat_i64(3)) / &two),
        &Scalar::from(x),
    )?;
    let power = rat_pow_scalar(t, &(a * &two + Rat::one() + beta));
    let edge = rat_pow_scalar(&(Rat::one() - t / &two), &(b * &two));
    Ok(&(&(&Scalar::from(constant) * &power) * &edge) * &hyp)
}

/// Double-precision version of [`closed_form_n2`], for quadrature sweeps.
pub fn closed_form_n2_f64(params: &EnsembleParams, t: f64) -> Result<f64, TraceDistError> {
    if params.n() != 2 {
        return Err(TraceDistError::WrongDimension {
            expected: 2,
            got: params.n(),
        });
    }
    if !(0.0..=2.0).contains(&t) {
        return Err(TraceDistError::OutOfSupport { t: format!("{t}") });
    }
    if t > 1.0 {
        return closed_form_n2_f64(&params.swapped(), 2.0 - t);
    }
    let a = rat_to_f64(params.a());
    let b = rat_to_f64(params.b());
    let beta = rat_to_f64(params.beta());
    let constant = gamma_f64(a + b + 2.0 + beta / 2.0) * gamma_f64(a + b + 2.0 + beta)
        / (gamma_f64(2.0 * a + 2.0 + beta) * gamma_f64(b + 1.0) * gamma_f64(b + 1.0 + beta / 2.0));
    let x = (t / (2.0 - t)).powi(2);
    let (hyp, _) = gauss_2f1_f64((beta + 1.0) / 2.0, -b, a + (beta + 3.0) / 2.0, x)?;
    Ok(constant * t.powf(2.0 * a + 1.0 + beta) * (1.0 - t / 2.0).powf(2.0 * b) * hyp)
}

/// `x^e` for rational exponent `e`: exact for integer `e`, floating point
/// otherwise.
fn rat_pow_scalar(x: &Rat, e: &Rat) -> Scalar {
    if e.is_integer() {
        let k = e.to_integer().to_i32().expect("small exponent");
        if x.is_zero() {
            return if k == 0 { Scalar::one() } else { Scalar::zero() };
        }
        Scalar::from(x.pow(k))
    } else {
        Scalar::Float(rat_to_f64(x).powf(rat_to_f64(e)))
    }
}

/// Which terminating closed form of the `[0, 1)` density to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypergeomCase {
    /// `b = 1`, any `beta > 0`.
    BOne,
    /// `b = -beta/2`; requires `beta < 2` for normalisability.
    BNegHalfBeta,
}

/// Gauss-hypergeometric closed form of the density on `0 <= t < 1`:
/// prefactor `(F_N / S_N) t^{gamma_0}` times the case's `2F1`.
pub fn hypergeometric_pdf_01(
    params: &EnsembleParams,
    t: &Rat,
    case: HypergeomCase,
) -> Result<Scalar, TraceDistError> {
    if t.is_negative() || *t >= Rat::one() {
        return Err(TraceDistError::OutOfSupport {
            t: format_rational(t),
        });
    }
    let (n, a, b, beta) = (params.n(), params.a(), params.b(), params.beta());
    let nn = rat_i64(n as i64);
    let c_lower = beta * &nn * (&nn - Rat::one()) / rat_i64(2) + &nn * (a + Rat::one());
    let hyp = match case {
        HypergeomCase::BOne => {
            if *b != Rat::one() {
                return Err(TraceDistError::ParameterMismatch {
                    expected: "b = 1".into(),
                    got: format!("b = {}", format_rational(b)),
                });
            }
            gauss_2f1(
                &Scalar::from(-nn.clone()),
                &Scalar::from(-(&nn - Rat::one()) - rat_i64(2) / beta * (a + Rat::one())),
                &Scalar::from(c_lower.clone()),
                &Scalar::from(-(beta * t) / rat_i64(2)),
            )?
        }
        HypergeomCase::BNegHalfBeta => {
            if b != &(-(beta / rat_i64(2))) {
                return Err(TraceDistError::ParameterMismatch {
                    expected: "b = -beta/2".into(),
                    got: format!("b = {}", format_rational(b)),
                });
            }
            if *beta >= rat_i64(2) {
                return Err(TraceDistError::ParameterMismatch {
                    expected: "beta < 2".into(),
                    got: format!("beta = {}", format_rational(beta)),
                });
            }
            gauss_2f1(
                &Scalar::from(beta * &nn / rat_i64(2)),
                &Scalar::from(beta / rat_i64(2) * (&nn - Rat::one()) + a + Rat::one()),
                &Scalar::from(c_lower.clone()),
                &Scalar::from(t.clone()),
            )?
        }
    };
    let prefactor = &fixed_trace_f(n, a, beta) / &selberg(n, a, b, beta);
    let gamma0 = gamma_exponent(params, 0);
    let power = rat_pow_scalar(t, &gamma0);
    Ok(&(&Scalar::from(prefactor) * &power) * &hyp)
}

/// Propagates a solution vector of the piece-`p` system from `s0` to
/// `target_s` by power-series stepping about ordinary points.
///
/// The state is a value of the Frobenius vector solution of the shifted
/// system (see [`FrobeniusPiece`]). The nearest true singularities of the
/// solution sit behind the path (`s = 0` and `s = -1`; the integer points
/// crossed on the way are apparent singularities of the system which the
/// solution passes through analytically), so steps of length up to one —
/// at most half the distance to the nearest singular point — are
/// admissible. The recurrence itself, however, amplifies double-precision
/// noise by `1/dist(centre, nearest integer)` per order while the true
/// coefficients decay like `1/(1+s)`; each hop is therefore summed only up
/// to its smallest term, and a hop whose smallest term is still too large
/// relative to the series scale is rejected. This is the instability the
/// method is known for; failures surface as
/// [`TraceDistError::StepRejected`], never as silently wrong values.
pub fn continue_ordinary(
    params: &EnsembleParams,
    p: u32,
    state: &[f64],
    s0: f64,
    target_s: f64,
    order: usize,
) -> Result<Vec<f64>, TraceDistError> {
    if !params.assembly_ok() {
        return Err(TraceDistError::AssemblyUnsupported {
            b: format_rational(params.b()),
            beta: format_rational(params.beta()),
        });
    }
    let n = params.n() as usize;
    if p >= params.n() {
        return Err(TraceDistError::BadPieceIndex { p, n: params.n() });
    }
    assert!(s0 > 0.0 && target_s >= s0, "require 0 < s0 <= target_s");
    assert_eq!(state.len(), n + 1);
    let system = SystemF64::new(&params.with_b_plus_one(), p);
    let mut s = s0;
    let mut state = state.to_vec();
    while s < target_s {
        let step = (target_s - s).min(1.0);
        let coeffs = system.taylor_coefficients(s, &state, order);
        state = eval_truncated_at_min_term(&coeffs, step, s)?;
        s += step;
    }
    Ok(state)
}

/// Double-precision copy of the shifted tridiagonal system for piece `p`.
struct SystemF64 {
    n: usize,
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    lambda: Vec<f64>,
}

impl SystemF64 {
    fn new(shifted_params: &EnsembleParams, p: u32) -> Self {
        let sys = TridiagonalSystem::new(shifted_params);
        let n = sys.n();
        SystemF64 {
            n,
            sub: sys.sub.iter().map(rat_to_f64).collect(),
            diag: sys.diag.iter().map(rat_to_f64).collect(),
            sup: sys.sup.iter().map(rat_to_f64).collect(),
            lambda: (0..=n).map(|j| p as f64 - n as f64 + j as f64).collect(),
        }
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..=self.n)
            .map(|j| {
                let mut acc = self.diag[j] * v[j];
                if j > 0 {
                    acc += self.sub[j] * v[j - 1];
                }
                if j < self.n {
                    acc += self.sup[j] * v[j + 1];
                }
                acc
            })
            .collect()
    }

    /// Taylor coefficients of the solution about the ordinary point `s`:
    /// from `(Lambda_p + (u + s) I) G'(u) = T G(u)`, matching powers of `u`
    /// gives `G_{m+1} = (T G_m - m G_m) / ((m + 1)(Lambda + s))`.
    fn taylor_coefficients(&self, s: f64, state: &[f64], order: usize) -> Vec<Vec<f64>> {
        let mut coeffs = Vec::with_capacity(order + 1);
        coeffs.push(state.to_vec());
        for m in 0..order {
            let prev = &coeffs[m];
            let mut rhs = self.apply(prev);
            for (j, r) in rhs.iter_mut().enumerate() {
                *r -= m as f64 * prev[j];
                *r /= (self.lambda[j] + s) * (m as f64 + 1.0);
            }
            coeffs.push(rhs);
        }
        coeffs
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Term magnitudes `|G_m| u^m` decay at the solution's convergence rate
/// before roundoff noise (amplified by the near-singular divisions) takes
/// over and grows; the crossover index is the best truncation point.
fn min_term_index(coeffs: &[Vec<f64>], u: f64) -> (usize, f64, f64) {
    let mut u_pow = 1.0f64;
    let mut scale = 0.0f64;
    let mut best = (0usize, f64::INFINITY);
    for (m, c) in coeffs.iter().enumerate() {
        let mag = inf_norm(c) * u_pow.abs();
        scale = scale.max(mag);
        if m >= 4 && mag < best.1 {
            best = (m, mag);
        }
        u_pow *= u;
    }
    (best.0, best.1, scale)
}

/// Evaluates the vector series truncated at its smallest term, rejecting
/// the step when that term is still large relative to the series scale.
fn eval_truncated_at_min_term(
    coeffs: &[Vec<f64>],
    u: f64,
    s: f64,
) -> Result<Vec<f64>, TraceDistError> {
    let (cut, tail, scale) = min_term_index(coeffs, u);
    if tail > 1e-5 * scale.max(f64::MIN_POSITIVE) {
        return Err(TraceDistError::StepRejected { s });
    }
    Ok(eval_vector_series(&coeffs[..=cut], u))
}

fn eval_vector_series(coeffs: &[Vec<f64>], u: f64) -> Vec<f64> {
    let n = coeffs[0].len();
    let mut out = vec![0.0; n];
    for c in coeffs.iter().rev() {
        for j in 0..n {
            out[j] = out[j] * u + c[j];
        }
    }
    out
}

/// A density evaluator for the non-polynomial regime (`a` not a
/// nonnegative integer), backed by per-piece ladders of series expansion
/// centres built with the ordinary-point stepping. Experimental, like the
/// continuation itself.
pub struct ContinuedDensity {
    params: EnsembleParams,
    pieces: Vec<ContinuedPiece>,
}

struct ContinuedPiece {
    p: u32,
    gamma: f64,
    /// `weight / h_0`, multiplying the binomial combination of the state.
    scale: f64,
    /// `weight`, multiplying the normalized series directly.
    weight: f64,
    /// Normalized combination series (f, with f_0 = 1), f64.
    f_series: Vec<f64>,
    /// True when the combination series terminated: the piece is exactly
    /// `weight s^gamma F(s)` with polynomial `F`.
    exact: bool,
    /// Expansion centres `(s_c, vector Taylor coefficients about s_c)`.
    centres: Vec<(f64, Vec<Vec<f64>>)>,
    binom_weights: Vec<f64>,
}

impl ContinuedDensity {
    pub fn build(params: &EnsembleParams, order: usize) -> Result<Self, TraceDistError> {
        let n = params.n();
        let norms = NormalizationSet::build(params);
        let mut pieces = Vec::with_capacity(n as usize);
        for p in 0..n {
            let frob = frobenius_piece(params, p, order)?;
            let weight = piece_weight(params, &norms, p)?.to_f64();
            let h0 = rat_to_f64(&frob.series[0]);
            let f_series: Vec<f64> = frob.f.iter().map(rat_to_f64).collect();
            let tail_zero =
                f_series.len() > 4 && f_series[f_series.len() - 4..].iter().all(|c| *c == 0.0);
            let gamma = rat_to_f64(&frob.gamma);
            let binom_weights: Vec<f64> =
                (0..=n).map(|k| rat_to_f64(&binomial(n, n - k))).collect();
            let mut centres = Vec::new();
            if !tail_zero {
                // Seed centre at s = 1/2, where the Frobenius series (unit
                // radius) converges comfortably; then hop right in unit
                // steps so every centre stays at a half-integer, the
                // farthest possible from the system's apparent
                // singularities.
                let mut s_c = 0.5f64;
                let mut state: Vec<f64> = (0..=n as usize)
                    .map(|j| {
                        let mut acc = 0.0;
                        for g in frob.raw.iter().rev() {
                            acc = acc * s_c + rat_to_f64(&g[j]);
                        }
                        acc * s_c.powf(rat_to_f64(&frob.exponent))
                    })
                    .collect();
                let system = SystemF64::new(&params.with_b_plus_one(), p);
                let reach = (n - p) as f64;
                loop {
                    let coeffs = system.taylor_coefficients(s_c, &state, order);
                    centres.push((s_c, coeffs));
                    if s_c + 0.5 >= reach {
                        break;
                    }
                    state =
                        eval_truncated_at_min_term(centres.last().unwrap().1.as_slice(), 1.0, s_c)?;
                    s_c += 1.0;
                }
            }
            pieces.push(ContinuedPiece {
                p,
                gamma,
                scale: weight / h0,
                weight,
                f_series,
                exact: tail_zero,
                centres,
                binom_weights,
            });
        }
        Ok(ContinuedDensity {
            params: params.clone(),
            pieces,
        })
    }

    /// Density value at `t`, using the piece's own series near its left
    /// endpoint and the nearest continuation centre beyond it.
    pub fn eval(&self, t: f64) -> Result<f64, TraceDistError> {
        if t < 0.0 || t > self.params.n() as f64 {
            return Err(TraceDistError::OutOfSupport { t: format!("{t}") });
        }
        let mut acc = 0.0;
        for piece in &self.pieces {
            let s = t - piece.p as f64;
            if s <= 0.0 {
                continue;
            }
            if piece.exact || s <= 0.7 {
                let mut f = 0.0;
                for c in piece.f_series.iter().rev() {
                    f = f * s + c;
                }
                acc += piece.weight * s.powf(piece.gamma) * f;
                continue;
            }
            let (s_c, coeffs) = piece
                .centres
                .iter()
                .min_by(|x, y| (x.0 - s).abs().partial_cmp(&(y.0 - s).abs()).unwrap())
                .ok_or(TraceDistError::StepRejected { s })?;
            let state = eval_truncated_at_min_term(coeffs, s - s_c, *s_c)?;
            let combo: f64 = state
                .iter()
                .zip(&piece.binom_weights)
                .map(|(g, w)| g * w)
                .sum();
            acc += piece.scale * combo;
        }
        Ok(acc)
    }
}
