//! The Fourier-Laplace side of the trace distribution.
//!
//! The deformed ensemble averages `H_p(x)` (elementary symmetric function
//! `e_p(1-t_1, ..., 1-t_N)` inserted, weight exponent `b - 1`) satisfy the
//! matrix ODE `x H' = (x X + Y) H` with bidiagonal `(N+1) x (N+1)`
//! matrices. Expanding in powers of `x` yields a first-order vector
//! recurrence for the coefficient columns; the final component of column
//! `k` carries `(-1)^k m_k / k!`, where `m_k` is the `k`-th trace moment.
//!
//! For `-1 < b <= 0` the components below `N` correspond to divergent
//! integrals and the recurrence initialization has no solution, so the
//! moments are read instead from component 0 of the system built at
//! `b + 1`, whose weight exponent is the original `b`. That shifted route
//! is division-free for every valid parameter set.

use num::{One, Signed, Zero};
use thiserror::Error;

use crate::normalization::selberg;
use crate::params::EnsembleParams;
use crate::scalar::{rat_i64, GammaProduct, Rat};

/// Default series order when a caller does not specify one.
pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaplaceError {
    /// A lowering coefficient vanished, so initialization components below
    /// index `component` do not exist (happens for `b = 0` and for
    /// `b = -(beta/2) m`, `m = 1..N-1`).
    #[error("division by zero: lowering coefficient D[{component}] vanishes")]
    DivisionByZero { component: usize },
}

/// The ladder coefficients of the differential-difference system:
/// `B_p = p (a + b + 1 + (beta/2)(2N - p - 1))` on the diagonal and
/// `D_p = p ((beta/2)(N - p) + b)` on the subdiagonal, `p = 0..=N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderCoefficients {
    pub b: Vec<Rat>,
    pub d: Vec<Rat>,
}

impl LadderCoefficients {
    pub fn new(params: &EnsembleParams) -> Self {
        let n = params.n() as i64;
        let half_beta = params.beta() / rat_i64(2);
        let mut b = Vec::with_capacity(n as usize + 1);
        let mut d = Vec::with_capacity(n as usize + 1);
        for p in 0..=n {
            let pr = rat_i64(p);
            b.push(
                &pr * (params.a()
                    + params.b()
                    + Rat::one()
                    + &half_beta * rat_i64(2 * n - p - 1)),
            );
            d.push(&pr * (&half_beta * rat_i64(n - p) + params.b()));
        }
        LadderCoefficients { b, d }
    }

    fn n(&self) -> usize {
        self.b.len() - 1
    }

    /// Index of the highest vanishing lowering coefficient, if any.
    fn zero_lowering(&self) -> Option<usize> {
        (1..self.d.len()).rev().find(|&p| self.d[p].is_zero())
    }
}

/// The dense `(N+1) x (N+1)` system matrices: `X` (coefficient of `x`,
/// upper bidiagonal) and `Y` (constant part, lower bidiagonal).
pub fn build_xy(params: &EnsembleParams) -> (Vec<Vec<Rat>>, Vec<Vec<Rat>>) {
    let n = params.n() as usize;
    let ladder = LadderCoefficients::new(params);
    let mut x = vec![vec![Rat::zero(); n + 1]; n + 1];
    let mut y = vec![vec![Rat::zero(); n + 1]; n + 1];
    for p in 0..=n {
        x[p][p] = -rat_i64((n - p) as i64);
        if p < n {
            x[p][p + 1] = rat_i64((n - p) as i64);
        }
        y[p][p] = -ladder.b[p].clone();
        if p > 0 {
            y[p][p - 1] = ladder.d[p].clone();
        }
    }
    (x, y)
}

/// Row `p` of `X v`: `(N - p)(v[p+1] - v[p])`, zero in the last row.
fn apply_x(n: usize, v: &[Rat]) -> Vec<Rat> {
    (0..=n)
        .map(|p| {
            if p < n {
                rat_i64((n - p) as i64) * (&v[p + 1] - &v[p])
            } else {
                Rat::zero()
            }
        })
        .collect()
}

/// Order-zero coefficient column, normalized to `c[N] = 1`:
/// `c[N - l] = prod_{s=1}^{l} B[N+1-s] / D[N+1-s]`.
pub fn c0_vector(params: &EnsembleParams) -> Result<Vec<Rat>, LaplaceError> {
    let ladder = LadderCoefficients::new(params);
    let n = ladder.n();
    let mut c = vec![Rat::zero(); n + 1];
    c[n] = Rat::one();
    for p in (1..=n).rev() {
        if ladder.d[p].is_zero() {
            return Err(LaplaceError::DivisionByZero { component: p - 1 });
        }
        c[p - 1] = &c[p] * &ladder.b[p] / &ladder.d[p];
    }
    Ok(c)
}

/// One step of the vector recurrence `(l I - Y) c_l = X c_{l-1}`, solved by
/// forward substitution (the system matrix is lower bidiagonal with
/// diagonal `l + B_p` and subdiagonal `-D_p`).
pub fn coeff_step(params: &EnsembleParams, prev: &[Rat], l: u32) -> Vec<Rat> {
    let ladder = LadderCoefficients::new(params);
    coeff_step_inner(&ladder, prev, l)
}

fn coeff_step_inner(ladder: &LadderCoefficients, prev: &[Rat], l: u32) -> Vec<Rat> {
    assert!(l >= 1);
    let n = ladder.n();
    assert_eq!(prev.len(), n + 1);
    let rhs = apply_x(n, prev);
    let lr = rat_i64(l as i64);
    let mut c = Vec::with_capacity(n + 1);
    for p in 0..=n {
        let pivot = &lr + &ladder.b[p];
        assert!(!pivot.is_zero(), "zero pivot in coefficient recurrence");
        let mut val = rhs[p].clone();
        if p > 0 {
            val += &ladder.d[p] * &c[p - 1];
        }
        c.push(val / pivot);
    }
    c
}

/// Normalization convention of a [`CoeffTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    /// `c[N][0] = 1`; entries are plain rationals.
    #[default]
    Normalized,
    /// `c[N][0] = S_N(a,b,beta)`; the stored rational rows are understood
    /// as multiples of the Selberg integral, exposed exactly through
    /// [`CoeffTable::scaled_entry`].
    Selberg,
}

/// Power-series coefficient table `c[p][l]` of the transformed system.
///
/// Rows below `N` exist only while every lowering coefficient `D_p`
/// (`p >= 1`) is nonzero; otherwise the corresponding integrals diverge and
/// those rows are `None`, with row `N` still supplied through the shifted
/// moment route.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    n: usize,
    order: usize,
    rows: Vec<Option<Vec<Rat>>>,
    scale: GammaProduct,
    convention: Convention,
}

impl CoeffTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    /// Row `p` as a power series in `x` (in units of the scale), if
    /// defined for these parameters.
    pub fn row(&self, p: usize) -> Option<&[Rat]> {
        self.rows[p].as_deref()
    }

    pub fn entry(&self, p: usize, l: usize) -> Option<&Rat> {
        self.rows[p].as_ref().map(|r| &r[l])
    }

    /// Entry with the convention's scale applied exactly.
    pub fn scaled_entry(&self, p: usize, l: usize) -> Option<GammaProduct> {
        self.entry(p, l).map(|r| &self.scale * r)
    }
}

/// Builds the coefficient table up to column `order` in the normalized
/// convention (`c[N][0] = 1`).
pub fn hhat_series(params: &EnsembleParams, order: usize) -> CoeffTable {
    hhat_series_with_convention(params, order, Convention::Normalized)
}

/// Builds the coefficient table in the requested convention. The rational
/// rows are identical in both; the Selberg convention carries the exact
/// gamma-product scale used by the `c[0][0] = S_N(a, b-1, beta)`
/// consistency check.
pub fn hhat_series_with_convention(
    params: &EnsembleParams,
    order: usize,
    convention: Convention,
) -> CoeffTable {
    let ladder = LadderCoefficients::new(params);
    let n = ladder.n();
    let scale = match convention {
        Convention::Normalized => GammaProduct::one(),
        Convention::Selberg => selberg(params.n(), params.a(), params.b(), params.beta()),
    };
    if ladder.zero_lowering().is_none() {
        let mut columns = Vec::with_capacity(order + 1);
        columns.push(c0_vector(params).expect("nonzero lowering checked above"));
        for l in 1..=order {
            let next = coeff_step_inner(&ladder, columns.last().unwrap(), l as u32);
            columns.push(next);
        }
        let rows = (0..=n)
            .map(|p| Some((0..=order).map(|l| columns[l][p].clone()).collect()))
            .collect();
        return CoeffTable {
            n,
            order,
            rows,
            scale,
            convention,
        };
    }
    // Degenerate lowering: only the final row is defined; read it from the
    // shifted system, c[N][l] = (-1)^l m_l / l!.
    let m = moments(params, order);
    let mut row_n = Vec::with_capacity(order + 1);
    let mut fact = Rat::one();
    for (l, ml) in m.iter().enumerate() {
        if l > 0 {
            fact *= rat_i64(l as i64);
        }
        let sign = if l % 2 == 0 { Rat::one() } else { -Rat::one() };
        row_n.push(sign * ml / &fact);
    }
    let mut rows: Vec<Option<Vec<Rat>>> = vec![None; n + 1];
    rows[n] = Some(row_n);
    CoeffTable {
        n,
        order,
        rows,
        scale,
        convention,
    }
}

/// Exact trace moments `m_0..=m_{k_max}`.
///
/// For `b > 0` the moments are `(-1)^k k! c_k[N]` from the table at the
/// given parameters; for `-1 < b <= 0` they are read from component 0 of
/// the table at `b + 1` (normalized by its own constant term), which is the
/// only division-free extraction there.
pub fn moments(params: &EnsembleParams, k_max: usize) -> Vec<Rat> {
    if params.b().is_positive() {
        moments_final_component(params, k_max).expect("b > 0 has nonzero lowering coefficients")
    } else {
        moments_shifted_first_component(params, k_max)
    }
}

/// Moment extraction from the final component at the given parameters.
/// Fails when some lowering coefficient vanishes (`b = 0` or
/// `b = -(beta/2) m`).
pub fn moments_final_component(
    params: &EnsembleParams,
    k_max: usize,
) -> Result<Vec<Rat>, LaplaceError> {
    let ladder = LadderCoefficients::new(params);
    if let Some(p) = ladder.zero_lowering() {
        return Err(LaplaceError::DivisionByZero { component: p - 1 });
    }
    let n = ladder.n();
    let mut col = c0_vector(params)?;
    let mut out = Vec::with_capacity(k_max + 1);
    let mut fact = Rat::one();
    out.push(col[n].clone());
    for k in 1..=k_max {
        col = coeff_step_inner(&ladder, &col, k as u32);
        fact *= rat_i64(k as i64);
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        out.push(sign * &fact * &col[n]);
    }
    Ok(out)
}

/// Moment extraction from component 0 of the system at `b + 1`; valid for
/// every `b > -1` and the only safe route for `-1 < b <= 0`.
pub fn moments_shifted_first_component(params: &EnsembleParams, k_max: usize) -> Vec<Rat> {
    let shifted = params.with_b_plus_one();
    let ladder = LadderCoefficients::new(&shifted);
    debug_assert!(ladder.zero_lowering().is_none());
    let mut col = c0_vector(&shifted).expect("shifted lowering coefficients are positive");
    let c00 = col[0].clone();
    let mut out = Vec::with_capacity(k_max + 1);
    let mut fact = Rat::one();
    out.push(Rat::one());
    for k in 1..=k_max {
        col = coeff_step_inner(&ladder, &col, k as u32);
        fact *= rat_i64(k as i64);
        let sign = if k % 2 == 0 { Rat::one() } else { -Rat::one() };
        out.push(sign * &fact * &col[0] / &c00);
    }
    out
}
