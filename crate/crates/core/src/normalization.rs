//! Closed-form normalization constants of the ensemble and its limits:
//! the Selberg integral, Laguerre-type gamma products, the fixed-trace
//! constant, and the two-block constants entering the piecewise density.

use num::One;

use crate::params::EnsembleParams;
use crate::scalar::{GammaProduct, Rat};

fn gamma(q: &Rat) -> GammaProduct {
    GammaProduct::gamma(q).expect("gamma argument must be positive for valid parameters")
}

fn half(beta: &Rat) -> Rat {
    beta / Rat::from_integer(2.into())
}

/// The Selberg integral
///
/// ```text
///   S_N(a,b,beta) = int_(0,1)^N prod_l t_l^a (1-t_l)^b prod_{j<k} |t_k - t_j|^beta dt,
/// ```
///
/// evaluated as its closed gamma product. For `N = 1` this is the Euler
/// beta function `B(a+1, b+1)`.
pub fn selberg(n: u32, a: &Rat, b: &Rat, beta: &Rat) -> GammaProduct {
    let h = half(beta);
    let one = Rat::one();
    let norm = gamma(&(&one + &h));
    let mut acc = GammaProduct::one();
    for j in 0..n as i64 {
        let j = Rat::from_integer(j.into());
        let num1 = gamma(&(a + &one + &j * &h));
        let num2 = gamma(&(b + &one + &j * &h));
        let num3 = gamma(&(&one + (&j + &one) * &h));
        let den = gamma(
            &(a + b + Rat::from_integer(2.into())
                + (Rat::from_integer((n as i64 - 1).into()) + &j) * &h),
        );
        acc = &acc * &(&(&(&num1 * &num2) * &num3) / &(&den * &norm));
    }
    acc
}

/// The Laguerre normalization
///
/// ```text
///   W_{a,beta,n} = int_(0,inf)^n prod_l x_l^a e^{-x_l} prod_{j<k} |x_k - x_j|^beta dx
///                = prod_{j=0}^{n-1} Gamma(a+1+beta j/2) Gamma(1+beta(j+1)/2) / Gamma(1+beta/2).
/// ```
///
/// `n = 0` gives 1 (empty product). The same product also evaluates the
/// hard-wall Laguerre partition function appearing in gap-probability
/// identities.
pub fn laguerre_w(a: &Rat, beta: &Rat, n: u32) -> GammaProduct {
    let h = half(beta);
    let one = Rat::one();
    let norm = gamma(&(&one + &h));
    let mut acc = GammaProduct::one();
    for j in 0..n as i64 {
        let j = Rat::from_integer(j.into());
        let num1 = gamma(&(a + &one + &j * &h));
        let num2 = gamma(&(&one + (&j + &one) * &h));
        acc = &acc * &(&(&num1 * &num2) / &norm);
    }
    acc
}

/// Normalization of the fixed-trace Laguerre ensemble:
/// `F_N(a,beta) = W_{a,beta,N} / Gamma((a+1)N + beta N(N-1)/2)`.
pub fn fixed_trace_f(n: u32, a: &Rat, beta: &Rat) -> GammaProduct {
    let w = laguerre_w(a, beta, n);
    let nn = Rat::from_integer((n as i64).into());
    let arg = (a + Rat::one()) * &nn + half(beta) * &nn * (&nn - Rat::one());
    &w / &gamma(&arg)
}

/// The exponent of the two-block Laplace image:
///
/// ```text
///   eta_N(a,b,p,beta) = (b+1)p + (beta/2)p(p-1) + (a+1)(N-p) + (beta/2)(N-p)(N-p-1).
/// ```
pub fn eta(n: u32, a: &Rat, b: &Rat, p: u32, beta: &Rat) -> Rat {
    assert!(p <= n);
    let h = half(beta);
    let one = Rat::one();
    let pp = Rat::from_integer((p as i64).into());
    let q = Rat::from_integer((n as i64 - p as i64).into());
    (b + &one) * &pp + &h * &pp * (&pp - &one) + (a + &one) * &q + &h * &q * (&q - &one)
}

/// The two-block normalization
/// `K_N(a,b,p,beta) = W_{b,beta,p} W_{a,beta,N-p} / Gamma(eta_N(a,b,p,beta))`,
/// the constant attached to the density piece supported on `t >= p`.
/// `K_N(a,b,0,beta)` reduces to `F_N(a,beta)`.
pub fn k_norm(n: u32, a: &Rat, b: &Rat, p: u32, beta: &Rat) -> GammaProduct {
    assert!(p <= n);
    let w_b = laguerre_w(b, beta, p);
    let w_a = laguerre_w(a, beta, n - p);
    &(&w_b * &w_a) / &gamma(&eta(n, a, b, p, beta))
}

/// All normalization constants of one ensemble, indexed as the piecewise
/// assembly consumes them.
#[derive(Debug, Clone)]
pub struct NormalizationSet {
    /// Selberg integral `S_N(a,b,beta)`.
    pub s: GammaProduct,
    /// Fixed-trace constant `F_N(a,beta)`.
    pub f: GammaProduct,
    /// `K_N(a,b,p,beta)` for `p = 0..=N`.
    pub k: Vec<GammaProduct>,
    /// `eta_N(a,b,p,beta)` for `p = 0..=N`.
    pub eta: Vec<Rat>,
}

impl NormalizationSet {
    pub fn build(params: &EnsembleParams) -> Self {
        let (n, a, b, beta) = (params.n(), params.a(), params.b(), params.beta());
        let s = selberg(n, a, b, beta);
        let f = fixed_trace_f(n, a, beta);
        let k = (0..=n).map(|p| k_norm(n, a, b, p, beta)).collect();
        let eta_seq = (0..=n).map(|p| eta(n, a, b, p, beta)).collect();
        NormalizationSet {
            s,
            f,
            k,
            eta: eta_seq,
        }
    }
}
