//! Jack-polynomial machinery: generalized Pochhammer symbols, the value of
//! the renormalized Jack polynomial at all-ones arguments, partition-sum
//! formulas for the trace moments and for the density's series coefficients
//! on `[0, 1]`, the moment duality under `(N, beta) -> (-beta N/2, 4/beta)`,
//! and a scalar Gauss 2F1 evaluator.

use num::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::params::EnsembleParams;
use crate::partition::{partitions_of, Partition};
use crate::scalar::{rat_i64, Rat, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JackError {
    #[error("operation requires beta > 0 (alpha = 2/beta)")]
    BetaNotPositive,
    #[error("fast path requires b = {expected}, got b = {got}")]
    CaseMismatch { expected: String, got: String },
    #[error("hypergeometric series does not converge (|x| >= 1 and non-terminating)")]
    NonConvergent,
    #[error("hypergeometric lower parameter hit a pole before termination")]
    HypergeometricPole,
}

/// The parameter combinations entering every moment formula:
/// `u1 = (beta/2)(N-1) + a + 1`, `u2 = beta(N-1) + a + b + 2`, and the Jack
/// parameter `alpha = 2/beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivedParams {
    pub u1: Rat,
    pub u2: Rat,
    pub alpha: Rat,
}

impl DerivedParams {
    pub fn new(params: &EnsembleParams) -> Result<Self, JackError> {
        if !params.beta().is_positive() {
            return Err(JackError::BetaNotPositive);
        }
        let nm1 = rat_i64(params.n() as i64 - 1);
        let half_beta = params.beta() / rat_i64(2);
        let u1 = &half_beta * &nm1 + params.a() + Rat::one();
        let u2 = params.beta() * &nm1 + params.a() + params.b() + rat_i64(2);
        debug_assert!((&u2 - &u1).is_positive());
        Ok(DerivedParams {
            u1,
            u2,
            alpha: rat_i64(2) / params.beta(),
        })
    }
}

/// Rising factorial `(x)_k = x (x+1) ... (x+k-1)`.
pub fn pochhammer(x: &Rat, k: u32) -> Rat {
    let mut acc = Rat::one();
    let mut term = x.clone();
    for _ in 0..k {
        acc *= &term;
        term += Rat::one();
    }
    acc
}

/// Generalized Pochhammer symbol
///
/// ```text
///   [u]_kappa^(alpha) = prod_j prod_{i=0}^{kappa_j - 1} (u - (j-1)/alpha + i),
/// ```
///
/// computed as a finite product (never as a gamma ratio), so it is defined
/// for every `u` including the negative and formal values required by the
/// moment duality.
pub fn gen_pochhammer(u: &Rat, kappa: &Partition, alpha: &Rat) -> Rat {
    let mut acc = Rat::one();
    for (row, &part) in kappa.parts().iter().enumerate() {
        let base = u - rat_i64(row as i64) / alpha;
        let mut term = base;
        for _ in 0..part {
            acc *= &term;
            term += Rat::one();
        }
    }
    acc
}

/// Value of the renormalized Jack polynomial `C_kappa^(alpha)` at `n`
/// all-ones arguments:
///
/// ```text
///   C = alpha^|kappa| |kappa|!  b_kappa / (d'_kappa h_kappa),
///   b_kappa  = prod (alpha a'(s) + n - l'(s)),
///   d'_kappa = prod (alpha (a(s) + 1) + l(s)),
///   h_kappa  = prod (alpha a(s) + l(s) + 1),
/// ```
///
/// over the diagram squares `s`. `n` may be formal (rational or negative);
/// for a positive integer `n` smaller than the number of parts the value
/// vanishes through `b_kappa`.
pub fn jack_unity(kappa: &Partition, alpha: &Rat, n: &Rat) -> Rat {
    let weight = kappa.weight();
    let mut b = Rat::one();
    let mut d = Rat::one();
    let mut h = Rat::one();
    for (i, j) in kappa.squares() {
        let arm = rat_i64(kappa.arm(i, j) as i64);
        let leg = rat_i64(kappa.leg(i, j) as i64);
        let coarm = rat_i64(kappa.coarm(i, j) as i64);
        let coleg = rat_i64(kappa.coleg(i, j) as i64);
        b *= alpha * &coarm + n - &coleg;
        d *= alpha * (&arm + Rat::one()) + &leg;
        h *= alpha * &arm + &leg + Rat::one();
    }
    let mut alpha_pow = Rat::one();
    let mut fact = Rat::one();
    for k in 1..=weight as i64 {
        alpha_pow *= alpha;
        fact *= rat_i64(k);
    }
    alpha_pow * fact * b / (d * h)
}

/// `k`-th moment of the trace as the exact partition sum
///
/// ```text
///   m_k = sum_{|kappa| = k, len(kappa) <= N} [u1]_kappa / [u2]_kappa * C_kappa((1)^N)
/// ```
///
/// with Jack parameter `alpha = 2/beta`. Requires `beta > 0`.
pub fn moment_oracle(params: &EnsembleParams, k: u32) -> Result<Rat, JackError> {
    let derived = DerivedParams::new(params)?;
    let n = rat_i64(params.n() as i64);
    let mut acc = Rat::zero();
    for kappa in partitions_of(k, params.n()) {
        let num = gen_pochhammer(&derived.u1, &kappa, &derived.alpha);
        let den = gen_pochhammer(&derived.u2, &kappa, &derived.alpha);
        acc += num / den * jack_unity(&kappa, &derived.alpha, &n);
    }
    Ok(acc)
}

/// The same moment evaluated through the functional equation
///
/// ```text
///   m_k(N, beta, a, b) = (-2/beta)^k m_k(-beta N/2, 4/beta, -2a/beta, -2b/beta),
/// ```
///
/// summing over all partitions of `k` (length at most `k`); the length
/// restriction of the direct sum is enforced implicitly by zeros of
/// `b_kappa`. Exact agreement with [`moment_oracle`] is a strong
/// cross-check of the whole partition layer.
pub fn moment_dual(params: &EnsembleParams, k: u32) -> Result<Rat, JackError> {
    if !params.beta().is_positive() {
        return Err(JackError::BetaNotPositive);
    }
    let beta = params.beta();
    let n_formal = -(beta * rat_i64(params.n() as i64)) / rat_i64(2);
    let beta_dual = rat_i64(4) / beta;
    let a_dual = -(rat_i64(2) * params.a()) / beta;
    let b_dual = -(rat_i64(2) * params.b()) / beta;
    let alpha_dual = rat_i64(2) / &beta_dual;
    let u1 = &beta_dual / rat_i64(2) * (&n_formal - Rat::one()) + &a_dual + Rat::one();
    let u2 = &beta_dual * (&n_formal - Rat::one()) + &a_dual + &b_dual + rat_i64(2);
    let mut acc = Rat::zero();
    for kappa in partitions_of(k, k.max(1)) {
        // For kappa with first part > N the Jack factor vanishes exactly
        // (these mirror the length-excluded terms of the direct sum, whose
        // dual denominators may vanish too); test it before dividing.
        let c = jack_unity(&kappa, &alpha_dual, &n_formal);
        if c.is_zero() {
            continue;
        }
        let num = gen_pochhammer(&u1, &kappa, &alpha_dual);
        let den = gen_pochhammer(&u2, &kappa, &alpha_dual);
        acc += num / den * c;
    }
    let scale = (-rat_i64(2) / beta).pow(k as i32);
    Ok(scale * acc)
}

/// Closed forms for the first three moments (rational in all parameters,
/// valid for every `beta >= 0`). `k` must be 1, 2 or 3.
pub fn moment_closed_form(params: &EnsembleParams, k: u32) -> Rat {
    let n = rat_i64(params.n() as i64);
    let one = Rat::one();
    let half_beta = params.beta() / rat_i64(2);
    let u1 = &half_beta * (&n - &one) + params.a() + &one;
    let u2 = params.beta() * (&n - &one) + params.a() + params.b() + rat_i64(2);
    let beta = params.beta();
    // Each summand's parameter ratio is formed only when its combinatorial
    // prefactor is nonzero, so spurious poles at small N cannot occur.
    let term = |pref: Rat, num: &[Rat], den: &[Rat]| -> Rat {
        if pref.is_zero() {
            return Rat::zero();
        }
        let p: Rat = num.iter().product();
        let q: Rat = den.iter().product();
        pref * p / q
    };
    match k {
        1 => &n * &u1 / &u2,
        2 => {
            let t1 = term(
                &n * (&n - &one) / (&one + &half_beta),
                &[u1.clone(), &u1 - &half_beta],
                &[u2.clone(), &u2 - &half_beta],
            );
            let t2 = term(
                &n * (&one + &half_beta * &n) / (&one + &half_beta),
                &[u1.clone(), &u1 + &one],
                &[u2.clone(), &u2 + &one],
            );
            t1 + t2
        }
        3 => {
            let quarter_beta = beta / rat_i64(4);
            let t1 = term(
                &n * (&n - &one) * (&n - rat_i64(2)) / ((&one + &half_beta) * (&one + beta)),
                &[u1.clone(), &u1 - &half_beta, &u1 - beta],
                &[u2.clone(), &u2 - &half_beta, &u2 - beta],
            );
            let t2 = term(
                rat_i64(3) * &n * (&n - &one) * (&one + &half_beta * &n)
                    / ((&one + &quarter_beta) * (&one + beta)),
                &[u1.clone(), &u1 + &one, &u1 - &half_beta],
                &[u2.clone(), &u2 + &one, &u2 - &half_beta],
            );
            let t3 = term(
                &n * (&one + &quarter_beta * &n) * (&one + &half_beta * &n)
                    / ((&one + &quarter_beta) * (&one + &half_beta)),
                &[u1.clone(), &u1 + &one, &u1 + rat_i64(2)],
                &[u2.clone(), &u2 + &one, &u2 + rat_i64(2)],
            );
            t1 + t2 + t3
        }
        _ => panic!("closed forms cover k = 1, 2, 3 only"),
    }
}

/// Degree-`p` coefficient of the density's expansion on `[0, 1]`,
///
/// ```text
///   P(t) = (F_N / S_N) t^{gamma_0} sum_p alpha_p t^p,
/// ```
///
/// dispatching to the terminating fast paths for `b = 1` and
/// `b = -beta/2` and otherwise to the general partition sum.
pub fn alpha_coeff(params: &EnsembleParams, p: u32) -> Result<Rat, JackError> {
    if *params.b() == Rat::one() {
        return alpha_coeff_b_one(params, p);
    }
    if params.b() == &(-(params.beta() / rat_i64(2))) {
        return alpha_coeff_b_neg_half_beta(params, p);
    }
    alpha_coeff_series(params, p)
}

fn base_pochhammer(params: &EnsembleParams, p: u32) -> Rat {
    // (beta N(N-1)/2 + N(a+1))_p
    let n = rat_i64(params.n() as i64);
    let base = params.beta() * &n * (&n - Rat::one()) / rat_i64(2) + &n * (params.a() + Rat::one());
    pochhammer(&base, p)
}

/// General partition-sum formula for `alpha_p`.
pub fn alpha_coeff_series(params: &EnsembleParams, p: u32) -> Result<Rat, JackError> {
    let derived = DerivedParams::new(params)?;
    let n = rat_i64(params.n() as i64);
    let lag = params.a() + params.beta() * (&n - Rat::one()) / rat_i64(2) + Rat::one();
    let neg_b = -params.b().clone();
    let mut acc = Rat::zero();
    for kappa in partitions_of(p, params.n()) {
        acc += gen_pochhammer(&neg_b, &kappa, &derived.alpha)
            * gen_pochhammer(&lag, &kappa, &derived.alpha)
            * jack_unity(&kappa, &derived.alpha, &n);
    }
    let mut fact = Rat::one();
    for k in 1..=p as i64 {
        fact *= rat_i64(k);
    }
    Ok(acc / (fact * base_pochhammer(params, p)))
}

/// Terminating closed form for `b = 1`; vanishes for `p > N`.
pub fn alpha_coeff_b_one(params: &EnsembleParams, p: u32) -> Result<Rat, JackError> {
    if *params.b() != Rat::one() {
        return Err(JackError::CaseMismatch {
            expected: "1".into(),
            got: crate::scalar::format_rational(params.b()),
        });
    }
    if !params.beta().is_positive() {
        return Err(JackError::BetaNotPositive);
    }
    let n = rat_i64(params.n() as i64);
    let first = pochhammer(&-n.clone(), p);
    let second = pochhammer(
        &(-(&n - Rat::one()) - rat_i64(2) / params.beta() * (params.a() + Rat::one())),
        p,
    );
    let mut fact = Rat::one();
    for k in 1..=p as i64 {
        fact *= rat_i64(k);
    }
    let scale = (-(params.beta() / rat_i64(2))).pow(p as i32);
    Ok(first * second * scale / (fact * base_pochhammer(params, p)))
}

/// Closed form for `b = -beta/2` (normalisable only for `beta < 2`).
pub fn alpha_coeff_b_neg_half_beta(params: &EnsembleParams, p: u32) -> Result<Rat, JackError> {
    if params.b() != &(-(params.beta() / rat_i64(2))) {
        return Err(JackError::CaseMismatch {
            expected: format!(
                "-beta/2 = {}",
                crate::scalar::format_rational(&(-(params.beta() / rat_i64(2))))
            ),
            got: crate::scalar::format_rational(params.b()),
        });
    }
    let n = rat_i64(params.n() as i64);
    let first = pochhammer(&(params.beta() * &n / rat_i64(2)), p);
    let second = pochhammer(
        &(params.beta() / rat_i64(2) * (&n - Rat::one()) + params.a() + Rat::one()),
        p,
    );
    let mut fact = Rat::one();
    for k in 1..=p as i64 {
        fact *= rat_i64(k);
    }
    Ok(first * second / (fact * base_pochhammer(params, p)))
}

fn nonpositive_integer(r: &Rat) -> Option<u32> {
    if r.is_integer() && !r.is_positive() {
        (-r.to_integer()).to_u32()
    } else {
        None
    }
}

/// Gauss hypergeometric series `2F1(a, b; c; x)`.
///
/// Terminates exactly (and is evaluated in exact arithmetic when all inputs
/// are exact rationals) when `a` or `b` is a nonpositive integer; otherwise
/// it is summed in double precision until the relative term size drops
/// below 1e-16, which requires `|x| < 1`.
pub fn gauss_2f1(a: &Scalar, b: &Scalar, c: &Scalar, x: &Scalar) -> Result<Scalar, JackError> {
    let rats = (
        a.as_rational(),
        b.as_rational(),
        c.as_rational(),
        x.as_rational(),
    );
    if let (Ok(ar), Ok(br), Ok(cr), Ok(xr)) = rats {
        if xr.is_zero() {
            return Ok(Scalar::one());
        }
        let stop = match (nonpositive_integer(&ar), nonpositive_integer(&br)) {
            (Some(m), Some(k)) => Some(m.min(k)),
            (Some(m), None) => Some(m),
            (None, Some(k)) => Some(k),
            (None, None) => None,
        };
        if let Some(m) = stop {
            return Ok(Scalar::from(gauss_2f1_terminating(&ar, &br, &cr, &xr, m)?));
        }
    }
    let (value, _tail) = gauss_2f1_f64(a.to_f64(), b.to_f64(), c.to_f64(), x.to_f64())?;
    Ok(Scalar::Float(value))
}

fn gauss_2f1_terminating(a: &Rat, b: &Rat, c: &Rat, x: &Rat, m: u32) -> Result<Rat, JackError> {
    let mut acc = Rat::one();
    let mut term = Rat::one();
    for k in 0..m {
        let kr = rat_i64(k as i64);
        let den = (c + &kr) * (&kr + Rat::one());
        if den.is_zero() {
            return Err(JackError::HypergeometricPole);
        }
        term = term * (a + &kr) * (b + &kr) * x / den;
        acc += &term;
        if term.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Double-precision 2F1 by direct summation; returns the value and the
/// magnitude of the last term added (the reported truncation indicator —
/// no rigorous tail bound is claimed).
pub fn gauss_2f1_f64(a: f64, b: f64, c: f64, x: f64) -> Result<(f64, f64), JackError> {
    if x == 0.0 {
        return Ok((1.0, 0.0));
    }
    // A nonpositive-integer upper parameter still terminates the float path.
    let terminates = |v: f64| v <= 0.0 && v.fract() == 0.0;
    if x.abs() >= 1.0 && !(terminates(a) || terminates(b)) {
        return Err(JackError::NonConvergent);
    }
    let mut acc = 1.0f64;
    let mut term = 1.0f64;
    let max_terms = 5_000_000u64;
    for k in 0..max_terms {
        let kf = k as f64;
        let den = (c + kf) * (kf + 1.0);
        if den == 0.0 {
            return Err(JackError::HypergeometricPole);
        }
        term *= (a + kf) * (b + kf) * x / den;
        acc += term;
        if term == 0.0 {
            return Ok((acc, 0.0));
        }
        if term.abs() < 1e-16 * acc.abs().max(1e-300) {
            return Ok((acc, term.abs()));
        }
    }
    Err(JackError::NonConvergent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::poly::RationalPolynomial;
    use rand::{Rng, SeedableRng};

    fn params(n: i64, a: Rat, b: Rat, beta: Rat) -> EnsembleParams {
        EnsembleParams::new(n, a, b, beta).unwrap()
    }

    fn kappa(parts: &[u32]) -> Partition {
        Partition::new(parts.to_vec())
    }

    #[test]
    fn gen_pochhammer_small_partitions() {
        let u = rat(3, 2);
        let alpha = rat(2, 3);
        // kappa = (1): just u.
        assert_eq!(gen_pochhammer(&u, &kappa(&[1]), &alpha), u);
        // kappa = (1,1): u (u - 1/alpha).
        assert_eq!(
            gen_pochhammer(&u, &kappa(&[1, 1]), &alpha),
            &u * (&u - rat(3, 2))
        );
        // kappa = (2): u (u + 1).
        assert_eq!(
            gen_pochhammer(&u, &kappa(&[2]), &alpha),
            &u * (&u + Rat::one())
        );
    }

    #[test]
    fn jack_unity_small_partitions() {
        let n = rat_i64(5);
        for beta in [rat(1, 2), rat_i64(1), rat_i64(2), rat_i64(4)] {
            let alpha = rat_i64(2) / &beta;
            let half_beta = &beta / rat_i64(2);
            // C_(1) = n.
            assert_eq!(jack_unity(&kappa(&[1]), &alpha, &n), n);
            // C_(2) = n (1 + beta n / 2) / (1 + beta/2).
            assert_eq!(
                jack_unity(&kappa(&[2]), &alpha, &n),
                &n * (Rat::one() + &half_beta * &n) / (Rat::one() + &half_beta)
            );
            // C_(1,1) = n (n - 1) / (1 + beta/2).
            assert_eq!(
                jack_unity(&kappa(&[1, 1]), &alpha, &n),
                &n * (&n - Rat::one()) / (Rat::one() + &half_beta)
            );
        }
    }

    #[test]
    fn jack_unity_vanishes_beyond_length() {
        let alpha = rat(2, 3);
        for n in 1..3i64 {
            let v = jack_unity(&kappa(&[1, 1, 1]), &alpha, &rat_i64(n));
            assert_eq!(v, Rat::zero());
        }
    }

    #[test]
    fn jack_unity_is_polynomial_in_n() {
        // Interpolate through weight+1 integer nodes and check extra nodes.
        let alpha = rat(3, 2);
        for parts in [vec![2u32], vec![2, 1], vec![3, 2, 1]] {
            let k = kappa(&parts);
            let deg = k.weight() as usize;
            let nodes: Vec<(Rat, Rat)> = (1..=(deg as i64 + 1))
                .map(|i| (rat_i64(i), jack_unity(&k, &alpha, &rat_i64(i))))
                .collect();
            // Lagrange interpolation.
            let mut poly = RationalPolynomial::zero();
            for (i, (xi, yi)) in nodes.iter().enumerate() {
                let mut li = RationalPolynomial::constant(yi.clone());
                for (j, (xj, _)) in nodes.iter().enumerate() {
                    if i != j {
                        let denom = xi - xj;
                        li = li.mul(&RationalPolynomial::new(vec![
                            -xj / &denom,
                            Rat::one() / &denom,
                        ]));
                    }
                }
                poly = poly.add(&li);
            }
            for extra in (deg as i64 + 2)..(deg as i64 + 7) {
                assert_eq!(
                    poly.evaluate(&rat_i64(extra)),
                    jack_unity(&k, &alpha, &rat_i64(extra)),
                    "interpolation mismatch for kappa = {k}"
                );
            }
        }
    }

    #[test]
    fn first_moment_closed_form() {
        for (n, a, b, beta) in [
            (3, rat_i64(0), rat_i64(0), rat_i64(1)),
            (5, rat_i64(3), rat_i64(1), rat_i64(1)),
            (4, rat(1, 2), rat(3, 2), rat_i64(2)),
        ] {
            let p = params(n, a, b, beta);
            let derived = DerivedParams::new(&p).unwrap();
            let expect = rat_i64(n) * &derived.u1 / &derived.u2;
            assert_eq!(moment_oracle(&p, 1).unwrap(), expect);
            assert_eq!(moment_closed_form(&p, 1), expect);
        }
    }

    #[test]
    fn second_moment_known_value() {
        let p = params(3, rat_i64(0), rat_i64(0), rat_i64(1));
        assert_eq!(moment_oracle(&p, 2).unwrap(), rat(33, 14));
        assert_eq!(moment_closed_form(&p, 2), rat(33, 14));
    }

    #[test]
    fn single_eigenvalue_uniform_moments() {
        // N = 1, a = b = 0: the trace is uniform on (0,1) for every beta.
        for beta in [rat(1, 2), rat_i64(1), rat_i64(4)] {
            let p = params(1, rat_i64(0), rat_i64(0), beta);
            for k in 0..6u32 {
                assert_eq!(
                    moment_oracle(&p, k).unwrap(),
                    Rat::one() / rat_i64(k as i64 + 1)
                );
            }
        }
    }

    #[test]
    fn closed_forms_match_oracle() {
        for (n, a, b, beta) in [
            (2, rat(1, 2), rat_i64(2), rat(1, 2)),
            (4, rat_i64(1), rat(5, 3), rat_i64(2)),
            (5, rat(-1, 3), rat(1, 4), rat_i64(4)),
        ] {
            let p = params(n, a, b, beta);
            for k in 1..=3u32 {
                assert_eq!(
                    moment_closed_form(&p, k),
                    moment_oracle(&p, k).unwrap(),
                    "closed form vs oracle at k = {k}"
                );
            }
        }
    }

    #[test]
    fn duality_hand_value() {
        // (N, a, b, beta) = (3, 0, 0, 1), k = 2: both routes give 33/14.
        let p = params(3, rat_i64(0), rat_i64(0), rat_i64(1));
        assert_eq!(moment_dual(&p, 2).unwrap(), rat(33, 14));
    }

    #[test]
    fn duality_matches_oracle() {
        for (n, a, b, beta) in [
            (2, rat(1, 2), rat_i64(1), rat(1, 2)),
            (3, rat_i64(2), rat(1, 2), rat_i64(2)),
            (4, rat_i64(0), rat_i64(2), rat_i64(4)),
        ] {
            let p = params(n, a, b, beta);
            for k in 0..=4u32 {
                assert_eq!(
                    moment_dual(&p, k).unwrap(),
                    moment_oracle(&p, k).unwrap(),
                    "duality mismatch at k = {k}"
                );
            }
        }
    }

    #[test]
    fn conjugation_pochhammer_identity() {
        // [a]_{kappa'}^{(1/alpha)} = (-alpha)^{|kappa|} [-a/alpha]_kappa^{(alpha)}:
        // square (r, c) of kappa contributes (a + (c-1) - (r-1)/alpha) and its
        // transpose contributes the same factor scaled by -alpha.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let k = rng.gen_range(1u32..=6);
            let parts = partitions_of(k, k);
            let kap = &parts[rng.gen_range(0..parts.len())];
            let a = rat(rng.gen_range(-12i64..12), rng.gen_range(1i64..5));
            let alpha = rat(rng.gen_range(1i64..9), rng.gen_range(1i64..5));
            let lhs = gen_pochhammer(&a, &kap.conjugate(), &(Rat::one() / &alpha));
            let rhs = (-&alpha).pow(k as i32) * gen_pochhammer(&(-&a / &alpha), kap, &alpha);
            assert_eq!(lhs, rhs, "kappa = {kap}, a = {a}, alpha = {alpha}");
        }
    }

    #[test]
    fn alpha_zero_is_one() {
        let p = params(4, rat(1, 2), rat(3, 4), rat_i64(2));
        assert_eq!(alpha_coeff(&p, 0).unwrap(), Rat::one());
    }

    #[test]
    fn alpha_b_one_vanishes_past_n() {
        let p = params(2, rat_i64(0), rat_i64(1), rat_i64(2));
        for q in 3..6u32 {
            assert_eq!(alpha_coeff(&p, q).unwrap(), Rat::zero());
        }
    }

    #[test]
    fn alpha_b_one_hand_value() {
        // N=2, a=0, beta=2, p=1: alpha_1 = -1, by both routes.
        let p = params(2, rat_i64(0), rat_i64(1), rat_i64(2));
        assert_eq!(alpha_coeff_b_one(&p, 1).unwrap(), rat_i64(-1));
        assert_eq!(alpha_coeff_series(&p, 1).unwrap(), rat_i64(-1));
    }

    #[test]
    fn alpha_fast_paths_match_series() {
        // b = 1 for several ensembles.
        for (n, a, beta) in [(2, rat_i64(0), rat_i64(2)), (3, rat(1, 2), rat_i64(1)), (4, rat_i64(2), rat_i64(4))] {
            let p = params(n, a, rat_i64(1), beta);
            for q in 0..=8u32 {
                assert_eq!(
                    alpha_coeff_b_one(&p, q).unwrap(),
                    alpha_coeff_series(&p, q).unwrap(),
                    "b=1 mismatch at p = {q}"
                );
            }
        }
        // b = -beta/2 (beta < 2).
        for (n, a, beta) in [(2, rat_i64(0), rat_i64(1)), (3, rat(1, 2), rat(1, 2))] {
            let b = -(&beta / rat_i64(2));
            let p = params(n, a, b, beta);
            for q in 0..=8u32 {
                assert_eq!(
                    alpha_coeff_b_neg_half_beta(&p, q).unwrap(),
                    alpha_coeff_series(&p, q).unwrap(),
                    "b=-beta/2 mismatch at p = {q}"
                );
            }
        }
    }

    #[test]
    fn alpha_case_mismatch_is_rejected() {
        let p = params(2, rat_i64(0), rat_i64(0), rat_i64(1));
        assert!(matches!(
            alpha_coeff_b_one(&p, 1),
            Err(JackError::CaseMismatch { .. })
        ));
    }

    #[test]
    fn gauss_2f1_values() {
        let s = |r: Rat| Scalar::from(r);
        // x = 0.
        assert_eq!(
            gauss_2f1(&s(rat(1, 2)), &s(rat(3, 2)), &s(rat(5, 2)), &Scalar::zero()).unwrap(),
            Scalar::one()
        );
        // Terminating: 2F1(-1, 2; 3; 1/2) = 1 - 2(1/2)/3 = 2/3.
        assert_eq!(
            gauss_2f1(&s(rat_i64(-1)), &s(rat_i64(2)), &s(rat_i64(3)), &s(rat(1, 2)))
                .unwrap()
                .as_rational()
                .unwrap(),
            rat(2, 3)
        );
        // 2F1(1, 1; 2; 1/2) = -ln(1 - x)/x = 2 ln 2.
        let v = gauss_2f1(&s(rat_i64(1)), &s(rat_i64(1)), &s(rat_i64(2)), &s(rat(1, 2)))
            .unwrap()
            .to_f64();
        assert!((v - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn gauss_2f1_nonconvergent() {
        let s = |r: Rat| Scalar::from(r);
        assert!(matches!(
            gauss_2f1(&s(rat(1, 2)), &s(rat(1, 2)), &s(rat_i64(3)), &s(rat_i64(2))),
            Err(JackError::NonConvergent)
        ));
    }

    #[test]
    fn beta_zero_is_rejected_by_jack_routes() {
        let p = params(2, rat_i64(0), rat_i64(0), rat_i64(0));
        assert!(matches!(moment_oracle(&p, 1), Err(JackError::BetaNotPositive)));
        assert!(matches!(moment_dual(&p, 1), Err(JackError::BetaNotPositive)));
    }
}
