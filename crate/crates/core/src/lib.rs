//! Distribution of the trace of the beta-Jacobi random-matrix ensemble.
//!
//! The eigenvalue density of the beta-Jacobi ensemble on (0,1)^N is
//! proportional to
//!
//! ```text
//!     prod_l x_l^a (1 - x_l)^b  prod_{j<k} |x_k - x_j|^beta .
//! ```
//!
//! This crate computes the distribution of the linear statistic
//! `t = x_1 + ... + x_N` (the trace, Pillai's V statistic for beta = 1):
//!
//! * exact rational moments, either from Jack-polynomial partition sums
//!   ([`jack::moment_oracle`]) or from a first-order vector recurrence for
//!   the coefficients of the Fourier-Laplace transform ([`laplace::moments`]);
//! * the exact piecewise density on `[0, N]` for nonnegative integer
//!   parameters, assembled from Frobenius series of a tridiagonal matrix
//!   ODE with closed-form connection weights ([`tracedist::assemble_pdf`]);
//! * closed forms for N = 2 and for the interval `[0, 1]`;
//! * Metropolis Monte Carlo validation of the exact results
//!   ([`montecarlo`]).
//!
//! All exact arithmetic is over arbitrary-precision rationals; normalization
//! constants are carried as exact products of Gamma values whose fractional
//! residues must cancel before a number is exposed.

pub mod jack;
pub mod laplace;
pub mod montecarlo;
pub mod normalization;
pub mod params;
pub mod partition;
pub mod poly;
pub mod scalar;
pub mod tracedist;

pub use params::{validate_params, EnsembleParams, ParamError};
pub use partition::{partitions_of, Partition};
pub use poly::RationalPolynomial;
pub use scalar::{format_rational, parse_rational, GammaProduct, Rat, Scalar};
