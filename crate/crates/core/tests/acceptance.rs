//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its runtime. Tolerances are pinned in the assertions.

use std::time::Instant;

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jacobi_trace::jack::{
    alpha_coeff, alpha_coeff_b_one, moment_closed_form, moment_dual, moment_oracle,
};
use jacobi_trace::laplace::moments;
use jacobi_trace::montecarlo::{compare, sample_traces, ChainConfig};
use jacobi_trace::params::EnsembleParams;
use jacobi_trace::scalar::{rat, rat_i64, rat_to_f64, Rat};
use jacobi_trace::tracedist::{
    assemble_pdf, closed_form_n2_f64, continue_ordinary, frobenius_piece, gamma_exponent,
    piece_degree, ContinuedDensity, TridiagonalSystem,
};

fn params(n: i64, a: Rat, b: Rat, beta: Rat) -> EnsembleParams {
    EnsembleParams::new(n, a, b, beta).unwrap()
}

fn grid_values() -> Vec<Rat> {
    vec![rat_i64(0), rat(1, 2), rat_i64(1), rat_i64(2)]
}

fn beta_grid() -> Vec<Rat> {
    vec![rat(1, 2), rat_i64(1), rat_i64(2), rat_i64(4)]
}

#[test]
fn criterion_01_closed_form_moments() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..200 {
        let n = rng.gen_range(1i64..=8);
        let da = rng.gen_range(1i64..=4);
        let a = rat(rng.gen_range(-da + 1..=3 * da), da);
        let db = rng.gen_range(1i64..=4);
        let b = rat(rng.gen_range(-db + 1..=3 * db), db);
        let dq = rng.gen_range(1i64..=4);
        let beta = rat(rng.gen_range(0..=4 * dq), dq);
        let p = params(n, a.clone(), b.clone(), beta.clone());
        let m = moments(&p, 3);
        for k in 1..=3u32 {
            assert_eq!(
                m[k as usize],
                moment_closed_form(&p, k),
                "trial {trial}: moment {k} at N={n} a={a} b={b} beta={beta}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "runtime {elapsed:?} over budget");
    println!("[criterion 1] PASS - recurrence reproduces closed-form m1..m3 on 200 random rational points ({elapsed:?})");
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let mut sets = 0usize;
    for n in 1..=5i64 {
        for a in grid_values() {
            for b in grid_values() {
                for beta in beta_grid() {
                    let p = params(n, a.clone(), b.clone(), beta.clone());
                    let m = moments(&p, 6);
                    for k in 0..=6u32 {
                        assert_eq!(
                            m[k as usize],
                            moment_oracle(&p, k).unwrap(),
                            "N={n} a={a} b={b} beta={beta} k={k}"
                        );
                    }
                    sets += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} over budget");
    println!("[criterion 2] PASS - partition-sum oracle equals recurrence moments exactly on {sets} parameter sets, k <= 6 ({elapsed:?})");
}

#[test]
fn criterion_03_moment_duality() {
    let start = Instant::now();
    let mut sets = 0usize;
    for n in 1..=5i64 {
        for a in grid_values() {
            for b in grid_values() {
                for beta in beta_grid() {
                    let p = params(n, a.clone(), b.clone(), beta.clone());
                    for k in 0..=4u32 {
                        assert_eq!(
                            moment_dual(&p, k).unwrap(),
                            moment_oracle(&p, k).unwrap(),
                            "N={n} a={a} b={b} beta={beta} k={k}"
                        );
                    }
                    sets += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} over budget");
    println!("[criterion 3] PASS - duality at formal parameters equals the direct sum on {sets} parameter sets, k <= 4 ({elapsed:?})");
}

#[test]
fn criterion_04_reference_density() {
    let start = Instant::now();
    let p = params(3, rat_i64(0), rat_i64(0), rat_i64(1));
    let pdf = assemble_pdf(&p, None).unwrap();
    let weights: Vec<Rat> = pdf
        .pieces()
        .iter()
        .map(|piece| piece.weight_rational().unwrap())
        .collect();
    assert_eq!(weights, vec![rat(3, 8), rat_i64(-15), rat_i64(-15)]);
    let gammas: Vec<Rat> = pdf.pieces().iter().map(|piece| piece.gamma.clone()).collect();
    assert_eq!(gammas, vec![rat_i64(5), rat_i64(3), rat_i64(3)]);
    assert_eq!(pdf.pieces()[0].f, vec![rat_i64(1)]);
    assert_eq!(pdf.pieces()[1].f, vec![rat_i64(1), rat(-1, 4), rat(1, 40)]);
    assert_eq!(pdf.pieces()[2].f, vec![rat_i64(1), rat(1, 4), rat(1, 40)]);
    // Invariance under t -> 3 - t, as exact interval polynomials.
    for j in 0..3u32 {
        let direct = pdf.interval_polynomial(j).unwrap();
        let mirrored = pdf
            .interval_polynomial(2 - j)
            .unwrap()
            .compose_linear(&rat_i64(3), &rat_i64(-1));
        assert_eq!(direct, mirrored, "interval {j}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "runtime {elapsed:?} over budget");
    println!("[criterion 4] PASS - N=3 flagship density matches the published piecewise polynomial exactly and is reflection-invariant ({elapsed:?})");
}

#[test]
fn criterion_05_normalization_and_moments() {
    let start = Instant::now();
    let mut sets = 0usize;
    for n in 1..=6i64 {
        for a in 0..=3i64 {
            for b in 0..=3i64 {
                for beta in 1..=4i64 {
                    let p = EnsembleParams::from_ints(n, a, b, beta).unwrap();
                    assert!(p.polynomial_ok());
                    let pdf = assemble_pdf(&p, None).unwrap();
                    assert_eq!(
                        pdf.moment(0).unwrap(),
                        Rat::one(),
                        "normalization at N={n} a={a} b={b} beta={beta}"
                    );
                    let m = moments(&p, 4);
                    for k in 1..=4u32 {
                        assert_eq!(
                            pdf.moment(k).unwrap(),
                            m[k as usize],
                            "moment {k} at N={n} a={a} b={b} beta={beta}"
                        );
                    }
                    sets += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "runtime {elapsed:?} over budget");
    println!("[criterion 5] PASS - exact unit mass and moment agreement k <= 4 on {sets} polynomial-regime sets ({elapsed:?})");
}

#[test]
fn criterion_06_n2_closed_form() {
    let start = Instant::now();
    // Pointwise agreement with the assembled polynomials.
    for a in 0..=2i64 {
        for b in 0..=2i64 {
            for beta in [1i64, 2, 4] {
                let p = EnsembleParams::from_ints(2, a, b, beta).unwrap();
                let pdf = assemble_pdf(&p, None).unwrap();
                for i in 0..50i64 {
                    let t = rat(2 * (i + 1), 51);
                    let exact = rat_to_f64(&pdf.eval(&t).unwrap().as_rational().unwrap());
                    let closed = closed_form_n2_f64(&p, rat_to_f64(&t)).unwrap();
                    assert!(
                        (closed - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                        "a={a} b={b} beta={beta} t={t}: {closed} vs {exact}"
                    );
                }
            }
        }
    }
    // Quadrature normalization for a non-integer spot check.
    let p = params(2, rat(1, 2), rat(3, 2), rat_i64(1));
    let (nodes, weights) = gauss_legendre(128);
    let mut total = 0.0;
    for (lo, hi) in [(0.0f64, 1.0f64), (1.0, 2.0)] {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (x, w) in nodes.iter().zip(&weights) {
            total += w * half * closed_form_n2_f64(&p, mid + half * x).unwrap();
        }
    }
    assert!((total - 1.0).abs() < 1e-10, "quadrature total {total}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "runtime {elapsed:?} over budget");
    println!("[criterion 6] PASS - N=2 hypergeometric closed form matches assembly to 1e-12 and integrates to 1 +- 1e-10 ({elapsed:?})");
}

#[test]
fn criterion_07_frobenius_internal_consistency() {
    let start = Instant::now();
    let mut checks = 0usize;
    for n in 1..=6i64 {
        for a in 0..=3i64 {
            for b in 0..=3i64 {
                for beta in 1..=4i64 {
                    let pr = EnsembleParams::from_ints(n, a, b, beta).unwrap();
                    let shifted = EnsembleParams::from_ints(n, a, b + 1, beta).unwrap();
                    for p in 0..n as u32 {
                        let deg = piece_degree(&pr, p).unwrap();
                        let piece = frobenius_piece(&pr, p, deg + 3).unwrap();
                        // Exponent gap in the realized system.
                        assert_eq!(
                            &piece.exponent - gamma_exponent(&shifted, p),
                            rat_i64(-(p as i64))
                        );
                        // Residual identity: l (g_l)_base = u (g_l)_{base-1} + w (g_l)_{base+1}.
                        let sys: &TridiagonalSystem = &piece.system;
                        let base = piece.base;
                        for (l, g) in piece.raw.iter().enumerate().skip(1) {
                            let mut rhs = Rat::zero();
                            if base > 0 {
                                rhs += &sys.sub[base] * &g[base - 1];
                            }
                            if base < sys.n() {
                                rhs += &sys.sup[base] * &g[base + 1];
                            }
                            assert_eq!(
                                rat_i64(l as i64) * &g[base],
                                rhs,
                                "residual at N={n} a={a} b={b} beta={beta} p={p} l={l}"
                            );
                            checks += 1;
                        }
                        // Termination at the predicted degree, with 3 guard
                        // coefficients all zero.
                        for m in deg + 1..=deg + 3 {
                            assert!(
                                piece.f[m].is_zero(),
                                "guard coefficient {m} nonzero at N={n} a={a} b={b} beta={beta} p={p}"
                            );
                        }
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "runtime {elapsed:?} over budget");
    println!("[criterion 7] PASS - residual identity, exponent gap and degree termination hold exactly ({checks} recurrence steps checked) ({elapsed:?})");
}

#[test]
fn criterion_08_unit_interval_cross_check() {
    let start = Instant::now();
    let a_values = vec![rat_i64(0), rat(1, 2), rat_i64(1), rat_i64(2)];
    let mut sets = 0usize;
    for n in 1..=5i64 {
        for a in &a_values {
            for b in 0..=2i64 {
                for beta in [1i64, 2] {
                    let p = params(n, a.clone(), rat_i64(b), rat_i64(beta));
                    let piece = frobenius_piece(&p, 0, 12).unwrap();
                    for m in 0..=12u32 {
                        assert_eq!(
                            piece.f[m as usize],
                            alpha_coeff(&p, m).unwrap(),
                            "N={n} a={a} b={b} beta={beta} order {m}"
                        );
                        if b == 1 {
                            assert_eq!(
                                piece.f[m as usize],
                                alpha_coeff_b_one(&p, m).unwrap(),
                                "fast path at N={n} a={a} beta={beta} order {m}"
                            );
                        }
                    }
                    sets += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "runtime {elapsed:?} over budget");
    println!("[criterion 8] PASS - p=0 series equals the Jack partition-sum coefficients term-by-term to order 12 on {sets} sets ({elapsed:?})");
}

#[test]
fn criterion_09_statistical_validation() {
    let start = Instant::now();
    let cases = [
        (5i64, 3i64, 1i64, 1i64, 101u64),
        (4, 1, 0, 2, 102),
        (6, 0, 0, 4, 103),
    ];
    for (n, a, b, beta, seed) in cases {
        let p = EnsembleParams::from_ints(n, a, b, beta).unwrap();
        let pdf = assemble_pdf(&p, None).unwrap();
        let config = ChainConfig {
            n_samples: 100_000,
            burn_in: 10_000,
            thinning: 5,
            proposal_width: 0.35,
            seed,
        };
        let samples = sample_traces(&p, &config);
        let report = compare(&samples, &pdf, 30).unwrap();
        for (k, z) in report.moment_z.iter().enumerate() {
            assert!(
                z.abs() < 4.0,
                "N={n} a={a} b={b} beta={beta}: moment {} z-score {z}",
                k + 1
            );
        }
        assert!(
            report.ks_distance < 0.015,
            "N={n} a={a} b={b} beta={beta}: KS = {}",
            report.ks_distance
        );
        println!(
            "  set ({n},{a},{b},{beta}): KS = {:.4}, |z| = {:?}, ESS = {:.0}",
            report.ks_distance,
            report
                .moment_z
                .iter()
                .map(|z| (z.abs() * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
            report.effective_sample_size
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "runtime {elapsed:?} over budget");
    println!("[criterion 9] PASS - MCMC z-scores < 4 and KS < 0.015 on all three reference parameter sets ({elapsed:?})");
}

#[test]
fn criterion_10_experimental_continuation() {
    let start = Instant::now();
    // Polynomial sanity: continue piece 0 of (3,0,0,1) from s = 1/2 to 2;
    // the binomially combined value must be s^5 exactly (here 32).
    let pr = EnsembleParams::from_ints(3, 0, 0, 1).unwrap();
    let frob = frobenius_piece(&pr, 0, 64).unwrap();
    let s0 = 0.5f64;
    let state: Vec<f64> = (0..=3usize)
        .map(|j| {
            let mut acc = 0.0;
            for g in frob.raw.iter().rev() {
                acc = acc * s0 + rat_to_f64(&g[j]);
            }
            acc * s0.powf(rat_to_f64(&frob.exponent))
        })
        .collect();
    let binom = [1.0f64, 3.0, 3.0, 1.0];
    for target in [1.25f64, 2.0] {
        let out = continue_ordinary(&pr, 0, &state, s0, target, 64).unwrap();
        let combo: f64 = out
            .iter()
            .enumerate()
            .map(|(k, g)| binom[3 - k] * g)
            .sum();
        let exact = target.powi(5);
        assert!(
            (combo - exact).abs() <= 1e-10 * exact,
            "target {target}: {combo} vs {exact}"
        );
    }
    // Non-integer a (the figure's continuation case): density must be
    // nonnegative on a grid and integrate to 1 within 1e-3.
    let pr2 = params(3, rat(-1, 2), rat_i64(0), rat_i64(1));
    assert!(pr2.assembly_ok() && !pr2.polynomial_ok());
    let dens = ContinuedDensity::build(&pr2, 60).unwrap();
    let grid = 1000usize;
    let mut min_val = f64::INFINITY;
    for i in 0..=grid {
        let t = 3.0 * i as f64 / grid as f64;
        let v = dens.eval(t).unwrap();
        min_val = min_val.min(v);
    }
    assert!(min_val > -1e-9, "density dips to {min_val}");
    // Simpson quadrature over the support.
    let steps = 3000usize;
    let h = 3.0 / steps as f64;
    let mut total = 0.0;
    for i in 0..=steps {
        let t = i as f64 * h;
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        total += w * dens.eval(t).unwrap();
    }
    total *= h / 3.0;
    assert!((total - 1.0).abs() < 1e-3, "continued density integrates to {total}");
    let elapsed = start.elapsed();
    println!("[criterion 10] PASS - continuation reproduces the polynomial case to 1e-10 and the a=-1/2 density integrates to {total:.6} ({elapsed:?})");
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// three-term recurrence; used only as quadrature plumbing for criterion 6.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}
