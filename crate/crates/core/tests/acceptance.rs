//! Acceptance checks AC1-AC10. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

mod common;

use std::f64::consts::TAU;
use std::time::Instant;

use circlewalk_core::chain_exact::{
    default_k_grid, discrete_koksma_check, kolmogorov_continuous, psi_disc, psi_disc_star,
    reduce_to_unit_span, transition_scan, CyclicDistribution, SpectralState,
};
use circlewalk_core::diophantine::{cf_expand, dist_nearest_int, Rational};
use circlewalk_core::lattice_dist::{presets, StepDistribution};
use circlewalk_core::montecarlo::clt_experiment;
use circlewalk_core::variance_const::{
    c_alpha, c_convergence_experiment, c_rational, c_rational_oracle, expsum_second_moment,
    fejer_approx, koksma_transfer_check, ExpsumMode, TestFunction, DEFAULT_H,
};
use circlewalk_core::{Error, IrrationalNumber, SamplerConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn verdict(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fib_instances() -> [Rational; 2] {
    [Rational::new(55, 89).unwrap(), Rational::new(144, 233).unwrap()]
}

fn ac1() -> Check {
    let sd = presets::uniform12();
    let mut details = Vec::new();
    let mut ok = true;
    for r in fib_instances() {
        let start = Instant::now();
        let scan = transition_scan(&sd, r, &default_k_grid(r.q() as u64)).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        let bad = scan.sandwich_violations(1e-12);
        ok &= bad == 0 && secs < 120.0;
        details.push(format!(
            "q={} rows={} violations={} time={:.2}s",
            r.q(),
            scan.rows.len(),
            bad,
            secs
        ));
    }
    verdict(ok, details.join("; "))
}

fn ac2() -> Check {
    let sd = presets::uniform12();
    let (lo, hi) = (1.0 / 50.0, 50.0);
    let mut details = Vec::new();
    let mut ok = true;
    for r in fib_instances() {
        let q2 = (r.q() * r.q()) as u64;
        let scan = transition_scan(&sd, r, &default_k_grid(r.q() as u64)).map_err(|e| e.to_string())?;
        let poly: Vec<(u64, f64)> = scan
            .rows
            .iter()
            .filter(|row| row.k >= 16 && row.k <= q2)
            .map(|row| (row.k, row.norm_poly.unwrap_or(f64::NAN)))
            .collect();
        let exp: Vec<(u64, f64)> = scan
            .rows
            .iter()
            .filter(|row| row.k > q2)
            .map(|row| (row.k, row.norm_exp.unwrap_or(f64::NAN)))
            .collect();
        let range = |v: &[(u64, f64)]| {
            v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, x)| (a.min(x), b.max(x)))
        };
        let (pmin, pmax) = range(&poly);
        let (emin, emax) = range(&exp);
        let out = poly.iter().chain(&exp).filter(|&&(_, x)| !(x >= lo && x <= hi)).count();
        ok &= out == 0;
        details.push(format!(
            "q={} sqrt(k)psi in [{pmin:.4}, {pmax:.4}], q psi/|phi|^k in [{emin:.4}, {emax:.4}], {out} of {} points outside [0.02, 50]",
            r.q(),
            poly.len() + exp.len()
        ));
    }
    verdict(ok, details.join("; "))
}

fn ac3() -> Check {
    let laws = [presets::uniform12(), presets::two_point(0.25).unwrap()];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for sd in &laws {
        for q in [2i128, 3, 5, 8, 13] {
            for k in [1u64, 4, 16, 32] {
                let r = Rational::new(1, q).unwrap();
                let state = SpectralState::new(sd, r).map_err(|e| e.to_string())?.advance(k);
                let spectral = state.to_distribution().map_err(|e| e.to_string())?.probs();
                let direct = common::direct_law(sd, r.p(), r.q(), k);
                for (a, b) in spectral.iter().zip(&direct) {
                    worst = worst.max((a - b).abs());
                }
                cases += 1;
            }
        }
    }
    verdict(worst <= 1e-10, format!("{cases} cases, max entry error {worst:.3e}"))
}

fn ac4() -> Check {
    let laws = [presets::uniform12(), presets::two_point(0.25).unwrap()];
    let fns = [
        TestFunction::cosine(1).unwrap(),
        TestFunction::sawtooth(),
        TestFunction::indicator(0.1, 0.35).unwrap(),
    ];
    let rats = [(1, 3), (3, 8), (14, 37), (55, 128)];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for sd in &laws {
        for f in &fns {
            for &(p, q) in &rats {
                let r = Rational::new(p, q).unwrap();
                let a = c_rational(f, sd, r).map_err(|e| e.to_string())?;
                let b = c_rational_oracle(f, sd, r, 1e-12).map_err(|e| e.to_string())?;
                worst = worst.max((a - b).abs());
                cases += 1;
            }
        }
    }
    let closed = c_rational(&fns[0], &laws[0], Rational::new(1, 3).unwrap()).map_err(|e| e.to_string())?;
    let closed_err = (closed - 1.0 / 6.0).abs();
    verdict(
        worst <= 1e-9 && closed_err <= 1e-12,
        format!("{cases} cases, max gap {worst:.3e}; C(1/3, cos) - 1/6 = {closed_err:.3e}"),
    )
}

fn ac5() -> Check {
    let sd = presets::uniform12();
    let alpha = IrrationalNumber::golden();
    let mut details = Vec::new();
    let mut ok = true;
    for (name, f) in [("cosine", TestFunction::cosine(1).unwrap()), ("sawtooth", TestFunction::sawtooth())] {
        let table = c_convergence_experiment(&f, &sd, &alpha, 4..=16, 1 << 20).map_err(|e| e.to_string())?;
        let last = table.rows.last().ok_or("no convergents")?.gap;
        let threshold = if name == "cosine" { 1e-3 } else { table.c_alpha.tail_bound };
        let monotone = table
            .rows
            .windows(2)
            .filter(|w| w[0].m >= 8)
            .all(|w| w[1].gap <= w[0].gap);
        ok &= last < threshold && monotone && table.skipped.is_empty() && table.rows.len() == 13;
        details.push(format!(
            "{name}: C(alpha)={:.8}, gap(m=16)={last:.3e} < {threshold:.3e}, monotone from m=8: {monotone}",
            table.c_alpha.value
        ));
    }
    verdict(ok, details.join("; "))
}

/// `E |sum_h c_h sum_{k=m+1}^{m+n} e(h S_k alpha)|^2` over all `2^(m+n)` paths of `{1, 2}` steps.
fn expsum_paths(coeffs: &[(i64, Complex64)], alpha: f64, m: u64, n: u64) -> f64 {
    let len = m + n;
    let mut total = 0.0;
    for mask in 0u64..(1 << len) {
        let mut s = 0i64;
        let mut acc = Complex64::default();
        for k in 1..=len {
            s += 1 + ((mask >> (k - 1)) & 1) as i64;
            if k > m {
                for &(h, c) in coeffs {
                    let x = (h as f64 * s as f64 * alpha).rem_euclid(1.0);
                    acc += c * Complex64::from_polar(1.0, TAU * x);
                }
            }
        }
        total += acc.norm_sqr();
    }
    total / (1u64 << len) as f64
}

fn ac6() -> Check {
    let sd = presets::uniform12();
    let alpha = IrrationalNumber::golden();
    let coeffs: Vec<(i64, Complex64)> = vec![
        (1, Complex64::new(1.0, 0.0)),
        (-1, Complex64::new(0.0, 0.7)),
        (2, Complex64::new(0.3, -0.2)),
        (3, Complex64::new(-1.0 / 3.0, 0.0)),
        (-5, Complex64::new(0.1, 0.1)),
    ];
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for len in 1..=12u64 {
        for m in [0, len / 2, len - 1] {
            let n = len - m;
            let exact = expsum_second_moment(&coeffs, &sd, &alpha, m, n, ExpsumMode::Exact).map_err(|e| e.to_string())?;
            let brute = expsum_paths(&coeffs, alpha.to_f64(), m, n);
            worst = worst.max((exact - brute).abs());
            cases += 1;
        }
    }
    let h = 16;
    let big: Vec<(i64, Complex64)> = (1..=h).map(|j| (j, Complex64::new(1.0 / j as f64, 0.0))).collect();
    let n = 1 << 12;
    let exact = expsum_second_moment(&big, &sd, &alpha, 0, n, ExpsumMode::Exact).map_err(|e| e.to_string())?;
    let main = expsum_second_moment(&big, &sd, &alpha, 0, n, ExpsumMode::MainTerm).map_err(|e| e.to_string())?;
    let rel = (main - exact).abs() / exact.abs();
    verdict(
        worst <= 1e-10 && rel < 0.10,
        format!("{cases} brute-force cases, max error {worst:.3e}; main vs exact at N=2^12, H=16: rel {rel:.3e}"),
    )
}

fn ac7() -> Check {
    let start = Instant::now();
    let sd = presets::uniform12();
    let alpha = IrrationalNumber::golden();
    let f = TestFunction::cosine(1).unwrap();
    let c = c_alpha(&f, &sd, &alpha, DEFAULT_H).map_err(|e| e.to_string())?;
    let sigma = c.value.sqrt();
    let cfg = SamplerConfig::new(sd, 42, 1 << 14, 4000).map_err(|e| e.to_string())?;
    let report = clt_experiment(&cfg, &f, &alpha, sigma).map_err(|e| e.to_string())?;
    let ratio = report.empirical_std / sigma;
    verdict(
        report.ks_distance <= 0.03 && (0.9..=1.1).contains(&ratio),
        format!(
            "sigma={sigma:.6}, KS={:.4}, std/sigma={ratio:.4}, time={:.2}s",
            report.ks_distance,
            start.elapsed().as_secs_f64()
        ),
    )
}

fn ac8() -> Check {
    let sd = presets::uniform12();
    let alpha = IrrationalNumber::golden();
    let mut scaled = Vec::new();
    for e in 4..=12 {
        let k = 1u64 << e;
        let res = kolmogorov_continuous(&sd, &alpha, k, 0.0).map_err(|e| e.to_string())?;
        scaled.push((k as f64).sqrt() * res.psi);
    }
    let lo = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = scaled.iter().cloned().fold(0.0, f64::max);
    verdict(
        lo > 0.0 && hi / lo <= 20.0,
        format!("sqrt(k) psi(k) in [{lo:.4}, {hi:.4}], ratio {:.3}", hi / lo),
    )
}

fn random_probs(rng: &mut ChaCha8Rng, q: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..q).map(|_| rng.random::<f64>() + 1e-12).collect();
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

fn random_function(rng: &mut ChaCha8Rng) -> TestFunction {
    match rng.random_range(0..4) {
        0 => TestFunction::sawtooth(),
        1 => TestFunction::cosine(rng.random_range(1..5)).unwrap(),
        2 => TestFunction::sine(rng.random_range(1..5)).unwrap(),
        _ => {
            let a = rng.random_range(0.0..0.98);
            TestFunction::indicator(a, rng.random_range(a + 0.01..=1.0)).unwrap()
        }
    }
}

fn ac9() -> Check {
    const TRIALS: usize = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut failures: Vec<String> = Vec::new();
    let mut tally = |name: &str, bad: usize| {
        if bad > 0 {
            failures.push(format!("{name}: {bad}/{TRIALS}"));
        }
    };

    let mut bad = 0;
    for _ in 0..TRIALS {
        let q = rng.random_range(2..64);
        let f: Vec<Complex64> = (0..q)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let x = CyclicDistribution::from_probs(&random_probs(&mut rng, q)).unwrap();
        let y = CyclicDistribution::from_probs(&random_probs(&mut rng, q)).unwrap();
        let (lhs, rhs) = discrete_koksma_check(&f, &x, &y).map_err(|e| e.to_string())?;
        bad += usize::from(lhs > rhs * (1.0 + 1e-12) + 1e-15);
    }
    tally("discrete Koksma", bad);

    let mut bad = 0;
    for _ in 0..TRIALS {
        let f = random_function(&mut rng);
        let n = rng.random_range(1..80);
        let pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let (lhs, rhs) = koksma_transfer_check(&f, &pts, rng.random_range(-0.5..0.5)).map_err(|e| e.to_string())?;
        bad += usize::from(lhs > rhs + 1e-9);
    }
    tally("Koksma transfer", bad);

    let mut bad = 0;
    for _ in 0..TRIALS {
        let f = random_function(&mut rng);
        let n = rng.random_range(1..40);
        let pts: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let h = rng.random_range(2..256);
        match fejer_approx(&f, &pts, h, 10.0) {
            Ok((approx, bound)) => {
                let exact: f64 = pts.iter().map(|&x| f.eval(x)).sum();
                bad += usize::from((exact - approx).abs() > bound);
            }
            Err(Error::ZeroSeparation) => {}
            Err(e) => return Err(e.to_string()),
        }
    }
    tally("Fejer approximation", bad);

    let mut bad = 0;
    for _ in 0..TRIALS {
        let q = rng.random_range(2..100);
        let d = CyclicDistribution::from_probs(&random_probs(&mut rng, q)).unwrap();
        let (a, b) = (psi_disc(&d), psi_disc_star(&d));
        bad += usize::from(!(a <= b + 1e-15 && b <= 2.0 * a + 1e-15));
    }
    tally("psi <= psi* <= 2 psi", bad);

    let mut bad = 0;
    for _ in 0..TRIALS {
        let q = rng.random_range(2..60);
        let p = rng.random_range(1..q);
        let sd = presets::two_point(rng.random_range(0.05..0.95)).unwrap();
        let mut state = SpectralState::new(&sd, Rational::new(p, q).unwrap()).map_err(|e| e.to_string())?;
        let mut prev = f64::INFINITY;
        let mut monotone = true;
        for _ in 0..20 {
            state.advance_in_place(1);
            let v = psi_disc_star(&state.to_distribution().map_err(|e| e.to_string())?);
            monotone &= v <= prev + 1e-12;
            prev = v;
        }
        bad += usize::from(!monotone);
    }
    tally("psi* monotone", bad);

    let mut bad = 0;
    for _ in 0..TRIALS {
        let x = rng.random_range(-1e4..1e4);
        let y = rng.random_range(-1e4..1e4);
        let sub = dist_nearest_int(x + y) <= dist_nearest_int(x) + dist_nearest_int(y) + 1e-9;
        let sym = dist_nearest_int(-x) == dist_nearest_int(x);
        bad += usize::from(!(sub && sym));
    }
    tally("nearest-integer norm", bad);

    let mut bad = 0;
    for _ in 0..TRIALS {
        let q = rng.random_range(1..1i128 << 62);
        let p = rng.random_range(-(1i128 << 62)..1i128 << 62);
        let cf = cf_expand(Rational::new(p, q).unwrap());
        let c = cf.convergents();
        let ok = (1..c.len()).all(|m| {
            c[m].p() * c[m - 1].q() - c[m - 1].p() * c[m].q() == if m % 2 == 1 { 1 } else { -1 }
        });
        bad += usize::from(!ok);
    }
    tally("CF determinant", bad);

    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("7 suites x {TRIALS} trials")
        } else {
            failures.join("; ")
        },
    )
}

fn ac10() -> Check {
    let u13 = presets::uniform13();
    let mut even_ok = true;
    for q in [2i128, 4, 6, 10, 64] {
        let r = Rational::new(1, q).unwrap();
        let span_err = |e: &Error| matches!(e, Error::SpanNotCoprime { .. });
        even_ok &= reduce_to_unit_span(&u13, r).as_ref().is_err_and(span_err)
            && c_rational(&TestFunction::sawtooth(), &u13, r).as_ref().is_err_and(span_err)
            && transition_scan(&u13, r, &[1, 2]).as_ref().is_err_and(span_err);
    }
    let single = matches!(StepDistribution::new(&[(1, 1.0)]), Err(Error::DegenerateDistribution(_)));
    let mut state = SpectralState::new(&presets::uniform12(), Rational::new(1, 2).unwrap()).map_err(|e| e.to_string())?;
    let mut zero = true;
    for _ in 0..200 {
        state.advance_in_place(1);
        zero &= psi_disc(&state.to_distribution().map_err(|e| e.to_string())?) == 0.0;
    }
    verdict(
        even_ok && single && zero,
        format!("span check {even_ok}, single atom rejected {single}, q=2 psi_disc == 0 for k<=200 {zero}"),
    )
}

fn main() {
    let checks: [Criterion; 10] = [
        ("AC1", ac1),
        ("AC2", ac2),
        ("AC3", ac3),
        ("AC4", ac4),
        ("AC5", ac5),
        ("AC6", ac6),
        ("AC7", ac7),
        ("AC8", ac8),
        ("AC9", ac9),
        ("AC10", ac10),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(detail) => println!("PASS {name} {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
