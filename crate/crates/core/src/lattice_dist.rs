//! Finite-support integer step laws.
//!
//! A [`StepDistribution`] is the law of a single increment `X_1` of the walk
//! `S_k = X_1 + ... + X_k`. Everything the rate bounds need is derived from
//! it: the gcd `d` of the support, the maximal span `D` (gcd of pairwise
//! differences), the first two moments, and the characteristic function
//! `phi(x) = E exp(i x X_1)`.

use crate::error::{Error, Result};
use crate::turn::{root_of_unity, Turn};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;

/// Tolerance on the total mass before normalization.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Default grid step for [`StepDistribution::envelope_params`].
pub const DEFAULT_ENVELOPE_GRID_STEP: f64 = 1e-5;

/// Below this `|1 - phi|` the spectral factor is treated as singular.
pub const SINGULAR_FACTOR_LIMIT: f64 = 1e-13;

/// Slack allowed in the second-difference concavity test.
const CONCAVITY_SLACK: f64 = 1e-10;

pub(crate) fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepDistribution {
    atoms: Vec<(i64, f64)>,
    mean: f64,
    variance: f64,
    d: i64,
    span: i64,
}

impl StepDistribution {
    /// Builds a step law from `(value, probability)` pairs.
    ///
    /// Duplicate values are merged, zero-mass atoms dropped and the
    /// probabilities renormalized to sum to one.
    pub fn new(pairs: &[(i64, f64)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::DegenerateDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for &(v, p) in pairs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbability(format!(
                    "probability {p} for value {v}"
                )));
            }
            total += p;
        }
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidProbability(format!(
                "probabilities sum to {total}"
            )));
        }

        let mut sorted: Vec<(i64, f64)> = pairs.iter().copied().filter(|&(_, p)| p > 0.0).collect();
        sorted.sort_by_key(|&(v, _)| v);
        let mut atoms: Vec<(i64, f64)> = Vec::with_capacity(sorted.len());
        for (v, p) in sorted {
            match atoms.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => atoms.push((v, p)),
            }
        }
        if atoms.len() < 2 {
            return Err(Error::DegenerateDistribution(format!(
                "{} atom(s) with positive mass",
                atoms.len()
            )));
        }
        for a in atoms.iter_mut() {
            a.1 /= total;
        }

        let mean: f64 = atoms.iter().map(|&(v, p)| v as f64 * p).sum();
        let variance: f64 = atoms
            .iter()
            .map(|&(v, p)| {
                let c = v as f64 - mean;
                c * c * p
            })
            .sum();
        let d = atoms.iter().fold(0, |g, &(v, _)| gcd(g, v));
        let base = atoms[0].0;
        let span = atoms.iter().fold(0, |g, &(v, _)| gcd(g, v - base));

        Ok(StepDistribution {
            atoms,
            mean,
            variance,
            d,
            span,
        })
    }

    /// Uniform law on `{lo, ..., hi}`.
    pub fn uniform(lo: i64, hi: i64) -> Result<Self> {
        if hi <= lo {
            return Err(Error::DegenerateDistribution(format!(
                "uniform range {lo}..={hi} has fewer than two points"
            )));
        }
        let n = (hi - lo + 1) as f64;
        let pairs: Vec<_> = (lo..=hi).map(|v| (v, 1.0 / n)).collect();
        Self::new(&pairs)
    }

    pub fn atoms(&self) -> &[(i64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn moments(&self) -> (f64, f64) {
        (self.mean, self.variance)
    }

    /// gcd of the support.
    pub fn d(&self) -> i64 {
        self.d
    }

    /// Maximal span: gcd of all pairwise differences of the support.
    pub fn span(&self) -> i64 {
        self.span
    }

    pub fn min_value(&self) -> i64 {
        self.atoms[0].0
    }

    pub fn max_value(&self) -> i64 {
        self.atoms[self.atoms.len() - 1].0
    }

    pub fn all_positive(&self) -> bool {
        self.min_value() > 0
    }

    /// Same law shifted by an integer.
    pub fn translated(&self, shift: i64) -> Self {
        let pairs: Vec<_> = self.atoms.iter().map(|&(v, p)| (v + shift, p)).collect();
        Self::new(&pairs).expect("translation preserves validity")
    }

    /// `phi(x) = sum_n p_n e^{i x n}`.
    pub fn char_fn(&self, x: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(v, p)| {
                let (s, c) = (x * v as f64).sin_cos();
                Complex64::new(p * c, p * s)
            })
            .sum()
    }

    /// `phi(2 pi m / q)`, with every `n m` reduced modulo `q` exactly.
    pub fn char_fn_rational(&self, m: i128, q: i128) -> Complex64 {
        let m = m.rem_euclid(q);
        self.atoms
            .iter()
            .map(|&(v, p)| p * root_of_unity((v as i128) * m, q))
            .sum()
    }

    /// `phi(2 pi t)` for a point of the circle in fixed point.
    pub fn char_fn_turn(&self, t: Turn) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(v, p)| p * t.mul_int(v as i128).unit())
            .sum()
    }

    /// `1 - phi(2 pi t)` from half-angle sines,
    /// `sum_n p_n (2 sin^2(pi {n t}) - i sin(2 pi {n t}))`, accurate when
    /// every `{n t}` is close to an integer.
    pub fn one_minus_char_turn(&self, t: Turn) -> Complex64 {
        self.atoms
            .iter()
            .map(|&(v, p)| {
                let x = t.mul_int(v as i128).to_signed_f64();
                let s = (std::f64::consts::PI * x).sin();
                Complex64::new(2.0 * p * s * s, -p * (TAU * x).sin())
            })
            .sum()
    }

    /// `(1 - |phi|^2) / |1 - phi|^2` at `2 pi t`, written as
    /// `1 + 2 Re(phi / (1 - phi)) = 2 Re(1 - phi) / |1 - phi|^2 - 1`.
    ///
    /// `None` when `|1 - phi| < 1e-13`.
    pub fn spectral_factor(&self, t: Turn) -> Option<f64> {
        let eps = self.one_minus_char_turn(t);
        let n = eps.norm_sqr();
        if n.sqrt() < SINGULAR_FACTOR_LIMIT {
            return None;
        }
        Some(2.0 * eps.re / n - 1.0)
    }

    /// `1 - |phi(2 pi x)|^2`, evaluated as `sum_{i,j} p_i p_j 2 sin^2(pi x (n_i - n_j))`
    /// so that it keeps full relative precision as `x -> 0`.
    pub fn one_minus_abs_sq(&self, x: f64) -> f64 {
        let mut s = 0.0;
        for (i, &(vi, pi)) in self.atoms.iter().enumerate() {
            for &(vj, pj) in &self.atoms[i + 1..] {
                let t = (std::f64::consts::PI * x * (vj - vi) as f64).sin();
                s += 4.0 * pi * pj * t * t;
            }
        }
        s
    }

    /// `log |phi(2 pi x)|`.
    pub fn log_abs_char(&self, x: f64) -> f64 {
        0.5 * (-self.one_minus_abs_sq(x)).ln_1p()
    }

    /// Scans `|phi(2 pi x)|` on `[0, 1/2]` for a log-concave (hence
    /// submultiplicative) upper envelope.
    ///
    /// `r` is the largest grid radius such that `log |phi|` has nonpositive
    /// second differences on `[0, r]`, `c` the best Gaussian constant on
    /// `(0, r]`, and `tau` bounds `|phi|` away from one for `||x|| >= r/2`.
    /// Requires unit span.
    pub fn envelope_params(&self, grid_step: f64) -> Result<EnvelopeParams> {
        if self.span != 1 {
            return Err(Error::InvalidInput(format!(
                "envelope requires maximal span 1, got {}",
                self.span
            )));
        }
        if !(grid_step > 0.0 && grid_step <= 1e-4) {
            return Err(Error::InvalidInput(format!(
                "grid step {grid_step} outside (0, 1e-4]"
            )));
        }
        let n = (0.5 / grid_step + 1e-9).floor() as usize;
        let xs: Vec<f64> = (0..=n).map(|i| (i as f64 * grid_step).min(0.5)).collect();
        let logs: Vec<f64> = xs.iter().map(|&x| self.log_abs_char(x)).collect();

        // log|phi| is even, so the second difference at 0 is 2 (L_1 - L_0).
        let mut r_index = n;
        if 2.0 * (logs[1] - logs[0]) > CONCAVITY_SLACK {
            r_index = 0;
        } else {
            for i in 1..n {
                let second = logs[i - 1] - 2.0 * logs[i] + logs[i + 1];
                if second.is_nan() || second > CONCAVITY_SLACK {
                    r_index = i;
                    break;
                }
            }
        }
        let r = xs[r_index];
        if r < 10.0 * grid_step {
            return Err(Error::EnvelopeNotFound {
                grid_step,
                min_radius: 10.0 * grid_step,
            });
        }

        let c = (1..=r_index)
            .map(|i| -logs[i] / (xs[i] * xs[i]))
            .fold(f64::INFINITY, f64::min);
        let max_log = xs
            .iter()
            .zip(&logs)
            .filter(|(&x, _)| x >= 0.5 * r - 0.5 * grid_step)
            .map(|(_, &l)| l)
            .fold(f64::NEG_INFINITY, f64::max);
        let tau = -max_log;
        if !(c > 0.0 && tau > 0.0) {
            return Err(Error::EnvelopeNotFound {
                grid_step,
                min_radius: 10.0 * grid_step,
            });
        }
        Ok(EnvelopeParams { r, c, tau })
    }
}

/// Constants of a submultiplicative envelope `g` with
/// `|phi(2 pi x)| <= g(x) <= exp(-c x^2)` on `[0, r]` and
/// `|phi(2 pi x)| <= exp(-tau)` for `||x|| >= r/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeParams {
    pub r: f64,
    pub c: f64,
    pub tau: f64,
}

/// Built-in step laws.
pub mod presets {
    use super::StepDistribution;

    pub fn uniform12() -> StepDistribution {
        StepDistribution::uniform(1, 2).unwrap()
    }

    pub fn uniform01() -> StepDistribution {
        StepDistribution::uniform(0, 1).unwrap()
    }

    /// Uniform on `{1, 3}`: maximal span 2.
    pub fn uniform13() -> StepDistribution {
        StepDistribution::new(&[(1, 0.5), (3, 0.5)]).unwrap()
    }

    /// Uniform on `{1, ..., m}`, `m >= 2`.
    pub fn uniform_1_to(m: i64) -> Option<StepDistribution> {
        StepDistribution::uniform(1, m).ok()
    }

    /// `{1: 1 - p, 2: p}` for `0 < p < 1`.
    pub fn two_point(p: f64) -> Option<StepDistribution> {
        if p > 0.0 && p < 1.0 {
            StepDistribution::new(&[(1, 1.0 - p), (2, p)]).ok()
        } else {
            None
        }
    }
}

/// `phi(2 pi x)` on the grid `i * step`, `0 <= i <= 1/(2 step)`; helper for
/// scans in tests and diagnostics.
pub fn char_fn_grid(sd: &StepDistribution, step: f64) -> Vec<(f64, Complex64)> {
    let n = (0.5 / step + 1e-9).floor() as usize;
    (0..=n)
        .map(|i| {
            let x = i as f64 * step;
            (x, sd.char_fn(TAU * x))
        })
        .collect()
}
