//! Test functions with closed-form Fourier data, the limiting variance
//! constants `C(alpha, f)` and `C(p/q, f)`, and the Fourier approximation
//! inequalities used to control additive functionals.

use crate::chain_exact::{reduce_to_unit_span, SpectralState, Synthesizer};
use crate::diophantine::{IrrationalNumber, Rational};
use crate::error::{Error, Result};
use crate::lattice_dist::StepDistribution;
use crate::turn::Turn;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;
use std::f64::consts::TAU;

/// Default truncation for `C(alpha, f)`.
pub const DEFAULT_H: u64 = 1 << 12;

/// Largest `H` accepted by the exact second-moment evaluation.
pub const MAX_EXACT_H: u64 = 512;

/// Largest modulus accepted by [`c_rational_oracle`].
pub const ORACLE_MAX_Q: i128 = 256;

/// Grid resolution (per harmonic) for the numeric total variation of a
/// trigonometric polynomial.
const TRIG_TV_GRID: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionKind {
    Constant {
        value: f64,
    },
    /// `{x} - 1/2`.
    Sawtooth,
    /// `cos(2 pi j x)`.
    Cosine {
        j: i64,
    },
    /// `sin(2 pi j x)`.
    Sine {
        j: i64,
    },
    /// Indicator of `[a, b)` modulo one.
    Indicator {
        a: f64,
        b: f64,
    },
    /// `constant + sum_j (a_j cos(2 pi j x) + b_j sin(2 pi j x))`, `j = 1, 2, ...`.
    TrigPoly {
        constant: f64,
        coeffs: Vec<(f64, f64)>,
    },
}

/// A real 1-periodic function of bounded variation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestFunction {
    kind: FunctionKind,
    total_variation: f64,
    mean: f64,
}

impl TestFunction {
    pub fn new(kind: FunctionKind) -> Result<Self> {
        let (total_variation, mean) = match &kind {
            FunctionKind::Constant { value } => {
                if !value.is_finite() {
                    return Err(Error::InvalidInput("constant must be finite".into()));
                }
                (0.0, *value)
            }
            FunctionKind::Sawtooth => (2.0, 0.0),
            FunctionKind::Cosine { j } | FunctionKind::Sine { j } => {
                if *j < 1 {
                    return Err(Error::InvalidInput(format!("frequency {j} must be >= 1")));
                }
                (4.0 * *j as f64, 0.0)
            }
            FunctionKind::Indicator { a, b } => {
                if !(0.0 <= *a && a < b && *b <= 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "indicator needs 0 <= a < b <= 1, got [{a}, {b})"
                    )));
                }
                let tv = if b - a >= 1.0 { 0.0 } else { 2.0 };
                (tv, b - a)
            }
            FunctionKind::TrigPoly { constant, coeffs } => {
                if !constant.is_finite() || coeffs.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                    return Err(Error::InvalidInput("coefficients must be finite".into()));
                }
                (trig_total_variation(coeffs), *constant)
            }
        };
        Ok(TestFunction {
            kind,
            total_variation,
            mean,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self::new(FunctionKind::Constant { value }).expect("finite constant")
    }

    pub fn sawtooth() -> Self {
        Self::new(FunctionKind::Sawtooth).expect("sawtooth")
    }

    pub fn cosine(j: i64) -> Result<Self> {
        Self::new(FunctionKind::Cosine { j })
    }

    pub fn sine(j: i64) -> Result<Self> {
        Self::new(FunctionKind::Sine { j })
    }

    pub fn indicator(a: f64, b: f64) -> Result<Self> {
        Self::new(FunctionKind::Indicator { a, b })
    }

    pub fn trig_poly(constant: f64, coeffs: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(FunctionKind::TrigPoly { constant, coeffs })
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    /// `V(f)`; numeric (grid) for trigonometric polynomials.
    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    /// `int_0^1 f`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Largest `|h|` with `f^(h) != 0`, or `None` if unbounded.
    pub fn band_limit(&self) -> Option<u64> {
        match &self.kind {
            FunctionKind::Constant { .. } => Some(0),
            FunctionKind::Cosine { j } | FunctionKind::Sine { j } => Some(*j as u64),
            FunctionKind::TrigPoly { coeffs, .. } => Some(
                coeffs
                    .iter()
                    .rposition(|&(a, b)| a != 0.0 || b != 0.0)
                    .map_or(0, |i| i as u64 + 1),
            ),
            FunctionKind::Indicator { a, b } if b - a >= 1.0 => Some(0),
            _ => None,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            FunctionKind::Constant { value } => *value,
            FunctionKind::Sawtooth => x.rem_euclid(1.0).min(1.0 - f64::EPSILON / 2.0) - 0.5,
            FunctionKind::Cosine { j } => (TAU * (*j as f64 * x).rem_euclid(1.0)).cos(),
            FunctionKind::Sine { j } => (TAU * (*j as f64 * x).rem_euclid(1.0)).sin(),
            FunctionKind::Indicator { a, b } => {
                let t = x.rem_euclid(1.0);
                let t = if t >= 1.0 { 0.0 } else { t };
                if *a <= t && t < *b {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionKind::TrigPoly { constant, coeffs } => {
                let mut s = *constant;
                for (i, &(a, b)) in coeffs.iter().enumerate() {
                    let ang = TAU * ((i + 1) as f64 * x).rem_euclid(1.0);
                    s += a * ang.cos() + b * ang.sin();
                }
                s
            }
        }
    }

    /// `f` at a point of the circle held in fixed point.
    pub fn eval_turn(&self, t: Turn) -> f64 {
        match &self.kind {
            FunctionKind::Cosine { j } => t.mul_int(*j as i128).unit().re,
            FunctionKind::Sine { j } => t.mul_int(*j as i128).unit().im,
            FunctionKind::TrigPoly { constant, coeffs } => {
                let mut s = *constant;
                for (i, &(a, b)) in coeffs.iter().enumerate() {
                    let z = t.mul_int(i as i128 + 1).unit();
                    s += a * z.re + b * z.im;
                }
                s
            }
            _ => self.eval(t.to_f64()),
        }
    }

    /// `f^(h) = int_0^1 f(x) e(-h x) dx`.
    pub fn fourier(&self, h: i64) -> Complex64 {
        let zero = Complex64::default();
        match &self.kind {
            FunctionKind::Constant { value } => {
                if h == 0 {
                    Complex64::new(*value, 0.0)
                } else {
                    zero
                }
            }
            FunctionKind::Sawtooth => {
                if h == 0 {
                    zero
                } else {
                    Complex64::new(0.0, 1.0 / (TAU * h as f64))
                }
            }
            FunctionKind::Cosine { j } => {
                if h.abs() == *j {
                    Complex64::new(0.5, 0.0)
                } else {
                    zero
                }
            }
            FunctionKind::Sine { j } => {
                if h == *j {
                    Complex64::new(0.0, -0.5)
                } else if h == -*j {
                    Complex64::new(0.0, 0.5)
                } else {
                    zero
                }
            }
            FunctionKind::Indicator { a, b } => {
                if h == 0 {
                    Complex64::new(b - a, 0.0)
                } else {
                    let ea = Turn::from_f64(-(h as f64) * a).unit();
                    let eb = Turn::from_f64(-(h as f64) * b).unit();
                    (ea - eb) / Complex64::new(0.0, TAU * h as f64)
                }
            }
            FunctionKind::TrigPoly { constant, coeffs } => {
                if h == 0 {
                    return Complex64::new(*constant, 0.0);
                }
                match coeffs.get(h.unsigned_abs() as usize - 1) {
                    // a cos + b sin = (a - i b)/2 e(x) + (a + i b)/2 e(-x)
                    Some(&(a, b)) => Complex64::new(0.5 * a, -0.5 * b * h.signum() as f64),
                    None => zero,
                }
            }
        }
    }

    /// `f(a/q) - (1/q) sum_b f(b/q)` for `a = 0..q`.
    pub fn centered_samples(&self, q: usize) -> Vec<f64> {
        let samples: Vec<f64> = (0..q)
            .map(|a| self.eval_turn(Turn::from_ratio(a as i128, q as i128)))
            .collect();
        let m = samples.iter().sum::<f64>() / q as f64;
        samples.into_iter().map(|s| s - m).collect()
    }

    /// `||f - E f||_2^2 = sum_{h != 0} |f^(h)|^2`, in closed form.
    pub fn centered_l2_sq(&self) -> f64 {
        match &self.kind {
            FunctionKind::Constant { .. } => 0.0,
            FunctionKind::Sawtooth => 1.0 / 12.0,
            FunctionKind::Cosine { .. } | FunctionKind::Sine { .. } => 0.5,
            FunctionKind::Indicator { a, b } => {
                let l = b - a;
                l * (1.0 - l)
            }
            FunctionKind::TrigPoly { coeffs, .. } => {
                coeffs.iter().map(|&(a, b)| 0.5 * (a * a + b * b)).sum()
            }
        }
    }
}

fn trig_total_variation(coeffs: &[(f64, f64)]) -> f64 {
    let order = coeffs.len();
    if order == 0 {
        return 0.0;
    }
    let f = |x: f64| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| {
                let ang = TAU * (i + 1) as f64 * x;
                a * ang.cos() + b * ang.sin()
            })
            .sum()
    };
    let n = TRIG_TV_GRID * order;
    let mut prev = f(0.0);
    let mut tv = 0.0;
    for i in 1..=n {
        let cur = f(i as f64 / n as f64);
        tv += (cur - prev).abs();
        prev = cur;
    }
    tv
}

/// `C(p/q, f) = sum_{h=1}^{q-1} |f^_q(h)|^2 (1 - |phi|^2) / |1 - phi|^2`,
/// with `phi = phi(2 pi h p / q)` and `f^_q` the DFT of the samples `f(a/q)`.
pub fn c_rational(f: &TestFunction, sd: &StepDistribution, r: Rational) -> Result<f64> {
    reduce_to_unit_span(sd, r)?;
    let q = r.q() as usize;
    if r.q() > crate::chain_exact::MAX_MODULUS {
        return Err(Error::InvalidInput(format!("modulus {} too large", r.q())));
    }
    let mut buf: Vec<Complex64> = f
        .centered_samples(q)
        .into_iter()
        .map(|v| Complex64::new(v, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(q).process(&mut buf);
    let mut sum = 0.0;
    for (h, z) in buf.iter().enumerate().skip(1) {
        let w = z.norm_sqr() / (q * q) as f64;
        if w == 0.0 {
            continue;
        }
        let t = Turn::from_ratio(r.residue(h as i128), r.q());
        let factor = sd
            .spectral_factor(t)
            .ok_or(Error::SingularSpectralFactor(h as i64))?;
        sum += w * factor;
    }
    Ok(sum)
}

/// `C(p/q, f)` from its definition as a sum of autocovariances,
/// `E fbar(U)^2 + 2 sum_k E fbar(U) fbar(U + S_k p/q)`, with the law of
/// `S_k p/q` evolved step by step. Summation stops once the geometric tail
/// bound falls below `tol`.
pub fn c_rational_oracle(
    f: &TestFunction,
    sd: &StepDistribution,
    r: Rational,
    tol: f64,
) -> Result<f64> {
    if r.q() > ORACLE_MAX_Q {
        return Err(Error::InvalidInput(format!("oracle limited to q <= {ORACLE_MAX_Q}")));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput("tol must be positive".into()));
    }
    reduce_to_unit_span(sd, r)?;
    let q = r.q() as usize;
    let g = f.centered_samples(q);
    // R(b) = (1/q) sum_a g(a) g(a + b)
    let auto: Vec<f64> = (0..q)
        .map(|b| (0..q).map(|a| g[a] * g[(a + b) % q]).sum::<f64>() / q as f64)
        .collect();
    let energy = auto[0];
    if energy == 0.0 {
        return Ok(0.0);
    }
    let mut state = SpectralState::new(sd, r)?;
    let rho = state
        .clone()
        .advance(1)
        .spectrum()
        .iter()
        .skip(1)
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if rho >= 1.0 {
        return Err(Error::SingularSpectralFactor(1));
    }
    let mut synth = Synthesizer::new(q);
    let mut value = energy;
    let mut k: i32 = 0;
    loop {
        k += 1;
        state.advance_in_place(1);
        let dist = synth.run(&state)?;
        // the uniform part of the law contributes sum_b R(b) / q = 0
        let term: f64 = dist.excess().iter().zip(&auto).map(|(e, a)| e * a).sum();
        value += 2.0 * term;
        let tail = 2.0 * rho.powi(k + 1) * energy / (1.0 - rho);
        if tail < tol {
            break;
        }
    }
    Ok(value)
}

/// Truncated `C(alpha, f)` with a tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CAlpha {
    pub value: f64,
    /// `2 (V/2 pi)^2 kappa / (H - 1)`, zero when `f` is band-limited below `H`.
    pub tail_bound: f64,
    /// Largest spectral factor seen for `0 < h < H`.
    pub kappa: f64,
    pub h_max: u64,
}

/// `C(alpha, f) = sum_{h != 0} |f^(h)|^2 (1 - |phi(2 pi h alpha)|^2) / |1 - phi(2 pi h alpha)|^2`
/// over `0 < |h| < H`.
pub fn c_alpha(
    f: &TestFunction,
    sd: &StepDistribution,
    alpha: &IrrationalNumber,
    h_max: u64,
) -> Result<CAlpha> {
    if h_max < 2 {
        return Err(Error::InvalidInput("H must be at least 2".into()));
    }
    let top = match f.band_limit() {
        Some(b) => b.min(h_max - 1),
        None => h_max - 1,
    };
    let mut value = 0.0;
    let mut kappa: f64 = 0.0;
    for h in 1..h_max {
        let t = alpha.frac_multiple(h as i128)?;
        let factor = sd
            .spectral_factor(t)
            .ok_or(Error::SingularSpectralFactor(h as i64))?;
        kappa = kappa.max(factor);
        if h <= top {
            value += 2.0 * f.fourier(h as i64).norm_sqr() * factor;
        }
    }
    let band_limited = f.band_limit().is_some_and(|b| b < h_max);
    let tail_bound = if band_limited {
        0.0
    } else {
        let v = f.total_variation() / TAU;
        2.0 * v * v * kappa / (h_max - 1) as f64
    };
    Ok(CAlpha {
        value,
        tail_bound,
        kappa,
        h_max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub m: usize,
    pub p_m: i128,
    pub q_m: i128,
    pub c_rational: f64,
    pub c_alpha: f64,
    pub gap: f64,
    /// `|(1/q_m) sum_a f(a/q_m) - int f|`.
    pub riemann_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub c_alpha: CAlpha,
    pub rows: Vec<ConvergenceRow>,
    /// Convergent indices skipped because `gcd(D, q_m) != 1`.
    pub skipped: Vec<usize>,
}

/// `C(p_m/q_m, f)` along the convergents of `alpha` (index `m` counted
/// from `p_0/q_0 = a_0/1`), against `C(alpha, f)` truncated at `h_alpha`.
pub fn c_convergence_experiment(
    f: &TestFunction,
    sd: &StepDistribution,
    alpha: &IrrationalNumber,
    m_range: std::ops::RangeInclusive<usize>,
    h_alpha: u64,
) -> Result<ConvergenceTable> {
    let cf = alpha
        .continued_fraction()
        .ok_or_else(|| Error::InvalidInput("alpha has no continued fraction data".into()))?;
    let convergents = cf.convergents();
    if *m_range.end() >= convergents.len() {
        return Err(Error::InvalidInput(format!(
            "only {} convergents available",
            convergents.len()
        )));
    }
    let ca = c_alpha(f, sd, alpha, h_alpha)?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for m in m_range {
        let r = convergents[m];
        let c = match c_rational(f, sd, r) {
            Ok(c) => c,
            Err(Error::SpanNotCoprime { .. }) => {
                skipped.push(m);
                continue;
            }
            Err(e) => return Err(e),
        };
        let q = r.q() as usize;
        let riemann = (0..q)
            .map(|a| f.eval_turn(Turn::from_ratio(a as i128, q as i128)))
            .sum::<f64>()
            / q as f64;
        rows.push(ConvergenceRow {
            m,
            p_m: r.p(),
            q_m: r.q(),
            c_rational: c,
            c_alpha: ca.value,
            gap: (c - ca.value).abs(),
            riemann_gap: (riemann - f.mean()).abs(),
        });
    }
    Ok(ConvergenceTable {
        c_alpha: ca,
        rows,
        skipped,
    })
}

/// `E (sum_{k<=N} f(U + S_k alpha) - N E f)^2` with `U` uniform, from the
/// Fourier expansion truncated at `0 < |h| < H`.
pub fn stationary_variance(
    f: &TestFunction,
    sd: &StepDistribution,
    alpha: &IrrationalNumber,
    n: u64,
    h_max: u64,
) -> Result<f64> {
    if h_max < 2 || n < 1 {
        return Err(Error::InvalidInput("need H >= 2 and N >= 1".into()));
    }
    let top = f.band_limit().map_or(h_max - 1, |b| b.min(h_max - 1));
    let nf = n as f64;
    let mut v = 0.0;
    for h in 1..=top {
        let w = f.fourier(h as i64).norm_sqr();
        if w == 0.0 {
            continue;
        }
        let t = alpha.frac_multiple(h as i128)?;
        let phi = sd.char_fn_turn(t);
        let eps = sd.one_minus_char_turn(t);
        if eps.norm() < crate::lattice_dist::SINGULAR_FACTOR_LIMIT {
            return Err(Error::SingularSpectralFactor(h as i64));
        }
        let factor = 2.0 * eps.re / eps.norm_sqr() - 1.0;
        let boundary = phi * (1.0 - crate::chain_exact::cpow(phi, n)) / (eps * eps);
        v += 2.0 * w * (nf * factor - 2.0 * boundary.re);
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpsumMode {
    Exact,
    MainTerm,
}

/// Degeneracy threshold below which geometric closed forms are replaced by
/// direct summation.
const GEOMETRIC_FALLBACK: f64 = 1e-6;

/// `sum_{i=0}^{n-1} z^i`.
fn geometric(z: Complex64, n: u64) -> Complex64 {
    if (1.0 - z).norm() < GEOMETRIC_FALLBACK {
        let mut acc = Complex64::default();
        let mut pw = Complex64::new(1.0, 0.0);
        for _ in 0..n {
            acc += pw;
            pw *= z;
        }
        acc
    } else {
        (1.0 - crate::chain_exact::cpow(z, n)) / (1.0 - z)
    }
}

/// `sum_{i=0}^{n-1} a^i b^{n-1-i}`.
fn mixed_geometric(a: Complex64, b: Complex64, n: u64) -> Complex64 {
    if (a - b).norm() < GEOMETRIC_FALLBACK {
        let mut acc = Complex64::default();
        let mut pa = Complex64::new(1.0, 0.0);
        let pows_b: Vec<Complex64> = {
            let mut v = Vec::with_capacity(n as usize);
            let mut pb = Complex64::new(1.0, 0.0);
            for _ in 0..n {
                v.push(pb);
                pb *= b;
            }
            v
        };
        for i in 0..n as usize {
            acc += pa * pows_b[n as usize - 1 - i];
            pa *= a;
        }
        acc
    } else {
        use crate::chain_exact::cpow;
        (cpow(a, n) - cpow(b, n)) / (a - b)
    }
}

/// `sum_{M < k < l <= M+N} a^k b^{l-k}`.
fn ordered_pair_sum(a: Complex64, b: Complex64, m: u64, n: u64) -> Complex64 {
    use crate::chain_exact::cpow;
    if (1.0 - b).norm() < GEOMETRIC_FALLBACK {
        // sum_k a^k B(M+N-k) with B(j) = b + ... + b^j
        let mut partial = Vec::with_capacity(n as usize);
        let (mut acc_b, mut pb) = (Complex64::default(), Complex64::new(1.0, 0.0));
        for _ in 0..n {
            partial.push(acc_b);
            pb *= b;
            acc_b += pb;
        }
        let mut ak = cpow(a, m + 1);
        let mut acc = Complex64::default();
        for i in 0..n as usize {
            acc += ak * partial[n as usize - 1 - i];
            ak *= a;
        }
        acc
    } else {
        let am1 = cpow(a, m + 1);
        b / (1.0 - b) * am1 * (geometric(a, n) - mixed_geometric(a, b, n))
    }
}

/// `E |sum_h c_h sum_{k=M+1}^{M+N} e(h S_k alpha)|^2`.
///
/// `coeffs` lists `(h, c_h)` for distinct nonzero `h`, with `|c_h| <= 1/|h|`.
/// Exact mode evaluates every `(j, h)` pair through geometric closed forms
/// and needs `max |h| < 512`; main-term mode returns
/// `N sum_h |c_h|^2 (1 - |phi(2 pi h alpha)|^2) / |1 - phi(2 pi h alpha)|^2`.
pub fn expsum_second_moment(
    coeffs: &[(i64, Complex64)],
    sd: &StepDistribution,
    alpha: &IrrationalNumber,
    m: u64,
    n: u64,
    mode: ExpsumMode,
) -> Result<f64> {
    let mut seen = std::collections::BTreeSet::new();
    for &(h, c) in coeffs {
        if h == 0 || !seen.insert(h) {
            return Err(Error::InvalidInput(format!("frequency {h} is zero or repeated")));
        }
        if c.norm() > 1.0 / h.unsigned_abs() as f64 + 1e-12 {
            return Err(Error::CoefficientBound {
                h,
                modulus: c.norm(),
            });
        }
    }
    let phi = |x: i64| -> Result<Complex64> {
        Ok(sd.char_fn_turn(alpha.frac_multiple(x as i128)?))
    };
    match mode {
        ExpsumMode::MainTerm => {
            let mut s = 0.0;
            for &(h, c) in coeffs {
                let t = alpha.frac_multiple(h as i128)?;
                let factor = sd
                    .spectral_factor(t)
                    .ok_or(Error::SingularSpectralFactor(h))?;
                s += c.norm_sqr() * factor;
            }
            Ok(n as f64 * s)
        }
        ExpsumMode::Exact => {
            if coeffs.iter().any(|&(h, _)| h.unsigned_abs() >= MAX_EXACT_H) {
                return Err(Error::InvalidInput(format!(
                    "exact mode needs |h| < {MAX_EXACT_H}"
                )));
            }
            let phis: std::collections::HashMap<i64, Complex64> = coeffs
                .iter()
                .map(|&(h, _)| phi(h).map(|v| (h, v)))
                .collect::<Result<_>>()?;
            let mut total = Complex64::default();
            for &(j, cj) in coeffs {
                for &(h, ch) in coeffs {
                    // E e(j S_k alpha - h S_l alpha), split by the order of k, l
                    let a = phi(j - h)?;
                    let b = phis[&h].conj();
                    let c = phis[&j];
                    let diag = crate::chain_exact::cpow(a, m + 1) * geometric(a, n);
                    let pair = ordered_pair_sum(a, b, m, n) + diag + ordered_pair_sum(a, c, m, n);
                    total += cj * ch.conj() * pair;
                }
            }
            Ok(total.re)
        }
    }
}

/// Cesaro-weighted Fourier approximation of `sum_k f(x_k)` and the error
/// bound `kappa V(f) (log H / (r H) + 1)`, with `r` the minimal separation
/// of the points (the log term is dropped for a single point).
pub fn fejer_approx(
    f: &TestFunction,
    points: &[f64],
    h_max: u64,
    kappa: f64,
) -> Result<(f64, f64)> {
    if h_max < 2 {
        return Err(Error::InvalidInput("H must be at least 2".into()));
    }
    let sep = min_separation(points);
    if points.len() > 1 && sep == 0.0 {
        return Err(Error::ZeroSeparation);
    }
    let hf = h_max as f64;
    let mut approx = f.fourier(0).re * points.len() as f64;
    for h in 1..h_max as i64 {
        let c = f.fourier(h);
        if c == Complex64::default() {
            continue;
        }
        let s: Complex64 = points
            .iter()
            .map(|&x| Turn::from_f64(x).mul_int(h as i128).unit())
            .sum();
        // h and -h together give 2 Re(c_h S_h)
        approx += 2.0 * (1.0 - h as f64 / hf) * (c * s).re;
    }
    let log_term = if points.len() > 1 {
        hf.ln() / (sep * hf)
    } else {
        0.0
    };
    Ok((approx, kappa * f.total_variation() * (log_term + 1.0)))
}

/// `min_{k != l} ||x_k - x_l||`; infinite for fewer than two points.
pub fn min_separation(points: &[f64]) -> f64 {
    let mut fr: Vec<f64> = points.iter().map(|x| x.rem_euclid(1.0)).collect();
    fr.sort_by(f64::total_cmp);
    if fr.len() < 2 {
        return f64::INFINITY;
    }
    let wrap = fr[0] + 1.0 - fr[fr.len() - 1];
    fr.windows(2).map(|w| w[1] - w[0]).fold(wrap, f64::min)
}

/// Both sides of `|sum f(x_k) - sum f(x_k - y)| <= V(f) (sup_J - inf_J) #{k : x_k in J}`,
/// the extrema taken over arcs `J` of length `|y|`.
pub fn koksma_transfer_check(f: &TestFunction, points: &[f64], y: f64) -> Result<(f64, f64)> {
    if y.abs() > 0.5 {
        return Err(Error::InvalidInput(format!("|y| = {} exceeds 1/2", y.abs())));
    }
    let lhs = points
        .iter()
        .map(|&x| f.eval(x) - f.eval(x - y))
        .sum::<f64>()
        .abs();
    let len = y.abs();
    if len == 0.0 || points.is_empty() {
        return Ok((lhs, 0.0));
    }
    let fr: Vec<f64> = points.iter().map(|x| x.rem_euclid(1.0)).collect();
    let (mut sup, mut inf) = (0usize, usize::MAX);
    // the count only changes when an endpoint crosses a point, so it is
    // enough to anchor either endpoint at a point, open or closed
    for &anchor in &fr {
        let fwd: Vec<f64> = fr.iter().map(|&x| (x - anchor).rem_euclid(1.0)).collect();
        let bwd: Vec<f64> = fr.iter().map(|&x| (anchor - x).rem_euclid(1.0)).collect();
        for dists in [&fwd, &bwd] {
            let closed = dists.iter().filter(|&&d| d <= len).count();
            let open_far = dists.iter().filter(|&&d| d < len).count();
            let open_near = dists.iter().filter(|&&d| d > 0.0 && d <= len).count();
            let open_both = dists.iter().filter(|&&d| d > 0.0 && d < len).count();
            for c in [closed, open_far, open_near, open_both] {
                sup = sup.max(c);
                inf = inf.min(c);
            }
        }
    }
    Ok((lhs, f.total_variation() * (sup - inf) as f64))
}

/// Centered L2 norm of `f` on `Z_q`, `(1/q) sum_a fbar(a/q)^2`.
pub fn discrete_l2_sq(f: &TestFunction, q: usize) -> f64 {
    f.centered_samples(q).iter().map(|v| v * v).sum::<f64>() / q as f64
}
