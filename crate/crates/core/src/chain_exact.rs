//! Exact evolution of `S_k p/q mod 1` on the cyclic group `Z_q`.
//!
//! The law of `S_k p/q` is kept in the Fourier domain, where a step is a
//! pointwise product: `spectrum[h] = phi(2 pi h p / q)^k`. Distributions are
//! synthesized by a single FFT and stored as deviations from uniform, which
//! keeps full relative precision deep into the exponential regime where the
//! distances fall far below `1/q`.

use crate::diophantine::{bad_approx_constant_rational, IrrationalNumber, Rational};
use crate::error::{Error, Result};
use crate::lattice_dist::{StepDistribution, DEFAULT_ENVELOPE_GRID_STEP};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Largest modulus accepted for spectral evolution.
pub const MAX_MODULUS: i128 = 1 << 26;

/// Steps between re-synthesis of the spectrum from the one-step values.
pub const RESYNC_INTERVAL: u64 = 1 << 16;

/// Largest tolerated deviation between the running and re-synthesized spectra.
pub const DRIFT_LIMIT: f64 = 1e-9;

/// Imaginary residue or negative mass above this is reported as corruption.
pub const CORRUPTION_LIMIT: f64 = 1e-6;

/// Negative probabilities down to this are treated as rounding noise.
const CLIP_LIMIT: f64 = 1e-12;

/// Largest support of `S_k` enumerated by [`kolmogorov_continuous`].
pub const MAX_SUPPORT: u64 = 1 << 24;

/// Translates and rescales a step law of maximal span `D > 1` to span one.
///
/// The walk `S_k p/q` for the original law is a rotation of the walk
/// `S'_k (D p)/q` for the reduced law, so `psi*_disc` is unchanged.
pub fn reduce_to_unit_span(
    sd: &StepDistribution,
    r: Rational,
) -> Result<(StepDistribution, Rational)> {
    let span = sd.span();
    if span == 1 {
        return Ok((sd.clone(), r));
    }
    if gcd128(span as i128, r.q()) != 1 {
        return Err(Error::SpanNotCoprime { span, q: r.q() });
    }
    let lo = sd.min_value();
    let pairs: Vec<(i64, f64)> = sd
        .atoms()
        .iter()
        .map(|&(v, p)| ((v - lo) / span, p))
        .collect();
    let p = (span as i128)
        .checked_mul(r.p())
        .ok_or_else(|| Error::Overflow("D p".into()))?;
    Ok((StepDistribution::new(&pairs)?, Rational::new(p, r.q())?))
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

fn check_modulus(q: i128) -> Result<usize> {
    if !(1..=MAX_MODULUS).contains(&q) {
        return Err(Error::InvalidInput(format!(
            "modulus {q} outside 1..={MAX_MODULUS}"
        )));
    }
    Ok(q as usize)
}

/// `z^n` by repeated squaring.
pub fn cpow(mut z: Complex64, mut n: u64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    while n > 0 {
        if n & 1 == 1 {
            acc *= z;
        }
        z *= z;
        n >>= 1;
    }
    acc
}

/// Fourier-domain law of `S_k p/q` on `Z_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    q: usize,
    p: i128,
    k: u64,
    spectrum: Vec<Complex64>,
    base: Vec<Complex64>,
    since_sync: u64,
    max_drift: f64,
}

impl SpectralState {
    /// State at `k = 0`: the point mass at 0.
    pub fn new(sd: &StepDistribution, r: Rational) -> Result<Self> {
        let q = check_modulus(r.q())?;
        let base: Vec<Complex64> = (0..q as i128)
            .map(|h| {
                if h == 0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    sd.char_fn_rational(r.residue(h), r.q())
                }
            })
            .collect();
        Ok(SpectralState {
            q,
            p: r.p(),
            k: 0,
            spectrum: vec![Complex64::new(1.0, 0.0); q],
            base,
            since_sync: 0,
            max_drift: 0.0,
        })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn p(&self) -> i128 {
        self.p
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    /// Largest deviation seen at a re-synthesis point.
    pub fn max_drift(&self) -> f64 {
        self.max_drift
    }

    /// Advances by `steps` steps.
    pub fn advance(mut self, steps: u64) -> Self {
        self.advance_in_place(steps);
        self
    }

    pub fn advance_in_place(&mut self, steps: u64) {
        if steps == 0 {
            return;
        }
        for (s, &b) in self.spectrum.iter_mut().zip(&self.base).skip(1) {
            *s *= cpow(b, steps);
        }
        self.k += steps;
        self.since_sync += steps;
        if self.since_sync >= RESYNC_INTERVAL {
            self.resync();
        }
    }

    fn resync(&mut self) {
        let k = self.k;
        for (s, &b) in self.spectrum.iter_mut().zip(&self.base).skip(1) {
            let fresh = cpow(b, k);
            self.max_drift = self.max_drift.max((*s - fresh).norm());
            *s = fresh;
        }
        self.since_sync = 0;
    }

    /// Inverse DFT to a probability vector on `Z_q`.
    pub fn to_distribution(&self) -> Result<CyclicDistribution> {
        Synthesizer::new(self.q).run(self)
    }
}

/// `spectrum[h] = phi(2 pi h p / q)` for `h = 0..q`: the state after one step.
pub fn one_step_spectrum(sd: &StepDistribution, r: Rational) -> Result<SpectralState> {
    Ok(SpectralState::new(sd, r)?.advance(1))
}

/// Reusable FFT plan for [`SpectralState::to_distribution`].
pub struct Synthesizer {
    q: usize,
    fft: Arc<dyn Fft<f64>>,
    buffer: Vec<Complex64>,
}

impl Synthesizer {
    pub fn new(q: usize) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(q);
        Synthesizer {
            q,
            fft,
            buffer: vec![Complex64::default(); q],
        }
    }

    pub fn run(&mut self, state: &SpectralState) -> Result<CyclicDistribution> {
        assert_eq!(state.q, self.q, "synthesizer planned for another modulus");
        let q = self.q;
        self.buffer.copy_from_slice(&state.spectrum);
        // the uniform part is added back analytically
        self.buffer[0] = Complex64::default();
        self.fft.process(&mut self.buffer);
        let scale = 1.0 / q as f64;
        let mut excess = Vec::with_capacity(q);
        let mut residue: f64 = 0.0;
        for z in &self.buffer {
            residue = residue.max((z.im * scale).abs());
            excess.push(z.re * scale);
        }
        if residue > CORRUPTION_LIMIT {
            return Err(Error::SpectralCorruption(format!(
                "imaginary residue {residue:e} at k = {}",
                state.k
            )));
        }
        CyclicDistribution::from_excess(excess)
    }
}

/// A probability vector on `Z_q = {0, 1/q, ..., (q-1)/q}`, stored as the
/// deviation `excess[a] = probs[a] - 1/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicDistribution {
    excess: Vec<f64>,
}

impl CyclicDistribution {
    fn from_excess(mut excess: Vec<f64>) -> Result<Self> {
        let q = excess.len();
        let u = 1.0 / q as f64;
        let worst = excess.iter().map(|&e| u + e).fold(f64::INFINITY, f64::min);
        if worst < -CORRUPTION_LIMIT {
            return Err(Error::SpectralCorruption(format!("negative mass {worst:e}")));
        }
        if worst < -CLIP_LIMIT {
            let total: f64 = excess.iter().map(|&e| (u + e).max(0.0)).sum();
            for e in &mut excess {
                *e = (u + *e).max(0.0) / total - u;
            }
        }
        Ok(CyclicDistribution { excess })
    }

    /// Validates and wraps a probability vector.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidInput("empty probability vector".into()));
        }
        if let Some(bad) = probs.iter().find(|&&p| !p.is_finite() || p < -CLIP_LIMIT) {
            return Err(Error::InvalidProbability(format!("entry {bad}")));
        }
        let total: f64 = probs.iter().map(|&p| p.max(0.0)).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbability(format!("total mass {total}")));
        }
        let u = 1.0 / probs.len() as f64;
        Ok(CyclicDistribution {
            excess: probs.iter().map(|&p| p.max(0.0) / total - u).collect(),
        })
    }

    pub fn uniform(q: usize) -> Self {
        CyclicDistribution {
            excess: vec![0.0; q],
        }
    }

    pub fn point_mass(q: usize, a: usize) -> Self {
        let u = 1.0 / q as f64;
        let mut excess = vec![-u; q];
        excess[a % q] = 1.0 - u;
        CyclicDistribution { excess }
    }

    pub fn q(&self) -> usize {
        self.excess.len()
    }

    pub fn excess(&self) -> &[f64] {
        &self.excess
    }

    pub fn probs(&self) -> Vec<f64> {
        let u = 1.0 / self.q() as f64;
        self.excess.iter().map(|&e| u + e).collect()
    }

    /// `CDF(a/q) - (a+1)/q` for `a = 0..q`.
    pub fn cdf_excess(&self) -> Vec<f64> {
        self.excess
            .iter()
            .scan(0.0, |acc, &e| {
                *acc += e;
                Some(*acc)
            })
            .collect()
    }
}

/// `max_a |CDF(a/q) - (a+1)/q|`.
pub fn psi_disc(dist: &CyclicDistribution) -> f64 {
    dist.cdf_excess().into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Maximal discrepancy over all cyclic intervals of `Z_q`.
pub fn psi_disc_star(dist: &CyclicDistribution) -> f64 {
    let (lo, hi) = dist
        .cdf_excess()
        .into_iter()
        .fold((0.0f64, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    hi - lo
}

/// Total variation distance to the uniform law.
pub fn psi_tv(dist: &CyclicDistribution) -> f64 {
    0.5 * dist.excess.iter().map(|e| e.abs()).sum::<f64>()
}

/// Moduli `|phi(2 pi h p / q)|` and `|phi(2 pi h / q)|`, tabulated once so
/// that all bounds at a given `k` cost `O(q)`.
#[derive(Debug, Clone)]
pub struct BoundTables {
    q: usize,
    var: f64,
    abs_phi_hp: Vec<f64>,
    abs_phi_h: Vec<f64>,
}

impl BoundTables {
    pub fn new(sd: &StepDistribution, r: Rational) -> Result<Self> {
        let q = check_modulus(r.q())?;
        let abs_phi_h: Vec<f64> = (0..q as i128)
            .map(|h| sd.char_fn_rational(h, r.q()).norm().min(1.0))
            .collect();
        let abs_phi_hp = (0..q as i128)
            .map(|h| abs_phi_h[r.residue(h) as usize])
            .collect();
        Ok(BoundTables {
            q,
            var: sd.variance(),
            abs_phi_hp,
            abs_phi_h,
        })
    }

    /// `|phi(2 pi / q)|`.
    pub fn first_modulus(&self) -> f64 {
        if self.q < 2 {
            0.0
        } else {
            self.abs_phi_h[1]
        }
    }

    /// `sum_{1 <= h <= q/2} |phi(2 pi h p / q)|^k / h`.
    pub fn berry_esseen(&self, k: u64) -> f64 {
        (1..=self.q / 2)
            .map(|h| self.abs_phi_hp[h].powf(k as f64) / h as f64)
            .sum()
    }

    /// `sqrt((1/4) sum_{h=1}^{q-1} |phi(2 pi h / q)|^{2k})`.
    pub fn tv_upper(&self, k: u64) -> f64 {
        let s: f64 = self.abs_phi_h[1..]
            .iter()
            .map(|m| m.powf(2.0 * k as f64))
            .sum();
        (0.25 * s).sqrt()
    }

    /// `(1/2) |phi(2 pi / q)|^k`.
    pub fn tv_lower(&self, k: u64) -> f64 {
        if self.q < 2 {
            return 0.0;
        }
        0.5 * self.first_modulus().powf(k as f64)
    }

    pub fn lower_bounds(&self, k: u64) -> LowerBounds {
        if self.q < 2 {
            return LowerBounds {
                spectral: 0.0,
                atom: None,
            };
        }
        let q = self.q as f64;
        let spectral = self.first_modulus().powf(k as f64) / (2.0 * (q - 1.0));
        let limit = (q - 3.0).powi(2) / (108.0 * self.var);
        let atom = (self.q > 3 && k >= 1 && (k as f64) <= limit)
            .then(|| 1.0 / (12.0 * (3.0 * self.var * k as f64).sqrt() + 6.0));
        LowerBounds { spectral, atom }
    }
}

/// Certified lower bounds for `psi_disc(k)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LowerBounds {
    /// `|phi(2 pi / q)|^k / (2 (q - 1))`.
    pub spectral: f64,
    /// `1 / (12 sqrt(3 Var k) + 6)`, present for `1 <= k <= (q-3)^2 / (108 Var)`.
    pub atom: Option<f64>,
}

impl LowerBounds {
    pub fn best(&self) -> f64 {
        self.atom.map_or(self.spectral, |a| a.max(self.spectral))
    }
}

/// Fourier bound on `psi_disc(k)`; requires maximal span one.
pub fn berry_esseen_bound(sd: &StepDistribution, r: Rational, k: u64) -> Result<f64> {
    Ok(BoundTables::new(sd, r)?.berry_esseen(k))
}

/// Upper-bound-lemma estimate of `psi_TV(k)`; requires maximal span one.
pub fn tv_upper_bound(sd: &StepDistribution, r: Rational, k: u64) -> Result<f64> {
    Ok(BoundTables::new(sd, r)?.tv_upper(k))
}

pub fn lower_bounds(sd: &StepDistribution, r: Rational, k: u64) -> Result<LowerBounds> {
    Ok(BoundTables::new(sd, r)?.lower_bounds(k))
}

pub fn tv_lower_bound(sd: &StepDistribution, r: Rational, k: u64) -> Result<f64> {
    Ok(BoundTables::new(sd, r)?.tv_lower(k))
}

/// All `k <= 64`, then ratio 1.05 up to `8 q^2`, always including `q^2`
/// and `8 q^2`.
pub fn default_k_grid(q: u64) -> Vec<u64> {
    let q2 = q * q;
    let top = 8 * q2;
    let mut grid: Vec<u64> = (1..=64.min(top)).collect();
    let mut k = 64.0f64;
    loop {
        k *= 1.05;
        let kk = k.ceil() as u64;
        if kk >= top {
            break;
        }
        grid.push(kk);
    }
    grid.extend([q2, top]);
    grid.retain(|&k| k >= 1 && k <= top);
    grid.sort_unstable();
    grid.dedup();
    grid
}

/// One row of a transition scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRow {
    pub k: u64,
    pub psi_disc: f64,
    pub psi_disc_star: f64,
    pub psi_tv: f64,
    pub be_bound: f64,
    pub tv_ub: f64,
    pub lb_spectral: f64,
    pub lb_atom: Option<f64>,
    /// `sqrt(k) psi_disc(k)` for `k <= q^2`.
    pub norm_poly: Option<f64>,
    /// `q psi_disc(k) / |phi(2 pi / q)|^k` for `k >= q^2`.
    pub norm_exp: Option<f64>,
    pub tv_lb: f64,
}

impl TransitionRow {
    /// Violations of the certified sandwiches, allowing relative slack `rel`.
    pub fn sandwich_violations(&self, rel: f64) -> Vec<&'static str> {
        let le = |a: f64, b: f64| a <= b + rel * a.abs().max(b.abs());
        let mut out = Vec::new();
        if !le(self.lb_spectral, self.psi_disc) {
            out.push("lb_spectral <= psi_disc");
        }
        if let Some(a) = self.lb_atom {
            if !le(a, self.psi_disc) {
                out.push("lb_atom <= psi_disc");
            }
        }
        if !le(self.psi_disc, self.be_bound) {
            out.push("psi_disc <= be_bound");
        }
        if !le(self.tv_lb, self.psi_tv) {
            out.push("tv_lb <= psi_tv");
        }
        if !le(self.psi_tv, self.tv_ub) {
            out.push("psi_tv <= tv_ub");
        }
        out
    }
}

/// Instance description and derived constants of a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanMeta {
    pub step_distribution: StepDistribution,
    pub p: i128,
    pub q: i128,
    /// `p` after reduction to unit span.
    pub reduced_p: i128,
    /// `min_{0 < h <= q/2} h ||h p / q||`.
    #[serde(rename = "A")]
    pub a_const: f64,
    /// `2 pi^2 Var X_1 / D^2`.
    pub c: f64,
    pub r: f64,
    pub tau: f64,
    /// Gaussian constant of the envelope on `[0, r]`.
    pub envelope_c: f64,
    pub max_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionScan {
    pub meta: ScanMeta,
    pub rows: Vec<TransitionRow>,
}

/// A single metric along the `k` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricSeries {
    pub k_values: Vec<u64>,
    pub metric: String,
    pub values: Vec<f64>,
    pub meta: ScanMeta,
}

impl TransitionScan {
    /// Extracts a column by CSV name; rows where the value is absent are skipped.
    pub fn series(&self, metric: &str) -> Option<MetricSeries> {
        let pick: fn(&TransitionRow) -> Option<f64> = match metric {
            "psi_disc" => |r| Some(r.psi_disc),
            "psi_disc_star" => |r| Some(r.psi_disc_star),
            "psi_tv" => |r| Some(r.psi_tv),
            "be_bound" => |r| Some(r.be_bound),
            "tv_ub" => |r| Some(r.tv_ub),
            "lb_spectral" => |r| Some(r.lb_spectral),
            "lb_atom" => |r| r.lb_atom,
            "norm_poly" => |r| r.norm_poly,
            "norm_exp" => |r| r.norm_exp,
            "tv_lb" => |r| Some(r.tv_lb),
            _ => return None,
        };
        let (k_values, values) = self
            .rows
            .iter()
            .filter_map(|r| pick(r).map(|v| (r.k, v)))
            .unzip();
        Some(MetricSeries {
            k_values,
            metric: metric.to_string(),
            values,
            meta: self.meta.clone(),
        })
    }

    pub fn sandwich_violations(&self, rel: f64) -> usize {
        self.rows
            .iter()
            .map(|r| r.sandwich_violations(rel).len())
            .sum()
    }
}

/// Evolves one spectral state along `k_grid`, recording every metric and bound.
pub fn transition_scan(
    sd: &StepDistribution,
    r: Rational,
    k_grid: &[u64],
) -> Result<TransitionScan> {
    if k_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("k grid must be strictly increasing".into()));
    }
    let (unit, ru) = reduce_to_unit_span(sd, r)?;
    let envelope = unit.envelope_params(DEFAULT_ENVELOPE_GRID_STEP)?;
    let q = ru.q();
    let a_const = if q >= 2 {
        bad_approx_constant_rational(ru)?
    } else {
        0.0
    };
    let tables = BoundTables::new(&unit, ru)?;
    let mut state = SpectralState::new(&unit, ru)?;
    let mut synth = Synthesizer::new(state.q());
    let q2 = (q * q) as u64;
    let qf = q as f64;
    let rho = tables.first_modulus();

    let mut rows = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        state.advance_in_place(k - state.k());
        let dist = synth.run(&state)?;
        let psi = psi_disc(&dist);
        let lb = tables.lower_bounds(k);
        let norm_exp = if k >= q2 && rho > 0.0 {
            Some(qf * psi / rho.powf(k as f64))
        } else {
            None
        };
        rows.push(TransitionRow {
            k,
            psi_disc: psi,
            psi_disc_star: psi_disc_star(&dist),
            psi_tv: psi_tv(&dist),
            be_bound: tables.berry_esseen(k),
            tv_ub: tables.tv_upper(k),
            lb_spectral: lb.spectral,
            lb_atom: lb.atom,
            norm_poly: (k >= 1 && k <= q2).then(|| (k as f64).sqrt() * psi),
            norm_exp,
            tv_lb: tables.tv_lower(k),
        });
    }
    if state.max_drift() > DRIFT_LIMIT {
        return Err(Error::SpectralCorruption(format!(
            "spectral drift {:e} exceeds {DRIFT_LIMIT:e}",
            state.max_drift()
        )));
    }
    let d = sd.span() as f64;
    Ok(TransitionScan {
        meta: ScanMeta {
            step_distribution: sd.clone(),
            p: r.p(),
            q,
            reduced_p: ru.p(),
            a_const,
            c: 2.0 * PI * PI * sd.variance() / (d * d),
            r: envelope.r,
            tau: envelope.tau,
            envelope_c: envelope.c,
            max_drift: state.max_drift(),
        },
        rows,
    })
}

/// Kolmogorov distance of `{S_k alpha}` from the uniform law on `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContinuousKolmogorov {
    pub k: u64,
    pub psi: f64,
    /// Probability mass of `S_k` dropped from the tails; the exact distance
    /// lies within this of `psi`.
    pub discarded_mass: f64,
    /// Number of atoms retained.
    pub atoms: usize,
}

/// Exact law of `S_k` by repeated integer convolution, mapped to `{n alpha}`.
///
/// Each step may drop up to `tail_eps / k` of tail mass; `tail_eps = 0`
/// keeps the full support.
pub fn kolmogorov_continuous(
    sd: &StepDistribution,
    alpha: &IrrationalNumber,
    k: u64,
    tail_eps: f64,
) -> Result<ContinuousKolmogorov> {
    if !(0.0..1.0).contains(&tail_eps) {
        return Err(Error::InvalidInput(format!("tail_eps {tail_eps} outside [0, 1)")));
    }
    let width = (sd.max_value() - sd.min_value()) as u64;
    let size = k
        .checked_mul(width)
        .and_then(|s| s.checked_add(1))
        .unwrap_or(u64::MAX);
    if size > MAX_SUPPORT {
        return Err(Error::SupportTooLarge {
            size,
            limit: MAX_SUPPORT,
        });
    }

    // law of S_j on offset..offset+mass.len()
    let mut offset: i64 = 0;
    let mut mass = vec![1.0f64];
    let mut discarded = 0.0;
    let budget = if k > 0 { tail_eps / k as f64 } else { 0.0 };
    let lo = sd.min_value();
    for _ in 0..k {
        let mut next = vec![0.0; mass.len() + width as usize];
        for &(v, p) in sd.atoms() {
            let shift = (v - lo) as usize;
            for (i, &m) in mass.iter().enumerate() {
                next[i + shift] += p * m;
            }
        }
        offset += lo;
        let mut cut = 0.0;
        let mut start = 0;
        let mut end = next.len();
        while start + 1 < end && cut + next[start] <= 0.5 * budget {
            cut += next[start];
            start += 1;
        }
        let mut cut_hi = 0.0;
        while end - 1 > start && cut_hi + next[end - 1] <= 0.5 * budget {
            cut_hi += next[end - 1];
            end -= 1;
        }
        discarded += cut + cut_hi;
        offset += start as i64;
        next.truncate(end);
        next.drain(..start);
        mass = next;
    }

    let mut atoms: Vec<(u128, f64)> = Vec::with_capacity(mass.len());
    for (i, &m) in mass.iter().enumerate() {
        if m > 0.0 {
            let n = offset as i128 + i as i128;
            atoms.push((alpha.frac_multiple(n)?.0, m));
        }
    }
    atoms.sort_unstable_by_key(|a| a.0);
    let mut merged: Vec<(u128, f64)> = Vec::with_capacity(atoms.len());
    for (x, m) in atoms {
        match merged.last_mut() {
            Some(last) if last.0 == x => last.1 += m,
            _ => merged.push((x, m)),
        }
    }

    let mut cdf = 0.0;
    let mut psi: f64 = 0.0;
    for &(x, m) in &merged {
        let xf = crate::turn::Turn(x).to_f64();
        psi = psi.max((cdf - xf).abs());
        cdf += m;
        psi = psi.max((cdf - xf).abs());
    }
    psi = psi.max((1.0 - cdf).abs());
    Ok(ContinuousKolmogorov {
        k,
        psi,
        discarded_mass: discarded,
        atoms: merged.len(),
    })
}

/// Cyclic total variation `sum_a |f(a+1) - f(a)|` of a function on `Z_q`.
pub fn zq_total_variation(f: &[Complex64]) -> f64 {
    let q = f.len();
    (0..q).map(|a| (f[(a + 1) % q] - f[a]).norm()).sum()
}

/// Both sides of `|E f(X) - E f(Y)| <= V_q(f) max_a |F_X(a) - F_Y(a)|`.
pub fn discrete_koksma_check(
    f: &[Complex64],
    x: &CyclicDistribution,
    y: &CyclicDistribution,
) -> Result<(f64, f64)> {
    let q = f.len();
    if x.q() != q || y.q() != q {
        return Err(Error::InvalidInput("length mismatch".into()));
    }
    let lhs = f
        .iter()
        .zip(x.excess().iter().zip(y.excess()))
        .map(|(&fa, (&ex, &ey))| fa * (ex - ey))
        .sum::<Complex64>()
        .norm();
    let (cx, cy) = (x.cdf_excess(), y.cdf_excess());
    let sup = cx
        .iter()
        .zip(&cy)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok((lhs, zq_total_variation(f) * sup))
}
