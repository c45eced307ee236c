//! Seeded simulation of walks and additive functionals `sum_k f(S_k alpha)`.
//!
//! Replica `r` draws from a ChaCha8 generator seeded with `seed` and set to
//! stream `r`, so every replica is reproducible on its own and results do not
//! depend on how replicas are scheduled across threads.

use crate::chain_exact::{psi_disc, reduce_to_unit_span, CyclicDistribution};
use crate::diophantine::{IrrationalKind, IrrationalNumber, Rational};
use crate::error::{Error, Result};
use crate::lattice_dist::StepDistribution;
use crate::turn::Turn;
use crate::variance_const::TestFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    sd: StepDistribution,
    seed: u64,
    n: u64,
    m: u64,
}

impl SamplerConfig {
    pub fn new(sd: StepDistribution, seed: u64, n: u64, m: u64) -> Result<Self> {
        if n < 1 || m < 1 {
            return Err(Error::InvalidInput("N and M must be at least 1".into()));
        }
        Ok(SamplerConfig { sd, seed, n, m })
    }

    pub fn step_distribution(&self) -> &StepDistribution {
        &self.sd
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Walk length.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Replica count.
    pub fn m(&self) -> u64 {
        self.m
    }

    fn rng(&self, replica: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(replica);
        rng
    }

    fn check_replica(&self, replica: u64) -> Result<()> {
        if replica >= self.m {
            return Err(Error::InvalidInput(format!(
                "replica {replica} out of range 0..{}",
                self.m
            )));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler over the atom table.
struct StepSampler {
    values: Vec<i64>,
    cdf: Vec<f64>,
}

impl StepSampler {
    fn new(sd: &StepDistribution) -> Self {
        let mut acc = 0.0;
        let (values, cdf) = sd
            .atoms()
            .iter()
            .map(|&(v, p)| {
                acc += p;
                (v, acc)
            })
            .unzip();
        StepSampler { values, cdf }
    }

    /// Index of the drawn atom.
    #[inline]
    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.random();
        self.cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.values.len() - 1)
    }
}

/// Partial sums `S_1, ..., S_N` of replica `replica`.
pub fn sample_walk(cfg: &SamplerConfig, replica: u64) -> Result<Vec<i64>> {
    cfg.check_replica(replica)?;
    Ok(walk_of_length(cfg, replica, cfg.n))
}

fn walk_of_length(cfg: &SamplerConfig, replica: u64, len: u64) -> Vec<i64> {
    let sampler = StepSampler::new(&cfg.sd);
    let mut rng = cfg.rng(replica);
    let mut s = 0i64;
    (0..len)
        .map(|_| {
            s += sampler.values[sampler.draw(&mut rng)];
            s
        })
        .collect()
}

/// Running centered sums `sum_{j<=k} (f({S_j alpha}) - E f)`.
pub fn functional_trajectory(
    walk: &[i64],
    f: &TestFunction,
    alpha: &IrrationalNumber,
) -> Result<Vec<f64>> {
    let mean = f.mean();
    let mut acc = 0.0;
    walk.iter()
        .map(|&s| {
            acc += f.eval_turn(alpha.frac_multiple(s as i128)?) - mean;
            Ok(acc)
        })
        .collect()
}

/// Precomputed `{v alpha}` for each atom `v`, after checking the precision
/// certificate for the largest reachable `|S_N|`.
struct TurnSteps {
    sampler: StepSampler,
    turns: Vec<Turn>,
}

impl TurnSteps {
    fn new(cfg: &SamplerConfig, alpha: &IrrationalNumber) -> Result<Self> {
        let reach = cfg.sd.min_value().unsigned_abs().max(cfg.sd.max_value().unsigned_abs()) as i128;
        let top = reach
            .checked_mul(cfg.n as i128)
            .ok_or_else(|| Error::Overflow("N * max |X|".into()))?;
        alpha.frac_multiple(top)?;
        let sampler = StepSampler::new(&cfg.sd);
        let turns = sampler
            .values
            .iter()
            .map(|&v| alpha.frac_multiple(v as i128))
            .collect::<Result<_>>()?;
        Ok(TurnSteps { sampler, turns })
    }

    /// Streams one replica, calling `visit(k, centered_sum)` after each step.
    fn run(
        &self,
        cfg: &SamplerConfig,
        replica: u64,
        f: &TestFunction,
        mut visit: impl FnMut(u64, f64),
    ) {
        let mean = f.mean();
        let mut rng = cfg.rng(replica);
        let mut pos = Turn::ZERO;
        let mut acc = 0.0;
        for k in 1..=cfg.n {
            pos += self.turns[self.sampler.draw(&mut rng)];
            acc += f.eval_turn(pos) - mean;
            visit(k, acc);
        }
    }
}

fn check_theorem_hypotheses(cfg: &SamplerConfig) -> Result<()> {
    if !cfg.sd.all_positive() {
        return Err(Error::InvalidInput(
            "the limit theorems need strictly positive steps".into(),
        ));
    }
    Ok(())
}

/// Whether `alpha` is outside the badly approximable presets, so that the
/// limit theorem is not known to apply.
fn exploratory(alpha: &IrrationalNumber) -> bool {
    !matches!(alpha.kind(), IrrationalKind::Quadratic { .. })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub sigma_theory: f64,
    pub empirical_mean: f64,
    pub empirical_std: f64,
    pub ks_distance: f64,
    pub replicas: u64,
    pub n: u64,
    pub seed: u64,
    pub exploratory: bool,
    /// `N^{-1/2} sum_{k<=N} (f({S_k alpha}) - E f)` per replica, in replica order.
    #[serde(skip)]
    pub endpoints: Vec<f64>,
}

/// Normalized endpoints of `M` replicas against `Normal(0, sigma^2)`.
pub fn clt_experiment(
    cfg: &SamplerConfig,
    f: &TestFunction,
    alpha: &IrrationalNumber,
    sigma_theory: f64,
) -> Result<CltReport> {
    check_theorem_hypotheses(cfg)?;
    if !(sigma_theory >= 0.0 && sigma_theory.is_finite()) {
        return Err(Error::InvalidInput(format!("sigma {sigma_theory} must be finite and >= 0")));
    }
    let steps = TurnSteps::new(cfg, alpha)?;
    let scale = 1.0 / (cfg.n as f64).sqrt();
    let endpoints: Vec<f64> = (0..cfg.m)
        .into_par_iter()
        .map(|r| {
            let mut last = 0.0;
            steps.run(cfg, r, f, |_, v| last = v);
            last * scale
        })
        .collect();
    let m = endpoints.len() as f64;
    let mean = endpoints.iter().sum::<f64>() / m;
    let var = if endpoints.len() > 1 {
        endpoints.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok(CltReport {
        sigma_theory,
        empirical_mean: mean,
        empirical_std: var.sqrt(),
        ks_distance: ks_distance_normal(&endpoints, sigma_theory)?,
        replicas: cfg.m,
        n: cfg.n,
        seed: cfg.seed,
        exploratory: exploratory(alpha),
        endpoints,
    })
}

/// Kolmogorov-Smirnov distance between the sample and `Normal(0, sigma^2)`;
/// for `sigma = 0` the reference law is the point mass at zero.
pub fn ks_distance_normal(sample: &[f64], sigma: f64) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::InvalidInput("empty sample".into()));
    }
    let n = sample.len() as f64;
    if sigma == 0.0 {
        let below = sample.iter().filter(|&&x| x < 0.0).count() as f64;
        let above = sample.iter().filter(|&&x| x > 0.0).count() as f64;
        return Ok((below / n).max(above / n));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::InvalidInput(e.to_string()))?;
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let c = normal.cdf(x);
        d = d.max((i as f64 + 1.0) / n - c).max(c - i as f64 / n);
    }
    Ok(d.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LilRow {
    pub replica: u64,
    /// `max_n |sum_{k<=n} fbar| / sqrt(2 n log log n)` over the checkpoints.
    pub max_statistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LilTable {
    pub sigma_theory: f64,
    pub checkpoints: Vec<u64>,
    pub median: f64,
    /// Median within `[sigma/2, 2 sigma]`.
    pub within_band: bool,
    /// Finite-horizon statistic; no convergence is asserted.
    pub illustrative: bool,
    pub exploratory: bool,
    pub n: u64,
    pub seed: u64,
    pub rows: Vec<LilRow>,
}

/// Dyadic checkpoints `2^10, 2^11, ...` up to `n`.
pub fn dyadic_checkpoints(n: u64) -> Vec<u64> {
    (10..64).map(|e| 1u64 << e).take_while(|&c| c <= n).collect()
}

pub fn lil_experiment(
    cfg: &SamplerConfig,
    f: &TestFunction,
    alpha: &IrrationalNumber,
    sigma_theory: f64,
    checkpoints: &[u64],
) -> Result<LilTable> {
    check_theorem_hypotheses(cfg)?;
    if cfg.n < 1 << 10 {
        return Err(Error::InvalidInput("LIL needs N >= 2^10".into()));
    }
    if checkpoints.is_empty()
        || checkpoints
            .iter()
            .any(|&c| !c.is_power_of_two() || c < 1 << 10 || c > cfg.n)
        || checkpoints.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidInput(
            "checkpoints must be increasing powers of two in [2^10, N]".into(),
        ));
    }
    let steps = TurnSteps::new(cfg, alpha)?;
    let rows: Vec<LilRow> = (0..cfg.m)
        .into_par_iter()
        .map(|r| {
            let mut best: f64 = 0.0;
            let mut next = 0;
            steps.run(cfg, r, f, |k, v| {
                if next < checkpoints.len() && k == checkpoints[next] {
                    let kf = k as f64;
                    best = best.max(v.abs() / (2.0 * kf * kf.ln().ln()).sqrt());
                    next += 1;
                }
            });
            LilRow {
                replica: r,
                max_statistic: best,
            }
        })
        .collect();
    let mut stats: Vec<f64> = rows.iter().map(|r| r.max_statistic).collect();
    stats.sort_by(f64::total_cmp);
    let mid = stats.len() / 2;
    let median = if stats.len() % 2 == 1 {
        stats[mid]
    } else {
        0.5 * (stats[mid - 1] + stats[mid])
    };
    Ok(LilTable {
        sigma_theory,
        checkpoints: checkpoints.to_vec(),
        median,
        within_band: median >= 0.5 * sigma_theory && median <= 2.0 * sigma_theory,
        illustrative: true,
        exploratory: exploratory(alpha),
        n: cfg.n,
        seed: cfg.seed,
        rows,
    })
}

/// `psi_disc` of the empirical law of `S_k p/q mod 1` over the `M` replicas.
pub fn empirical_psi_disc(cfg: &SamplerConfig, r: Rational, k: u64) -> Result<f64> {
    reduce_to_unit_span(&cfg.sd, r)?;
    let q = r.q();
    if q > crate::chain_exact::MAX_MODULUS {
        return Err(Error::InvalidInput(format!("modulus {q} too large")));
    }
    let residues: Vec<usize> = (0..cfg.m)
        .into_par_iter()
        .map(|rep| {
            let s = walk_of_length(cfg, rep, k).last().copied().unwrap_or(0);
            r.residue(s as i128) as usize
        })
        .collect();
    let mut counts = vec![0u64; q as usize];
    for a in residues {
        counts[a] += 1;
    }
    let m = cfg.m as f64;
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / m).collect();
    Ok(psi_disc(&CyclicDistribution::from_probs(&probs)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice_dist::presets;
    use approx::assert_abs_diff_eq;

    fn cfg(n: u64, m: u64, seed: u64) -> SamplerConfig {
        SamplerConfig::new(presets::uniform12(), seed, n, m).unwrap()
    }

    #[test]
    fn law_of_large_numbers() {
        for seed in [0, 1, 42] {
            let w = sample_walk(&cfg(100_000, 1, seed), 0).unwrap();
            assert!((*w.last().unwrap() as f64 / 1e5 - 1.5).abs() < 0.05);
        }
    }

    #[test]
    fn walks_are_reproducible_and_increasing() {
        let c = cfg(500, 4, 7);
        assert_eq!(sample_walk(&c, 3).unwrap(), sample_walk(&c, 3).unwrap());
        assert_ne!(sample_walk(&c, 2).unwrap(), sample_walk(&c, 3).unwrap());
        assert!(sample_walk(&c, 0).unwrap().windows(2).all(|w| w[0] < w[1]));
        assert!(sample_walk(&c, 4).is_err());
        assert!(SamplerConfig::new(presets::uniform12(), 0, 0, 1).is_err());
    }

    #[test]
    fn trajectory_examples() {
        let g = IrrationalNumber::golden();
        let t = functional_trajectory(&[3, 5, 6], &TestFunction::constant(2.0), &g).unwrap();
        assert_eq!(t, vec![0.0; 3]);
        let cos = TestFunction::cosine(1).unwrap();
        let t = functional_trajectory(&[1], &cos, &g).unwrap();
        assert_abs_diff_eq!(t[0], (std::f64::consts::TAU * g.frac().to_f64()).cos(), epsilon = 1e-14);

        let w = sample_walk(&cfg(4096, 1, 3), 0).unwrap();
        let t = functional_trajectory(&w, &cos, &g).unwrap();
        let direct: f64 = w
            .iter()
            .map(|&s| (std::f64::consts::TAU * g.frac_multiple(s as i128).unwrap().to_f64()).cos())
            .sum();
        assert!((t.last().unwrap() - direct).abs() < 1e-9);
    }

    #[test]
    fn streaming_matches_trajectory() {
        let g = IrrationalNumber::golden();
        let f = TestFunction::sawtooth();
        let c = cfg(2000, 3, 11);
        let steps = TurnSteps::new(&c, &g).unwrap();
        let mut streamed = Vec::new();
        steps.run(&c, 2, &f, |_, v| streamed.push(v));
        let traj = functional_trajectory(&sample_walk(&c, 2).unwrap(), &f, &g).unwrap();
        assert_eq!(streamed, traj);
    }

    #[test]
    fn constant_function_is_degenerate() {
        let g = IrrationalNumber::golden();
        let rep = clt_experiment(&cfg(256, 50, 1), &TestFunction::constant(1.0), &g, 0.0).unwrap();
        assert_eq!(rep.ks_distance, 0.0);
        assert_eq!(rep.empirical_std, 0.0);
        let lil = lil_experiment(&cfg(1 << 10, 8, 1), &TestFunction::constant(1.0), &g, 0.0, &[1 << 10]).unwrap();
        assert!(lil.rows.iter().all(|r| r.max_statistic == 0.0));
        assert!(lil.illustrative);
    }

    #[test]
    fn clt_rejects_nonpositive_steps() {
        let c = SamplerConfig::new(presets::uniform01(), 0, 16, 2).unwrap();
        let g = IrrationalNumber::golden();
        assert!(clt_experiment(&c, &TestFunction::sawtooth(), &g, 0.1).is_err());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let g = IrrationalNumber::golden();
        let f = TestFunction::cosine(1).unwrap();
        let c = cfg(512, 64, 42);
        let a = clt_experiment(&c, &f, &g, 0.5).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| clt_experiment(&c, &f, &g, 0.5).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn ks_against_normal() {
        assert!(ks_distance_normal(&[], 1.0).is_err());
        let d = ks_distance_normal(&[0.0], 1.0).unwrap();
        assert_abs_diff_eq!(d, 0.5, epsilon = 1e-12);
        assert_eq!(ks_distance_normal(&[-1.0, 0.0, 0.0, 2.0], 0.0).unwrap(), 0.25);
    }

    #[test]
    fn empirical_discrepancy_examples() {
        let c = cfg(1, 100_000, 5);
        let two = empirical_psi_disc(&c, Rational::new(1, 2).unwrap(), 1).unwrap();
        assert!(two <= 0.01);
        let three = empirical_psi_disc(&c, Rational::new(1, 3).unwrap(), 1).unwrap();
        assert!((three - 1.0 / 3.0).abs() <= 0.01);
        let bad = SamplerConfig::new(presets::uniform13(), 0, 1, 10).unwrap();
        assert!(matches!(
            empirical_psi_disc(&bad, Rational::new(1, 4).unwrap(), 1),
            Err(Error::SpanNotCoprime { .. })
        ));
    }

    #[test]
    fn checkpoints() {
        assert_eq!(dyadic_checkpoints(1 << 12), vec![1 << 10, 1 << 11, 1 << 12]);
        assert!(dyadic_checkpoints(1000).is_empty());
        let g = IrrationalNumber::golden();
        let f = TestFunction::sawtooth();
        assert!(lil_experiment(&cfg(1 << 10, 2, 0), &f, &g, 0.1, &[1000]).is_err());
        assert!(lil_experiment(&cfg(512, 2, 0), &f, &g, 0.1, &[512]).is_err());
    }
}
