//! Experiment configurations and their runners.
//!
//! Each runner builds and validates every input before starting any
//! computation, then returns the artifacts to write and the summary lines.

use circlewalk_core::chain_exact::{default_k_grid, reduce_to_unit_span, transition_scan, TransitionScan};
use circlewalk_core::config::{AlphaSpec, FunctionSpec, StepSpec};
use circlewalk_core::diophantine::{dioph_sum, Rational};
use circlewalk_core::montecarlo::{clt_experiment, dyadic_checkpoints, lil_experiment};
use circlewalk_core::variance_const::{
    c_alpha, c_convergence_experiment, c_rational, c_rational_oracle, expsum_second_moment,
    ExpsumMode, DEFAULT_H, ORACLE_MAX_Q,
};
use circlewalk_core::{Error, SamplerConfig};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::output::Artifact;
use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Experiment {
    Transition(ScanConfig),
    Tv(ScanConfig),
    Variance(VarianceConfig),
    Convergence(ConvergenceConfig),
    Clt(SimulationConfig),
    Lil(SimulationConfig),
    Dioph(DiophConfig),
    Expsum(ExpsumConfig),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub step: StepSpec,
    /// `"p/q"`.
    pub fraction: String,
    /// Defaults to the standard grid up to `8 q^2`.
    #[serde(default)]
    pub k_grid: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceConfig {
    pub step: StepSpec,
    pub function: FunctionSpec,
    pub fractions: Vec<String>,
    /// Tolerance of the autocovariance oracle; the oracle is skipped for `q > 256`.
    #[serde(default = "default_oracle_tol")]
    pub oracle_tol: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub step: StepSpec,
    pub function: FunctionSpec,
    pub alpha: AlphaSpec,
    pub m_min: usize,
    pub m_max: usize,
    #[serde(default = "default_h")]
    pub h_alpha: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub step: StepSpec,
    pub function: FunctionSpec,
    pub alpha: AlphaSpec,
    pub n: u64,
    pub replicas: u64,
    pub seed: u64,
    #[serde(default = "default_h")]
    pub h_alpha: u64,
    /// Also write the per-replica endpoints (CLT only).
    #[serde(default)]
    pub endpoints: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiophConfig {
    pub alpha: AlphaSpec,
    pub h_values: Vec<u64>,
    #[serde(default = "default_power")]
    pub power: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    Exact,
    MainTerm,
    Both,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpsumConfig {
    pub step: StepSpec,
    pub alpha: AlphaSpec,
    /// `[h, re, im]` per frequency.
    pub coeffs: Vec<(i64, f64, f64)>,
    #[serde(default)]
    pub m: u64,
    pub n: u64,
    #[serde(default = "default_mode")]
    pub mode: ModeSpec,
}

fn default_oracle_tol() -> f64 {
    1e-12
}

fn default_h() -> u64 {
    DEFAULT_H
}

fn default_power() -> u32 {
    1
}

fn default_mode() -> ModeSpec {
    ModeSpec::Both
}

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub summary: Vec<String>,
}

impl Experiment {
    pub fn run(&self) -> Result<Outcome, CliError> {
        match self {
            Experiment::Transition(c) => run_transition(c),
            Experiment::Tv(c) => run_tv(c),
            Experiment::Variance(c) => run_variance(c),
            Experiment::Convergence(c) => run_convergence(c),
            Experiment::Clt(c) => run_clt(c),
            Experiment::Lil(c) => run_lil(c),
            Experiment::Dioph(c) => run_dioph(c),
            Experiment::Expsum(c) => run_expsum(c),
        }
    }
}

fn parse_fraction(s: &str) -> Result<Rational, Error> {
    let r: Rational = s.parse()?;
    if r.q() < 2 {
        return Err(Error::InvalidInput(format!("fraction {s} needs denominator >= 2")));
    }
    Ok(r)
}

fn scan(c: &ScanConfig) -> Result<(TransitionScan, Rational), Error> {
    let sd = c.step.build()?;
    let r = parse_fraction(&c.fraction)?;
    let (_, reduced) = reduce_to_unit_span(&sd, r)?;
    let grid = match &c.k_grid {
        Some(g) => g.clone(),
        None => default_k_grid(reduced.q() as u64),
    };
    if grid.is_empty() {
        return Err(Error::InvalidInput("empty k grid".into()));
    }
    Ok((transition_scan(&sd, r, &grid)?, reduced))
}

fn held(label: &str, ok: usize, total: usize) -> String {
    format!("{label} held at {ok}/{total} grid points")
}

fn run_transition(c: &ScanConfig) -> Result<Outcome, CliError> {
    let (scan, reduced) = scan(c)?;
    let rows = &scan.rows;
    let n = rows.len();
    let count = |name: &str| {
        rows.iter()
            .filter(|r| !r.sandwich_violations(1e-12).iter().any(|v| v.contains(name)))
            .count()
    };
    let lower = rows
        .iter()
        .filter(|r| {
            let v = r.sandwich_violations(1e-12);
            !v.contains(&"lb_spectral <= psi_disc") && !v.contains(&"lb_atom <= psi_disc")
        })
        .count();
    let q2 = (reduced.q() * reduced.q()) as u64;
    let mut summary = vec![
        format!("transition scan q={} over {n} grid points, max drift {:.2e}", reduced.q(), scan.meta.max_drift),
        held("lower bound", lower, n),
        held("Berry-Esseen upper bound", count("be_bound"), n),
        held("TV lower bound", count("tv_lb"), n),
        held("TV upper bound", count("tv_ub"), n),
    ];
    let poly = scan.series("norm_poly").map(|s| s.values).unwrap_or_default();
    let exp: Vec<f64> = rows.iter().filter(|r| r.k > q2).filter_map(|r| r.norm_exp).collect();
    if let Some((lo, hi)) = range(&poly) {
        summary.push(format!("sqrt(k) psi_disc for k <= {q2}: [{lo:.4}, {hi:.4}]"));
    }
    if let Some((lo, hi)) = range(&exp) {
        summary.push(format!("q psi_disc / |phi(2 pi/q)|^k for k > {q2}: [{lo:.4}, {hi:.4}]"));
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact::csv("transition.csv", rows)?,
            Artifact::json("transition_meta.json", &scan.meta)?,
        ],
        summary,
    })
}

fn range(v: &[f64]) -> Option<(f64, f64)> {
    if v.is_empty() {
        return None;
    }
    Some(v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x))))
}

#[derive(Serialize)]
struct TvRow {
    k: u64,
    psi_tv: f64,
    tv_lb: f64,
    tv_ub: f64,
}

fn run_tv(c: &ScanConfig) -> Result<Outcome, CliError> {
    let (scan, reduced) = scan(c)?;
    let n = scan.rows.len();
    let lower = scan.rows.iter().filter(|r| r.tv_lb <= r.psi_tv * (1.0 + 1e-12)).count();
    let upper = scan.rows.iter().filter(|r| r.psi_tv <= r.tv_ub * (1.0 + 1e-12)).count();
    let rows: Vec<TvRow> = scan
        .rows
        .iter()
        .map(|r| TvRow {
            k: r.k,
            psi_tv: r.psi_tv,
            tv_lb: r.tv_lb,
            tv_ub: r.tv_ub,
        })
        .collect();
    Ok(Outcome {
        artifacts: vec![
            Artifact::csv("tv.csv", rows)?,
            Artifact::json("tv_meta.json", &scan.meta)?,
        ],
        summary: vec![
            format!("total variation scan q={} over {n} grid points", reduced.q()),
            held("TV lower bound", lower, n),
            held("TV upper bound", upper, n),
        ],
    })
}

#[derive(Serialize)]
struct VarianceRow {
    p: i128,
    q: i128,
    #[serde(rename = "C_rational")]
    c_rational: f64,
    #[serde(rename = "C_oracle")]
    c_oracle: Option<f64>,
}

fn run_variance(c: &VarianceConfig) -> Result<Outcome, CliError> {
    let sd = c.step.build()?;
    let f = c.function.build()?;
    let fractions: Vec<Rational> = c.fractions.iter().map(|s| parse_fraction(s)).collect::<Result<_, _>>()?;
    for &r in &fractions {
        reduce_to_unit_span(&sd, r)?;
    }
    let mut rows = Vec::with_capacity(fractions.len());
    let mut agree = 0;
    let mut checked = 0;
    for r in fractions {
        let value = c_rational(&f, &sd, r)?;
        let oracle = if r.q() <= ORACLE_MAX_Q {
            Some(c_rational_oracle(&f, &sd, r, c.oracle_tol)?)
        } else {
            None
        };
        if let Some(o) = oracle {
            checked += 1;
            agree += usize::from((o - value).abs() <= 1e-9);
        }
        rows.push(VarianceRow {
            p: r.p(),
            q: r.q(),
            c_rational: value,
            c_oracle: oracle,
        });
    }
    let mut summary = vec![format!("oracle agreement within 1e-9 at {agree}/{checked} fractions")];
    for row in &rows {
        summary.push(format!("C({}/{}, f) = {:.12}", row.p, row.q, row.c_rational));
    }
    Ok(Outcome {
        artifacts: vec![Artifact::csv("variance.csv", rows)?],
        summary,
    })
}

#[derive(Serialize)]
struct ConvergenceCsvRow {
    m: usize,
    q_m: i128,
    #[serde(rename = "C_rational")]
    c_rational: f64,
    #[serde(rename = "C_alpha")]
    c_alpha: f64,
    gap: f64,
}

fn run_convergence(c: &ConvergenceConfig) -> Result<Outcome, CliError> {
    let sd = c.step.build()?;
    let f = c.function.build()?;
    let alpha = c.alpha.build()?;
    if c.m_min > c.m_max {
        return Err(Error::InvalidInput(format!("m_min {} > m_max {}", c.m_min, c.m_max)).into());
    }
    let table = c_convergence_experiment(&f, &sd, &alpha, c.m_min..=c.m_max, c.h_alpha)?;
    let rows: Vec<ConvergenceCsvRow> = table
        .rows
        .iter()
        .map(|r| ConvergenceCsvRow {
            m: r.m,
            q_m: r.q_m,
            c_rational: r.c_rational,
            c_alpha: r.c_alpha,
            gap: r.gap,
        })
        .collect();
    let mut summary = vec![format!(
        "C(alpha, f) = {:.12} (tail bracket {:.3e}, H = {})",
        table.c_alpha.value, table.c_alpha.tail_bound, table.c_alpha.h_max
    )];
    if let Some(last) = table.rows.last() {
        summary.push(format!("gap at m={} (q_m={}): {:.3e}", last.m, last.q_m, last.gap));
    }
    let decreasing = table.rows.windows(2).filter(|w| w[1].gap <= w[0].gap).count();
    summary.push(format!(
        "gap nonincreasing at {decreasing}/{} consecutive steps",
        table.rows.len().saturating_sub(1)
    ));
    if !table.skipped.is_empty() {
        summary.push(format!("skipped convergents (span not coprime): {:?}", table.skipped));
    }
    Ok(Outcome {
        artifacts: vec![
            Artifact::csv("convergence.csv", rows)?,
            Artifact::json("convergence_meta.json", &table.c_alpha)?,
        ],
        summary,
    })
}

#[derive(Serialize)]
struct EndpointRow {
    replica: usize,
    value: f64,
}

fn run_clt(c: &SimulationConfig) -> Result<Outcome, CliError> {
    let sd = c.step.build()?;
    let f = c.function.build()?;
    let alpha = c.alpha.build()?;
    let cfg = SamplerConfig::new(sd.clone(), c.seed, c.n, c.replicas)?;
    let sigma = c_alpha(&f, &sd, &alpha, c.h_alpha)?.value.max(0.0).sqrt();
    let report = clt_experiment(&cfg, &f, &alpha, sigma)?;
    let mut artifacts = vec![Artifact::json("clt.json", &report)?];
    if c.endpoints {
        artifacts.push(Artifact::csv(
            "clt_endpoints.csv",
            report
                .endpoints
                .iter()
                .enumerate()
                .map(|(replica, &value)| EndpointRow { replica, value }),
        )?);
    }
    let mut summary = vec![
        format!("sigma = {:.6}, empirical std = {:.6}", report.sigma_theory, report.empirical_std),
        format!("KS distance to Normal(0, sigma^2): {:.4}", report.ks_distance),
    ];
    if report.exploratory {
        summary.push("alpha outside the badly approximable presets: result is exploratory".into());
    }
    Ok(Outcome { artifacts, summary })
}

fn run_lil(c: &SimulationConfig) -> Result<Outcome, CliError> {
    let sd = c.step.build()?;
    let f = c.function.build()?;
    let alpha = c.alpha.build()?;
    let cfg = SamplerConfig::new(sd.clone(), c.seed, c.n, c.replicas)?;
    let sigma = c_alpha(&f, &sd, &alpha, c.h_alpha)?.value.max(0.0).sqrt();
    let table = lil_experiment(&cfg, &f, &alpha, sigma, &dyadic_checkpoints(c.n))?;
    let mut summary = vec![format!(
        "median LIL statistic {:.4} against sigma {:.4}: {} [sigma/2, 2 sigma]",
        table.median,
        table.sigma_theory,
        if table.within_band { "within" } else { "outside" }
    )];
    if table.exploratory {
        summary.push("alpha outside the badly approximable presets: result is exploratory".into());
    }
    Ok(Outcome {
        artifacts: vec![Artifact::json("lil.json", &table)?],
        summary,
    })
}

#[derive(Serialize)]
struct DiophRow {
    #[serde(rename = "H")]
    h: u64,
    power: u32,
    sum: f64,
}

fn run_dioph(c: &DiophConfig) -> Result<Outcome, CliError> {
    let alpha = c.alpha.build()?;
    if c.h_values.is_empty() {
        return Err(Error::InvalidInput("h_values is empty".into()).into());
    }
    let rows: Vec<DiophRow> = c
        .h_values
        .iter()
        .map(|&h| {
            dioph_sum(&alpha, h, c.power).map(|sum| DiophRow {
                h,
                power: c.power,
                sum,
            })
        })
        .collect::<Result<_, _>>()?;
    let summary = rows
        .iter()
        .map(|r| format!("sum_(h<={}) 1/(h ||h alpha||)^{} = {:.6}", r.h, r.power, r.sum))
        .collect();
    Ok(Outcome {
        artifacts: vec![Artifact::csv("dioph.csv", rows)?],
        summary,
    })
}

#[derive(Serialize)]
struct ExpsumReport {
    m: u64,
    n: u64,
    exact: Option<f64>,
    main_term: Option<f64>,
    relative_gap: Option<f64>,
}

fn run_expsum(c: &ExpsumConfig) -> Result<Outcome, CliError> {
    let sd = c.step.build()?;
    let alpha = c.alpha.build()?;
    let coeffs: Vec<(i64, Complex64)> = c.coeffs.iter().map(|&(h, re, im)| (h, Complex64::new(re, im))).collect();
    let run = |mode| expsum_second_moment(&coeffs, &sd, &alpha, c.m, c.n, mode);
    let exact = match c.mode {
        ModeSpec::Exact | ModeSpec::Both => Some(run(ExpsumMode::Exact)?),
        ModeSpec::MainTerm => None,
    };
    let main_term = match c.mode {
        ModeSpec::MainTerm | ModeSpec::Both => Some(run(ExpsumMode::MainTerm)?),
        ModeSpec::Exact => None,
    };
    let relative_gap = exact.zip(main_term).map(|(e, m)| (m - e).abs() / e.abs());
    let mut summary = Vec::new();
    if let Some(e) = exact {
        summary.push(format!("exact second moment {e:.10}"));
    }
    if let Some(m) = main_term {
        summary.push(format!("main term {m:.10}"));
    }
    if let Some(g) = relative_gap {
        summary.push(format!("relative gap {g:.3e}"));
    }
    let report = ExpsumReport {
        m: c.m,
        n: c.n,
        exact,
        main_term,
        relative_gap,
    };
    Ok(Outcome {
        artifacts: vec![Artifact::json("expsum.json", &report)?],
        summary,
    })
}
