//! Serializable descriptions of step laws, irrationals and test functions,
//! as they appear in experiment configuration files.

use crate::diophantine::IrrationalNumber;
use crate::error::{Error, Result};
use crate::lattice_dist::{presets, StepDistribution};
use crate::variance_const::{FunctionKind, TestFunction};
use serde::{Deserialize, Serialize};

/// A step law: a preset name or a list of `[value, probability]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepSpec {
    Preset(String),
    Pairs(Vec<(i64, f64)>),
}

impl StepSpec {
    pub fn build(&self) -> Result<StepDistribution> {
        match self {
            StepSpec::Pairs(pairs) => StepDistribution::new(pairs),
            StepSpec::Preset(name) => step_preset(name),
        }
    }
}

fn step_preset(name: &str) -> Result<StepDistribution> {
    let unknown = || Error::InvalidInput(format!("unknown step preset {name:?}"));
    match name {
        "uniform12" => Ok(presets::uniform12()),
        "uniform01" => Ok(presets::uniform01()),
        "uniform13" => Ok(presets::uniform13()),
        _ => {
            if let Some(m) = name.strip_prefix("uniform_1_to_") {
                let m: i64 = m.parse().map_err(|_| unknown())?;
                presets::uniform_1_to(m).ok_or_else(unknown)
            } else if let Some(p) = name.strip_prefix("two_point_") {
                let p: f64 = p.parse().map_err(|_| unknown())?;
                presets::two_point(p).ok_or_else(unknown)
            } else {
                Err(unknown())
            }
        }
    }
}

/// An irrational rotation number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlphaSpec {
    Golden,
    Sqrt2,
    /// `[preperiod; period, period, ...]`.
    Quadratic {
        #[serde(default)]
        preperiod: Vec<i64>,
        period: Vec<i64>,
    },
    /// Hexadecimal digits of a number in `[0, 1)`.
    Fixed { bits: String },
}

impl AlphaSpec {
    pub fn build(&self) -> Result<IrrationalNumber> {
        match self {
            AlphaSpec::Golden => Ok(IrrationalNumber::golden()),
            AlphaSpec::Sqrt2 => Ok(IrrationalNumber::sqrt2()),
            AlphaSpec::Quadratic { preperiod, period } => {
                let wide = |v: &[i64]| v.iter().map(|&a| a as i128).collect();
                IrrationalNumber::quadratic(wide(preperiod), wide(period))
            }
            AlphaSpec::Fixed { bits } => IrrationalNumber::fixed_hex(bits),
        }
    }
}

/// A test function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FunctionSpec {
    Constant { value: f64 },
    Sawtooth,
    Cosine { j: i64 },
    Sine { j: i64 },
    Indicator { a: f64, b: f64 },
    /// `coeffs[j-1] = [a_j, b_j]` for `a_j cos(2 pi j x) + b_j sin(2 pi j x)`.
    Trigpoly {
        #[serde(default)]
        constant: f64,
        coeffs: Vec<(f64, f64)>,
    },
}

impl FunctionSpec {
    pub fn build(&self) -> Result<TestFunction> {
        TestFunction::new(match self {
            FunctionSpec::Constant { value } => FunctionKind::Constant { value: *value },
            FunctionSpec::Sawtooth => FunctionKind::Sawtooth,
            FunctionSpec::Cosine { j } => FunctionKind::Cosine { j: *j },
            FunctionSpec::Sine { j } => FunctionKind::Sine { j: *j },
            FunctionSpec::Indicator { a, b } => FunctionKind::Indicator { a: *a, b: *b },
            FunctionSpec::Trigpoly { constant, coeffs } => FunctionKind::TrigPoly {
                constant: *constant,
                coeffs: coeffs.clone(),
            },
        })
    }
}

/// Human-readable listing of the built-in presets.
pub fn list_presets() -> String {
    let mut out = String::new();
    out.push_str("step distributions (\"step\": \"<name>\" or [[value, prob], ...]):\n");
    for (name, desc) in [
        ("uniform12", "uniform on {1, 2}"),
        ("uniform01", "uniform on {0, 1}"),
        ("uniform13", "uniform on {1, 3}, maximal span D = 2"),
        ("uniform_1_to_<m>", "uniform on {1, ..., m}, m >= 2"),
        ("two_point_<p>", "{1: 1 - p, 2: p}, 0 < p < 1"),
    ] {
        out.push_str(&format!("  {name:<18} {desc}\n"));
    }
    out.push_str("irrationals (\"alpha\": {\"kind\": ...}):\n");
    for (name, desc) in [
        ("golden", "(1 + sqrt 5) / 2 = [1; 1, 1, ...]"),
        ("sqrt2", "sqrt 2 = [1; 2, 2, ...]"),
        ("quadratic", "periodic continued fraction: preperiod, period"),
        ("fixed", "fractional part from 24..32 hex digits: bits"),
    ] {
        out.push_str(&format!("  {name:<18} {desc}\n"));
    }
    out.push_str("test functions (\"function\": {\"kind\": ...}):\n");
    for (name, desc) in [
        ("sawtooth", "{x} - 1/2"),
        ("cosine", "cos(2 pi j x): j"),
        ("sine", "sin(2 pi j x): j"),
        ("indicator", "indicator of [a, b): a, b"),
        ("trigpoly", "constant + sum a_j cos(2 pi j x) + b_j sin(2 pi j x): constant, coeffs"),
        ("constant", "constant function: value"),
    ] {
        out.push_str(&format!("  {name:<18} {desc}\n"));
    }
    out
}
