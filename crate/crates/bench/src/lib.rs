//! Shared fixtures for the benchmarks.

use circlewalk_core::chain_exact::default_k_grid;
use circlewalk_core::diophantine::Rational;
use circlewalk_core::lattice_dist::{presets, StepDistribution};

/// Fibonacci instances `F_{n-1} / F_n` used for the transition benchmarks.
pub const FIB_INSTANCES: [(i128, i128); 3] = [(21, 34), (55, 89), (144, 233)];

pub fn instance(p: i128, q: i128) -> (StepDistribution, Rational, Vec<u64>) {
    let r = Rational::new(p, q).expect("valid fraction");
    (presets::uniform12(), r, default_k_grid(q as u64))
}
