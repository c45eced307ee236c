//! Exact and Monte Carlo computations for random walks `S_k alpha mod 1` on
//! the circle and `S_k p/q mod 1` on cyclic groups: discrete Kolmogorov and
//! total variation distances, their Fourier bounds, continued fractions, and
//! the limiting variance constants of additive functionals.

pub mod chain_exact;
pub mod config;
pub mod diophantine;
pub mod error;
pub mod lattice_dist;
pub mod montecarlo;
pub mod turn;
pub mod variance_const;

pub use chain_exact::{CyclicDistribution, MetricSeries, SpectralState, TransitionScan};
pub use diophantine::{ContinuedFraction, IrrationalNumber, Rational};
pub use error::{Error, Result};
pub use lattice_dist::{EnvelopeParams, StepDistribution};
pub use montecarlo::{CltReport, SamplerConfig};
pub use turn::Turn;
pub use variance_const::TestFunction;
