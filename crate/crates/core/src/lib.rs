//! Quantum harmonic analysis on the finite phase space `Z_N × Z_N`.
//!
//! Functions live on the grid with every point weighted `1/N`; operators are
//! `N × N` complex matrices. Convolutions, Fourier–Wigner and Weyl calculus,
//! Cohen's class and mixed-state localization are exact in this model.

pub mod cohen;
pub mod context;
pub mod convolution;
pub mod error;
mod fft;
pub mod fourier_wigner;
pub mod io;
pub mod localization;
pub mod operators;
pub mod phase_space;
pub mod random;
pub mod selftest;
pub mod tf;

pub use num_complex::Complex64;
pub use num_rational::Ratio;

pub use cohen::{CohenClassification, CohenKernel, CohenUncertainty, KlmResult};
pub use context::{PhasePoint, QhaContext, DEFAULT_DECONV_TOL, DEFAULT_ZERO_TOL};
pub use error::{QhaError, Result};
pub use localization::{FilterTerm, LocalizationReport, PovmReport, SpreadingUncertainty};
pub use operators::{MixedState, OperatorMatrix, Signal, Spectrum};
pub use phase_space::{Domain, PhaseFn};
pub use random::Fixtures;
pub use tf::Window;
