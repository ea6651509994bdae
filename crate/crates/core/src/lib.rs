//! Numerical laboratory for a charged particle driven by the random
//! zero-point radiation field.
//!
//! The crate is organized around five subsystems:
//!
//! * [`zpf`] — discrete realizations of the random zero-point field:
//!   spectral sampling, time-domain evaluation, correlation estimates.
//! * [`response`] — analytic linear-response machinery: Lorentzian
//!   susceptibilities, time-domain impulse response, Kramers–Kronig
//!   reconstruction, quality factor, stationary-moment quadrature.
//! * [`trajectory`] — Runge–Kutta integration of the equation of motion
//!   with radiation reaction, ensemble statistics, and Welch spectra.
//! * [`spectral`] — the 1D stationary eigenproblem for a binding
//!   potential and the transition data (frequencies, matrix elements)
//!   it induces.
//! * [`quantum`] — response expansions, Poissonian brackets, the
//!   Thomas–Reiche–Kuhn sum rule, commutator and Heisenberg-equation
//!   checks, and the Bohr frequency structure.
//!
//! All operations are deterministic for a fixed seed; randomness enters the
//! model only through mode phases drawn from a counter-based generator.

// Validation guards are written as negated comparisons (`!(x > 0.0)`) so
// that NaN inputs fail them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod mat;
pub mod potential;
pub mod quantum;
pub mod response;
pub mod rng;
pub mod spectral;
pub mod trajectory;
pub mod zpf;

pub use error::{CoreError, Result};
pub use mat::CMatrix;
pub use num_complex::Complex64;
pub use potential::PotentialSpec;
pub use quantum::{CanonicalModePair, ExpansionKind, ResponseExpansion};
pub use response::{LorentzianResponse, OscillatorParams, ResponseSet};
pub use spectral::{GridSpec, StationaryStateSet, TransitionData};
pub use trajectory::{MomentReport, Psd, SimConfig, Trajectory};
pub use zpf::{FieldMode, FieldRealization, GridKind, SpectrumConfig};
