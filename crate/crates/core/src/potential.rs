//! Binding potentials and their forces.

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::response::OscillatorParams;

/// A one-dimensional conservative binding potential.
///
/// The harmonic variant is parameterized by its natural frequency and picks
/// up the particle mass from [`OscillatorParams`]; polynomial potentials are
/// given directly in energy units by their coefficients `c_2..c_K`, with
/// `V(x) = Σ c_k x^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    Harmonic {
        omega0: f64,
    },
    /// `coeffs[i]` multiplies `x^(i+2)`.
    Polynomial {
        coeffs: Vec<f64>,
    },
}

impl PotentialSpec {
    /// Quartic well `V = c x^4`.
    pub fn quartic(c: f64) -> Self {
        PotentialSpec::Polynomial {
            coeffs: vec![0.0, 0.0, c],
        }
    }

    /// Check that the potential is binding: `V -> +inf` as `|x| -> inf`.
    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Harmonic { omega0 } => {
                if *omega0 <= 0.0 || !omega0.is_finite() {
                    return Err(CoreError::Config(format!(
                        "harmonic potential requires omega0 > 0, got {omega0}"
                    )));
                }
            }
            PotentialSpec::Polynomial { coeffs } => {
                let lead = coeffs
                    .iter()
                    .rposition(|&c| c != 0.0)
                    .ok_or_else(|| CoreError::Config("polynomial potential is zero".into()))?;
                let power = lead + 2;
                if power % 2 != 0 || coeffs[lead] <= 0.0 {
                    return Err(CoreError::Config(
                        "polynomial potential must have a positive leading even coefficient".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Whether `V(-x) = V(x)`; odd polynomial terms break the symmetry.
    pub fn is_even(&self) -> bool {
        match self {
            PotentialSpec::Harmonic { .. } => true,
            PotentialSpec::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .all(|(i, &c)| (i + 2) % 2 == 0 || c == 0.0),
        }
    }

    /// Potential energy `V(x)`.
    pub fn v(&self, x: f64, params: &OscillatorParams) -> f64 {
        match self {
            PotentialSpec::Harmonic { omega0 } => 0.5 * params.m * omega0 * omega0 * x * x,
            PotentialSpec::Polynomial { coeffs } => {
                let mut xe = x * x; // x^2
                let mut v = 0.0;
                for &c in coeffs {
                    v += c * xe;
                    xe *= x;
                }
                v
            }
        }
    }

    /// Conservative force `f(x) = -V'(x)`.
    pub fn force(&self, x: f64, params: &OscillatorParams) -> f64 {
        match self {
            PotentialSpec::Harmonic { omega0 } => -params.m * omega0 * omega0 * x,
            PotentialSpec::Polynomial { coeffs } => {
                let mut xe = x; // x^1
                let mut dv = 0.0;
                for (i, &c) in coeffs.iter().enumerate() {
                    let k = (i + 2) as f64;
                    dv += k * c * xe;
                    xe *= x;
                }
                -dv
            }
        }
    }

    /// Force gradient `f'(x) = -V''(x)`, used by the order-reduced
    /// radiation-reaction term.
    pub fn force_prime(&self, x: f64, params: &OscillatorParams) -> f64 {
        match self {
            PotentialSpec::Harmonic { omega0 } => -params.m * omega0 * omega0,
            PotentialSpec::Polynomial { coeffs } => {
                let mut xe = 1.0; // x^0
                let mut d2v = 0.0;
                for (i, &c) in coeffs.iter().enumerate() {
                    let k = (i + 2) as f64;
                    d2v += k * (k - 1.0) * c * xe;
                    xe *= x;
                }
                -d2v
            }
        }
    }
}
