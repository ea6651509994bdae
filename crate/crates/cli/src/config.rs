//! Plain-text run configuration with dotted section keys.
//!
//! ```text
//! # comment
//! seed = 42
//! spectrum.n_modes = 4096
//! potential.kind = harmonic
//! ```
//!
//! Parsing (syntax) and validation (typed extraction per scenario) are
//! separate stages with separate exit codes.

use std::collections::{BTreeMap, BTreeSet};

use zpflab_core::response::OscillatorParams;
use zpflab_core::spectral::GridSpec;
use zpflab_core::trajectory::SimConfig;
use zpflab_core::zpf::{GridKind, SpectrumConfig};
use zpflab_core::PotentialSpec;

use crate::CliError;

/// Raw key/value document in file order, deduplicated.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    /// Parse the dotted-key text format. Duplicate keys and lines without
    /// `=` are syntax errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = match raw_line.find('#') {
                Some(pos) => &raw_line[..pos],
                None => raw_line,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if key.is_empty() {
                return Err(CliError::Parse(format!("line {}: empty key", lineno + 1)));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(CliError::Parse(format!(
                    "line {}: duplicate key `{key}`",
                    lineno + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Stable digest input: sorted `key=value` lines.
    pub fn canonical_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Typed reader that tracks which keys were consumed so leftovers can be
/// reported as validation errors.
pub struct Reader<'a> {
    raw: &'a RawConfig,
    used: BTreeSet<String>,
    scenario: &'static str,
}

impl<'a> Reader<'a> {
    pub fn new(raw: &'a RawConfig, scenario: &'static str) -> Self {
        // The run-level `seed` key is consumed by the scenario context
        // before any section reader sees the document.
        let mut used = BTreeSet::new();
        used.insert("seed".to_string());
        Self {
            raw,
            used,
            scenario,
        }
    }

    fn get(&mut self, key: &str) -> Option<&'a str> {
        self.used.insert(key.to_string());
        self.raw.values.get(key).map(|s| s.as_str())
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| CliError::Validation(format!("key `{key}`: `{s}` is not a number"))),
        }
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    pub fn req_f64(&mut self, key: &str) -> Result<f64, CliError> {
        self.opt_f64(key)?.ok_or_else(|| self.missing(key))
    }

    pub fn opt_u64(&mut self, key: &str) -> Result<Option<u64>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => s.parse::<u64>().map(Some).map_err(|_| {
                CliError::Validation(format!("key `{key}`: `{s}` is not a non-negative integer"))
            }),
        }
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        Ok(self.opt_u64(key)?.map(|v| v as usize).unwrap_or(default))
    }

    pub fn opt_str(&mut self, key: &str) -> Option<&'a str> {
        self.get(key)
    }

    fn missing(&self, key: &str) -> CliError {
        CliError::Validation(format!(
            "missing required key `{key}` for scenario `{}`",
            self.scenario
        ))
    }

    /// Fail on keys that belong to no known section. Recognized keys a
    /// scenario does not consume are fine: one configuration document is
    /// meant to drive several scenarios.
    pub fn finish(self) -> Result<(), CliError> {
        let leftover: Vec<&String> = self
            .raw
            .values
            .keys()
            .filter(|k| !self.used.contains(*k) && !KNOWN_KEYS.contains(&k.as_str()))
            .collect();
        if leftover.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(format!(
                "unknown keys for scenario `{}`: {}",
                self.scenario,
                leftover
                    .iter()
                    .map(|s| format!("`{s}`"))
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    }
}

/// Every key any scenario understands; anything else is a typo.
const KNOWN_KEYS: &[&str] = &[
    "seed",
    "units.hbar",
    "units.m",
    "units.e",
    "oscillator.omega0",
    "oscillator.tau",
    "oscillator.q",
    "potential.kind",
    "potential.omega0",
    "potential.coefficient",
    "potential.coeffs",
    "spectrum.omega_min",
    "spectrum.omega_max",
    "spectrum.n_modes",
    "spectrum.grid",
    "sim.dt",
    "sim.t_total",
    "sim.t_burn",
    "sim.n_trajectories",
    "sim.x0",
    "sim.p0",
    "grid.x_min",
    "grid.x_max",
    "grid.n_points",
    "oracle.n_states",
    "response.omega_min",
    "response.omega_max",
    "response.n_points",
    "response.dt",
    "response.n_time",
    "psd.segment_len",
    "correlation.n_realizations",
    "correlation.n_samples",
    "correlation.dt",
];

/// Shared physical-constant section (`units.*`, `oscillator.omega0`).
pub fn units(reader: &mut Reader) -> Result<(f64, f64, f64, f64), CliError> {
    let hbar = reader.f64_or("units.hbar", 1.0)?;
    let m = reader.f64_or("units.m", 1.0)?;
    let e = reader.f64_or("units.e", 1.0)?;
    let omega0 = reader.f64_or("oscillator.omega0", 1.0)?;
    Ok((hbar, m, e, omega0))
}

/// Oscillator with damping: exactly one of `oscillator.tau` or
/// `oscillator.q` must be present.
pub fn damped_oscillator(reader: &mut Reader) -> Result<OscillatorParams, CliError> {
    let (hbar, m, e, omega0) = units(reader)?;
    let tau = reader.opt_f64("oscillator.tau")?;
    let q = reader.opt_f64("oscillator.q")?;
    let params = match (tau, q) {
        (Some(tau), None) => OscillatorParams::new(m, e, omega0, tau, hbar)?,
        (None, Some(q)) => OscillatorParams::with_q(m, e, omega0, q, hbar)?,
        (None, None) => {
            return Err(CliError::Validation(
                "one of `oscillator.tau` or `oscillator.q` is required".into(),
            ))
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "`oscillator.tau` and `oscillator.q` are mutually exclusive".into(),
            ))
        }
    };
    Ok(params)
}

/// Lossless oscillator constants for scenarios without dissipation.
pub fn lossless_oscillator(reader: &mut Reader) -> Result<OscillatorParams, CliError> {
    let (hbar, m, e, omega0) = units(reader)?;
    Ok(OscillatorParams::new(m, e, omega0, 0.0, hbar)?)
}

/// `potential.*` section. Required: `potential.kind`.
pub fn potential(reader: &mut Reader, fallback_omega0: f64) -> Result<PotentialSpec, CliError> {
    let kind = reader
        .opt_str("potential.kind")
        .ok_or_else(|| {
            CliError::Validation(format!(
                "missing required key `potential.kind` for scenario `{}`",
                reader.scenario
            ))
        })?
        .to_string();
    let pot = match kind.as_str() {
        "harmonic" => PotentialSpec::Harmonic {
            omega0: reader.f64_or("potential.omega0", fallback_omega0)?,
        },
        "quartic" => PotentialSpec::quartic(reader.f64_or("potential.coefficient", 0.25)?),
        "polynomial" => {
            let text = reader.opt_str("potential.coeffs").ok_or_else(|| {
                CliError::Validation(
                    "polynomial potential requires `potential.coeffs` (c2,c3,...)".into(),
                )
            })?;
            let coeffs = text
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<Vec<f64>, _>>()
                .map_err(|_| {
                    CliError::Validation(format!(
                        "key `potential.coeffs`: `{text}` is not a comma-separated number list"
                    ))
                })?;
            PotentialSpec::Polynomial { coeffs }
        }
        other => {
            return Err(CliError::Validation(format!(
                "key `potential.kind`: unknown kind `{other}` (harmonic | quartic | polynomial)"
            )))
        }
    };
    pot.validate()?;
    Ok(pot)
}

/// `spectrum.*` section.
pub fn spectrum(reader: &mut Reader, hbar: f64, omega0: f64) -> Result<SpectrumConfig, CliError> {
    let grid = match reader.opt_str("spectrum.grid").unwrap_or("uniform") {
        "uniform" => GridKind::Uniform,
        "log-uniform" => GridKind::LogUniform,
        other => {
            return Err(CliError::Validation(format!(
                "key `spectrum.grid`: unknown grid `{other}` (uniform | log-uniform)"
            )))
        }
    };
    let cfg = SpectrumConfig {
        omega_min: reader.f64_or("spectrum.omega_min", omega0 / 5.0)?,
        omega_max: reader.f64_or("spectrum.omega_max", omega0 * 5.0)?,
        n_modes: reader.usize_or("spectrum.n_modes", 4096)?,
        hbar,
        grid,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `sim.*` section; the seed is threaded in from the run-level seed.
pub fn sim(reader: &mut Reader, seed: u64, gamma: f64) -> Result<SimConfig, CliError> {
    let default_burn = if gamma > 0.0 { 5.0 / gamma } else { 0.0 };
    let t_burn = reader.f64_or("sim.t_burn", default_burn)?;
    let mut cfg = SimConfig::new(
        reader.f64_or("sim.dt", 0.05)?,
        reader.f64_or("sim.t_total", t_burn + 750.0)?,
        t_burn,
        seed,
        reader.usize_or("sim.n_trajectories", 100)?,
    );
    cfg.x0 = reader.f64_or("sim.x0", 0.0)?;
    cfg.p0 = reader.f64_or("sim.p0", 0.0)?;
    Ok(cfg)
}

/// `grid.*` section for the eigenproblem.
pub fn eigen_grid(reader: &mut Reader) -> Result<GridSpec, CliError> {
    let grid = GridSpec {
        x_min: reader.f64_or("grid.x_min", -10.0)?,
        x_max: reader.f64_or("grid.x_max", 10.0)?,
        n_points: reader.usize_or("grid.n_points", 4096)?,
    };
    grid.validate()?;
    Ok(grid)
}
