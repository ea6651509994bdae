//! Trajectory integration for a bound charge driven by a field realization.
//!
//! The equation of motion is the order-reduced form of the Abraham-Lorentz
//! equation: `m x'' = f(x) + e E(t) + tau f'(x) x'`. The third-derivative
//! self-force is replaced by its lowest-order reduction, which removes the
//! runaway solutions while keeping the radiative linewidth
//! `gamma = tau omega0^2` of the harmonic oscillator.
//!
//! Integration is classical fixed-step RK4 with the driving field evaluated
//! at the exact stage times; the field values are pre-rendered on the
//! half-step grid by phasor rotation (see [`FieldRealization::render`]).

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::potential::PotentialSpec;
use crate::response::OscillatorParams;
use crate::rng;
use crate::zpf::{sample_zpf, FieldRealization, SpectrumConfig};

/// Integrator selection. RK4 is the only supported scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    #[default]
    Rk4,
}

/// Simulation schedule and ensemble size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_total: f64,
    /// Leading transient discarded from the returned trajectory.
    pub t_burn: f64,
    pub seed: u64,
    pub n_trajectories: usize,
    pub integrator: Integrator,
    /// Initial position; the stationary statistics do not depend on it.
    pub x0: f64,
    /// Initial momentum.
    pub p0: f64,
}

impl SimConfig {
    pub fn new(dt: f64, t_total: f64, t_burn: f64, seed: u64, n_trajectories: usize) -> Self {
        Self {
            dt,
            t_total,
            t_burn,
            seed,
            n_trajectories,
            integrator: Integrator::Rk4,
            x0: 0.0,
            p0: 0.0,
        }
    }

    fn validate(&self, field_omega_max: f64) -> Result<()> {
        if !(self.dt > 0.0 && self.t_total > 0.0) {
            return Err(CoreError::Config(format!(
                "sim requires dt > 0 and t_total > 0, got dt={}, t_total={}",
                self.dt, self.t_total
            )));
        }
        if !(self.t_burn >= 0.0 && self.t_burn < self.t_total) {
            return Err(CoreError::Config(format!(
                "burn-in must satisfy 0 <= t_burn < t_total, got {}",
                self.t_burn
            )));
        }
        if field_omega_max > 0.0 {
            let limit = std::f64::consts::TAU / (16.0 * field_omega_max);
            if self.dt > limit {
                return Err(CoreError::Resolution(format!(
                    "dt = {} does not resolve the fastest bath mode (need <= {:.3e})",
                    self.dt, limit
                )));
            }
        }
        Ok(())
    }
}

/// Position/momentum time series on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn dt(&self) -> f64 {
        if self.t.len() >= 2 {
            self.t[1] - self.t[0]
        } else {
            0.0
        }
    }

    /// Time averages `(mean x, mean x^2, mean p^2)` over an index range.
    pub fn time_stats(&self, range: std::ops::Range<usize>) -> (f64, f64, f64) {
        let n = range.len() as f64;
        let mut sx = 0.0;
        let mut sx2 = 0.0;
        let mut sp2 = 0.0;
        for i in range {
            sx += self.x[i];
            sx2 += self.x[i] * self.x[i];
            sp2 += self.p[i] * self.p[i];
        }
        (sx / n, sx2 / n, sp2 / n)
    }

    /// Mechanical energy `p^2/2m + V(x)` at sample `i`.
    pub fn energy(&self, i: usize, pot: &PotentialSpec, params: &OscillatorParams) -> f64 {
        self.p[i] * self.p[i] / (2.0 * params.m) + pot.v(self.x[i], params)
    }
}

/// Integrate the equation of motion and return the post-burn-in segment.
pub fn integrate(
    params: &OscillatorParams,
    pot: &PotentialSpec,
    field: &FieldRealization,
    config: &SimConfig,
) -> Result<Trajectory> {
    params.validate()?;
    pot.validate()?;
    config.validate(field.omega_max())?;

    let dt = config.dt;
    let n_steps = (config.t_total / dt).round() as usize;
    let burn_steps = (config.t_burn / dt).round() as usize;
    // Field on the half-step grid: index 2i is t_i, 2i+1 is t_i + dt/2.
    let e_grid = field.render(0.0, 0.5 * dt, 2 * n_steps + 1);

    let m = params.m;
    let e = params.e;
    let tau = params.tau;
    let rhs = |x: f64, p: f64, e_field: f64| -> (f64, f64) {
        let v = p / m;
        (
            v,
            pot.force(x, params) + e * e_field + tau * pot.force_prime(x, params) * v,
        )
    };

    let mut x = config.x0;
    let mut p = config.p0;
    let e_ref = p * p / (2.0 * m) + pot.v(x, params) + params.hbar * params.omega0;

    let keep = n_steps - burn_steps + 1;
    let mut out_t = Vec::with_capacity(keep);
    let mut out_x = Vec::with_capacity(keep);
    let mut out_p = Vec::with_capacity(keep);
    if burn_steps == 0 {
        out_t.push(0.0);
        out_x.push(x);
        out_p.push(p);
    }

    for i in 0..n_steps {
        let e0 = e_grid[2 * i];
        let eh = e_grid[2 * i + 1];
        let e1 = e_grid[2 * i + 2];
        let (k1x, k1p) = rhs(x, p, e0);
        let (k2x, k2p) = rhs(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, eh);
        let (k3x, k3p) = rhs(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, eh);
        let (k4x, k4p) = rhs(x + dt * k3x, p + dt * k3p, e1);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);

        if i % 64 == 63 || i + 1 == n_steps {
            let energy = p * p / (2.0 * m) + pot.v(x, params);
            if !energy.is_finite() || energy > 1e6 * e_ref {
                return Err(CoreError::Divergence(format!(
                    "energy {energy:.3e} exceeded 1e6 x reference scale {e_ref:.3e} at t = {}",
                    (i + 1) as f64 * dt
                )));
            }
        }

        if i + 1 >= burn_steps {
            out_t.push((i + 1) as f64 * dt);
            out_x.push(x);
            out_p.push(p);
        }
    }

    Ok(Trajectory {
        t: out_t,
        x: out_x,
        p: out_p,
    })
}

/// Ensemble- and time-averaged stationary moments with standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean_x: f64,
    pub stderr_x: f64,
    /// Time- and ensemble-averaged `<x^2>`.
    pub var_x: f64,
    pub stderr_x2: f64,
    /// Time- and ensemble-averaged `<p^2>`.
    pub var_p: f64,
    pub stderr_p2: f64,
    pub n_trajectories: usize,
    pub config_hash: String,
}

/// Run `config.n_trajectories` independent trajectories (one fresh field
/// realization each, seeds derived from the master seed) and reduce their
/// post-burn-in time averages into ensemble moments.
///
/// Requires at least two trajectories, a dissipative oscillator, and a
/// burn-in of at least five relaxation times so the transient is gone.
pub fn ensemble_moments(
    params: &OscillatorParams,
    pot: &PotentialSpec,
    config: &SimConfig,
    spectrum: &SpectrumConfig,
) -> Result<MomentReport> {
    params.validate()?;
    spectrum.validate()?;
    if config.n_trajectories < 2 {
        return Err(CoreError::Config(
            "ensemble requires n_trajectories >= 2".into(),
        ));
    }
    let gamma = params.gamma();
    if gamma <= 0.0 {
        return Err(CoreError::Config(
            "stationary ensemble requires tau > 0".into(),
        ));
    }
    if config.t_burn < 5.0 / gamma {
        return Err(CoreError::Config(format!(
            "burn-in {} shorter than five relaxation times ({})",
            config.t_burn,
            5.0 / gamma
        )));
    }

    let per_traj: Vec<Result<(f64, f64, f64)>> = (0..config.n_trajectories)
        .into_par_iter()
        .map(|r| {
            let field = sample_zpf(spectrum, rng::derive(config.seed, r as u64))?;
            let traj = integrate(params, pot, &field, config)?;
            Ok(traj.time_stats(0..traj.len()))
        })
        .collect();

    let mut xs = Vec::with_capacity(per_traj.len());
    let mut x2s = Vec::with_capacity(per_traj.len());
    let mut p2s = Vec::with_capacity(per_traj.len());
    for r in per_traj {
        let (mx, mx2, mp2) = r?;
        xs.push(mx);
        x2s.push(mx2);
        p2s.push(mp2);
    }

    let (mean_x, stderr_x) = mean_stderr(&xs);
    let (var_x, stderr_x2) = mean_stderr(&x2s);
    let (var_p, stderr_p2) = mean_stderr(&p2s);
    Ok(MomentReport {
        mean_x,
        stderr_x,
        var_x,
        stderr_x2,
        var_p,
        stderr_p2,
        n_trajectories: config.n_trajectories,
        config_hash: ensemble_hash(params, pot, config, spectrum),
    })
}

fn mean_stderr(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Stable hash of the full run configuration, for manifests.
pub fn ensemble_hash(
    params: &OscillatorParams,
    pot: &PotentialSpec,
    config: &SimConfig,
    spectrum: &SpectrumConfig,
) -> String {
    let blob = serde_json::to_string(&(params, pot, config, spectrum))
        .expect("config serialization cannot fail");
    format!("{:016x}", rng::fnv1a64(blob.as_bytes()))
}

/// One-sided power spectral density on an angular-frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psd {
    pub omega: Vec<f64>,
    pub power: Vec<f64>,
    pub d_omega: f64,
    pub n_segments: usize,
}

impl Psd {
    /// Frequency of the tallest bin.
    pub fn peak_omega(&self) -> f64 {
        let idx = self
            .power
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.omega[idx]
    }

    /// Integral of the density over the band; approximates `<x^2>`.
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum::<f64>() * self.d_omega
    }
}

/// Welch-averaged PSD parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdConfig {
    /// Samples per segment; must be a power of two.
    pub segment_len: usize,
    /// Lowest resonance frequency the segments must resolve: each segment
    /// must span at least ten periods of it.
    pub min_omega: f64,
}

/// Welch PSD of the position series: Hann-windowed, mean-removed segments
/// with 50% overlap, averaged periodograms, one-sided normalization such
/// that `sum(power) * d_omega ~ var(x)`.
pub fn psd(traj: &Trajectory, config: &PsdConfig) -> Result<Psd> {
    let n = config.segment_len;
    if !n.is_power_of_two() || n < 16 {
        return Err(CoreError::Config(format!(
            "segment_len must be a power of two >= 16, got {n}"
        )));
    }
    if traj.len() < n {
        return Err(CoreError::Resolution(format!(
            "trajectory of {} samples shorter than one segment ({n})",
            traj.len()
        )));
    }
    let dt = traj.dt();
    if config.min_omega > 0.0 {
        let span = n as f64 * dt;
        let needed = 10.0 * std::f64::consts::TAU / config.min_omega;
        if span < needed {
            return Err(CoreError::Resolution(format!(
                "segment span {span} shorter than ten resonance periods ({needed})"
            )));
        }
    }

    let window: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (std::f64::consts::TAU * i as f64 / (n - 1) as f64).cos()))
        .collect();
    let window_power = window.iter().map(|w| w * w).sum::<f64>() / n as f64;

    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let step = n / 2;
    let mut acc = vec![0.0f64; n / 2];
    let mut n_segments = 0usize;
    let mut start = 0usize;
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    while start + n <= traj.len() {
        let seg = &traj.x[start..start + n];
        let mean = seg.iter().sum::<f64>() / n as f64;
        for (b, (&v, &w)) in buf.iter_mut().zip(seg.iter().zip(&window)) {
            *b = Complex64::new((v - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (m, slot) in acc.iter_mut().enumerate().take(n / 2).skip(1) {
            *slot += buf[m].norm_sqr();
        }
        n_segments += 1;
        start += step;
    }

    let d_omega = std::f64::consts::TAU / (n as f64 * dt);
    let scale = 2.0 * dt / (std::f64::consts::TAU * n as f64 * window_power * n_segments as f64);
    let omega: Vec<f64> = (1..n / 2).map(|m| m as f64 * d_omega).collect();
    let power: Vec<f64> = (1..n / 2).map(|m| acc[m] * scale).collect();
    Ok(Psd {
        omega,
        power,
        d_omega,
        n_segments,
    })
}
