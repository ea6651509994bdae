//! Shared fixtures for the benchmark targets.

use zpflab_core::response::OscillatorParams;
use zpflab_core::spectral::GridSpec;
use zpflab_core::trajectory::SimConfig;
use zpflab_core::zpf::SpectrumConfig;
use zpflab_core::PotentialSpec;

pub fn unit_params() -> OscillatorParams {
    OscillatorParams::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap()
}

pub fn q50_params() -> OscillatorParams {
    OscillatorParams::with_q(1.0, 1.0, 1.0, 50.0, 1.0).unwrap()
}

pub fn default_bath(n_modes: usize) -> SpectrumConfig {
    SpectrumConfig::new(0.2, 5.0, n_modes, 1.0)
}

pub fn harmonic() -> PotentialSpec {
    PotentialSpec::Harmonic { omega0: 1.0 }
}

pub fn short_sim(seed: u64) -> SimConfig {
    SimConfig::new(0.05, 50.0, 0.0, seed, 1)
}

pub fn eigen_grid(n_points: usize) -> GridSpec {
    GridSpec::symmetric(10.0, n_points)
}
