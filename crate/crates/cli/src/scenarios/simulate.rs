//! `simulate`: integrate the driven-oscillator ensemble, export the
//! moments, a representative trajectory, and its spectrum, and compare
//! against the stationary quadrature oracle where one exists.

use zpflab_core::response::stationary_moments;
use zpflab_core::trajectory::{ensemble_moments, integrate, psd, PsdConfig};
use zpflab_core::zpf::sample_zpf;
use zpflab_core::PotentialSpec;

use super::Ctx;
use crate::config::{self, Reader};
use crate::manifest::Check;
use crate::textio::write_csv;
use crate::CliError;

pub fn run(ctx: &mut Ctx) -> Result<(), CliError> {
    let seed = ctx.require_seed()?;
    let raw = ctx.raw.clone();
    let mut reader = Reader::new(&raw, "simulate");
    let params = config::damped_oscillator(&mut reader)?;
    let pot = config::potential(&mut reader, params.omega0)?;
    let spectrum = config::spectrum(&mut reader, params.hbar, params.omega0)?;
    let sim = config::sim(&mut reader, seed, params.gamma())?;
    let segment_len = reader.usize_or("psd.segment_len", 8192)?;
    reader.finish()?;

    ctx.say(&format!(
        "simulate: {} trajectories, t = 0..{} (burn {}), dt = {}, {} bath modes",
        sim.n_trajectories, sim.t_total, sim.t_burn, sim.dt, spectrum.n_modes
    ));
    let report = ensemble_moments(&params, &pot, &sim, &spectrum)?;
    super::write_json(&ctx.artifact("moments.json"), &report)?;

    // Representative trajectory (first ensemble member) and a spectrum
    // averaged over a few members to tame single-run periodogram noise.
    let field = sample_zpf(&spectrum, zpflab_core::rng::derive(seed, 0))?;
    let traj = integrate(&params, &pot, &field, &sim)?;
    write_csv(
        &ctx.artifact("trajectory.csv"),
        &["t", "x", "p"],
        super::float_rows(&[&traj.t, &traj.x, &traj.p]),
    )?;
    let psd_cfg = PsdConfig {
        segment_len,
        min_omega: params.omega0,
    };
    let mut spec = psd(&traj, &psd_cfg)?;
    let n_avg = sim.n_trajectories.min(4);
    for r in 1..n_avg {
        let field = sample_zpf(&spectrum, zpflab_core::rng::derive(seed, r as u64))?;
        let member = integrate(&params, &pot, &field, &sim)?;
        for (acc, v) in spec.power.iter_mut().zip(&psd(&member, &psd_cfg)?.power) {
            *acc += v;
        }
    }
    for v in spec.power.iter_mut() {
        *v /= n_avg as f64;
    }
    write_csv(
        &ctx.artifact("psd.csv"),
        &["omega", "power"],
        super::float_rows(&[&spec.omega, &spec.power]),
    )?;

    // A zero-mean field drives zero mean displacement only in a
    // symmetric well.
    if pot.is_even() {
        ctx.manifest.push_check(Check::bound(
            "mean_x_consistent_with_zero",
            None,
            report.mean_x.abs(),
            3.0 * report.stderr_x,
        ));
    }
    if let PotentialSpec::Harmonic { omega0 } = pot {
        let oracle = stationary_moments(&params, &spectrum)?;
        ctx.manifest.push_check(Check::against(
            "x2_vs_quadrature_oracle",
            None,
            report.var_x,
            oracle.x2,
            3.0 * report.stderr_x2,
        ));
        ctx.manifest.push_check(Check::against(
            "p2_vs_quadrature_oracle",
            None,
            report.var_p,
            oracle.p2,
            3.0 * report.stderr_p2,
        ));
        ctx.manifest.push_check(Check::against(
            "psd_peak_at_resonance",
            None,
            spec.peak_omega(),
            omega0,
            spec.d_omega,
        ));
        ctx.say(&format!(
            "simulate: <x^2> = {:.5} +- {:.5} vs oracle {:.5}",
            report.var_x, report.stderr_x2, oracle.x2
        ));
    }
    Ok(())
}
