//! `response`: susceptibility scan with Kramers-Kronig reconstruction and
//! the time-domain impulse response with its causality check.

use zpflab_core::response::{chi_time, kk_check, q_factor, ResponseSet};

use super::Ctx;
use crate::config::{self, Reader};
use crate::manifest::Check;
use crate::textio::write_csv;
use crate::CliError;

pub fn run(ctx: &mut Ctx) -> Result<(), CliError> {
    let raw = ctx.raw.clone();
    let mut reader = Reader::new(&raw, "response");
    let params = config::damped_oscillator(&mut reader)?;
    let gamma = params.gamma();
    let omega_min = reader.f64_or("response.omega_min", params.omega0 / 5.0)?;
    let omega_max = reader.f64_or("response.omega_max", params.omega0 * 5.0)?;
    let n_points = reader.usize_or("response.n_points", 1 << 16)?;
    let dt = reader.f64_or(
        "response.dt",
        (std::f64::consts::TAU / (16.0 * params.omega0)) / 32.0,
    )?;
    // Long enough that the folded exp(-gamma t / 2) tail sits well below
    // the causality tolerance; capped so extreme Q values cannot request
    // an absurd grid (the resolution check then asks for explicit values).
    let default_n = (((28.0 / gamma) / dt) as usize)
        .next_power_of_two()
        .min(1 << 22);
    let n_time = reader.usize_or("response.n_time", default_n)?;
    reader.finish()?;

    let set = ResponseSet::single(params.omega0, gamma)?;
    let scan = kk_check(&set, omega_min, omega_max, n_points)?;
    let abs_err: Vec<f64> = scan
        .re_chi
        .iter()
        .zip(&scan.re_chi_rec)
        .map(|(a, b)| (a - b).abs())
        .collect();
    write_csv(
        &ctx.artifact("chi_scan.csv"),
        &["omega", "re_chi", "im_chi", "re_chi_rec", "abs_err"],
        super::float_rows(&[
            &scan.omega,
            &scan.re_chi,
            &scan.im_chi,
            &scan.re_chi_rec,
            &abs_err,
        ]),
    )?;

    let resp = chi_time(&set, dt, n_time)?;
    write_csv(
        &ctx.artifact("impulse.csv"),
        &["t", "chi"],
        super::float_rows(&[&resp.t, &resp.chi]),
    )?;

    ctx.manifest.push_check(Check::bound(
        "kk_reconstruction_residual",
        None,
        scan.rel_residual,
        0.02,
    ));
    ctx.manifest.push_check(Check::bound(
        "impulse_response_causality",
        None,
        resp.max_abs_precausal() / resp.max_abs(),
        1e-3,
    ));
    ctx.manifest.push_check(Check::against(
        "q_times_gamma_is_omega0",
        None,
        q_factor(&params) * gamma,
        params.omega0,
        1e-12 * params.omega0,
    ));
    let peak = set.terms()[0].chi(params.omega0).norm();
    ctx.manifest.push_check(Check::against(
        "on_resonance_magnitude",
        None,
        peak,
        1.0 / (gamma * params.omega0),
        1e-12 / (gamma * params.omega0),
    ));
    ctx.say(&format!(
        "response: kk residual {:.3e}, causal leak {:.3e}, Q = {:.1}",
        scan.rel_residual,
        resp.max_abs_precausal() / resp.max_abs(),
        q_factor(&params)
    ));
    Ok(())
}
