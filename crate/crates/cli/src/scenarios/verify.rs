//! `verify`: the matrix-mechanics verification battery.
//!
//! The bundled fixture is the harmonic oscillator: exact transition data
//! for the algebraic identities plus a finite-difference solve for the
//! Bohr spacing. Configuring a quartic or polynomial potential appends the
//! corresponding battery on solved transition data at the configured grid.

use zpflab_core::quantum::{
    bohr_check, bracket_via_canonical, commutator, commutator_report, heisenberg_check,
    poissonian_bracket, trk_sum_converged, ResponseExpansion,
};
use zpflab_core::spectral::{
    force_matrix, solve_states, transition_data, GridSpec, TransitionData,
};
use zpflab_core::{CMatrix, Complex64, PotentialSpec};

use super::Ctx;
use crate::config::{self, Reader};
use crate::manifest::Check;
use crate::CliError;

pub fn run(ctx: &mut Ctx) -> Result<(), CliError> {
    let raw = ctx.raw.clone();
    let mut reader = Reader::new(&raw, "verify");
    let params = config::lossless_oscillator(&mut reader)?;
    let pot = match reader.opt_str("potential.kind") {
        Some(_) => Some(config::potential(&mut reader, params.omega0)?),
        None => None,
    };
    let grid = config::eigen_grid(&mut reader)?;
    let n_states = reader.usize_or("oracle.n_states", 60)?;
    reader.finish()?;
    let seed = ctx.seed.unwrap_or(0);

    // --- Harmonic battery on analytic transition data. ---
    let data = TransitionData::harmonic_analytic(&params, 60);

    let mut trk_worst = 0.0f64;
    for n in 0..=8 {
        let (v, _) = trk_sum_converged(&data, n)?;
        trk_worst = trk_worst.max((v - params.hbar).abs());
    }
    ctx.manifest
        .push_check(Check::bound("trk", None, trk_worst, 1e-6));

    let (x, p, h) = data.matrices(60)?;
    let report = commutator_report(&commutator(&x, &p)?, params.hbar, 31);
    ctx.manifest.push_check(Check::bound(
        "commutator",
        None,
        report.max_dev_low_block,
        1e-6,
    ));

    let mut bracket_dev = 0.0f64;
    let mut equivalence_dev = 0.0f64;
    for n in 0..=4 {
        let xe = ResponseExpansion::position(&data, n, 16, seed)?;
        let pe = ResponseExpansion::momentum(&data, n, 16, seed)?;
        for &t in &[0.0, 0.7, 3.1] {
            let b = poissonian_bracket(&xe, &pe, t)?;
            bracket_dev = bracket_dev.max((b - Complex64::new(0.0, params.hbar)).norm());
            let canonical = bracket_via_canonical(&xe, &pe, t)?;
            let expected = (Complex64::new(0.0, -1.0 / params.hbar) * b).re;
            equivalence_dev = equivalence_dev.max((canonical - expected).abs());
        }
    }
    ctx.manifest
        .push_check(Check::bound("poissonian_bracket", None, bracket_dev, 1e-12));
    ctx.manifest.push_check(Check::bound(
        "bracket_equivalence",
        None,
        equivalence_dev,
        1e-12,
    ));

    let force = x.scale(Complex64::new(
        -params.m * params.omega0 * params.omega0,
        0.0,
    ));
    let heis = heisenberg_check(&x, &p, &h, &force, params.m, params.hbar, 31)?;
    ctx.manifest
        .push_check(Check::bound("heisenberg_r1", None, heis.max_r1, 1e-12));
    ctx.manifest
        .push_check(Check::bound("heisenberg_r2", None, heis.max_r2, 1e-6));

    // Bohr spacing from the finite-difference solve: the nontrivial
    // statement that the FD spectrum is equally spaced.
    let fd_grid = GridSpec {
        x_min: grid.x_min,
        x_max: grid.x_max,
        n_points: grid.n_points.max(4096),
    };
    let fd_states = solve_states(
        &PotentialSpec::Harmonic {
            omega0: params.omega0,
        },
        &fd_grid,
        10,
        &params,
    )?;
    let bohr = bohr_check(&transition_data(&fd_states, &params));
    ctx.manifest.push_check(Check::bound(
        "bohr",
        None,
        bohr.max_spacing_dev(params.omega0),
        1e-4,
    ));

    // --- Optional anharmonic battery on solved transition data. ---
    if let Some(pot) = pot {
        if matches!(pot, PotentialSpec::Harmonic { .. }) {
            ctx.say("verify: configured potential is harmonic; bundled battery already covers it");
        } else {
            ctx.say(&format!(
                "verify: anharmonic battery on [{}, {}] x {} with {} states",
                grid.x_min, grid.x_max, grid.n_points, n_states
            ));
            let states = solve_states(&pot, &grid, n_states, &params)?;
            let qdata = transition_data(&states, &params);
            let mut worst = 0.0f64;
            for n in 0..=4.min(n_states - 2) {
                let (v, _) = trk_sum_converged(&qdata, n)?;
                worst = worst.max((v - params.hbar).abs());
            }
            ctx.manifest
                .push_check(Check::bound("trk_anharmonic", None, worst, 1e-4));

            let (xq, pq, hq) = qdata.matrices(n_states)?;
            let fq_full = force_matrix(&states, &pot, &params);
            let mut fq = CMatrix::zeros(n_states, n_states);
            for a in 0..n_states {
                for b in 0..n_states {
                    fq[(a, b)] = fq_full[(a, b)];
                }
            }
            let heis_q =
                heisenberg_check(&xq, &pq, &hq, &fq, params.m, params.hbar, n_states / 2 + 1)?;
            ctx.manifest.push_check(Check::bound(
                "heisenberg_r2_anharmonic",
                None,
                heis_q.max_r2,
                1e-4,
            ));
            let bohr_q = bohr_check(&qdata);
            ctx.manifest.push_check(Check::bound(
                "bohr_anharmonic_spacing_monotone",
                None,
                if bohr_q.spacings_strictly_increasing() {
                    0.0
                } else {
                    1.0
                },
                0.5,
            ));
        }
    }
    Ok(())
}
