//! `oracle`: solve the stationary eigenproblem for the configured
//! potential and export the transition data consumed by the verification
//! battery and external tools.

use zpflab_core::quantum::bohr_check;
use zpflab_core::spectral::{solve_states, transition_data};

use super::Ctx;
use crate::config::{self, Reader};
use crate::manifest::Check;
use crate::textio::{fmt_f64, write_csv};
use crate::CliError;

pub fn run(ctx: &mut Ctx) -> Result<(), CliError> {
    let raw = ctx.raw.clone();
    let mut reader = Reader::new(&raw, "oracle");
    let params = config::lossless_oscillator(&mut reader)?;
    let pot = config::potential(&mut reader, params.omega0)?;
    let grid = config::eigen_grid(&mut reader)?;
    let n_states = reader.usize_or("oracle.n_states", 12)?;
    reader.finish()?;

    ctx.say(&format!(
        "oracle: solving {n_states} states on [{}, {}] x {}",
        grid.x_min, grid.x_max, grid.n_points
    ));
    let states = solve_states(&pot, &grid, n_states, &params)?;
    let data = transition_data(&states, &params);
    super::write_json(&ctx.artifact("transition_data.json"), &data.to_document())?;

    let indices: Vec<f64> = (0..states.n_states()).map(|n| n as f64).collect();
    write_csv(
        &ctx.artifact("energies.csv"),
        &["n", "energy"],
        super::float_rows(&[&indices, &states.energies]),
    )?;

    // Structural checks on the solved data.
    let mut ortho = 0.0f64;
    for n in 0..states.n_states() {
        for m in 0..=n {
            let target = if n == m { 1.0 } else { 0.0 };
            ortho = ortho.max((states.overlap(n, m) - target).abs());
        }
    }
    ctx.manifest
        .push_check(Check::bound("orthonormality_defect", None, ortho, 1e-10));

    let (x, p, _) = data.matrices(states.n_states())?;
    ctx.manifest.push_check(Check::bound(
        "x_hermiticity_defect",
        None,
        x.hermiticity_defect(),
        1e-13,
    ));
    ctx.manifest.push_check(Check::bound(
        "p_hermiticity_defect",
        None,
        p.hermiticity_defect(),
        1e-13,
    ));
    let bohr = bohr_check(&data);
    ctx.manifest.push_check(Check::bound(
        "bohr_identity_defect",
        None,
        bohr.max_identity_dev,
        1e-12,
    ));
    ctx.say(&format!(
        "oracle: E_0 = {}, E_1 = {}",
        fmt_f64(states.energies[0]),
        fmt_f64(states.energies[1])
    ));
    Ok(())
}
