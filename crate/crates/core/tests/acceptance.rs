//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line (visible with `--nocapture`) before asserting.
//!
//! Run with `cargo test -p zpflab-core --test acceptance -- --nocapture`.

use std::sync::Mutex;
use std::time::Instant;

/// The heavyweight criteria hold this lock so their wall-clock budgets
/// measure exclusive runtime rather than test-harness contention.
static HEAVY: Mutex<()> = Mutex::new(());

use num_complex::Complex64;
use zpflab_core::quantum::{
    bohr_check, bracket_via_canonical, commutator, commutator_report, heisenberg_check,
    poissonian_bracket, trk_sum, trk_sum_converged, CanonicalModePair, ResponseExpansion,
};
use zpflab_core::response::{
    chi_time, fit_lorentzian_peak, kk_check, q_factor, stationary_moments, OscillatorParams,
    ResponseSet,
};
use zpflab_core::spectral::{
    force_matrix, solve_states, transition_data, GridSpec, TransitionData,
};
use zpflab_core::trajectory::{ensemble_moments, integrate, psd, PsdConfig, SimConfig};
use zpflab_core::zpf::{sample_zpf, SpectrumConfig};
use zpflab_core::{CMatrix, PotentialSpec};

fn unit_params() -> OscillatorParams {
    OscillatorParams::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap()
}

fn q50_params() -> OscillatorParams {
    OscillatorParams::with_q(1.0, 1.0, 1.0, 50.0, 1.0).unwrap()
}

fn quartic_transitions(n_states: usize, n_points: usize) -> TransitionData {
    let params = unit_params();
    let grid = GridSpec::symmetric(8.0, n_points);
    let states = solve_states(&PotentialSpec::quartic(0.25), &grid, n_states, &params).unwrap();
    transition_data(&states, &params)
}

/// Print the per-criterion verdict line, then enforce it.
fn gate(name: &str, pass: bool, detail: String) {
    println!(
        "{} {} — {}",
        if pass { "PASS" } else { "FAIL" },
        name,
        detail
    );
    assert!(pass, "{name}: {detail}");
}

#[test]
fn criterion_01_trk_sum_rule() {
    let t0 = Instant::now();
    let params = unit_params();

    // Harmonic oscillator: analytic transition data, states 0..=8.
    let harmonic = TransitionData::harmonic_analytic(&params, 12);
    let mut worst_harmonic = 0.0f64;
    for n in 0..=8 {
        let (v, _) = trk_sum_converged(&harmonic, n).unwrap();
        worst_harmonic = worst_harmonic.max((v - params.hbar).abs());
    }

    // Quartic well, states 0..=4, k_max by the doubling loop.
    let quartic = quartic_transitions(60, 4096);
    let mut worst_quartic = 0.0f64;
    for n in 0..=4 {
        let (v, _) = trk_sum_converged(&quartic, n).unwrap();
        worst_quartic = worst_quartic.max((v - params.hbar).abs());
    }

    // Reported, not gated: the same sums from finite-difference eigenpairs
    // on a [-10, 10] x 1024 grid sit at the h^2 discretization floor,
    // orders of magnitude above the analytic identity.
    let grid = GridSpec::symmetric(10.0, 1024);
    let fd_states = solve_states(
        &PotentialSpec::Harmonic {
            omega0: params.omega0,
        },
        &grid,
        12,
        &params,
    )
    .unwrap();
    let fd = transition_data(&fd_states, &params);
    let mut worst_fd = 0.0f64;
    for n in 0..=8 {
        let (v, _) = trk_sum_converged(&fd, n).unwrap();
        worst_fd = worst_fd.max((v - params.hbar).abs());
    }

    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 1 (TRK sum rule)",
        worst_harmonic < 1e-6 && worst_quartic < 1e-4 && elapsed < 30.0,
        format!(
            "harmonic max |sum - hbar| = {worst_harmonic:.2e} (< 1e-6), \
             quartic = {worst_quartic:.2e} (< 1e-4); grid-1024 FD data reaches \
             {worst_fd:.1e} (discretization floor, reported only); {elapsed:.1} s (< 30 s)"
        ),
    );
}

#[test]
fn criterion_02_commutator() {
    let t0 = Instant::now();
    let params = unit_params();
    let data = TransitionData::harmonic_analytic(&params, 60);
    let (x, p, _) = data.matrices(60).unwrap();
    let c = commutator(&x, &p).unwrap();
    // Block n, n' <= 30 inclusive.
    let report = commutator_report(&c, params.hbar, 31);
    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 2 (commutator)",
        report.max_dev_low_block < 1e-6 && elapsed < 5.0,
        format!(
            "max |(XP-PX) - i hbar I| = {:.2e} over n,n' <= 30 (< 1e-6); \
             trace-zero corner artifact: corner dev {:.1} hbar, |trace| = {:.1e}; {elapsed:.1} s (< 5 s)",
            report.max_dev_low_block, report.corner_dev, report.trace_abs
        ),
    );
}

#[test]
fn criterion_03_poissonian_bracket() {
    let t0 = Instant::now();
    let params = unit_params();
    let data = TransitionData::harmonic_analytic(&params, 16);
    let times: Vec<f64> = (0..16).map(|i| 0.93 * i as f64).collect();
    let mut worst_vs_trk = 0.0f64;
    let mut worst_vs_ihbar = 0.0f64;
    let mut worst_drift = 0.0f64;
    for n in 0..=4 {
        let baseline = {
            let x = ResponseExpansion::position(&data, n, 16, 0).unwrap();
            let p = ResponseExpansion::momentum(&data, n, 16, 0).unwrap();
            poissonian_bracket(&x, &p, 0.0).unwrap()
        };
        for seed in 0..10u64 {
            let x = ResponseExpansion::position(&data, n, 16, seed).unwrap();
            let p = ResponseExpansion::momentum(&data, n, 16, seed).unwrap();
            for &t in &times {
                let b = poissonian_bracket(&x, &p, t).unwrap();
                let trk = trk_sum(&data, n, 16).unwrap();
                worst_vs_trk = worst_vs_trk.max((b - Complex64::new(0.0, trk)).norm());
                worst_vs_ihbar = worst_vs_ihbar.max((b - Complex64::new(0.0, params.hbar)).norm());
                worst_drift = worst_drift.max((b - baseline).norm());
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 3 (Poissonian bracket)",
        worst_vs_trk < 1e-12 && worst_vs_ihbar < 1e-12 && worst_drift < 1e-12 && elapsed < 5.0,
        format!(
            "|bracket - i*trk| = {worst_vs_trk:.1e} (< 1e-12), |bracket - i hbar| = \
             {worst_vs_ihbar:.1e} (< 1e-12), drift over 10 seeds x 16 times = {worst_drift:.1e} \
             (< 1e-12); {elapsed:.1} s (< 5 s)"
        ),
    );
}

#[test]
fn criterion_04_bracket_coordinate_equivalence() {
    let t0 = Instant::now();
    let params = unit_params();
    let mut worst = 0.0f64;
    let fixtures: Vec<(TransitionData, Vec<usize>)> = vec![
        (
            TransitionData::harmonic_analytic(&params, 12),
            vec![0, 1, 2, 5],
        ),
        (quartic_transitions(24, 2048), vec![0, 1, 3]),
    ];
    for (data, states) in &fixtures {
        for &n in states {
            let x = ResponseExpansion::position(data, n, data.size(), 7).unwrap();
            let p = ResponseExpansion::momentum(data, n, data.size(), 7).unwrap();
            for &t in &[0.0, 0.7, 3.1, 12.9] {
                let canonical = bracket_via_canonical(&x, &p, t).unwrap();
                let normal = poissonian_bracket(&x, &p, t).unwrap();
                let expected = (Complex64::new(0.0, -1.0 / params.hbar) * normal).re;
                worst = worst.max((canonical - expected).abs());
            }
        }
    }
    // Classical anchor: one mode's own (q, p) pair brackets to 1.
    let pair = CanonicalModePair::from_normal(Complex64::new(0.6, -0.2), 1.7, params.hbar);
    let anchor = (pair.self_bracket() - 1.0).abs();
    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 4 (bracket coordinate equivalence)",
        worst < 1e-12 && anchor < 1e-12,
        format!(
            "max |canonical - (-i/hbar) normal| = {worst:.1e} (< 1e-12), \
             classical anchor dev = {anchor:.1e}; {elapsed:.1} s"
        ),
    );
}

#[test]
fn criterion_05_heisenberg_equations() {
    let _exclusive = HEAVY.lock().unwrap_or_else(|e| e.into_inner());
    let t0 = Instant::now();
    let params = unit_params();

    let harmonic = TransitionData::harmonic_analytic(&params, 60);
    let (x, p, h) = harmonic.matrices(60).unwrap();
    let force = x.scale(Complex64::new(
        -params.m * params.omega0 * params.omega0,
        0.0,
    ));
    let rep_h = heisenberg_check(&x, &p, &h, &force, params.m, params.hbar, 31).unwrap();

    let pot = PotentialSpec::quartic(0.25);
    let grid = GridSpec::symmetric(7.0, 49152);
    let states = solve_states(&pot, &grid, 60, &params).unwrap();
    let data = transition_data(&states, &params);
    let (xq, pq, hq) = data.matrices(60).unwrap();
    let fq_full = force_matrix(&states, &pot, &params);
    let mut fq = CMatrix::zeros(60, 60);
    for a in 0..60 {
        for b in 0..60 {
            fq[(a, b)] = fq_full[(a, b)];
        }
    }
    let rep_q = heisenberg_check(&xq, &pq, &hq, &fq, params.m, params.hbar, 31).unwrap();

    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 5 (Heisenberg equations)",
        rep_h.max_r1 < 1e-12
            && rep_h.max_r2 < 1e-6
            && rep_q.max_r1 < 1e-12
            && rep_q.max_r2 < 1e-4
            && elapsed < 10.0,
        format!(
            "harmonic R1 = {:.1e} (machine), R2 = {:.1e} (< 1e-6); \
             quartic R1 = {:.1e}, R2 = {:.1e} (< 1e-4); {elapsed:.1} s (< 10 s)",
            rep_h.max_r1, rep_h.max_r2, rep_q.max_r1, rep_q.max_r2
        ),
    );
}

#[test]
fn criterion_06_stationary_driven_oscillator() {
    let _exclusive = HEAVY.lock().unwrap_or_else(|e| e.into_inner());
    let t0 = Instant::now();
    let params = q50_params();
    let gamma = params.gamma();
    let pot = PotentialSpec::Harmonic {
        omega0: params.omega0,
    };
    let spectrum = SpectrumConfig::new(params.omega0 / 5.0, 5.0 * params.omega0, 4096, params.hbar);
    let burn = 5.0 / gamma;
    let config = SimConfig::new(0.05, burn + 750.0, burn, 20260, 100);

    let report = ensemble_moments(&params, &pot, &config, &spectrum).unwrap();
    let oracle = stationary_moments(&params, &spectrum).unwrap();
    let dev = (report.var_x - oracle.x2).abs();
    let rel = dev / oracle.x2;
    let rel_se = report.stderr_x2 / oracle.x2;
    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 6 (stationary driven oscillator)",
        dev < 3.0 * report.stderr_x2 && rel_se <= 0.10 && elapsed < 600.0,
        format!(
            "<x^2> = {:.4} vs oracle {:.4}: dev {:.1}% of oracle, {:.2} se \
             (< 3 se, se = {:.1}% <= 10%); 100 trajectories; {elapsed:.0} s (< 600 s)",
            report.var_x,
            oracle.x2,
            100.0 * rel,
            dev / report.stderr_x2,
            100.0 * rel_se
        ),
    );
}

#[test]
fn criterion_07_spectral_line_shape() {
    let _exclusive = HEAVY.lock().unwrap_or_else(|e| e.into_inner());
    let t0 = Instant::now();
    let params = q50_params();
    let gamma = params.gamma();
    let pot = PotentialSpec::Harmonic {
        omega0: params.omega0,
    };
    let spectrum = SpectrumConfig::new(0.2, 5.0, 8192, params.hbar);
    let burn = 5.0 / gamma;
    let n_real = 4usize;
    let fine_segment = 65536usize;
    let measure = 4.0 * fine_segment as f64 * 0.05;

    let psds: Vec<_> = (0..n_real)
        .map(|r| {
            let field = sample_zpf(&spectrum, 9000 + r as u64).unwrap();
            let config = SimConfig::new(0.05, burn + measure, burn, 0, 1);
            let traj = integrate(&params, &pot, &field, &config).unwrap();
            let fine = psd(
                &traj,
                &PsdConfig {
                    segment_len: fine_segment,
                    min_omega: params.omega0,
                },
            )
            .unwrap();
            let coarse = psd(
                &traj,
                &PsdConfig {
                    segment_len: 8192,
                    min_omega: params.omega0,
                },
            )
            .unwrap();
            (fine, coarse)
        })
        .collect();

    let average = |pick: &dyn Fn(&(zpflab_core::Psd, zpflab_core::Psd)) -> &zpflab_core::Psd| {
        let first = pick(&psds[0]).clone();
        let mut power = first.power.clone();
        for item in &psds[1..] {
            for (acc, v) in power.iter_mut().zip(&pick(item).power) {
                *acc += v;
            }
        }
        for v in power.iter_mut() {
            *v /= n_real as f64;
        }
        (first.omega, power, first.d_omega)
    };

    let (omega_c, power_c, bin_c) = average(&|pair| &pair.1);
    let peak_idx = power_c
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    let peak_omega = omega_c[peak_idx];
    let peak_err = (peak_omega - params.omega0).abs();

    let (omega_f, power_f, _) = average(&|pair| &pair.0);
    let fit = fit_lorentzian_peak(&omega_f, &power_f, 2.5 * gamma).unwrap();
    let fwhm_rel = (fit.fwhm - gamma).abs() / gamma;

    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 7 (spectral line shape)",
        peak_err <= bin_c && fwhm_rel < 0.20 && elapsed < 120.0,
        format!(
            "peak at {peak_omega:.4} (|dev| = {peak_err:.1e} <= bin {bin_c:.1e}); \
             FWHM = {:.5} vs gamma = {gamma:.5} ({:.0}% dev < 20%); {elapsed:.0} s (< 120 s)",
            fit.fwhm,
            100.0 * fwhm_rel
        ),
    );
}

#[test]
fn criterion_08_kramers_kronig_and_causality() {
    let t0 = Instant::now();
    // Single Lorentzian at Q = 100.
    let params = OscillatorParams::with_q(1.0, 1.0, 1.0, 100.0, 1.0).unwrap();
    assert!((q_factor(&params) - 100.0).abs() < 1e-9);
    let set = ResponseSet::single(params.omega0, params.gamma()).unwrap();

    let scan = kk_check(&set, 0.2, 5.0, 1 << 16).unwrap();
    // The span must stretch far beyond ten decay times: the periodized
    // transform folds the |t| ~ T tail of exp(-gamma t / 2) into t < 0, so
    // the window is sized to push that fold-back below the 1e-3 bound.
    let resp = chi_time(&set, 0.0125, 1 << 19).unwrap();
    let leak = resp.max_abs_precausal() / resp.max_abs();

    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 8 (Kramers-Kronig + causality)",
        scan.rel_residual < 0.02 && leak < 1e-3 && elapsed < 30.0,
        format!(
            "KK residual = {:.2}% (< 2%), precausal leak = {:.1e} of peak (< 1e-3); \
             {elapsed:.1} s (< 30 s)",
            100.0 * scan.rel_residual,
            leak
        ),
    );
}

#[test]
fn criterion_09_radiation_reaction_decay() {
    let t0 = Instant::now();
    let params = q50_params();
    let gamma = params.gamma();
    let pot = PotentialSpec::Harmonic {
        omega0: params.omega0,
    };
    let mut config = SimConfig::new(0.01, 3.0 / gamma, 0.0, 0, 1);
    config.x0 = 1.0;
    let traj = integrate(
        &params,
        &pot,
        &zpflab_core::FieldRealization::silent(params.hbar),
        &config,
    )
    .unwrap();
    let pts: Vec<(f64, f64)> = (0..traj.len())
        .step_by(16)
        .map(|i| (traj.t[i], traj.energy(i, &pot, &params).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let rate = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    let rel = (rate - gamma).abs() / gamma;
    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 9 (radiation-reaction decay)",
        rel < 0.05 && elapsed < 10.0,
        format!(
            "fitted energy decay rate = {rate:.5} vs gamma = {gamma:.5} \
             ({:.1}% dev < 5%); {elapsed:.1} s (< 10 s)",
            100.0 * rel
        ),
    );
}

#[test]
fn criterion_10_bohr_structure() {
    let t0 = Instant::now();
    let params = unit_params();
    let grid = GridSpec::symmetric(10.0, 4096);
    let states = solve_states(
        &PotentialSpec::Harmonic {
            omega0: params.omega0,
        },
        &grid,
        10,
        &params,
    )
    .unwrap();
    let harmonic = bohr_check(&transition_data(&states, &params));
    let spacing_dev = harmonic
        .spacings
        .iter()
        .take(9)
        .map(|w| (w - params.omega0).abs())
        .fold(0.0, f64::max);

    let quartic = bohr_check(&quartic_transitions(10, 2048));
    let elapsed = t0.elapsed().as_secs_f64();
    gate(
        "criterion 10 (Bohr structure)",
        spacing_dev < 1e-4
            && harmonic.max_identity_dev < 1e-12
            && quartic.spacings_strictly_increasing()
            && elapsed < 10.0,
        format!(
            "harmonic max |w(n+1,n) - w0| = {spacing_dev:.1e} for n <= 8 (< 1e-4), \
             identity dev = {:.1e}; quartic spacings strictly increasing: {:?}; \
             {elapsed:.1} s (< 10 s)",
            harmonic.max_identity_dev,
            quartic
                .spacings
                .iter()
                .take(4)
                .map(|w| (w * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
    );
}
