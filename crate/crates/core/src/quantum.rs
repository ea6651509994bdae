//! The algebraic chain from resonant response expansions to the operator
//! structure: Poissonian brackets over field variables, the
//! Thomas-Reiche-Kuhn sum rule, the position-momentum commutator, the
//! Heisenberg equations of motion, and the Bohr frequency condition.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::mat::CMatrix;
use crate::rng;
use crate::spectral::TransitionData;

/// Which dynamical variable an expansion represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpansionKind {
    Position,
    Momentum,
}

/// One resonant term: the system in state `n` responding to the field mode
/// that connects it to state `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionEntry {
    pub k: usize,
    /// Transition frequency `w_kn`.
    pub omega: f64,
    /// Response coefficient (`x_nk` or `p_nk`).
    pub coeff: Complex64,
    /// Random phase of the unit-modulus field amplitude `a_nk = e^{i phi}`.
    pub phase: f64,
}

impl ExpansionEntry {
    fn a(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phase)
    }
}

/// A state-indexed resonant-response expansion:
/// `x_n(t) = sum_k coeff_k a_k e^{-i w_k t} + c.c.`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseExpansion {
    pub state: usize,
    pub kind: ExpansionKind,
    pub hbar: f64,
    pub m: f64,
    pub entries: Vec<ExpansionEntry>,
}

impl ResponseExpansion {
    /// Position expansion of state `n` over the transitions to states
    /// `k < k_max`, with phases drawn from the counter-based stream
    /// `(seed, n * size + k)`.
    pub fn position(data: &TransitionData, n: usize, k_max: usize, seed: u64) -> Result<Self> {
        Self::build(data, n, k_max, seed, ExpansionKind::Position)
    }

    /// Momentum expansion paired with [`ResponseExpansion::position`]: the
    /// same modes and phases, coefficients `p_nk = -i m w_kn x_nk`.
    pub fn momentum(data: &TransitionData, n: usize, k_max: usize, seed: u64) -> Result<Self> {
        Self::build(data, n, k_max, seed, ExpansionKind::Momentum)
    }

    fn build(
        data: &TransitionData,
        n: usize,
        k_max: usize,
        seed: u64,
        kind: ExpansionKind,
    ) -> Result<Self> {
        let size = data.size();
        if n >= size || k_max > size {
            return Err(CoreError::Config(format!(
                "state {n} / k_max {k_max} outside the {size} available states"
            )));
        }
        let entries = (0..k_max)
            .filter(|&k| k != n)
            .map(|k| {
                let coeff = match kind {
                    ExpansionKind::Position => Complex64::new(data.x_nk(n, k), 0.0),
                    ExpansionKind::Momentum => data.p_nk(n, k),
                };
                ExpansionEntry {
                    k,
                    omega: data.omega_kn(k, n),
                    coeff,
                    phase: rng::phase(seed, (n * size + k) as u64),
                }
            })
            .collect();
        Ok(Self {
            state: n,
            kind,
            hbar: data.hbar,
            m: data.m,
            entries,
        })
    }

    /// The expansion evaluated as a complex sum including the conjugate
    /// terms; physical values are the real part.
    pub fn evaluate_complex(&self, t: f64) -> Complex64 {
        self.entries
            .iter()
            .map(|e| {
                let rot = Complex64::from_polar(1.0, -e.omega * t);
                let term = e.coeff * e.a() * rot;
                term + term.conj()
            })
            .sum()
    }

    /// `x_n(t)` (or `p_n(t)`): real by conjugate pairing.
    pub fn evaluate(&self, t: f64) -> f64 {
        self.evaluate_complex(t).re
    }

    /// Copy with every coefficient scaled by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            e.coeff *= s;
        }
        out
    }

    fn check_paired(&self, other: &Self) -> Result<()> {
        if self.state != other.state
            || self.entries.len() != other.entries.len()
            || self.hbar != other.hbar
            || self.m != other.m
        {
            return Err(CoreError::Pairing(format!(
                "expansions disagree on state or size ({} vs {}, {} vs {} entries)",
                self.state,
                other.state,
                self.entries.len(),
                other.entries.len()
            )));
        }
        for (a, b) in self.entries.iter().zip(&other.entries) {
            if a.k != b.k || a.omega != b.omega {
                return Err(CoreError::Pairing(format!(
                    "entry mismatch: ({}, {}) vs ({}, {})",
                    a.k, a.omega, b.k, b.omega
                )));
            }
        }
        Ok(())
    }
}

/// The Poissonian bracket of a position/momentum expansion pair: the
/// bilinear form over the normal field variables,
/// `sum_k (dx/da_k dp/da_k* - dp/da_k dx/da_k*)`.
///
/// Derivatives are evaluated analytically from the expansion structure
/// (`dx/da_k = x_nk e^{-i w t}`, `dx/da_k* = x_nk* e^{+i w t}`), keeping the
/// explicit time phases so that time invariance is checked for real rather
/// than by algebraic cancellation on paper.
pub fn poissonian_bracket(
    x_exp: &ResponseExpansion,
    p_exp: &ResponseExpansion,
    t: f64,
) -> Result<Complex64> {
    x_exp.check_paired(p_exp)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (xe, pe) in x_exp.entries.iter().zip(&p_exp.entries) {
        let em = Complex64::from_polar(1.0, -xe.omega * t);
        let ep = Complex64::from_polar(1.0, xe.omega * t);
        let dx_da = xe.coeff * em;
        let dx_da_star = xe.coeff.conj() * ep;
        let dp_da = pe.coeff * em;
        let dp_da_star = pe.coeff.conj() * ep;
        acc += dx_da * dp_da_star - dp_da * dx_da_star;
    }
    Ok(acc)
}

/// The same bracket taken with respect to the canonical field variables
/// `(q_k, p_k)` of each mode, with derivatives transformed through
/// `q = sqrt(hbar/2|w|)(a + a*)`, `p = -i sqrt(hbar |w|/2)(a - a*)`.
///
/// This is an independent all-real evaluation route; it must equal
/// `(-i/hbar)` times [`poissonian_bracket`], i.e. 1 when the sum rule holds.
pub fn bracket_via_canonical(
    x_exp: &ResponseExpansion,
    p_exp: &ResponseExpansion,
    t: f64,
) -> Result<f64> {
    x_exp.check_paired(p_exp)?;
    let hbar = x_exp.hbar;
    let mut acc = 0.0f64;
    for (xe, pe) in x_exp.entries.iter().zip(&p_exp.entries) {
        let rot = Complex64::from_polar(1.0, -xe.omega * t);
        let x_rot = xe.coeff * rot;
        let p_rot = pe.coeff * rot;
        let alpha = (xe.omega.abs() / (2.0 * hbar)).sqrt();
        let beta = 1.0 / (2.0 * hbar * xe.omega.abs()).sqrt();
        // d/dq = alpha (d/da + d/da*), d/dp = i beta (d/da - d/da*);
        // acting on a real expansion both derivatives are real.
        let dx_dq = alpha * 2.0 * x_rot.re;
        let dx_dp = -beta * 2.0 * x_rot.im;
        let dp_dq = alpha * 2.0 * p_rot.re;
        let dp_dp = -beta * 2.0 * p_rot.im;
        acc += dx_dq * dp_dp - dp_dq * dx_dp;
    }
    Ok(acc)
}

/// Wirtinger derivatives `(dF/da_k, dF/da_k*)` of an expansion by central
/// finite differences in the polar parameterization `a = r e^{i phi}`.
///
/// A diagnostic cross-check of the analytic derivatives used by the
/// brackets; `step` around 1e-6 balances truncation against cancellation.
pub fn wirtinger_derivatives_fd(
    exp: &ResponseExpansion,
    entry_idx: usize,
    t: f64,
    step: f64,
) -> (Complex64, Complex64) {
    let eval_with = |r: f64, dphi: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, e) in exp.entries.iter().enumerate() {
            let a = if i == entry_idx {
                Complex64::from_polar(r, e.phase + dphi)
            } else {
                e.a()
            };
            let rot = Complex64::from_polar(1.0, -e.omega * t);
            let term = e.coeff * a * rot;
            acc += term + term.conj();
        }
        acc
    };
    let df_dr = (eval_with(1.0 + step, 0.0) - eval_with(1.0 - step, 0.0)) / (2.0 * step);
    let df_dphi = (eval_with(1.0, step) - eval_with(1.0, -step)) / (2.0 * step);
    let phase = exp.entries[entry_idx].phase;
    let i = Complex64::new(0.0, 1.0);
    let da = Complex64::from_polar(1.0, -phase) * 0.5 * (df_dr - i * df_dphi);
    let da_star = Complex64::from_polar(1.0, phase) * 0.5 * (df_dr + i * df_dphi);
    (da, da_star)
}

/// Partial Thomas-Reiche-Kuhn sum `2 m sum_{k < k_max} w_kn |x_nk|^2`.
pub fn trk_sum(data: &TransitionData, n: usize, k_max: usize) -> Result<f64> {
    if !(n < k_max && k_max <= data.size()) {
        return Err(CoreError::Config(format!(
            "trk sum requires n < k_max <= size, got n={n}, k_max={k_max}, size={}",
            data.size()
        )));
    }
    let mut acc = 0.0;
    for k in 0..k_max {
        let x = data.x_nk(n, k);
        acc += data.omega_kn(k, n) * x * x;
    }
    Ok(2.0 * data.m * acc)
}

/// Sum-rule value with `k_max` doubled until the partial sum moves by less
/// than 1e-6 (or the data is exhausted). Returns `(value, k_max_used)`.
pub fn trk_sum_converged(data: &TransitionData, n: usize) -> Result<(f64, usize)> {
    let size = data.size();
    let mut k_max = (n + 2).max(4).min(size);
    let mut value = trk_sum(data, n, k_max)?;
    while k_max < size {
        let next = (2 * k_max).min(size);
        let v = trk_sum(data, n, next)?;
        let moved = (v - value).abs();
        value = v;
        k_max = next;
        if moved < 1e-6 {
            break;
        }
    }
    Ok((value, k_max))
}

/// Matrix commutator `XP - PX`.
pub fn commutator(x: &CMatrix, p: &CMatrix) -> Result<CMatrix> {
    if !x.is_square() || x.rows() != p.rows() || !p.is_square() {
        return Err(CoreError::Shape(format!(
            "commutator needs equal square matrices, got {}x{} and {}x{}",
            x.rows(),
            x.cols(),
            p.rows(),
            p.cols()
        )));
    }
    x.mul(p)?.sub(&p.mul(x)?)
}

/// Deviation diagnostics of a commutator against `i hbar I`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub n: usize,
    pub low_block: usize,
    /// `max |(XP-PX)_ab - i hbar delta_ab|` over `a, b < low_block`.
    pub max_dev_low_block: f64,
    /// Same deviation measured at the last diagonal entry: the truncation
    /// artifact forced by the vanishing trace.
    pub corner_dev: f64,
    pub trace_abs: f64,
}

/// Compare `c = XP - PX` against `i hbar I` over the low block
/// `a, b < low_block`; the deviating corner is reported, not judged.
pub fn commutator_report(c: &CMatrix, hbar: f64, low_block: usize) -> CommutatorReport {
    let n = c.rows();
    let block = low_block.min(n);
    let ih = Complex64::new(0.0, hbar);
    let mut max_dev = 0.0f64;
    for a in 0..block {
        for b in 0..block {
            let target = if a == b { ih } else { Complex64::new(0.0, 0.0) };
            max_dev = max_dev.max((c[(a, b)] - target).norm());
        }
    }
    CommutatorReport {
        n,
        low_block: block,
        max_dev_low_block: max_dev,
        corner_dev: (c[(n - 1, n - 1)] - ih).norm(),
        trace_abs: c.trace().norm(),
    }
}

/// Residuals of the Heisenberg equations of motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergReport {
    pub low_block: usize,
    /// `max | (1/i hbar)[X, H] - P/m |` over the low block: an identity of
    /// the construction, expected at machine precision.
    pub max_r1: f64,
    /// `max | (1/i hbar)[P, H] - F |` over the low block: the dynamical
    /// content, limited by the discretization of the eigenproblem.
    pub max_r2: f64,
}

/// Evaluate both Heisenberg residuals for matrices built from one
/// transition data set; `force` is the matrix of `f(x) = -V'(x)` in the
/// same basis.
pub fn heisenberg_check(
    x: &CMatrix,
    p: &CMatrix,
    h: &CMatrix,
    force: &CMatrix,
    m: f64,
    hbar: f64,
    low_block: usize,
) -> Result<HeisenbergReport> {
    let inv_ih = Complex64::new(0.0, -1.0 / hbar); // 1/(i hbar)
    let r1 = commutator(x, h)?
        .scale(inv_ih)
        .sub(&p.scale(Complex64::new(1.0 / m, 0.0)))?;
    let r2 = commutator(p, h)?.scale(inv_ih).sub(force)?;
    Ok(HeisenbergReport {
        low_block,
        max_r1: r1.max_abs_block(low_block),
        max_r2: r2.max_abs_block(low_block),
    })
}

/// Bohr-structure diagnostics of a transition data set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BohrReport {
    /// `max | hbar w_kn - (E_k - E_n) |`: a construction identity.
    pub max_identity_dev: f64,
    /// Adjacent-level spacings `w_{n+1,n}`.
    pub spacings: Vec<f64>,
}

impl BohrReport {
    /// Largest deviation of the spacings from a reference frequency.
    pub fn max_spacing_dev(&self, omega0: f64) -> f64 {
        self.spacings
            .iter()
            .map(|w| (w - omega0).abs())
            .fold(0.0, f64::max)
    }

    pub fn spacings_strictly_increasing(&self) -> bool {
        self.spacings.windows(2).all(|w| w[1] > w[0])
    }
}

pub fn bohr_check(data: &TransitionData) -> BohrReport {
    let s = data.size();
    let mut max_dev = 0.0f64;
    for k in 0..s {
        for n in 0..s {
            let lhs = data.hbar * data.omega_kn(k, n);
            let rhs = data.energies[k] - data.energies[n];
            max_dev = max_dev.max((lhs - rhs).abs());
        }
    }
    BohrReport {
        max_identity_dev: max_dev,
        spacings: (0..s - 1).map(|n| data.omega_kn(n + 1, n)).collect(),
    }
}

/// Real phase-space coordinates of a single field mode, related to the
/// normal variable by `q = sqrt(hbar/2|w|)(a + a*)`,
/// `p = -i sqrt(hbar |w|/2)(a - a*)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalModePair {
    pub q: f64,
    pub p: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl CanonicalModePair {
    pub fn from_normal(a: Complex64, omega: f64, hbar: f64) -> Self {
        let w = omega.abs();
        let q = (hbar / (2.0 * w)).sqrt() * (a + a.conj()).re;
        let p = ((hbar * w / 2.0).sqrt() * Complex64::new(0.0, -1.0) * (a - a.conj())).re;
        Self { q, p, omega, hbar }
    }

    /// Invert the transformation back to the normal variable.
    pub fn to_normal(&self) -> Complex64 {
        let w = self.omega.abs();
        let re = self.q / (2.0 * (self.hbar / (2.0 * w)).sqrt());
        let im = self.p / (2.0 * (self.hbar * w / 2.0).sqrt());
        Complex64::new(re, im)
    }

    /// The classical anchor `{q, p}_{qp} = 1`, evaluated through the
    /// normal-variable chain rule rather than asserted.
    pub fn self_bracket(&self) -> f64 {
        let w = self.omega.abs();
        let dq_da = Complex64::new((self.hbar / (2.0 * w)).sqrt(), 0.0);
        let dq_da_star = dq_da;
        let dp_da = Complex64::new(0.0, -(self.hbar * w / 2.0).sqrt());
        let dp_da_star = -dp_da;
        let bracket = dq_da * dp_da_star - dp_da * dq_da_star;
        // {q,p}_qp = (-i/hbar) [q,p]_normal.
        (Complex64::new(0.0, -1.0 / self.hbar) * bracket).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::OscillatorParams;
    use crate::spectral::{solve_states, transition_data, GridSpec};
    use crate::PotentialSpec;
    use approx::assert_relative_eq;

    fn unit_params() -> OscillatorParams {
        OscillatorParams::new(1.0, 1.0, 1.0, 0.0, 1.0).unwrap()
    }

    fn harmonic_data(n: usize) -> TransitionData {
        TransitionData::harmonic_analytic(&unit_params(), n)
    }

    fn quartic_data(n_states: usize, n_points: usize) -> TransitionData {
        let params = unit_params();
        let grid = GridSpec::symmetric(8.0, n_points);
        let states = solve_states(&PotentialSpec::quartic(0.25), &grid, n_states, &params).unwrap();
        transition_data(&states, &params)
    }

    #[test]
    fn evaluate_single_entry() {
        let exp = ResponseExpansion {
            state: 0,
            kind: ExpansionKind::Position,
            hbar: 1.0,
            m: 1.0,
            entries: vec![ExpansionEntry {
                k: 1,
                omega: 1.0,
                coeff: Complex64::new(0.5, 0.0),
                phase: 0.0,
            }],
        };
        assert_relative_eq!(exp.evaluate(0.0), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            exp.evaluate(std::f64::consts::PI),
            -1.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn evaluation_is_real() {
        let data = quartic_data(10, 512);
        let exp = ResponseExpansion::position(&data, 2, 10, 77).unwrap();
        for &t in &[0.0, 0.3, 1.9, 42.0] {
            let v = exp.evaluate_complex(t);
            assert!(v.im.abs() <= 1e-14 * v.re.abs().max(1.0), "imag {}", v.im);
        }
    }

    #[test]
    fn poissonian_bracket_harmonic_ground_state() {
        let data = harmonic_data(4);
        let x = ResponseExpansion::position(&data, 0, 2, 5).unwrap();
        let p = ResponseExpansion::momentum(&data, 0, 2, 5).unwrap();
        let b = poissonian_bracket(&x, &p, 0.0).unwrap();
        assert!((b - Complex64::new(0.0, 1.0)).norm() < 1e-14, "bracket {b}");
    }

    #[test]
    fn empty_expansion_gives_zero() {
        let exp = ResponseExpansion {
            state: 0,
            kind: ExpansionKind::Position,
            hbar: 1.0,
            m: 1.0,
            entries: vec![],
        };
        let p = ResponseExpansion {
            kind: ExpansionKind::Momentum,
            ..exp.clone()
        };
        assert_eq!(
            poissonian_bracket(&exp, &p, 0.0).unwrap(),
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(exp.evaluate(3.0), 0.0);
    }

    #[test]
    fn bracket_time_invariance() {
        let data = harmonic_data(8);
        let x = ResponseExpansion::position(&data, 3, 8, 1).unwrap();
        let p = ResponseExpansion::momentum(&data, 3, 8, 1).unwrap();
        let b0 = poissonian_bracket(&x, &p, 0.0).unwrap();
        for &t in &[0.7, 3.1, 12.9] {
            let bt = poissonian_bracket(&x, &p, t).unwrap();
            assert!((bt - b0).norm() < 1e-12, "t={t}: {bt} vs {b0}");
        }
    }

    #[test]
    fn bracket_phase_invariance() {
        let data = quartic_data(16, 1024);
        let reference = poissonian_bracket(
            &ResponseExpansion::position(&data, 1, 16, 0).unwrap(),
            &ResponseExpansion::momentum(&data, 1, 16, 0).unwrap(),
            0.4,
        )
        .unwrap();
        for seed in 1..10u64 {
            let x = ResponseExpansion::position(&data, 1, 16, seed).unwrap();
            let p = ResponseExpansion::momentum(&data, 1, 16, seed).unwrap();
            let b = poissonian_bracket(&x, &p, 0.4).unwrap();
            assert!((b - reference).norm() < 1e-13);
        }
    }

    #[test]
    fn bracket_equals_i_times_trk() {
        let data = quartic_data(24, 1024);
        for n in 0..4 {
            let x = ResponseExpansion::position(&data, n, 24, 9).unwrap();
            let p = ResponseExpansion::momentum(&data, n, 24, 9).unwrap();
            let b = poissonian_bracket(&x, &p, 1.3).unwrap();
            let trk = trk_sum(&data, n, 24).unwrap();
            assert!(
                (b - Complex64::new(0.0, trk)).norm() < 1e-12 * trk.abs().max(1.0),
                "state {n}: {b} vs i*{trk}"
            );
        }
    }

    #[test]
    fn canonical_route_matches_normal_route() {
        let data = harmonic_data(10);
        for n in [0usize, 2, 5] {
            let x = ResponseExpansion::position(&data, n, 10, 3).unwrap();
            let p = ResponseExpansion::momentum(&data, n, 10, 3).unwrap();
            for &t in &[0.0, 0.9, 7.7] {
                let canonical = bracket_via_canonical(&x, &p, t).unwrap();
                let normal = poissonian_bracket(&x, &p, t).unwrap();
                let expected = (Complex64::new(0.0, -1.0 / data.hbar) * normal).re;
                assert!(
                    (canonical - expected).abs() < 1e-12,
                    "state {n}, t {t}: {canonical} vs {expected}"
                );
                assert_relative_eq!(canonical, 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn bracket_is_bilinear_in_the_coefficients() {
        let data = harmonic_data(6);
        let x = ResponseExpansion::position(&data, 0, 6, 2).unwrap();
        let p = ResponseExpansion::momentum(&data, 0, 6, 2).unwrap();
        let base = bracket_via_canonical(&x, &p, 0.0).unwrap();
        let s = 1.7;
        let scaled = bracket_via_canonical(&x.scaled(s), &p.scaled(s), 0.0).unwrap();
        assert_relative_eq!(scaled, s * s * base, max_relative = 1e-12);
    }

    #[test]
    fn mismatched_expansions_are_a_pairing_error() {
        let data = harmonic_data(8);
        let x = ResponseExpansion::position(&data, 0, 8, 2).unwrap();
        let p = ResponseExpansion::momentum(&data, 0, 4, 2).unwrap();
        assert!(matches!(
            poissonian_bracket(&x, &p, 0.0),
            Err(CoreError::Pairing(_))
        ));
        let p_other_state = ResponseExpansion::momentum(&data, 1, 8, 2).unwrap();
        assert!(matches!(
            bracket_via_canonical(&x, &p_other_state, 0.0),
            Err(CoreError::Pairing(_))
        ));
    }

    #[test]
    fn wirtinger_fd_matches_analytic_derivatives() {
        let data = quartic_data(8, 512);
        let exp = ResponseExpansion::position(&data, 1, 8, 13).unwrap();
        let t = 0.8;
        for idx in 0..exp.entries.len() {
            let (da, da_star) = wirtinger_derivatives_fd(&exp, idx, t, 1e-6);
            let e = &exp.entries[idx];
            let exact = e.coeff * Complex64::from_polar(1.0, -e.omega * t);
            assert!(
                (da - exact).norm() < 1e-6 * exact.norm().max(1e-3),
                "entry {idx}: {da} vs {exact}"
            );
            assert!((da_star - exact.conj()).norm() < 1e-6 * exact.norm().max(1e-3));
        }
    }

    #[test]
    fn trk_harmonic_exact() {
        let data = harmonic_data(12);
        // Ground state: only k = 1 contributes.
        assert_relative_eq!(trk_sum(&data, 0, 2).unwrap(), 1.0, epsilon = 1e-6);
        // n = 3: k = 2 and k = 4 balance to hbar.
        assert_relative_eq!(trk_sum(&data, 3, 5).unwrap(), 1.0, epsilon = 1e-6);
        // State independence across every available n.
        for n in 0..9 {
            let (v, _) = trk_sum_converged(&data, n).unwrap();
            assert_relative_eq!(v, 1.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn trk_quartic_converges_by_doubling() {
        let data = quartic_data(40, 2048);
        let (v, k_used) = trk_sum_converged(&data, 0).unwrap();
        assert!(k_used > 2, "doubling loop should extend k_max");
        assert_relative_eq!(v, 1.0, epsilon = 2e-3);
    }

    #[test]
    fn commutator_harmonic_analytic_block() {
        let data = harmonic_data(60);
        let (x, p, _) = data.matrices(60).unwrap();
        let c = commutator(&x, &p).unwrap();
        let report = commutator_report(&c, 1.0, 30);
        assert!(report.max_dev_low_block < 1e-6, "{report:?}");
        // Zero trace forces the corner to deviate by N-1 units of hbar.
        assert!(report.trace_abs < 1e-10);
        assert_relative_eq!(report.corner_dev, 60.0, max_relative = 1e-12);
    }

    fn off_diagonal_leak(data: &TransitionData, n_trunc: usize, block: usize) -> f64 {
        let (x, p, _) = data.matrices(n_trunc).unwrap();
        let c = commutator(&x, &p).unwrap();
        let mut max_off = 0.0f64;
        for a in 0..block {
            for b in 0..block {
                if a != b {
                    max_off = max_off.max(c[(a, b)].norm());
                }
            }
        }
        max_off
    }

    #[test]
    fn commutator_off_diagonal_shrinks_as_h_squared() {
        // With FD eigenpairs the off-diagonal commutator leak is a pure
        // discretization artifact: it must scale like the grid spacing
        // squared, i.e. drop by ~4x per grid doubling.
        let coarse = off_diagonal_leak(&quartic_data(40, 1024), 40, 20);
        let fine = off_diagonal_leak(&quartic_data(40, 2048), 40, 20);
        assert!(coarse < 5e-3, "coarse-grid leak {coarse}");
        let ratio = coarse / fine;
        assert!(
            (2.5..6.5).contains(&ratio),
            "leak {coarse} -> {fine}: ratio {ratio}, expected ~4"
        );
    }

    #[test]
    fn commutator_off_diagonal_vanishes_on_converged_grid() {
        let leak = off_diagonal_leak(&quartic_data(40, 65536), 40, 20);
        assert!(leak < 1e-6, "off-diagonal leak {leak}");
    }

    #[test]
    fn commutator_shape_error() {
        let a = CMatrix::zeros(3, 3);
        let b = CMatrix::zeros(4, 4);
        assert!(matches!(commutator(&a, &b), Err(CoreError::Shape(_))));
    }

    #[test]
    fn heisenberg_residuals_harmonic() {
        let params = unit_params();
        let data = harmonic_data(60);
        let (x, p, h) = data.matrices(60).unwrap();
        let force = x.scale(Complex64::new(
            -params.m * params.omega0 * params.omega0,
            0.0,
        ));
        let report = heisenberg_check(&x, &p, &h, &force, params.m, params.hbar, 30).unwrap();
        assert!(report.max_r1 < 1e-12, "{report:?}");
        assert!(report.max_r2 < 1e-6, "{report:?}");
    }

    #[test]
    fn bohr_structure() {
        let params = unit_params();
        // FD data on a fine grid keeps the harmonic spacings within 1e-4.
        let grid = GridSpec::symmetric(10.0, 4096);
        let states =
            solve_states(&PotentialSpec::Harmonic { omega0: 1.0 }, &grid, 10, &params).unwrap();
        let data = transition_data(&states, &params);
        let report = bohr_check(&data);
        assert!(report.max_identity_dev < 1e-12);
        assert!(report.max_spacing_dev(1.0) < 1e-4, "{:?}", report.spacings);

        let quartic = quartic_data(10, 2048);
        let qreport = bohr_check(&quartic);
        assert!(
            qreport.spacings_strictly_increasing(),
            "{:?}",
            qreport.spacings
        );
    }

    #[test]
    fn canonical_pair_roundtrip_and_anchor() {
        for &(re, im, w) in &[(0.3, -0.8, 1.0), (1.0, 0.0, 2.7), (-0.2, 0.9, 0.4)] {
            let a = Complex64::new(re, im);
            let pair = CanonicalModePair::from_normal(a, w, 1.0);
            let back = pair.to_normal();
            assert!((back - a).norm() < 1e-14, "{back} vs {a}");
            assert_relative_eq!(pair.self_bracket(), 1.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn flat_spectrum_breaks_bracket_universality() {
        // A resonance with chi(w) = 2 pi / w has zpf-normalized coefficient
        // sqrt(hbar / 2 m w) -- the harmonic matrix element -- so the
        // single-mode bracket 2 m w |x|^2 equals hbar at every frequency.
        // Replacing the sqrt(hbar w / 2) spectral weight by its value at
        // w = 1 makes the same bracket scale like 1/w.
        let params = unit_params();
        let flat_weight = (params.hbar * 0.5f64).sqrt();
        let mut zpf_values = Vec::new();
        let mut flat_values = Vec::new();
        for &w in &[1.0, 2.0, 5.0] {
            let chi = Complex64::new(std::f64::consts::TAU / w, 0.0);
            let x = crate::response::narrowband_coefficient(chi, w, &params);
            zpf_values.push(2.0 * params.m * w * x.norm_sqr());
            let x_flat = chi * flat_weight * params.e / (std::f64::consts::TAU * params.m);
            flat_values.push(2.0 * params.m * w * x_flat.norm_sqr());
        }
        for v in &zpf_values {
            assert_relative_eq!(*v, params.hbar, max_relative = 1e-14);
        }
        assert_relative_eq!(flat_values[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(flat_values[1], 0.5, max_relative = 1e-14);
        assert_relative_eq!(flat_values[2], 0.2, max_relative = 1e-14);
    }
}
