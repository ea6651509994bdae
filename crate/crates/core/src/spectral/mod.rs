//! Stationary states of a 1D binding potential and the transition data
//! they induce.
//!
//! The eigenproblem `(-hbar^2/2m) psi'' + V psi = E psi` is discretized
//! with second-order central differences and hard walls, solved by
//! Sturm-sequence bisection plus inverse iteration, and reduced to the set
//! `{E_n, w_kn, x_nk, p_nk}`: transition frequencies from energy
//! differences, position elements by trapezoidal quadrature, momentum
//! elements by `p_nk = -i m w_kn x_nk`.

mod tridiag;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::mat::CMatrix;
use crate::potential::PotentialSpec;
use crate::response::OscillatorParams;

/// Spatial discretization: `n_points` interior points strictly between the
/// hard walls at `x_min` and `x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    /// Grid symmetric about the origin.
    pub fn symmetric(half_width: f64, n_points: usize) -> Self {
        Self {
            x_min: -half_width,
            x_max: half_width,
            n_points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x_min < self.x_max) {
            return Err(CoreError::Config(format!(
                "grid requires x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        if self.n_points < 64 {
            return Err(CoreError::Config(format!(
                "grid requires n_points >= 64, got {}",
                self.n_points
            )));
        }
        if self.n_points > (1 << 24) {
            return Err(CoreError::Config(format!(
                "grid.n_points = {} exceeds the supported maximum of 2^24",
                self.n_points
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points as f64 + 1.0)
    }

    /// Interior grid points.
    pub fn points(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.n_points)
            .map(|i| self.x_min + (i as f64 + 1.0) * h)
            .collect()
    }
}

/// Eigenpairs of the discretized stationary problem.
///
/// Wavefunctions are real, orthonormal under the trapezoidal inner product
/// `h * sum_i psi_n(i) psi_m(i)`, with the gauge fixed so the last
/// significant sample (the `x -> x_max` tail) is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryStateSet {
    pub grid: GridSpec,
    pub energies: Vec<f64>,
    /// `wavefunctions[n][i]` is `psi_n` at interior point `i`.
    pub wavefunctions: Vec<Vec<f64>>,
}

impl StationaryStateSet {
    pub fn n_states(&self) -> usize {
        self.energies.len()
    }

    /// Trapezoidal inner product `<psi_n | psi_m>`.
    pub fn overlap(&self, n: usize, m: usize) -> f64 {
        let h = self.grid.spacing();
        self.wavefunctions[n]
            .iter()
            .zip(&self.wavefunctions[m])
            .map(|(a, b)| a * b)
            .sum::<f64>()
            * h
    }
}

/// Solve the stationary eigenproblem for the lowest `n_states` states.
pub fn solve_states(
    pot: &PotentialSpec,
    grid: &GridSpec,
    n_states: usize,
    params: &OscillatorParams,
) -> Result<StationaryStateSet> {
    pot.validate()?;
    grid.validate()?;
    params.validate()?;
    if n_states == 0 {
        return Err(CoreError::Config("n_states must be >= 1".into()));
    }
    if n_states > grid.n_points / 4 {
        return Err(CoreError::Config(format!(
            "n_states = {} exceeds n_points / 4 = {}",
            n_states,
            grid.n_points / 4
        )));
    }

    let h = grid.spacing();
    let xs = grid.points();
    let kin = params.hbar * params.hbar / (2.0 * params.m * h * h);
    let diag: Vec<f64> = xs.iter().map(|&x| 2.0 * kin + pot.v(x, params)).collect();
    let off = vec![-kin; grid.n_points - 1];

    let pairs = tridiag::lowest_eigenpairs(&diag, &off, n_states)?;
    let mut energies = Vec::with_capacity(n_states);
    let mut wavefunctions = Vec::with_capacity(n_states);
    let inv_sqrt_h = 1.0 / h.sqrt();
    for (n, (e, mut v)) in pairs.into_iter().enumerate() {
        // Hard walls: the state must have died out at the boundary.
        let max = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        let edge = v[0].abs().max(v[v.len() - 1].abs());
        if edge > 1e-6 * max {
            return Err(CoreError::Domain(format!(
                "state {n} has boundary amplitude {:.2e} of its peak; enlarge the grid",
                edge / max
            )));
        }
        // Gauge: last significant sample positive, matching the sign of the
        // analytic bound-state tails.
        let last_sig = v
            .iter()
            .rposition(|x| x.abs() > 1e-8 * max)
            .unwrap_or(v.len() - 1);
        if v[last_sig] < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        // Euclidean-normalized -> trapezoid-normalized.
        for x in v.iter_mut() {
            *x *= inv_sqrt_h;
        }
        energies.push(e);
        wavefunctions.push(v);
    }
    for w in energies.windows(2) {
        if !(w[0] < w[1]) {
            return Err(CoreError::Config(
                "eigenvalues not strictly increasing; 1D bound states must be nondegenerate".into(),
            ));
        }
    }
    Ok(StationaryStateSet {
        grid: *grid,
        energies,
        wavefunctions,
    })
}

/// The characterizing set `{E_n, w_kn, x_nk, p_nk}` of a family of
/// stationary states.
///
/// Position elements are stored as a real symmetric matrix (real
/// wavefunctions with a fixed sign convention); transition frequencies and
/// momentum elements are derived on access, so the identities
/// `w_nk = -w_kn` and `p_nk = -i m w_kn x_nk` hold exactly by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionData {
    pub hbar: f64,
    pub m: f64,
    pub energies: Vec<f64>,
    /// Row-major `x[n * size + k]`.
    x: Vec<f64>,
}

impl TransitionData {
    pub fn size(&self) -> usize {
        self.energies.len()
    }

    /// Transition frequency `w_kn = (E_k - E_n) / hbar`.
    #[inline]
    pub fn omega_kn(&self, k: usize, n: usize) -> f64 {
        (self.energies[k] - self.energies[n]) / self.hbar
    }

    /// Position element `x_nk` (real by the gauge convention).
    #[inline]
    pub fn x_nk(&self, n: usize, k: usize) -> f64 {
        self.x[n * self.size() + k]
    }

    /// Momentum element `p_nk = -i m w_kn x_nk`.
    #[inline]
    pub fn p_nk(&self, n: usize, k: usize) -> Complex64 {
        Complex64::new(0.0, -self.m * self.omega_kn(k, n) * self.x_nk(n, k))
    }

    /// Exact transition data of the harmonic oscillator:
    /// `E_n = hbar w0 (n + 1/2)`, `x_{n,n+1} = sqrt((n+1) hbar / 2 m w0)`.
    pub fn harmonic_analytic(params: &OscillatorParams, n_states: usize) -> Self {
        let (hbar, m, w0) = (params.hbar, params.m, params.omega0);
        let energies: Vec<f64> = (0..n_states)
            .map(|n| hbar * w0 * (n as f64 + 0.5))
            .collect();
        let mut x = vec![0.0; n_states * n_states];
        for n in 0..n_states.saturating_sub(1) {
            let v = ((n as f64 + 1.0) * hbar / (2.0 * m * w0)).sqrt();
            x[n * n_states + n + 1] = v;
            x[(n + 1) * n_states + n] = v;
        }
        Self {
            hbar,
            m,
            energies,
            x,
        }
    }

    /// Truncated matrices `(X, P, H)` over the lowest `n_trunc` states.
    pub fn matrices(&self, n_trunc: usize) -> Result<(CMatrix, CMatrix, CMatrix)> {
        if n_trunc == 0 || n_trunc > self.size() {
            return Err(CoreError::Config(format!(
                "truncation {} outside available {} states",
                n_trunc,
                self.size()
            )));
        }
        let mut x = CMatrix::zeros(n_trunc, n_trunc);
        let mut p = CMatrix::zeros(n_trunc, n_trunc);
        for n in 0..n_trunc {
            for k in 0..n_trunc {
                x[(n, k)] = Complex64::new(self.x_nk(n, k), 0.0);
                p[(n, k)] = self.p_nk(n, k);
            }
        }
        let h = CMatrix::diag(&self.energies[..n_trunc]);
        Ok((x, p, h))
    }
}

/// Build transition data from solved states: `w_kn` from energy
/// differences, `x_nk` by trapezoidal quadrature of `psi_n x psi_k`.
pub fn transition_data(states: &StationaryStateSet, params: &OscillatorParams) -> TransitionData {
    let s = states.n_states();
    let h = states.grid.spacing();
    let xs = states.grid.points();
    let mut x = vec![0.0; s * s];
    for n in 0..s {
        for k in n..s {
            let mut acc = 0.0;
            for ((a, b), xi) in states.wavefunctions[n]
                .iter()
                .zip(&states.wavefunctions[k])
                .zip(&xs)
            {
                acc += a * b * xi;
            }
            let v = acc * h;
            x[n * s + k] = v;
            x[k * s + n] = v;
        }
    }
    TransitionData {
        hbar: params.hbar,
        m: params.m,
        energies: states.energies.clone(),
        x,
    }
}

/// Matrix elements of the conservative force, `F_nk = <psi_n| f(x) |psi_k>`.
pub fn force_matrix(
    states: &StationaryStateSet,
    pot: &PotentialSpec,
    params: &OscillatorParams,
) -> CMatrix {
    let s = states.n_states();
    let h = states.grid.spacing();
    let xs = states.grid.points();
    let f_vals: Vec<f64> = xs.iter().map(|&x| pot.force(x, params)).collect();
    let mut out = CMatrix::zeros(s, s);
    for n in 0..s {
        for k in n..s {
            let mut acc = 0.0;
            for ((a, b), f) in states.wavefunctions[n]
                .iter()
                .zip(&states.wavefunctions[k])
                .zip(&f_vals)
            {
                acc += a * b * f;
            }
            let v = Complex64::new(acc * h, 0.0);
            out[(n, k)] = v;
            out[(k, n)] = v;
        }
    }
    out
}

/// Serializable mirror of [`TransitionData`]: explicit frequency and
/// momentum matrices for external consumers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDocument {
    pub hbar: f64,
    pub m: f64,
    pub energies: Vec<f64>,
    /// `omega[k][n] = (E_k - E_n) / hbar`.
    pub omega: Vec<Vec<f64>>,
    pub x_re: Vec<Vec<f64>>,
    pub x_im: Vec<Vec<f64>>,
    pub p_re: Vec<Vec<f64>>,
    pub p_im: Vec<Vec<f64>>,
}

impl TransitionData {
    pub fn to_document(&self) -> TransitionDocument {
        let s = self.size();
        let mut omega = vec![vec![0.0; s]; s];
        let mut x_re = vec![vec![0.0; s]; s];
        let x_im = vec![vec![0.0; s]; s];
        let p_re = vec![vec![0.0; s]; s];
        let mut p_im = vec![vec![0.0; s]; s];
        for a in 0..s {
            for b in 0..s {
                omega[a][b] = self.omega_kn(a, b);
                x_re[a][b] = self.x_nk(a, b);
                p_im[a][b] = self.p_nk(a, b).im;
            }
        }
        TransitionDocument {
            hbar: self.hbar,
            m: self.m,
            energies: self.energies.clone(),
            omega,
            x_re,
            x_im,
            p_re,
            p_im,
        }
    }

    pub fn from_document(doc: &TransitionDocument) -> Result<Self> {
        let s = doc.energies.len();
        if doc.x_re.len() != s || doc.x_re.iter().any(|r| r.len() != s) {
            return Err(CoreError::Shape(
                "x_re must be square and match the energy count".into(),
            ));
        }
        if !(doc.hbar > 0.0 && doc.m > 0.0) {
            return Err(CoreError::Config("hbar and m must be positive".into()));
        }
        let mut x = vec![0.0; s * s];
        for n in 0..s {
            for k in 0..s {
                x[n * s + k] = doc.x_re[n][k];
            }
        }
        Ok(Self {
            hbar: doc.hbar,
            m: doc.m,
            energies: doc.energies.clone(),
            x,
        })
    }
}
