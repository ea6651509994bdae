//! Linear-response machinery.
//!
//! Everything here is analytic or spectral: Lorentzian susceptibilities and
//! their sums, the time-domain impulse response by inverse FFT, the
//! Kramers-Kronig reconstruction of the reactive part from the absorptive
//! part, the oscillator quality factor, and the stationary second moments
//! of a harmonically bound charge in a discrete bath (the quadrature oracle
//! the trajectory simulation is validated against).

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::zpf::SpectrumConfig;

/// Physical constants of the bound charge, in simulation units.
///
/// The damping rate is not stored: `gamma = tau * omega0^2` always holds
/// exactly by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub m: f64,
    pub e: f64,
    pub omega0: f64,
    pub tau: f64,
    pub hbar: f64,
}

impl OscillatorParams {
    pub fn new(m: f64, e: f64, omega0: f64, tau: f64, hbar: f64) -> Result<Self> {
        let p = Self {
            m,
            e,
            omega0,
            tau,
            hbar,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with `tau` chosen to give quality factor `q`.
    pub fn with_q(m: f64, e: f64, omega0: f64, q: f64, hbar: f64) -> Result<Self> {
        if !(q > 0.0) {
            return Err(CoreError::Config(format!("Q must be > 0, got {q}")));
        }
        Self::new(m, e, omega0, 1.0 / (q * omega0), hbar)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.omega0 > 0.0 && self.hbar > 0.0) {
            return Err(CoreError::Config(format!(
                "oscillator requires m, omega0, hbar > 0 (got m={}, omega0={}, hbar={})",
                self.m, self.omega0, self.hbar
            )));
        }
        if !(self.tau >= 0.0) {
            return Err(CoreError::Config(format!(
                "radiation-reaction time must be >= 0, got {}",
                self.tau
            )));
        }
        Ok(())
    }

    /// Radiative linewidth `gamma = tau * omega0^2`.
    pub fn gamma(&self) -> f64 {
        self.tau * self.omega0 * self.omega0
    }

    /// The oscillator's own single-resonance response.
    pub fn lorentzian(&self) -> LorentzianResponse {
        LorentzianResponse {
            omega_k: self.omega0,
            gamma_k: self.gamma(),
        }
    }
}

/// Quality factor `Q = omega0 / gamma = 1 / (tau omega0)`.
///
/// A lossless oscillator (`tau = 0`) returns `f64::INFINITY` as the
/// distinguished infinite-Q value.
pub fn q_factor(params: &OscillatorParams) -> f64 {
    if params.tau == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (params.tau * params.omega0)
    }
}

/// One resonance term of the susceptibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzianResponse {
    pub omega_k: f64,
    pub gamma_k: f64,
}

impl LorentzianResponse {
    /// `chi_k(w) = 1 / (w_k^2 - w^2 - i g_k w)`.
    pub fn chi(&self, omega: f64) -> Complex64 {
        1.0 / Complex64::new(
            self.omega_k * self.omega_k - omega * omega,
            -self.gamma_k * omega,
        )
    }

    /// Whether the term sits in the intended narrow-line regime.
    pub fn is_narrow(&self) -> bool {
        self.gamma_k < self.omega_k / 10.0
    }

    /// Causal impulse response `chi(t) = exp(-g t / 2) sin(wb t) / wb`
    /// with `wb = sqrt(w_k^2 - g^2/4)`; zero for `t < 0`.
    pub fn impulse_response(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let wb = (self.omega_k * self.omega_k - 0.25 * self.gamma_k * self.gamma_k).sqrt();
        (-0.5 * self.gamma_k * t).exp() * (wb * t).sin() / wb
    }
}

/// A sum of distinct Lorentzian resonances, sorted by frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSet {
    terms: Vec<LorentzianResponse>,
}

impl ResponseSet {
    pub fn new(mut terms: Vec<LorentzianResponse>) -> Result<Self> {
        for t in &terms {
            if !(t.omega_k > 0.0 && t.gamma_k > 0.0) {
                return Err(CoreError::Config(format!(
                    "resonance requires omega_k > 0 and gamma_k > 0, got ({}, {})",
                    t.omega_k, t.gamma_k
                )));
            }
        }
        terms.sort_by(|a, b| a.omega_k.total_cmp(&b.omega_k));
        if terms.windows(2).any(|w| w[0].omega_k == w[1].omega_k) {
            return Err(CoreError::Config(
                "resonance frequencies must be distinct".into(),
            ));
        }
        Ok(Self { terms })
    }

    pub fn single(omega_k: f64, gamma_k: f64) -> Result<Self> {
        Self::new(vec![LorentzianResponse { omega_k, gamma_k }])
    }

    pub fn terms(&self) -> &[LorentzianResponse] {
        &self.terms
    }

    pub fn omega_max(&self) -> f64 {
        self.terms.last().map(|t| t.omega_k).unwrap_or(0.0)
    }

    pub fn gamma_min(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.gamma_k)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Total susceptibility `chi(w) = sum_k chi_k(w)`.
pub fn chi(set: &ResponseSet, omega: f64) -> Complex64 {
    set.terms.iter().map(|t| t.chi(omega)).sum()
}

/// Time-domain impulse response computed by inverse discrete Fourier
/// transform of the sampled susceptibility.
#[derive(Debug, Clone)]
pub struct ImpulseResponse {
    /// Sample times, ascending, spanning `[-n/2, n/2) * dt`.
    pub t: Vec<f64>,
    /// Impulse response values at those times.
    pub chi: Vec<f64>,
    /// Largest imaginary residue of the transform, relative to the peak.
    pub imag_residual: f64,
}

impl ImpulseResponse {
    pub fn max_abs(&self) -> f64 {
        self.chi.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Largest |chi| over strictly negative times.
    pub fn max_abs_precausal(&self) -> f64 {
        self.t
            .iter()
            .zip(&self.chi)
            .filter(|(t, _)| **t < 0.0)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Inverse-Fourier the susceptibility onto a uniform time grid of `n`
/// points with spacing `dt`, centered on t = 0.
///
/// The grid must resolve the fastest resonance with at least 16 samples
/// per period and span at least ten decay times of the slowest one. The
/// sampled spectrum is cosine-tapered over its outer quarter band to
/// suppress truncation ringing.
pub fn chi_time(set: &ResponseSet, dt: f64, n: usize) -> Result<ImpulseResponse> {
    if set.terms.is_empty() {
        return Err(CoreError::Config("empty response set".into()));
    }
    if !(dt > 0.0) || n < 16 {
        return Err(CoreError::Config(format!(
            "time grid requires dt > 0 and n >= 16, got dt={dt}, n={n}"
        )));
    }
    let period = std::f64::consts::TAU / set.omega_max();
    if dt > period / 16.0 {
        return Err(CoreError::Resolution(format!(
            "dt = {dt} does not resolve the fastest resonance (need <= {})",
            period / 16.0
        )));
    }
    let span = n as f64 * dt;
    let needed = 10.0 / set.gamma_min();
    if span < needed {
        return Err(CoreError::Resolution(format!(
            "time span {span} shorter than ten decay times ({needed})"
        )));
    }

    let d_omega = std::f64::consts::TAU / (n as f64 * dt);
    let omega_nyq = std::f64::consts::PI / dt;
    let mut spectrum: Vec<Complex64> = (0..n)
        .map(|m| {
            let omega = if m <= n / 2 {
                m as f64 * d_omega
            } else {
                (m as f64 - n as f64) * d_omega
            };
            chi(set, omega) * edge_taper(omega.abs(), omega_nyq)
        })
        .collect();

    // chi(t_k) = (dw / 2pi) sum_m chi(w_m) e^{-i w_m t_k}: a forward DFT.
    FftPlanner::new().plan_fft_forward(n).process(&mut spectrum);
    let scale = d_omega / std::f64::consts::TAU;

    let half = n / 2;
    let mut t = Vec::with_capacity(n);
    let mut vals = Vec::with_capacity(n);
    for k in 0..n {
        // Unwrap the periodic output so times run from -T/2 to T/2.
        let idx = (k + half) % n;
        let time = (k as f64 - half as f64) * dt;
        t.push(time);
        vals.push(spectrum[idx].re * scale);
    }
    let peak = vals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let imag_peak = spectrum.iter().map(|v| v.im.abs()).fold(0.0, f64::max) * scale;
    Ok(ImpulseResponse {
        t,
        chi: vals,
        imag_residual: if peak > 0.0 { imag_peak / peak } else { 0.0 },
    })
}

/// Half-cosine roll-off over the outer quarter of the band.
fn edge_taper(omega_abs: f64, omega_nyq: f64) -> f64 {
    let start = 0.75 * omega_nyq;
    if omega_abs <= start {
        1.0
    } else {
        let u = ((omega_abs - start) / (omega_nyq - start)).min(1.0);
        0.5 * (1.0 + (std::f64::consts::PI * u).cos())
    }
}

/// Result of a Kramers-Kronig consistency run.
#[derive(Debug, Clone)]
pub struct KkScan {
    pub omega: Vec<f64>,
    pub re_chi: Vec<f64>,
    pub im_chi: Vec<f64>,
    pub re_chi_rec: Vec<f64>,
    /// max |re_chi_rec - re_chi| / max |re_chi|
    pub rel_residual: f64,
}

/// Reconstruct `Re chi` from samples of `Im chi` on a uniform positive
/// frequency grid via the principal-value Hilbert transform.
///
/// The absorptive part is extended to negative frequencies as an odd
/// function (crossing symmetry), the small gap around zero is filled by
/// linear interpolation, and the transform is evaluated by FFT on a
/// zero-padded, cosine-tapered array. Fails if `Im chi` has not decayed
/// below 1e-3 of its peak at the grid boundary.
pub fn kk_reconstruct(omega: &[f64], im_chi: &[f64]) -> Result<Vec<f64>> {
    if omega.len() != im_chi.len() || omega.len() < 16 {
        return Err(CoreError::Config(
            "kk reconstruction needs matching omega / im arrays with >= 16 points".into(),
        ));
    }
    let n = omega.len();
    let dw = omega[1] - omega[0];
    for w in omega.windows(2) {
        if ((w[1] - w[0]) - dw).abs() > 1e-9 * dw {
            return Err(CoreError::Config("omega grid must be uniform".into()));
        }
    }
    let peak = im_chi.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let leak = im_chi[0].abs().max(im_chi[n - 1].abs());
    if leak > 1e-3 * peak {
        return Err(CoreError::DomainTooNarrow(format!(
            "Im chi at the grid boundary is {:.2e} of its peak (limit 1e-3)",
            leak / peak
        )));
    }

    // Odd extension onto [-w_max, w_max]: gap points below omega[0] are
    // linearly interpolated through zero.
    let gap = (omega[0] / dw).round() as usize;
    let full_len = 2 * (n + gap) + 1;
    let mut ext = vec![0.0f64; full_len];
    let center = n + gap;
    for i in 0..n {
        ext[center + gap + i] = im_chi[i];
        // With a grid starting at w = 0 the first sample is its own odd
        // image; Im chi(0) = 0 for any causal response, so keep the zero.
        if gap + i > 0 {
            ext[center - gap - i] = -im_chi[i];
        }
    }
    for g in 1..gap {
        let frac = g as f64 / gap as f64;
        ext[center + g] = frac * im_chi[0];
        ext[center - g] = -frac * im_chi[0];
    }

    let hil = hilbert(&ext);
    Ok((0..n).map(|i| hil[center + gap + i]).collect())
}

/// Discrete Hilbert transform pair: returns `g` with
/// `g(x) = (1/pi) p.v. Int f(y) / (y - x) dy` for uniformly sampled `f`.
fn hilbert(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let padded = (4 * n).next_power_of_two();
    let mut buf: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); padded];
    // Center the data in the padded window to keep wrap-around leakage
    // away from the physical samples.
    let offset = (padded - n) / 2;
    for (i, &v) in f.iter().enumerate() {
        buf[offset + i] = Complex64::new(v, 0.0);
    }
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(padded).process(&mut buf);
    for (m, v) in buf.iter_mut().enumerate() {
        // Fourier multiplier of the kernel 1/(pi (y - x)) is i sign(u).
        let sign = if m == 0 || m == padded / 2 {
            0.0
        } else if m < padded / 2 {
            1.0
        } else {
            -1.0
        };
        *v *= Complex64::new(0.0, sign);
    }
    planner.plan_fft_inverse(padded).process(&mut buf);
    let scale = 1.0 / padded as f64;
    (0..n).map(|i| buf[offset + i].re * scale).collect()
}

/// Run the paired Kramers-Kronig check for a response set on a uniform
/// grid of `n` points over `[omega_min, omega_max]`.
pub fn kk_check(set: &ResponseSet, omega_min: f64, omega_max: f64, n: usize) -> Result<KkScan> {
    let dw = (omega_max - omega_min) / (n - 1) as f64;
    let omega: Vec<f64> = (0..n).map(|i| omega_min + i as f64 * dw).collect();
    let vals: Vec<Complex64> = omega.iter().map(|&w| chi(set, w)).collect();
    let re_chi: Vec<f64> = vals.iter().map(|v| v.re).collect();
    let im_chi: Vec<f64> = vals.iter().map(|v| v.im).collect();
    let re_chi_rec = kk_reconstruct(&omega, &im_chi)?;
    let re_peak = re_chi.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rel_residual = re_chi
        .iter()
        .zip(&re_chi_rec)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / re_peak;
    Ok(KkScan {
        omega,
        re_chi,
        im_chi,
        re_chi_rec,
        rel_residual,
    })
}

/// Stationary second moments of the driven oscillator over a discrete bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryMoments {
    pub x2: f64,
    pub p2: f64,
}

/// Quadrature of the stationary solution over the bath modes:
/// `<x^2> = (e/m)^2 sum_j (A_j^2 / 2) |chi(w_j)|^2` and
/// `<p^2> = m^2 (e/m)^2 sum_j (A_j^2 / 2) w_j^2 |chi(w_j)|^2`,
/// with `chi` the oscillator's own Lorentzian.
///
/// This is the closed-form oracle the trajectory ensemble is checked
/// against; it shares the bath grid with [`crate::zpf::sample_zpf`].
pub fn stationary_moments(
    params: &OscillatorParams,
    config: &SpectrumConfig,
) -> Result<StationaryMoments> {
    params.validate()?;
    config.validate()?;
    let gamma = params.gamma();
    if gamma <= 0.0 {
        return Err(CoreError::Config(
            "stationary moments require tau > 0 (finite linewidth)".into(),
        ));
    }
    let bins = config.bins();
    let inside = bins
        .iter()
        .filter(|(w, _)| (w - params.omega0).abs() <= gamma)
        .count();
    if inside < 20 {
        return Err(CoreError::Resolution(format!(
            "only {inside} bath modes inside one linewidth of the resonance (need >= 20)"
        )));
    }
    let line = params.lorentzian();
    let em = params.e / params.m;
    let mut x2 = 0.0;
    let mut p2 = 0.0;
    for (omega, dw) in bins {
        let a = 2.0 * crate::zpf::spectral_amplitude(omega, config.hbar) * dw.sqrt();
        let weight = 0.5 * a * a * line.chi(omega).norm_sqr();
        x2 += weight;
        p2 += omega * omega * weight;
    }
    Ok(StationaryMoments {
        x2: em * em * x2,
        p2: params.m * params.m * em * em * p2,
    })
}

/// Narrow-band-normalized response coefficient
/// `x_nk = (e / 2 pi m) sqrt(hbar |w_kn| / 2) chi_nk`.
pub fn narrowband_coefficient(
    chi_nk: Complex64,
    omega_kn: f64,
    params: &OscillatorParams,
) -> Complex64 {
    let norm =
        params.e / (std::f64::consts::TAU * params.m) * (params.hbar * omega_kn.abs() / 2.0).sqrt();
    chi_nk * norm
}

/// A fitted spectral peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakFit {
    pub center: f64,
    pub fwhm: f64,
    pub height: f64,
}

/// Least-squares Lorentzian fit around the tallest sample of `power`.
///
/// The model is `h / (1 + (2 (w - c) / G)^2) + b` fitted over a window of
/// `half_width` on either side of the peak; the linear parameters `(h, b)`
/// are solved exactly for each candidate `(c, G)` on a refining grid, which
/// keeps the fit deterministic.
pub fn fit_lorentzian_peak(omega: &[f64], power: &[f64], half_width: f64) -> Option<PeakFit> {
    if omega.len() != power.len() || omega.len() < 8 {
        return None;
    }
    let peak_idx = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?
        .0;
    let w0 = omega[peak_idx];
    let lo = omega.partition_point(|&w| w < w0 - half_width);
    let hi = omega.partition_point(|&w| w <= w0 + half_width);
    if hi - lo < 8 {
        return None;
    }
    let ws = &omega[lo..hi];
    let ps = &power[lo..hi];
    let dw = ws[1] - ws[0];

    let sse = |c: f64, g: f64| -> (f64, f64, f64) {
        // Linear LSQ in (h, b) for fixed shape.
        let mut s_ll = 0.0;
        let mut s_l = 0.0;
        let mut s_lp = 0.0;
        let mut s_p = 0.0;
        let n = ws.len() as f64;
        for (&w, &p) in ws.iter().zip(ps) {
            let u = 2.0 * (w - c) / g;
            let l = 1.0 / (1.0 + u * u);
            s_ll += l * l;
            s_l += l;
            s_lp += l * p;
            s_p += p;
        }
        let det = s_ll * n - s_l * s_l;
        if det.abs() < 1e-300 {
            return (f64::INFINITY, 0.0, 0.0);
        }
        let h = (s_lp * n - s_l * s_p) / det;
        let b = (s_p * s_ll - s_l * s_lp) / det;
        let mut err = 0.0;
        for (&w, &p) in ws.iter().zip(ps) {
            let u = 2.0 * (w - c) / g;
            let model = h / (1.0 + u * u) + b;
            err += (p - model) * (p - model);
        }
        (err, h, b)
    };

    let mut best = (f64::INFINITY, w0, half_width / 2.0, 0.0);
    let mut c_lo = w0 - 2.0 * dw;
    let mut c_hi = w0 + 2.0 * dw;
    let mut g_lo = (2.0 * dw).max(half_width / 100.0);
    let mut g_hi = half_width;
    for _pass in 0..4 {
        for ci in 0..17 {
            let c = c_lo + (c_hi - c_lo) * ci as f64 / 16.0;
            for gi in 0..17 {
                let g = g_lo * (g_hi / g_lo).powf(gi as f64 / 16.0);
                let (err, h, _) = sse(c, g);
                if err < best.0 {
                    best = (err, c, g, h);
                }
            }
        }
        let c_span = (c_hi - c_lo) / 8.0;
        c_lo = best.1 - c_span;
        c_hi = best.1 + c_span;
        let g_ratio = (g_hi / g_lo).powf(1.0 / 8.0);
        g_lo = best.2 / g_ratio;
        g_hi = best.2 * g_ratio;
    }
    Some(PeakFit {
        center: best.1,
        fwhm: best.2,
        height: best.3,
    })
}
