//! Grid functions and the ν-norm Fourier engine.
//!
//! A [`GridFunction`] samples a real function at the midpoints of a uniform
//! time grid. Its spectrum approximates the unitary continuous transform
//! `f̂(λ) = (2π)^{-1/2} ∫ f(t) e^{-iλt} dt` on the one-sided frequency grid
//! `λ_k = 2πk/(t₁−t₀)`, `k = 0..N/2`.
//!
//! Two quadrature conventions are exposed:
//!
//! * [`fourier`] — midpoint rule. Discrete Plancherel is exact: the two-sided
//!   energy equals `Σ|f|²Δt` identically, which makes flat-density norms exact
//!   invariants under sign flips.
//! * [`fourier_step`] — exact transform of the piecewise-constant extension
//!   of the samples (a `sinc` factor per bin). For indicator functions whose
//!   jumps sit on cell boundaries this is the exact continuous transform, and
//!   is the pipeline the closed-form comb formula is checked against.
//!
//! The ν-norm integrates the one-sided spectrum against a density; real
//! functions carry symmetric spectra, so by default the one-sided integral is
//! doubled ([`SpectrumMode::SymmetricEnergy`]). The same constant is used by
//! every module that touches the ν-metric.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::SpectralDensity;

pub const INV_SQRT_2PI: f64 = 0.3989422804014327;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("sign pattern with n={n} needs at least {needed} samples, grid has {have}")]
    UnderResolved { n: u32, needed: usize, have: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

/// How the one-sided spectral integral accounts for the negative half-line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumMode {
    /// `2·∫₀^∞ |f̂|² w dλ` — both half-lines of a real function's spectrum.
    #[default]
    SymmetricEnergy,
    /// `∫₀^∞ |f̂|² w dλ` — the bare one-sided integral.
    OneSided,
}

impl SpectrumMode {
    pub fn factor(self) -> f64 {
        match self {
            SpectrumMode::SymmetricEnergy => 2.0,
            SpectrumMode::OneSided => 1.0,
        }
    }
}

/// Quadrature convention carried by a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformConvention {
    /// Midpoint-rule estimate of the unitary transform.
    Midpoint,
    /// Exact unitary transform of the piecewise-constant extension.
    StepExact,
}

/// Real function sampled at midpoints of a uniform grid on `[t0, t1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    t0: f64,
    t1: f64,
    values: Vec<f64>,
}

/// JSON sidecar for the raw binary export.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridSidecar {
    pub t0: f64,
    pub t1: f64,
    pub n_samples: usize,
}

impl GridFunction {
    pub fn new(t0: f64, t1: f64, values: Vec<f64>) -> Result<Self, GridError> {
        let n = values.len();
        if !(t0 < t1) || !t0.is_finite() || !t1.is_finite() {
            return Err(GridError::InvalidGrid(format!("need t0 < t1, got [{t0}, {t1}]")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(GridError::InvalidGrid(format!(
                "n_samples must be a power of two >= 2, got {n}"
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GridError::InvalidGrid("samples must be finite".into()));
        }
        Ok(Self { t0, t1, values })
    }

    /// Samples `f` at the cell midpoints.
    pub fn from_fn(
        t0: f64,
        t1: f64,
        n_samples: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self, GridError> {
        let dt = (t1 - t0) / n_samples as f64;
        let values = (0..n_samples).map(|j| f(t0 + (j as f64 + 0.5) * dt)).collect();
        Self::new(t0, t1, values)
    }

    pub fn zeros(t0: f64, t1: f64, n_samples: usize) -> Result<Self, GridError> {
        Self::new(t0, t1, vec![0.0; n_samples])
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    pub fn dt(&self) -> f64 {
        (self.t1 - self.t0) / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Midpoint of cell `j`.
    pub fn t_at(&self, j: usize) -> f64 {
        self.t0 + (j as f64 + 0.5) * self.dt()
    }

    /// Midpoint-Riemann L²(dt) norm.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.dt()).sqrt()
    }

    /// Mean value over the window.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// CSV export, one `t,value` row per sample.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> Result<(), GridError> {
        writeln!(w, "t,value")?;
        for j in 0..self.n_samples() {
            writeln!(w, "{},{}", self.t_at(j), self.values[j])?;
        }
        Ok(())
    }

    pub fn from_csv<R: std::io::BufRead>(r: R, t0: f64, t1: f64) -> Result<Self, GridError> {
        let mut values = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            if i == 0 && line.starts_with("t,") {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let v = line
                .split(',')
                .nth(1)
                .ok_or_else(|| GridError::Parse(format!("row {i}: missing value column")))?;
            values.push(
                v.trim()
                    .parse::<f64>()
                    .map_err(|e| GridError::Parse(format!("row {i}: {e}")))?,
            );
        }
        Self::new(t0, t1, values)
    }

    /// Raw little-endian f64 samples plus a JSON sidecar.
    pub fn to_raw(&self) -> (Vec<u8>, GridSidecar) {
        let mut buf = Vec::with_capacity(8 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        (buf, GridSidecar { t0: self.t0, t1: self.t1, n_samples: self.values.len() })
    }

    pub fn from_raw(buf: &[u8], sidecar: &GridSidecar) -> Result<Self, GridError> {
        if buf.len() != 8 * sidecar.n_samples {
            return Err(GridError::Parse(format!(
                "raw buffer holds {} bytes, sidecar declares {} samples",
                buf.len(),
                sidecar.n_samples
            )));
        }
        let values = buf
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Self::new(sidecar.t0, sidecar.t1, values)
    }
}

/// One-sided spectrum of a real grid function.
#[derive(Debug, Clone)]
pub struct FrequencySpectrum {
    /// Frequencies `λ_k = 2πk/(t1−t0)`, `k = 0..N/2`.
    pub lambdas: Vec<f64>,
    /// `|f̂(λ_k)|²` under the unitary convention.
    pub magnitudes_sq: Vec<f64>,
    /// Complex values `f̂(λ_k)` (phase included).
    pub values: Vec<Complex64>,
    pub convention: TransformConvention,
    dlam: f64,
    dt: f64,
}

impl FrequencySpectrum {
    pub fn dlam(&self) -> f64 {
        self.dlam
    }

    /// Grid Nyquist frequency `π/Δt`.
    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dt
    }

    /// One-sided quadrature weights: ½ at DC and Nyquist, 1 inside.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.lambdas.len() {
            0.5
        } else {
            1.0
        }
    }

    /// `mode · Σ wt_k |f̂(λ_k)|² g(λ_k) Δλ`.
    pub fn integrate_weighted(&self, mode: SpectrumMode, g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for k in 0..self.lambdas.len() {
            acc += self.weight(k) * self.magnitudes_sq[k] * g(self.lambdas[k]);
        }
        mode.factor() * acc * self.dlam
    }

    /// Two-sided spectral energy; equals `Σ|f|²Δt` exactly for the midpoint
    /// convention.
    pub fn plancherel_energy(&self) -> f64 {
        self.integrate_weighted(SpectrumMode::SymmetricEnergy, |_| 1.0)
    }
}

fn dft(f: &GridFunction) -> Vec<Complex64> {
    let n = f.n_samples();
    let mut buf: Vec<Complex64> =
        f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.truncate(n / 2 + 1);
    buf
}

fn spectrum_with(f: &GridFunction, convention: TransformConvention) -> FrequencySpectrum {
    let n = f.n_samples();
    let dt = f.dt();
    let span = f.t1() - f.t0();
    let dlam = 2.0 * std::f64::consts::PI / span;
    let bins = dft(f);
    let mut lambdas = Vec::with_capacity(n / 2 + 1);
    let mut values = Vec::with_capacity(n / 2 + 1);
    let mut magnitudes_sq = Vec::with_capacity(n / 2 + 1);
    for (k, x) in bins.iter().enumerate() {
        let lam = dlam * k as f64;
        // phase anchors the transform at absolute time t0 + dt/2
        let phase = Complex64::from_polar(1.0, -lam * (f.t0() + 0.5 * dt));
        let mut v = INV_SQRT_2PI * dt * x * phase;
        if convention == TransformConvention::StepExact {
            let u = 0.5 * lam * dt;
            let sinc = if u.abs() < 1e-12 { 1.0 } else { u.sin() / u };
            v *= sinc;
        }
        lambdas.push(lam);
        magnitudes_sq.push(v.norm_sqr());
        values.push(v);
    }
    FrequencySpectrum { lambdas, magnitudes_sq, values, convention, dlam, dt }
}

/// Midpoint-rule spectrum; discrete Plancherel holds exactly.
pub fn fourier(f: &GridFunction) -> FrequencySpectrum {
    spectrum_with(f, TransformConvention::Midpoint)
}

/// Exact spectrum of the piecewise-constant extension of the samples.
pub fn fourier_step(f: &GridFunction) -> FrequencySpectrum {
    spectrum_with(f, TransformConvention::StepExact)
}

/// Squared ν-norm `∫ |f̂|² w dλ` at grid resolution.
pub fn nu_norm_sq_mode(f: &GridFunction, d: &SpectralDensity, mode: SpectrumMode) -> f64 {
    fourier(f).integrate_weighted(mode, |lam| d.w(lam))
}

/// ν-norm in the default symmetric-energy convention.
pub fn nu_norm(f: &GridFunction, d: &SpectralDensity) -> f64 {
    nu_norm_sq_mode(f, d, SpectrumMode::SymmetricEnergy).sqrt()
}

/// Bound on the spectral mass discarded beyond the grid Nyquist:
/// `(sup sampled w) · (two-sided L² energy)`.
pub fn truncation_tail_bound(f: &GridFunction, d: &SpectralDensity) -> f64 {
    let spec = fourier(f);
    let sup_w = spec.lambdas.iter().map(|&l| d.w(l)).fold(0.0, f64::max);
    sup_w * f.l2_norm().powi(2)
}

/// Pointwise product with `sgn sin(πnt)`; `sgn(0) = +1`.
///
/// The grid must resolve the sign pattern: `n_samples ≥ 8n`.
pub fn sign_flip(f: &GridFunction, n: u32) -> Result<GridFunction, GridError> {
    if n < 1 {
        return Err(GridError::InvalidGrid("sign pattern needs n >= 1".into()));
    }
    let needed = 8 * n as usize;
    if f.n_samples() < needed {
        return Err(GridError::UnderResolved { n, needed, have: f.n_samples() });
    }
    let mut out = f.clone();
    for j in 0..out.n_samples() {
        let s = (std::f64::consts::PI * n as f64 * out.t_at(j)).sin();
        if s < 0.0 {
            out.values[j] = -out.values[j];
        }
    }
    Ok(out)
}

/// Norm sequence `‖f·sgn sin(πnt)‖_ν` for each requested `n`.
///
/// No convergence is asserted; the sequence is simply measured.
pub fn flip_decay_experiment(
    f: &GridFunction,
    d: &SpectralDensity,
    ns: &[u32],
) -> Result<Vec<(u32, f64)>, GridError> {
    ns.iter()
        .map(|&n| Ok((n, nu_norm(&sign_flip(f, n)?, d))))
        .collect()
}

/// Closed-form `|f̂_n(λ)|` for the normalized equidistant comb
/// `f_n = (1/ε)·1_{E_n}`, `E_n` the union of `n` intervals of length `ε/n`
/// centered at `(k+½)/n`:
///
/// ```text
/// |f̂_n(λ)| = (2π)^{-1/2} · (2/(ελ)) · |sin(λε/2n)| · |sin(λ/2) / sin(λ/2n)| .
/// ```
///
/// Removable singularities (λ = 0 and the lattice λ ∈ 2πnℤ) are handled by
/// their limits.
pub fn fhat_comb_closed_form(n: u32, eps: f64, lam: f64) -> f64 {
    assert!(n >= 1, "comb needs n >= 1");
    assert!(eps > 0.0 && eps <= 1.0, "comb needs 0 < eps <= 1");
    let nf = n as f64;
    if lam.abs() < 1e-12 {
        return INV_SQRT_2PI; // unit total integral
    }
    let envelope = 2.0 * (lam * eps / (2.0 * nf)).sin().abs() / (eps * lam.abs());
    // Dirichlet ratio |sin(λ/2)/sin(λ/2n)| via range reduction around the
    // zeros of the denominator
    let u = lam / (2.0 * nf);
    let m = (u / std::f64::consts::PI).round();
    let delta = u - m * std::f64::consts::PI;
    let ratio = if delta.abs() < 1e-14 {
        nf
    } else {
        ((nf * delta).sin() / delta.sin()).abs()
    };
    INV_SQRT_2PI * envelope * ratio
}

/// Grid window aligning the comb `E_n` (with `ε = eps_num/eps_den`) on cell
/// boundaries, so [`fourier_step`] is the exact transform of `(1/ε)·1_{E_n}`.
///
/// Interval endpoints are `((2k+1)·q ± p)/(2nq)`; the grid spacing divides
/// `1/(2nq)`, hence every endpoint is a cell boundary.
pub fn comb_grid(
    n: u32,
    eps_num: u32,
    eps_den: u32,
    min_samples: usize,
) -> Result<GridFunction, GridError> {
    if eps_num == 0 || eps_den == 0 || eps_num > eps_den {
        return Err(GridError::InvalidGrid(format!(
            "need 0 < eps_num/eps_den <= 1, got {eps_num}/{eps_den}"
        )));
    }
    if n == 0 {
        return Err(GridError::InvalidGrid("comb needs n >= 1".into()));
    }
    let base = 2u64 * n as u64 * eps_den as u64; // cells per unit, before refinement
    let mut n_samples: u64 = min_samples.next_power_of_two().max(2) as u64;
    while n_samples < base {
        n_samples *= 2;
    }
    // largest refinement m with base*m <= n_samples, then window [0, N/(base*m)]
    let m = n_samples / base;
    let scale = base * m; // cells per unit time
    let t1 = n_samples as f64 / scale as f64; // >= 1
    let eps = eps_num as f64 / eps_den as f64;
    let height = 1.0 / eps;
    let mut values = vec![0.0f64; n_samples as usize];
    for k in 0..n as u64 {
        let q = eps_den as u64;
        let p = eps_num as u64;
        let lo = ((2 * k + 1) * q - p) * m; // endpoint * scale
        let hi = ((2 * k + 1) * q + p) * m;
        for v in values[lo as usize..hi as usize].iter_mut() {
            *v = height;
        }
    }
    GridFunction::new(0.0, t1, values)
}
