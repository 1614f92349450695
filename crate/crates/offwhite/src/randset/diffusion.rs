//! Degenerate diffusion on the torus `ℝ²/ℤ²` and its hit set.
//!
//! The process is driven by
//!
//! ```text
//! dy = dW₁ ,        dx = f(y) dt + g(y) dW₂ ,
//! ```
//!
//! with `g ≡ 0` on `[0, ¾]`: there `x` moves deterministically with slope
//! `f(y) ∈ [1, 1+ε]` on the hit band, while `y` is plain Brownian motion.
//! Both coordinates wrap mod 1. Lebesgue measure on the torus is invariant.
//!
//! The hit set is `{t : y(t) ∈ [¼, ½], circle-dist(x(t), K₁) ≤ ε_hit}` for a
//! Cantor-type target `K₁`; exact hits of a null set are invisible at finite
//! resolution, so detection dilates by `ε_hit` (default: the finest interval
//! length of `K₁`).

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cantor::{build_cantor, CantorSpec};
use super::rng::CounterRng;
use super::{ClosedSetSample, RandomSetError};

/// Periodic ramp: `S′ ∝ sin(4πy/3)` on `[0,¾]`, `S′ ∝ −3sin(4π(y−¾))` on
/// `[¾,1]`; the two pieces integrate to zero over the circle.
fn ramp(y: f64) -> f64 {
    let y = y.rem_euclid(1.0);
    if y <= 0.75 {
        3.0 / (4.0 * PI) * (1.0 - (4.0 * PI * y / 3.0).cos())
    } else {
        3.0 / (2.0 * PI) - 3.0 / (4.0 * PI) * (1.0 - (4.0 * PI * (y - 0.75)).cos())
    }
}

const RAMP_QUARTER: f64 = 3.0 / (8.0 * PI);
const RAMP_HALF: f64 = 9.0 / (8.0 * PI);

/// Drift and noise coefficients on the `y`-circle.
#[derive(Clone)]
pub enum Coefficients {
    /// `f(y) = 1 + ε·(S(y)−S(¼))/(S(½)−S(¼))`, `g(y) = η·sin²(4π(y−¾))` on
    /// `(¾,1)`. C¹ with `f(¼)=1`, `f(½)=1+ε`.
    Standard { eps_drift: f64, noise_amp: f64 },
    /// Caller-supplied pair; must satisfy the coefficient contract
    /// (`g ≡ 0` is allowed as a degenerate calibration override).
    Custom {
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        g: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl std::fmt::Debug for Coefficients {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficients::Standard { eps_drift, noise_amp } => fm
                .debug_struct("Standard")
                .field("eps_drift", eps_drift)
                .field("noise_amp", noise_amp)
                .finish(),
            Coefficients::Custom { .. } => fm.write_str("Custom"),
        }
    }
}

impl Coefficients {
    pub fn drift(&self, y: f64) -> f64 {
        match self {
            Coefficients::Standard { eps_drift, .. } => {
                1.0 + eps_drift * (ramp(y) - RAMP_QUARTER) / (RAMP_HALF - RAMP_QUARTER)
            }
            Coefficients::Custom { f, .. } => f(y),
        }
    }

    pub fn noise(&self, y: f64) -> f64 {
        match self {
            Coefficients::Standard { noise_amp, .. } => {
                let y = y.rem_euclid(1.0);
                if y > 0.75 {
                    let s = (4.0 * PI * (y - 0.75)).sin();
                    noise_amp * s * s
                } else {
                    0.0
                }
            }
            Coefficients::Custom { g, .. } => g(y),
        }
    }

    /// Drift slope at `y = ½`, the `α` of the barrier diagnostic.
    pub fn drift_slope_half(&self) -> f64 {
        let h = 1e-6;
        (self.drift(0.5 + h) - self.drift(0.5 - h)) / (2.0 * h)
    }

    /// Checks the coefficient contract on a dense grid: `f > 0`, `f′ ≥ 0` on
    /// `[0,¾]` with `f(¼) = 1`, `g = 0` on `[0,¾]`, `g ≥ 0` everywhere (and
    /// `g > 0` inside `(¾,1)` for the standard family).
    pub fn validate(&self) -> Result<(), RandomSetError> {
        let n = 4000;
        let fail = |msg: String| Err(RandomSetError::InvalidCoefficients(msg));
        let mut prev_f = self.drift(0.0);
        for i in 0..=n {
            let y = i as f64 / n as f64;
            let f = self.drift(y);
            let g = self.noise(y);
            if !(f > 0.0) {
                return fail(format!("f({y}) = {f} must be positive"));
            }
            if y <= 0.75 {
                if g.abs() > 1e-12 {
                    return fail(format!("g({y}) = {g} must vanish on [0, 3/4]"));
                }
                if i > 0 && f < prev_f - 1e-9 {
                    return fail(format!("f must be nondecreasing on [0, 3/4]; drops at {y}"));
                }
            } else if g < 0.0 {
                return fail(format!("g({y}) = {g} must be nonnegative"));
            }
            prev_f = f;
        }
        if (self.drift(0.25) - 1.0).abs() > 1e-6 {
            return fail(format!("f(1/4) = {} must equal 1", self.drift(0.25)));
        }
        if let Coefficients::Standard { noise_amp, eps_drift } = self {
            if !(*noise_amp > 0.0) {
                return fail("standard family needs noise_amp > 0".into());
            }
            if !(*eps_drift > 0.0 && *eps_drift < 2.0) {
                return fail(format!("eps_drift {eps_drift} must lie in (0, 2)"));
            }
            for i in 1..200 {
                let y = 0.75 + 0.25 * i as f64 / 200.0;
                if !(self.noise(y) > 0.0) {
                    return fail(format!("standard g({y}) must be positive inside (3/4, 1)"));
                }
            }
        }
        Ok(())
    }
}

/// Simulation parameters; serializable except for custom coefficient
/// closures (the standard family round-trips).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionParams {
    pub eps_drift: f64,
    pub noise_amp: f64,
    /// Base time step; refined ×16 whenever `y ∈ [0.2, 0.55]` when
    /// `adaptive` is set.
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    /// Hit dilation; defaults to the finest interval of `k1` when absent.
    pub hit_tolerance: Option<f64>,
    pub k1: CantorSpec,
    #[serde(default = "default_true")]
    pub adaptive: bool,
    #[serde(default)]
    pub x0: f64,
    #[serde(default = "default_y0")]
    pub y0: f64,
}

fn default_true() -> bool {
    true
}

fn default_y0() -> f64 {
    0.618033988749895
}

impl DiffusionParams {
    pub fn coefficients(&self) -> Coefficients {
        Coefficients::Standard { eps_drift: self.eps_drift, noise_amp: self.noise_amp }
    }

    pub fn hit_tolerance(&self) -> f64 {
        self.hit_tolerance.unwrap_or_else(|| self.k1.finest_length())
    }

    /// Finest step actually taken.
    pub fn fine_dt(&self) -> f64 {
        if self.adaptive {
            self.dt / 16.0
        } else {
            self.dt
        }
    }

    fn validate(&self) -> Result<(), RandomSetError> {
        if !(self.dt > 0.0 && self.horizon > 0.0 && self.dt < self.horizon) {
            return Err(RandomSetError::InvalidParameter(format!(
                "need 0 < dt < horizon, got dt={} horizon={}",
                self.dt, self.horizon
            )));
        }
        self.coefficients().validate()
    }
}

/// One sample of the process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusState {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<TorusState>,
    /// Final lifted (unwrapped) `y` displacement from `y0`.
    pub y_lifted_final: f64,
    pub params: DiffusionParams,
}

/// Refinement band around the hit band, with margin for excursions.
const REFINE_LO: f64 = 0.2;
const REFINE_HI: f64 = 0.55;
const REFINE_FACTOR: u32 = 16;

struct Walker {
    coeffs: Coefficients,
    rng: CounterRng,
    substep: u64,
    t: f64,
    x: f64,
    y: f64,
    y_lift: f64,
    dt: f64,
    adaptive: bool,
}

impl Walker {
    fn new(params: &DiffusionParams, path: u64, coeffs: Coefficients) -> Self {
        Self {
            coeffs,
            rng: CounterRng::new(params.seed, path),
            substep: 0,
            t: 0.0,
            x: params.x0,
            y: params.y0,
            y_lift: 0.0,
            dt: params.dt,
            adaptive: params.adaptive,
        }
    }

    #[inline]
    fn advance(&mut self) {
        let fine = self.adaptive && self.y >= REFINE_LO && self.y <= REFINE_HI;
        let h = if fine { self.dt / REFINE_FACTOR as f64 } else { self.dt };
        let sqrt_h = h.sqrt();
        let dy = sqrt_h * self.rng.normal(self.substep, 0);
        let g = self.coeffs.noise(self.y);
        let dx = self.coeffs.drift(self.y) * h
            + if g > 0.0 { g * sqrt_h * self.rng.normal(self.substep, 1) } else { 0.0 };
        self.substep += 1;
        self.t += h;
        self.y_lift += dy;
        self.y = (self.y + dy).rem_euclid(1.0);
        self.x = (self.x + dx).rem_euclid(1.0);
    }
}

/// Euler–Maruyama path of the diffusion; reproducible from the seed.
pub fn simulate_diffusion(params: &DiffusionParams) -> Result<Trajectory, RandomSetError> {
    simulate_diffusion_with(params, params.coefficients())
}

/// Same, with explicit (possibly custom) coefficients.
pub fn simulate_diffusion_with(
    params: &DiffusionParams,
    coeffs: Coefficients,
) -> Result<Trajectory, RandomSetError> {
    coeffs.validate()?;
    if !(params.dt > 0.0 && params.horizon > 0.0 && params.dt < params.horizon) {
        return Err(RandomSetError::InvalidParameter(format!(
            "need 0 < dt < horizon, got dt={} horizon={}",
            params.dt, params.horizon
        )));
    }
    let mut walker = Walker::new(params, 0, coeffs);
    let cap = (params.horizon / params.fine_dt()).ceil() as usize + 2;
    let mut states = Vec::with_capacity(cap.min(1 << 28));
    states.push(TorusState { t: walker.t, x: walker.x, y: walker.y });
    while walker.t < params.horizon {
        walker.advance();
        states.push(TorusState { t: walker.t, x: walker.x, y: walker.y });
    }
    Ok(Trajectory { states, y_lifted_final: walker.y_lift, params: params.clone() })
}

/// Terminal lifted-`y` displacements over many independent paths, in
/// parallel; order-insensitive by construction.
pub fn y_displacements(params: &DiffusionParams, n_paths: u64) -> Result<Vec<f64>, RandomSetError> {
    params.validate()?;
    (0..n_paths)
        .into_par_iter()
        .map(|path| {
            let mut walker = Walker::new(params, path, params.coefficients());
            while walker.t < params.horizon {
                walker.advance();
            }
            Ok(walker.y_lift)
        })
        .collect()
}

/// Occupation counts of `(x, y)` over a `bins × bins` partition of the
/// torus, one count per completed step.
pub fn occupation_histogram(
    params: &DiffusionParams,
    bins: usize,
) -> Result<Vec<u64>, RandomSetError> {
    params.validate()?;
    let mut walker = Walker::new(params, 0, params.coefficients());
    let mut hist = vec![0u64; bins * bins];
    while walker.t < params.horizon {
        walker.advance();
        let ix = ((walker.x * bins as f64) as usize).min(bins - 1);
        let iy = ((walker.y * bins as f64) as usize).min(bins - 1);
        hist[ix * bins + iy] += 1;
    }
    Ok(hist)
}

/// Circle distance from `x` to the closed set given by sorted intervals.
pub fn circle_distance(x: f64, intervals: &[(f64, f64)]) -> f64 {
    if intervals.is_empty() {
        return f64::INFINITY;
    }
    let linear = |x: f64| -> f64 {
        let mut best = f64::INFINITY;
        // binary search for the first interval starting after x
        let idx = intervals.partition_point(|&(s, _)| s <= x);
        if idx < intervals.len() {
            best = best.min(intervals[idx].0 - x);
        }
        if idx > 0 {
            let (s, t) = intervals[idx - 1];
            if x <= t {
                return 0.0;
            }
            best = best.min(x - t);
            let _ = s;
        }
        best
    };
    let d = linear(x).min(linear(x + 1.0)).min(linear(x - 1.0));
    d.max(0.0)
}

/// Extracts the hit set `{t : y ∈ [¼,½], circle-dist(x, K₁) ≤ ε_hit}` from a
/// trajectory, clustering consecutive hit samples at the stated resolution.
pub fn extract_hit_set(
    traj: &Trajectory,
    params: &DiffusionParams,
) -> Result<ClosedSetSample, RandomSetError> {
    let k1 = build_cantor(&params.k1)?;
    if k1.intervals().is_empty() {
        return Err(RandomSetError::EmptySet);
    }
    let eps_hit = params.hit_tolerance();
    let resolution = params.fine_dt();
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    let mut current: Option<(f64, f64)> = None;
    for s in &traj.states {
        let hit = s.y >= 0.25 && s.y <= 0.5 && circle_distance(s.x, k1.intervals()) <= eps_hit;
        if hit {
            current = match current {
                Some((a, b)) if s.t - b <= 1.5 * resolution => Some((a, s.t)),
                Some(done) => {
                    clusters.push(done);
                    Some((s.t, s.t))
                }
                None => Some((s.t, s.t)),
            };
        }
    }
    if let Some(done) = current {
        clusters.push(done);
    }
    Ok(ClosedSetSample::new(resolution, clusters, traj.params.horizon))
}

/// Fraction of hit samples whose `y` lies within `√dt` of the band edges
/// `{¼, ½}` — the boundary-avoidance diagnostic.
pub fn boundary_fraction(traj: &Trajectory, params: &DiffusionParams) -> Result<f64, RandomSetError> {
    let k1 = build_cantor(&params.k1)?;
    let eps_hit = params.hit_tolerance();
    let margin = params.dt.sqrt();
    let mut hits = 0u64;
    let mut near = 0u64;
    for s in &traj.states {
        if s.y >= 0.25 && s.y <= 0.5 && circle_distance(s.x, k1.intervals()) <= eps_hit {
            hits += 1;
            if (s.y - 0.25).abs() <= margin || (s.y - 0.5).abs() <= margin {
                near += 1;
            }
        }
    }
    if hits == 0 {
        return Err(RandomSetError::EmptySet);
    }
    Ok(near as f64 / hits as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn small_params() -> DiffusionParams {
        DiffusionParams {
            eps_drift: 0.1,
            noise_amp: 1.0,
            dt: 1e-3,
            horizon: 2.0,
            seed: 11,
            hit_tolerance: None,
            k1: CantorSpec::new(1.0 / 9.0, 3, true).unwrap(),
            adaptive: true,
            x0: 0.3141592653589793,
            y0: 0.618033988749895,
        }
    }

    #[test]
    fn standard_coefficients_meet_the_contract() {
        let c = Coefficients::Standard { eps_drift: 0.1, noise_amp: 1.0 };
        c.validate().unwrap();
        assert_relative_eq!(c.drift(0.25), 1.0, epsilon = 1e-12);
        assert_relative_eq!(c.drift(0.5), 1.1, epsilon = 1e-12);
        assert_eq!(c.noise(0.3), 0.0);
        assert!(c.noise(0.8) > 0.0);
        // drift slope at 1/2: eps * 2π/√3
        assert_relative_eq!(
            c.drift_slope_half(),
            0.1 * 2.0 * PI / 3.0f64.sqrt(),
            max_relative = 1e-5
        );
    }

    #[test]
    fn degenerate_override_advances_x_linearly() {
        let coeffs = Coefficients::Custom {
            f: Arc::new(|_| 1.0),
            g: Arc::new(|_| 0.0),
        };
        let mut p = small_params();
        p.adaptive = false;
        p.horizon = 0.5;
        let traj = simulate_diffusion_with(&p, coeffs).unwrap();
        for s in &traj.states {
            assert_relative_eq!(s.x, (p.x0 + s.t).rem_euclid(1.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let p = small_params();
        let a = simulate_diffusion(&p).unwrap();
        let b = simulate_diffusion(&p).unwrap();
        assert_eq!(a.states.len(), b.states.len());
        for (s, t) in a.states.iter().zip(&b.states) {
            assert_eq!(s, t);
        }
    }

    #[test]
    fn lifted_y_variance_near_t() {
        let mut p = small_params();
        p.horizon = 1.0;
        p.adaptive = false;
        p.dt = 1e-2;
        let disp = y_displacements(&p, 4000).unwrap();
        let mean: f64 = disp.iter().sum::<f64>() / disp.len() as f64;
        let var: f64 = disp.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
            / disp.len() as f64;
        assert!((var - 1.0).abs() < 0.08, "var {var}");
    }

    #[test]
    fn parallel_aggregation_is_order_insensitive() {
        let mut p = small_params();
        p.horizon = 0.2;
        p.adaptive = false;
        p.dt = 1e-2;
        let a = y_displacements(&p, 64).unwrap();
        let mut b = y_displacements(&p, 64).unwrap();
        // shuffled merge must reproduce the same multiset
        b.reverse();
        let mut a_sorted = a.clone();
        let mut b_sorted = b.clone();
        a_sorted.sort_by(f64::total_cmp);
        b_sorted.sort_by(f64::total_cmp);
        assert_eq!(a_sorted, b_sorted);
        let sum_fwd: f64 = a.iter().sum();
        let sum_rev: f64 = b.iter().rev().sum();
        assert_relative_eq!(sum_fwd, sum_rev, max_relative = 1e-12);
    }

    #[test]
    fn hits_move_with_in_band_slope() {
        let p = small_params();
        let traj = simulate_diffusion(&p).unwrap();
        let c = p.coefficients();
        let (f_lo, f_hi) = (c.drift(0.25), c.drift(0.5));
        let k1 = build_cantor(&p.k1).unwrap();
        let eps_hit = p.hit_tolerance();
        let mut checked = 0;
        for w in traj.states.windows(2) {
            let s = &w[0];
            if s.y >= 0.25 && s.y <= 0.5 && circle_distance(s.x, k1.intervals()) <= eps_hit {
                let h = w[1].t - s.t;
                let inc = (w[1].x - s.x).rem_euclid(1.0) / h;
                assert!(
                    inc >= f_lo - 1e-6 && inc <= f_hi + 1e-6,
                    "slope {inc} outside [{f_lo}, {f_hi}]"
                );
                checked += 1;
            }
        }
        assert!(checked > 10, "only {checked} in-band hit steps sampled");
    }

    #[test]
    fn full_circle_target_occupies_roughly_quarter() {
        // K1 = [0,1] (depth 0): hit set is simply { y in [1/4,1/2] }
        let mut p = small_params();
        p.k1 = CantorSpec::new(0.3, 0, true).unwrap();
        p.hit_tolerance = Some(1e-9);
        p.horizon = 50.0;
        p.dt = 1e-3;
        p.adaptive = false;
        let traj = simulate_diffusion(&p).unwrap();
        let hit = extract_hit_set(&traj, &p).unwrap();
        let frac = hit.total_length() / p.horizon;
        assert!((frac - 0.25).abs() < 0.05, "occupation fraction {frac}");
    }

    #[test]
    fn circle_distance_handles_wraparound() {
        let ivs = [(0.0, 0.1), (0.9, 1.0)];
        assert_eq!(circle_distance(0.05, &ivs), 0.0);
        assert_relative_eq!(circle_distance(0.5, &ivs), 0.4, epsilon = 1e-12);
        assert_relative_eq!(circle_distance(0.89, &ivs), 0.01, epsilon = 1e-10);
        // wrap: distance from 0.95 to the set is zero; from 0.12 it is 0.02
        assert_eq!(circle_distance(0.95, &ivs), 0.0);
        assert_relative_eq!(circle_distance(0.12, &ivs), 0.02, epsilon = 1e-10);
    }

    #[test]
    fn boundary_fraction_shrinks_with_dt() {
        let mut coarse = small_params();
        coarse.k1 = CantorSpec::new(0.3, 0, true).unwrap();
        coarse.hit_tolerance = Some(1e-9);
        coarse.horizon = 20.0;
        coarse.adaptive = false;
        coarse.dt = 4e-3;
        let mut fine = coarse.clone();
        fine.dt = 2.5e-4;
        let fa = boundary_fraction(&simulate_diffusion(&coarse).unwrap(), &coarse).unwrap();
        let fb = boundary_fraction(&simulate_diffusion(&fine).unwrap(), &fine).unwrap();
        assert!(fb < fa, "boundary fraction must shrink: {fa} -> {fb}");
    }
}
