//! Barrier function diagnostic for endpoint avoidance.
//!
//! In local coordinates `z = y − ½`, `t = ½ − x` the generator acts as
//! `L = ½ ∂²/∂z² − (1 + αz + O(z²)) ∂/∂t` with `α` the drift slope at `½`.
//! The barrier
//!
//! ```text
//! h(z,t) = t^{-1/2} · exp( −z²/2t + a z³/t + a z ) ,   h = 0 for t ≤ 0 ,
//! ```
//!
//! at `a = −α/4` satisfies `√t·|Lh| = O(1)` near the origin, which is what
//! makes the endpoint set polar. The residual here applies `L` (truncated
//! after the `αz` term) by central finite differences and reports the sup of
//! `√t·|Lh|` over a `(z, t)` grid.

use serde::{Deserialize, Serialize};

use super::RandomSetError;

/// Evaluation point in local coordinates with the cubic-correction
/// parameter `a` (defaults to `−α/4`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierPoint {
    pub z: f64,
    pub t: f64,
    pub a: f64,
}

/// `√t · h(z, t)` — the exponential factor alone. Exactly 1 at `z = 0`.
pub fn scaled_barrier(pt: &BarrierPoint) -> f64 {
    if pt.t <= 0.0 {
        return 0.0;
    }
    let BarrierPoint { z, t, a } = *pt;
    (-z * z / (2.0 * t) + a * z * z * z / t + a * z).exp()
}

/// The barrier value `h(z, t)`; zero for `t ≤ 0`.
pub fn barrier_h(pt: &BarrierPoint) -> f64 {
    if pt.t <= 0.0 {
        return 0.0;
    }
    scaled_barrier(pt) / pt.t.sqrt()
}

/// Central-difference application of `L = ½∂²/∂z² − (1+αz)∂/∂t` to `h`.
fn lh_fd(z: f64, t: f64, a: f64, alpha: f64, rel: f64) -> f64 {
    let dz = rel * t.sqrt();
    let dt = rel * t;
    let h = |z: f64, t: f64| barrier_h(&BarrierPoint { z, t, a });
    let h_zz = (h(z + dz, t) - 2.0 * h(z, t) + h(z - dz, t)) / (dz * dz);
    let h_t = (h(z, t + dt) - h(z, t - dt)) / (2.0 * dt);
    0.5 * h_zz - (1.0 + alpha * z) * h_t
}

/// Residual report: `sup √t·|Lh|` over the grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierResidual {
    pub sup: f64,
    pub argmax: (f64, f64),
    pub grid: (usize, usize),
    pub fd_rel: f64,
}

/// Scans `|z| ≤ z_max`, `t ∈ [t_lo, t_hi]` (log-spaced in `t`) and reports
/// `sup √t·|Lh|` under central differences with relative step `fd_rel`.
pub fn barrier_residual(
    alpha: f64,
    z_max: f64,
    t_lo: f64,
    t_hi: f64,
    nz: usize,
    nt: usize,
    fd_rel: f64,
) -> Result<BarrierResidual, RandomSetError> {
    if !(t_lo > 0.0 && t_lo < t_hi) || nz < 2 || nt < 2 {
        return Err(RandomSetError::InvalidParameter(
            "barrier grid needs 0 < t_lo < t_hi and at least 2x2 points".into(),
        ));
    }
    if !(fd_rel > 0.0 && fd_rel < 0.1) {
        return Err(RandomSetError::InvalidParameter(format!(
            "fd_rel {fd_rel} out of (0, 0.1)"
        )));
    }
    let a = -alpha / 4.0;
    let mut sup = 0.0f64;
    let mut argmax = (0.0, t_lo);
    for i in 0..nt {
        let t = t_lo * (t_hi / t_lo).powf(i as f64 / (nt - 1) as f64);
        for jz in 0..nz {
            let z = -z_max + 2.0 * z_max * jz as f64 / (nz - 1) as f64;
            let val = t.sqrt() * lh_fd(z, t, a, alpha, fd_rel).abs();
            if val > sup {
                sup = val;
                argmax = (z, t);
            }
        }
    }
    Ok(BarrierResidual { sup, argmax, grid: (nz, nt), fd_rel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn scaled_barrier_is_exactly_one_on_the_axis() {
        for t in [1e-4, 1e-3, 0.017, 0.3, 1.0] {
            let v = scaled_barrier(&BarrierPoint { z: 0.0, t, a: -0.09 });
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn barrier_vanishes_for_nonpositive_t() {
        for t in [0.0, -1e-9, -3.0] {
            assert_eq!(barrier_h(&BarrierPoint { z: 0.2, t, a: -0.1 }), 0.0);
        }
    }

    #[test]
    fn residual_is_bounded_and_fd_stable() {
        let alpha = 0.3627; // drift slope for eps = 0.1
        let z_max = 1.0 / (4.0 * (alpha / 4.0));
        let coarse = barrier_residual(alpha, z_max, 1e-4, 1.0, 81, 41, 2e-3).unwrap();
        let fine = barrier_residual(alpha, z_max, 1e-4, 1.0, 81, 41, 1e-3).unwrap();
        assert!(coarse.sup.is_finite() && coarse.sup > 0.0);
        let ratio = fine.sup / coarse.sup;
        assert!(ratio <= 1.1, "sup grew under refinement: {ratio}");
    }

    #[test]
    fn wrong_cubic_parameter_blows_the_residual() {
        // along the ray z = 2√t the properly tuned barrier keeps √t|Lh|
        // flat, while a = 0 leaves a 1/√t term
        let alpha = 0.8;
        let scaled = |t: f64, a: f64| {
            let z = 2.0 * t.sqrt();
            t.sqrt() * lh_fd(z, t, a, alpha, 1e-3).abs()
        };
        let good_ratio = scaled(1e-6, -alpha / 4.0) / scaled(1e-2, -alpha / 4.0);
        let bad_ratio = scaled(1e-6, 0.0) / scaled(1e-2, 0.0);
        assert!(good_ratio < 3.0, "tuned barrier drifted: {good_ratio}");
        assert!(bad_ratio > 20.0, "untuned barrier should blow up: {bad_ratio}");
    }

    #[test]
    fn h_matches_closed_form() {
        let pt = BarrierPoint { z: 0.1, t: 0.04, a: -0.2 };
        let expect = (1.0 / 0.2) * f64::exp(-0.01 / 0.08 + (-0.2) * 0.001 / 0.04 + (-0.2) * 0.1);
        assert_relative_eq!(barrier_h(&pt), expect, max_relative = 1e-12);
    }
}
