//! Random closed sets: Cantor-type targets, the degenerate torus diffusion
//! and its hit set, box-counting dimension, the endpoint barrier diagnostic,
//! and the combinatorial gap encodings.

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod barrier;
pub mod boxdim;
pub mod cantor;
pub mod diffusion;
pub mod kab;
pub mod rng;

pub use barrier::{barrier_h, barrier_residual, scaled_barrier, BarrierPoint, BarrierResidual};
pub use boxdim::{box_count, box_dimension, BoxDimFit};
pub use cantor::{build_cantor, CantorSpec};
pub use diffusion::{
    boundary_fraction, circle_distance, extract_hit_set, occupation_histogram,
    simulate_diffusion, simulate_diffusion_with, y_displacements, Coefficients, DiffusionParams,
    TorusState, Trajectory,
};
pub use kab::{
    build_kab, decodable_levels, decode_kab, decode_kab_oriented, distort_ledger, DecodedKab,
    GapEntry, KabSet, KabSpec, Orientation,
};
pub use rng::CounterRng;

#[derive(Debug, Error)]
pub enum RandomSetError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("coefficient contract violated: {0}")]
    InvalidCoefficients(String),
    #[error("set is empty")]
    EmptySet,
    #[error("only {0} usable scales; box fits need at least 4")]
    TooFewScales(usize),
    #[error("decode failed: {0}")]
    Decode(String),
}

/// A sampled closed set: sorted disjoint closed intervals at a finite time
/// resolution. Single points are degenerate intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSetSample {
    resolution: f64,
    intervals: Vec<(f64, f64)>,
    total_time: f64,
}

impl ClosedSetSample {
    /// Sorts and lightly merges the intervals (gaps below the resolution
    /// are not meaningful).
    pub fn new(resolution: f64, intervals: Vec<(f64, f64)>, total_time: f64) -> Self {
        let mut items: Vec<(f64, f64)> =
            intervals.into_iter().filter(|(a, b)| b >= a).collect();
        items.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(items.len());
        for (a, b) in items {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { resolution, intervals: merged, total_time }
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    /// Sum of interval lengths.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    /// Lengths of the open gaps between consecutive intervals.
    pub fn gap_lengths(&self) -> Vec<f64> {
        self.intervals.windows(2).map(|w| w[1].0 - w[0].1).collect()
    }

    pub fn to_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "start,end")?;
        for (a, b) in &self.intervals {
            writeln!(w, "{a},{b}")?;
        }
        Ok(())
    }
}

/// Two-sample Kolmogorov–Smirnov statistic, for comparing gap-length
/// distributions.
pub fn ks_statistic(xs: &[f64], ys: &[f64]) -> f64 {
    let mut a = xs.to_vec();
    let mut b = ys.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        // advance past ties together so equal samples compare as equal
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        let fa = i as f64 / a.len() as f64;
        let fb = j as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// Critical value of the two-sample KS test at significance `alpha`
/// (asymptotic form `c(α)·√((n+m)/(nm))`).
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-0.5 * (alpha / 2.0).ln()).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
