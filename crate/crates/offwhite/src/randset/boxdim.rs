//! Box-counting dimension of a sampled closed set.

use serde::{Deserialize, Serialize};

use super::{ClosedSetSample, RandomSetError};

/// Least-squares fit of `log N(ε)` against `log(1/ε)` over a geometric
/// scale ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxDimFit {
    pub dimension: f64,
    pub intercept: f64,
    pub scales: Vec<f64>,
    pub counts: Vec<u64>,
    /// RMS residual of the fit in log-count units.
    pub residual_rms: f64,
}

/// Number of grid-aligned boxes of side `eps` meeting the set.
pub fn box_count(s: &ClosedSetSample, eps: f64) -> u64 {
    assert!(eps > 0.0);
    let mut count: u64 = 0;
    let mut last_box: i64 = i64::MIN;
    for &(a, b) in s.intervals() {
        let lo = (a / eps).floor() as i64;
        let hi = (b / eps).floor() as i64;
        let lo_eff = lo.max(last_box + 1);
        if hi >= lo_eff {
            count += (hi - lo_eff + 1) as u64;
            last_box = hi;
        }
    }
    count
}

/// Estimates the box dimension over `[scale_lo, scale_hi]`, halving the
/// scale down the ladder. Needs at least 4 usable scales.
pub fn box_dimension(
    s: &ClosedSetSample,
    scale_lo: f64,
    scale_hi: f64,
) -> Result<BoxDimFit, RandomSetError> {
    if !(scale_lo > 0.0 && scale_lo < scale_hi) {
        return Err(RandomSetError::InvalidParameter(format!(
            "need 0 < scale_lo < scale_hi, got [{scale_lo}, {scale_hi}]"
        )));
    }
    if s.intervals().is_empty() {
        return Err(RandomSetError::EmptySet);
    }
    let mut scales = Vec::new();
    let mut eps = scale_hi;
    while eps >= scale_lo * (1.0 - 1e-12) {
        scales.push(eps);
        eps /= 2.0;
    }
    let counts: Vec<u64> = scales.iter().map(|&e| box_count(s, e)).collect();
    let usable: Vec<(f64, f64)> = scales
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c > 0)
        .map(|(&e, &c)| ((1.0 / e).ln(), (c as f64).ln()))
        .collect();
    if usable.len() < 4 {
        return Err(RandomSetError::TooFewScales(usable.len()));
    }
    let n = usable.len() as f64;
    let sx: f64 = usable.iter().map(|p| p.0).sum();
    let sy: f64 = usable.iter().map(|p| p.1).sum();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = usable.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual_rms = (usable
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(BoxDimFit { dimension: slope, intercept, scales, counts, residual_rms })
}
