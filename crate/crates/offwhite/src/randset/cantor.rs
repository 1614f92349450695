//! Self-similar Cantor-type subsets of `[0,1]` with prescribed box dimension
//! `ln 2 / ln(1/r)`.

use serde::{Deserialize, Serialize};

use super::{ClosedSetSample, RandomSetError};

/// Two surviving children per interval, each a fraction `r` of the parent.
///
/// `symmetric` keeps the construction invariant under `x ↦ 1−x` (children
/// anchored at both parent edges); otherwise the right child is inset, which
/// breaks the reflection symmetry without changing the similarity dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorSpec {
    pub ratio: f64,
    pub depth: u32,
    pub symmetric: bool,
}

impl CantorSpec {
    pub fn new(ratio: f64, depth: u32, symmetric: bool) -> Result<Self, RandomSetError> {
        if !(ratio > 0.0 && ratio < 0.5) {
            return Err(RandomSetError::InvalidParameter(format!(
                "cantor ratio must lie in (0, 1/2), got {ratio}"
            )));
        }
        if depth > 40 {
            return Err(RandomSetError::InvalidParameter(format!(
                "depth must be <= 40, got {depth}"
            )));
        }
        Ok(Self { ratio, depth, symmetric })
    }

    /// Similarity dimension `ln 2 / ln(1/r)`.
    pub fn dimension(&self) -> f64 {
        2.0f64.ln() / (1.0 / self.ratio).ln()
    }

    /// Whether the natural `√δ` cover sum `(2√r)^depth` tends to zero, i.e.
    /// the set is null for the Hausdorff measure of dimension ½.
    pub fn half_dim_null(&self) -> bool {
        self.ratio < 0.25
    }

    /// Finest interval length `r^depth`.
    pub fn finest_length(&self) -> f64 {
        self.ratio.powi(self.depth as i32)
    }
}

/// Materializes the `2^depth` intervals of length `r^depth`.
pub fn build_cantor(spec: &CantorSpec) -> Result<ClosedSetSample, RandomSetError> {
    if spec.depth > 26 {
        return Err(RandomSetError::InvalidParameter(format!(
            "depth {} would materialize 2^{} intervals",
            spec.depth, spec.depth
        )));
    }
    let mut intervals: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    for _ in 0..spec.depth {
        let mut next = Vec::with_capacity(2 * intervals.len());
        for &(a, b) in &intervals {
            let len = b - a;
            let child = spec.ratio * len;
            next.push((a, a + child));
            if spec.symmetric {
                next.push((b - child, b));
            } else {
                // inset keeps children disjoint for every r < 1/2
                let inset = (0.5 * child).min((1.0 - 2.0 * spec.ratio) * len);
                next.push((b - inset - child, b - inset));
            }
        }
        intervals = next;
    }
    Ok(ClosedSetSample::new(spec.finest_length(), intervals, 1.0))
}
