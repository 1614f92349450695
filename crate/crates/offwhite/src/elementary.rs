//! Elementary subsets of `[0,1]`: finite unions of open intervals, treated
//! modulo finite sets, with Boolean-algebra operations and the equidistant
//! families that probe the infinitesimality invariant.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Endpoints closer than this merge into one interval.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SetError {
    #[error("interval ({0}, {1}) is not inside [0, 1]")]
    OutOfRange(f64, f64),
    #[error("equidistant family needs 0 < eps <= 1, got {0}")]
    BadEps(f64),
    #[error("interval width {width} for n={n} is below representable resolution")]
    Unrepresentable { n: u64, width: f64 },
}

/// Finite union of disjoint open subintervals of `[0,1]`, kept in canonical
/// sorted-merged form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementarySet {
    intervals: Vec<(f64, f64)>,
}

impl ElementarySet {
    pub fn empty() -> Self {
        Self { intervals: Vec::new() }
    }

    pub fn full() -> Self {
        Self { intervals: vec![(0.0, 1.0)] }
    }

    /// Canonicalizes an arbitrary interval list: clamps to `[0,1]`, drops
    /// degenerate pieces, sorts, merges touching or overlapping neighbors.
    pub fn new(intervals: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, SetError> {
        let mut items: Vec<(f64, f64)> = Vec::new();
        for (s, t) in intervals {
            if !(s.is_finite() && t.is_finite()) || s < -MERGE_TOL || t > 1.0 + MERGE_TOL {
                return Err(SetError::OutOfRange(s, t));
            }
            let s = s.clamp(0.0, 1.0);
            let t = t.clamp(0.0, 1.0);
            if t - s > MERGE_TOL {
                items.push((s, t));
            }
        }
        items.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(items.len());
        for (s, t) in items {
            match merged.last_mut() {
                Some(last) if s <= last.1 + MERGE_TOL => last.1 = last.1.max(t),
                _ => merged.push((s, t)),
            }
        }
        Ok(Self { intervals: merged })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue measure, in `[0,1]`.
    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(s, t)| t - s).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals
            .binary_search_by(|&(s, t)| {
                if x < s {
                    std::cmp::Ordering::Greater
                } else if x > t {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(self.intervals.iter().chain(other.intervals.iter()).cloned())
            .expect("canonical inputs stay in range")
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a0, a1) = self.intervals[i];
            let (b0, b1) = other.intervals[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if hi - lo > MERGE_TOL {
                out.push((lo, hi));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::new(out).expect("intersection stays in range")
    }

    /// Complement within `[0,1]` (modulo finite sets).
    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(s, t) in &self.intervals {
            if s - cursor > MERGE_TOL {
                out.push((cursor, s));
            }
            cursor = t;
        }
        if 1.0 - cursor > MERGE_TOL {
            out.push((cursor, 1.0));
        }
        Self { intervals: out }
    }

    /// Dilation by `delta` on both sides, clipped to `[0,1]` and merged.
    pub fn neighborhood(&self, delta: f64) -> Self {
        assert!(delta >= 0.0, "neighborhood radius must be nonnegative");
        Self::new(
            self.intervals
                .iter()
                .map(|&(s, t)| ((s - delta).max(0.0), (t + delta).min(1.0))),
        )
        .expect("dilation stays in range")
    }
}

/// The equidistant family: `n` intervals of total length `ε`, the `k`-th
/// centered at `(k+½)/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquidistantFamily {
    pub n: u64,
    pub eps: f64,
}

/// Largest family that will be materialized as an interval list.
const MAX_MATERIALIZED: u64 = 1 << 22;

impl EquidistantFamily {
    pub fn new(n: u64, eps: f64) -> Result<Self, SetError> {
        if n == 0 {
            return Err(SetError::Unrepresentable { n, width: 0.0 });
        }
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(SetError::BadEps(eps));
        }
        let width = eps / n as f64;
        if width < 1e-15 {
            return Err(SetError::Unrepresentable { n, width });
        }
        Ok(Self { n, eps })
    }

    /// Expands to the elementary set. Families beyond 2²² intervals are
    /// rejected; their measures are available in closed form instead.
    pub fn to_set(self) -> Result<ElementarySet, SetError> {
        if self.n > MAX_MATERIALIZED {
            return Err(SetError::Unrepresentable { n: self.n, width: self.eps / self.n as f64 });
        }
        let n = self.n as f64;
        let half = self.eps / 2.0;
        ElementarySet::new((0..self.n).map(|k| {
            let k = k as f64;
            (((k + 0.5) - half) / n, ((k + 0.5) + half) / n)
        }))
    }

    /// `mes((E_n)_{+δ})` in closed form: `ε + 2nδ` unless it exceeds 1.
    ///
    /// The dilated intervals stay disjoint and unclipped exactly while
    /// `ε + 2nδ ≤ 1`; beyond that they merge into the full interval.
    pub fn neighborhood_measure(&self, delta: f64) -> f64 {
        assert!(delta >= 0.0);
        (self.eps + 2.0 * self.n as f64 * delta).min(1.0)
    }
}

/// `make_equidistant` in operation form.
pub fn make_equidistant(fam: EquidistantFamily) -> Result<ElementarySet, SetError> {
    fam.to_set()
}
