//! Combinatorial perfect-set encodings: gap lengths `10^{-n}` arranged by
//! the admissible sign vectors `(c₁..c_n)`, `c_k ∈ {−1,+1}`, with the pair
//! `c_{2k} = c_{2k+1} = −1` forbidden when `a_k = 0` and `+1,+1` forbidden
//! when `b_k = 0`.
//!
//! The admissible vectors, ordered by the value `Σ c_k 3^{-k}`, are the
//! in-order traversal of a pruned binary forest; the gap-length sequence is
//! therefore a faithful encoding of that forest. A monotone map with bounded
//! derivative distorts each gap by less than the factor-10 separation
//! between levels, so the level sequence — and through it the bits — survive
//! distortion. Decoding parses the level sequence back into the forest and
//! reads each bit off the presence of constrained children; a decreasing map
//! reverses the sequence, which exchanges the roles of `a` and `b`.

use serde::{Deserialize, Serialize};

use super::{ClosedSetSample, RandomSetError};

/// Bit sequences and truncation depth for one set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KabSpec {
    /// `a_k`: pair `(−1,−1)` at positions `(2k, 2k+1)` allowed iff set.
    pub a: Vec<bool>,
    /// `b_k`: pair `(+1,+1)` allowed iff set.
    pub b: Vec<bool>,
    pub depth: u32,
}

/// Constraint levels that fit below `depth`: pairs `(2k, 2k+1)` with
/// `2k+1 ≤ depth`.
pub fn decodable_levels(depth: u32) -> u32 {
    if depth >= 3 {
        (depth - 1) / 2
    } else {
        0
    }
}

impl KabSpec {
    pub fn new(a: Vec<bool>, b: Vec<bool>, depth: u32) -> Result<Self, RandomSetError> {
        if depth < 1 || depth > 14 {
            return Err(RandomSetError::InvalidParameter(format!(
                "kab depth must lie in 1..=14, got {depth}"
            )));
        }
        let need = decodable_levels(depth) as usize;
        if a.len() < need || b.len() < need {
            return Err(RandomSetError::InvalidParameter(format!(
                "need at least {need} bits for depth {depth}"
            )));
        }
        Ok(Self { a, b, depth })
    }

    fn allows(&self, position: u32, sign: i8) -> bool {
        // the child at `position` extends its parent's sign; the pair
        // (2k, 2k+1) is constrained when both signs agree
        if position < 3 || position % 2 == 0 {
            return true;
        }
        let k = ((position - 1) / 2) as usize;
        match sign {
            -1 => self.a.get(k - 1).copied().unwrap_or(true),
            _ => self.b.get(k - 1).copied().unwrap_or(true),
        }
    }
}

/// One gap of the ledger: absolute start position and level `n`
/// (length `10^{-n}`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub position: f64,
    pub length: f64,
    pub level: u32,
}

/// Result of building a set: point sample plus its gap ledger.
#[derive(Debug, Clone)]
pub struct KabSet {
    pub sample: ClosedSetSample,
    pub ledger: Vec<GapEntry>,
    pub total_length: f64,
}

/// In-order enumeration of the admissible sign vectors as (level, signs).
fn enumerate_inorder(spec: &KabSpec) -> Vec<Vec<i8>> {
    let mut out = Vec::new();
    fn walk(spec: &KabSpec, prefix: &mut Vec<i8>, out: &mut Vec<Vec<i8>>) {
        let depth = prefix.len() as u32;
        // left child first
        if depth < spec.depth {
            let pos = depth + 1;
            let parent = *prefix.last().unwrap();
            // pair constraint binds when the child continues the parent's
            // sign at an odd position
            let allowed = pos % 2 == 0 || parent != -1 || spec.allows(pos, -1);
            if allowed {
                prefix.push(-1);
                walk(spec, prefix, out);
                prefix.pop();
            }
        }
        out.push(prefix.clone());
        if depth < spec.depth {
            let pos = depth + 1;
            let parent = *prefix.last().unwrap();
            let allowed = pos % 2 == 0 || parent != 1 || spec.allows(pos, 1);
            if allowed {
                prefix.push(1);
                walk(spec, prefix, out);
                prefix.pop();
            }
        }
    }
    for root in [-1i8, 1] {
        let mut prefix = vec![root];
        walk(spec, &mut prefix, &mut out);
    }
    out
}

/// Lays the gaps `10^{-n}` out by cumulative sums in the order of the point
/// values. Positions are exact multiples of `10^{-depth}` (integer
/// arithmetic), so the ledger carries no rounding.
pub fn build_kab(spec: &KabSpec) -> Result<KabSet, RandomSetError> {
    let vectors = enumerate_inorder(spec);
    let unit: u64 = 10u64.pow(spec.depth); // positions scaled by 10^depth
    let mut cursor: u64 = 0;
    let mut ledger = Vec::with_capacity(vectors.len());
    let mut points = Vec::with_capacity(vectors.len() + 1);
    let scale = 1.0 / unit as f64;
    points.push((0.0, 0.0));
    for signs in &vectors {
        let level = signs.len() as u32;
        let len_scaled = 10u64.pow(spec.depth - level);
        ledger.push(GapEntry {
            position: cursor as f64 * scale,
            length: len_scaled as f64 * scale,
            level,
        });
        cursor += len_scaled;
        let p = cursor as f64 * scale;
        points.push((p, p));
    }
    let total = cursor as f64 * scale;
    Ok(KabSet {
        sample: ClosedSetSample::new(scale, points, total),
        ledger,
        total_length: total,
    })
}

/// Orientation of the monotone map relating an observed window to a
/// reference set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Increasing,
    Decreasing,
    /// Reference symmetric (`a = b` on the decodable prefix): the two
    /// orientations are indistinguishable by construction.
    Ambiguous,
}

/// Decoded bits with the first fully observed constraint level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedKab {
    pub a: Vec<Option<bool>>,
    pub b: Vec<Option<bool>>,
    pub k0: u32,
    pub depth: u32,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    level: u32,
    sign: i8,
}

/// Classifies a distorted gap length to its level: `round(−log₁₀ length)`,
/// validated against the `[10^{-n}/bound, bound·10^{-n}]` band. Rounding is
/// unambiguous for distortion bounds up to `√10 ≈ 3.16`.
fn classify_level(length: f64, bound: f64, depth: u32) -> Result<u32, RandomSetError> {
    if !(length > 0.0) {
        return Err(RandomSetError::Decode(format!("gap length {length} must be positive")));
    }
    let n = (-length.log10()).round();
    if !(n >= 1.0 && n <= depth as f64) {
        return Err(RandomSetError::Decode(format!(
            "gap length {length} matches no level <= {depth}"
        )));
    }
    let n = n as u32;
    let nominal = 10f64.powi(-(n as i32));
    if length < nominal / bound * (1.0 - 1e-9) || length > nominal * bound * (1.0 + 1e-9) {
        return Err(RandomSetError::Decode(format!(
            "gap length {length} falls outside the distorted band of level {n}"
        )));
    }
    Ok(n)
}

struct Decoder {
    depth: u32,
    a: Vec<Option<bool>>,
    b: Vec<Option<bool>>,
}

impl Decoder {
    /// Records a child-presence witness. A child of `parent` with the same
    /// sign at an odd position `2k+1` exists iff the corresponding bit is
    /// set; disagreeing signs or even positions are unconstrained, where an
    /// absent child (below the depth cap) is a malformed ledger.
    fn witness(
        &mut self,
        parent: Node,
        child_sign: i8,
        present: bool,
    ) -> Result<(), RandomSetError> {
        let pos = parent.level + 1;
        if pos > self.depth {
            return Ok(()); // truncation, no information
        }
        let constrained = pos % 2 == 1 && pos >= 3 && child_sign == parent.sign;
        if !constrained {
            if !present {
                return Err(RandomSetError::Decode(format!(
                    "unconstrained child missing at level {pos}"
                )));
            }
            return Ok(());
        }
        let k = ((pos - 1) / 2 - 1) as usize;
        let slot = if child_sign == -1 { &mut self.a[k] } else { &mut self.b[k] };
        match slot {
            Some(bit) if *bit != present => Err(RandomSetError::Decode(format!(
                "conflicting witnesses for constraint level {}",
                k + 1
            ))),
            _ => {
                *slot = Some(present);
                Ok(())
            }
        }
    }

    /// Parses a window known to be the complete in-order traversal of the
    /// subtree rooted at `node`.
    fn parse_tree(&mut self, levels: &[u32], node: Node) -> Result<(), RandomSetError> {
        let min_pos = match levels.iter().enumerate().min_by_key(|(_, &l)| l) {
            Some((i, &l)) if l == node.level => i,
            Some((_, &l)) => {
                return Err(RandomSetError::Decode(format!(
                    "window root has level {l}, expected {}",
                    node.level
                )))
            }
            None => unreachable!("parse_tree called on an empty window"),
        };
        if levels[min_pos + 1..].iter().any(|&l| l == node.level) {
            return Err(RandomSetError::Decode(format!(
                "level {} repeats inside a single-tree window",
                node.level
            )));
        }
        let (left, right) = (&levels[..min_pos], &levels[min_pos + 1..]);
        for (window, sign) in [(left, -1i8), (right, 1i8)] {
            self.witness(node, sign, !window.is_empty())?;
            if !window.is_empty() {
                self.parse_tree(window, Node { level: node.level + 1, sign })?;
            }
        }
        Ok(())
    }

    /// Parses the seam between two identified same-level nodes: the window
    /// `[right subtree of x, left subtree of y]`. With both candidate roots
    /// present the split is forced; a lone tree cannot be attributed, so its
    /// interior yields no witnesses.
    fn parse_seam(&mut self, levels: &[u32], x: Node, y: Node) -> Result<(), RandomSetError> {
        debug_assert_eq!(x.level, y.level);
        let child_level = x.level + 1;
        if child_level > self.depth {
            if !levels.is_empty() {
                return Err(RandomSetError::Decode(
                    "gaps below the depth cap inside a seam".into(),
                ));
            }
            return Ok(());
        }
        let occurrences: Vec<usize> = levels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == child_level)
            .map(|(i, _)| i)
            .collect();
        match occurrences.len() {
            0 => {
                if !levels.is_empty() {
                    return Err(RandomSetError::Decode(
                        "seam content without candidate roots".into(),
                    ));
                }
                self.witness(x, 1, false)?;
                self.witness(y, -1, false)
            }
            2 => {
                self.witness(x, 1, true)?;
                self.witness(y, -1, true)?;
                let rx = Node { level: child_level, sign: 1 };
                let ly = Node { level: child_level, sign: -1 };
                let left = &levels[..occurrences[0]];
                if !left.is_empty() {
                    self.witness(rx, -1, true)?;
                    self.parse_tree(left, Node { level: child_level + 1, sign: -1 })?;
                } else {
                    self.witness(rx, -1, false)?;
                }
                let right = &levels[occurrences[1] + 1..];
                if !right.is_empty() {
                    self.witness(ly, 1, true)?;
                    self.parse_tree(right, Node { level: child_level + 1, sign: 1 })?;
                } else {
                    self.witness(ly, 1, false)?;
                }
                self.parse_seam(&levels[occurrences[0] + 1..occurrences[1]], rx, ly)
            }
            1 => Ok(()), // one pruned side: the surviving tree cannot be attributed
            n => Err(RandomSetError::Decode(format!(
                "{n} candidate roots at level {child_level} inside a seam"
            ))),
        }
    }
}

/// Decodes a gap ledger produced by a monotone map (derivative within
/// `[1/bound, bound]`) applied to a full `K_{a,b}` layout.
///
/// The parse assumes an increasing map; a decreasing map yields the same
/// structure with `a` and `b` exchanged, which [`decode_kab_oriented`]
/// resolves against a reference.
pub fn decode_kab(
    gaps: &[(f64, f64)],
    distortion_bound: f64,
    depth: u32,
) -> Result<DecodedKab, RandomSetError> {
    if !(distortion_bound >= 1.0) {
        return Err(RandomSetError::Decode("distortion bound must be >= 1".into()));
    }
    if gaps.len() < 2 {
        return Err(RandomSetError::Decode("ledger too short to decode".into()));
    }
    let mut order: Vec<usize> = (0..gaps.len()).collect();
    order.sort_by(|&i, &j| gaps[i].0.total_cmp(&gaps[j].0));
    let levels: Vec<u32> = order
        .iter()
        .map(|&i| classify_level(gaps[i].1, distortion_bound, depth))
        .collect::<Result<_, _>>()?;

    let roots: Vec<usize> = levels
        .iter()
        .enumerate()
        .filter(|(_, &l)| l == 1)
        .map(|(i, _)| i)
        .collect();
    if roots.len() != 2 {
        return Err(RandomSetError::Decode(format!(
            "expected the two level-1 gaps of a full layout, found {}",
            roots.len()
        )));
    }
    let k_levels = decodable_levels(depth) as usize;
    let mut dec = Decoder { depth, a: vec![None; k_levels], b: vec![None; k_levels] };
    let left = Node { level: 1, sign: -1 };
    let right = Node { level: 1, sign: 1 };
    for (window, node, side) in [
        (&levels[..roots[0]], left, -1i8),
        (&levels[roots[1] + 1..], right, 1i8),
    ] {
        dec.witness(node, side, !window.is_empty())?;
        if !window.is_empty() {
            dec.parse_tree(window, Node { level: 2, sign: side })?;
        }
    }
    dec.parse_seam(&levels[roots[0] + 1..roots[1]], left, right)?;

    let k0 = 1 + dec
        .a
        .iter()
        .zip(&dec.b)
        .take_while(|(a, b)| a.is_none() && b.is_none())
        .count() as u32;
    Ok(DecodedKab { a: dec.a, b: dec.b, k0, depth })
}

/// Decode plus orientation against a reference spec: an increasing map
/// reproduces `(a, b)`, a decreasing map swaps them.
pub fn decode_kab_oriented(
    gaps: &[(f64, f64)],
    distortion_bound: f64,
    reference: &KabSpec,
) -> Result<(DecodedKab, Orientation), RandomSetError> {
    let dec = decode_kab(gaps, distortion_bound, reference.depth)?;
    let k = decodable_levels(reference.depth) as usize;
    let matches = |xs: &[Option<bool>], ys: &[bool]| {
        xs.iter().zip(ys).all(|(x, y)| x.map_or(true, |v| v == *y))
    };
    let direct = matches(&dec.a, &reference.a[..k]) && matches(&dec.b, &reference.b[..k]);
    let swapped = matches(&dec.a, &reference.b[..k]) && matches(&dec.b, &reference.a[..k]);
    let orientation = match (direct, swapped) {
        (true, true) => Orientation::Ambiguous,
        (true, false) => Orientation::Increasing,
        (false, true) => Orientation::Decreasing,
        (false, false) => {
            return Err(RandomSetError::Decode(
                "decoded bits match the reference in neither orientation".into(),
            ))
        }
    };
    Ok((dec, orientation))
}

/// Applies a monotone map to a ledger: each gap becomes
/// `(f(start), f(end) − f(start))` (or the reflected pair for decreasing
/// `f`), re-sorted by position.
pub fn distort_ledger(ledger: &[GapEntry], f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = ledger
        .iter()
        .map(|g| {
            let u = f(g.position);
            let v = f(g.position + g.length);
            (u.min(v), (v - u).abs())
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}
