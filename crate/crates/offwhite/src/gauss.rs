//! Finite-dimensional geometry of Gaussian measure classes.
//!
//! Two admissible norms on a common space diagonalize simultaneously; with
//! per-axis norm ratios `λ_k` the Hellinger affinity of the corresponding
//! centered Gaussian measures is the product
//!
//! ```text
//! ⟨√γ₁, √γ₂⟩ = ∏_k ( (λ_k^{-1/2} + λ_k^{1/2}) / 2 )^{-1/2} ,
//! ```
//!
//! each factor coinciding with the 1-D affinity of centered Gaussians at
//! variance ratio `λ_k`. `arccos` of the affinity is the distance between the
//! norms. The equivalence defect of a norm pair is the squared
//! Hilbert–Schmidt size of `1 − L*L`, computed from generalized eigenvalues.
//!
//! For a finite-dimensional subspace `E` at angle `α` to a subspace `F`, an
//! orthogonalizing norm exists within distance
//! `δ(α, n) = arccos(((tan(α/2))^{-1/4} + (tan(α/2))^{1/4})/2)^{-n}`; the
//! two-line case is achieved exactly by the per-plane ratios
//! `(tan(α/2))^{∓1/2}`.

use nalgebra::{DMatrix, DVector, SymmetricEigen, SVD};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GaussError {
    #[error("ratios must be positive, found {0}")]
    NonPositiveRatio(f64),
    #[error("matrix is not symmetric within 1e-12")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("frame is not orthonormal within 1e-10")]
    NotOrthonormal,
    #[error("angle must lie in (0, pi/2], got {0}")]
    BadAngle(f64),
    #[error("subspaces must be nonzero-dimensional")]
    ZeroDimensional,
}

/// Simultaneous-diagonalization ratios `λ_k = ‖e_k‖₂/‖e_k‖₁` between two
/// admissible norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRatioSeq(Vec<f64>);

impl EigenRatioSeq {
    pub fn new(ratios: Vec<f64>) -> Result<Self, GaussError> {
        for &r in &ratios {
            if !(r > 0.0) || !r.is_finite() {
                return Err(GaussError::NonPositiveRatio(r));
            }
        }
        Ok(Self(ratios))
    }

    pub fn ratios(&self) -> &[f64] {
        &self.0
    }

    /// `Σ (λ_k − 1)²` at the stored truncation; finite exactly when the
    /// norms are equivalent in the Hilbert–Schmidt sense.
    pub fn square_deviation(&self) -> f64 {
        self.0.iter().map(|&l| (l - 1.0) * (l - 1.0)).sum()
    }

    pub fn concat(&self, other: &Self) -> Self {
        Self(self.0.iter().chain(other.0.iter()).cloned().collect())
    }
}

/// `−½ Σ ln((λ^{-1/2}+λ^{1/2})/2)`, the log-affinity, with compensated
/// summation so long products neither underflow nor drift.
pub fn log_affinity(r: &EigenRatioSeq) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &l in r.ratios() {
        let term = -0.5 * ((l.sqrt() + 1.0 / l.sqrt()) / 2.0).ln();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Hellinger affinity of the Gaussian pair, in `(0, 1]`.
pub fn affinity(r: &EigenRatioSeq) -> f64 {
    log_affinity(r).exp()
}

/// `arccos` of the affinity, the distance between the norms, in `[0, π/2]`.
pub fn affinity_distance(r: &EigenRatioSeq) -> f64 {
    affinity(r).clamp(-1.0, 1.0).acos()
}

/// Gram matrices of two norms in one basis.
#[derive(Debug, Clone)]
pub struct QuadraticFormPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

impl QuadraticFormPair {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self, GaussError> {
        if a.nrows() != a.ncols() || b.nrows() != b.ncols() || a.nrows() != b.nrows() {
            return Err(GaussError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                a.nrows(),
                a.ncols(),
                b.nrows(),
                b.ncols()
            )));
        }
        for m in [&a, &b] {
            let scale = m.amax().max(1e-300);
            for i in 0..m.nrows() {
                for j in 0..i {
                    if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                        return Err(GaussError::NotSymmetric);
                    }
                }
            }
        }
        Ok(Self { a, b })
    }

    pub fn dim(&self) -> usize {
        self.a.nrows()
    }
}

/// Generalized eigenvalues `μ_k` of `(B, A)` by symmetric-definite
/// reduction: factor `A = LLᵀ`, diagonalize `L⁻¹BL⁻ᵀ`.
pub fn generalized_eigenvalues(p: &QuadraticFormPair) -> Result<Vec<f64>, GaussError> {
    let chol = p.a.clone().cholesky().ok_or(GaussError::NotPositiveDefinite)?;
    let l_inv = {
        let n = p.dim();
        let mut inv = DMatrix::identity(n, n);
        let l = chol.l();
        // forward substitution, column by column
        for c in 0..n {
            for r in 0..n {
                let mut v = inv[(r, c)];
                for k in 0..r {
                    v -= l[(r, k)] * inv[(k, c)];
                }
                inv[(r, c)] = v / l[(r, r)];
            }
        }
        inv
    };
    let c = &l_inv * &p.b * l_inv.transpose();
    let sym = SymmetricEigen::new(c);
    let mut eig: Vec<f64> = sym.eigenvalues.iter().cloned().collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    if eig.first().map_or(false, |&m| m <= 0.0) {
        return Err(GaussError::NotPositiveDefinite);
    }
    Ok(eig)
}

/// Squared Hilbert–Schmidt norm of `1 − L*L` for the identity map between
/// the two norms: `Σ (1 − μ_k)²` over the generalized eigenvalues.
pub fn fhs_defect(p: &QuadraticFormPair) -> Result<f64, GaussError> {
    Ok(generalized_eigenvalues(p)?
        .into_iter()
        .map(|m| (1.0 - m) * (1.0 - m))
        .sum())
}

/// Two orthonormal column frames in a common ambient space.
#[derive(Debug, Clone)]
pub struct SubspacePair {
    pub e: DMatrix<f64>,
    pub f: DMatrix<f64>,
}

impl SubspacePair {
    pub fn new(e: DMatrix<f64>, f: DMatrix<f64>) -> Result<Self, GaussError> {
        if e.ncols() == 0 || f.ncols() == 0 {
            return Err(GaussError::ZeroDimensional);
        }
        if e.nrows() != f.nrows() {
            return Err(GaussError::DimensionMismatch(format!(
                "ambient {} vs {}",
                e.nrows(),
                f.nrows()
            )));
        }
        for m in [&e, &f] {
            let gram = m.transpose() * m;
            let id = DMatrix::identity(m.ncols(), m.ncols());
            if (gram - id).amax() > 1e-10 {
                return Err(GaussError::NotOrthonormal);
            }
        }
        Ok(Self { e, f })
    }
}

/// Principal angles between the spanned subspaces, ascending, plus the
/// minimum (the angle `∠(E,F)`).
pub fn principal_angles(s: &SubspacePair) -> (Vec<f64>, f64) {
    let cross = s.e.transpose() * &s.f;
    let svd = SVD::new(cross, false, false);
    let mut angles: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|&c| c.clamp(-1.0, 1.0).acos())
        .collect();
    angles.sort_by(|a, b| a.total_cmp(b));
    let min = angles.first().cloned().unwrap_or(std::f64::consts::FRAC_PI_2);
    (angles, min)
}

/// `δ(α, n) = arccos(((tan(α/2))^{-1/4} + (tan(α/2))^{1/4})/2)^{-n}`.
pub fn delta_bound(angle: f64, n: u32) -> Result<f64, GaussError> {
    if !(angle > 0.0 && angle <= std::f64::consts::FRAC_PI_2) {
        return Err(GaussError::BadAngle(angle));
    }
    let t = (angle / 2.0).tan();
    let base = (t.powf(-0.25) + t.powf(0.25)) / 2.0;
    Ok(base.powi(-(n as i32)).clamp(-1.0, 1.0).acos())
}

/// Optimal two-plane orthogonalizing norm for two lines at the given angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrthogonalizingNorm {
    /// Per-axis ratios `(tan(α/2))^{-1/2}` and `(tan(α/2))^{1/2}` in the
    /// bisector frame.
    pub ratios: [f64; 2],
    /// Distance the constructed norm achieves; equals `δ(α, 1)`.
    pub achieved_distance: f64,
}

/// The optimal norm making two lines at `angle` orthogonal, and the affinity
/// distance it achieves.
pub fn orthogonalizing_norm(angle: f64) -> Result<OrthogonalizingNorm, GaussError> {
    if !(angle > 0.0 && angle < std::f64::consts::FRAC_PI_2 + 1e-15) {
        return Err(GaussError::BadAngle(angle));
    }
    let t = (angle / 2.0).tan();
    let ratios = [t.powf(-0.5), t.powf(0.5)];
    let seq = EigenRatioSeq::new(ratios.to_vec())?;
    Ok(OrthogonalizingNorm { ratios, achieved_distance: affinity_distance(&seq) })
}

/// New Gram matrix in the plane (bisector frame) under which the two lines
/// at `angle` become orthogonal — diagonal `(tan(α/2), 1/tan(α/2))` — along
/// with unit vectors spanning the lines.
pub fn two_plane_gram(angle: f64) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let half = angle / 2.0;
    let e = DVector::from_vec(vec![half.cos(), half.sin()]);
    let f = DVector::from_vec(vec![half.cos(), -half.sin()]);
    let t = half.tan();
    let gram = DMatrix::from_diagonal(&DVector::from_vec(vec![t, 1.0 / t]));
    (gram, e, f)
}

/// CSV export of a dense matrix, one row per line.
pub fn write_matrix_csv<W: std::io::Write>(m: &DMatrix<f64>, mut w: W) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_matrix_csv<R: std::io::BufRead>(r: R) -> Result<DMatrix<f64>, GaussError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in r.lines() {
        let line = line.map_err(|e| GaussError::DimensionMismatch(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse()).collect();
        rows.push(row.map_err(|e| GaussError::DimensionMismatch(format!("bad cell: {e}")))?);
    }
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(GaussError::DimensionMismatch("ragged or empty CSV matrix".into()));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

/// Shape sidecar for raw little-endian row-major matrix dumps.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixSidecar {
    pub nrows: usize,
    pub ncols: usize,
}

pub fn matrix_to_raw(m: &DMatrix<f64>) -> (Vec<u8>, MatrixSidecar) {
    let mut buf = Vec::with_capacity(8 * m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            buf.extend_from_slice(&m[(i, j)].to_le_bytes());
        }
    }
    (buf, MatrixSidecar { nrows: m.nrows(), ncols: m.ncols() })
}

pub fn matrix_from_raw(buf: &[u8], sidecar: &MatrixSidecar) -> Result<DMatrix<f64>, GaussError> {
    if buf.len() != 8 * sidecar.nrows * sidecar.ncols {
        return Err(GaussError::DimensionMismatch(format!(
            "raw buffer holds {} bytes, sidecar declares {}x{}",
            buf.len(),
            sidecar.nrows,
            sidecar.ncols
        )));
    }
    let vals: Vec<f64> = buf
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DMatrix::from_fn(sidecar.nrows, sidecar.ncols, |i, j| {
        vals[i * sidecar.ncols + j]
    }))
}
