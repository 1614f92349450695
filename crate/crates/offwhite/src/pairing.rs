//! Finite-dimensional proxies for the liminf/limsup subspace conditions:
//! the weak sup-pairing over a ν-unit ball restricted to an elementary set,
//! and the ν-metric projection defect onto functions supported off the set.
//!
//! Both reduce to symmetric positive-definite solves against the ν-Gram form
//! of the grid cells. The Gram matrix is Toeplitz in the cell index,
//!
//! ```text
//! M_{jk} = mode · Σ_i  wt_i · w(λ_i) · (Δt²/2π) · cos(λ_i (j−k)Δt) · Δλ ,
//! ```
//!
//! assembled from its first column and regularized with a relative ridge of
//! `10⁻¹²·tr(M)` to survive nearly singular comb geometries.

use nalgebra::{Cholesky, DMatrix, DVector};
use thiserror::Error;

use crate::elementary::ElementarySet;
use crate::grid::{fourier, GridFunction, SpectrumMode, INV_SQRT_2PI};
use crate::spectral::SpectralDensity;

#[derive(Debug, Error)]
pub enum PairingError {
    #[error("grid too large for a dense Gram solve: {0} cells (limit {1})")]
    GridTooLarge(usize, usize),
    #[error("Gram factorization failed even with ridge")]
    Factorization,
}

const DENSE_LIMIT: usize = 4096;
const RIDGE_REL: f64 = 1e-12;

/// ν-Gram machinery over the cells of one grid.
pub struct NuGram {
    /// First row of the Toeplitz form: `m[d] = M_{j, j+d}`.
    first_row: Vec<f64>,
}

impl NuGram {
    pub fn build(grid: &GridFunction, d: &SpectralDensity, mode: SpectrumMode) -> Self {
        let n = grid.n_samples();
        let dt = grid.dt();
        let span = grid.t1() - grid.t0();
        let dlam = 2.0 * std::f64::consts::PI / span;
        let half = n / 2;
        // quadrature weights over the one-sided frequency grid
        let mut wq = Vec::with_capacity(half + 1);
        for k in 0..=half {
            let lam = dlam * k as f64;
            let wt = if k == 0 || k == half { 0.5 } else { 1.0 };
            wq.push((lam, wt * d.w(lam)));
        }
        let scale = mode.factor() * INV_SQRT_2PI * INV_SQRT_2PI * dt * dt * dlam;
        let mut first_row = Vec::with_capacity(n);
        for delta in 0..n {
            let tau = delta as f64 * dt;
            let mut acc = 0.0;
            for &(lam, w) in &wq {
                acc += w * (lam * tau).cos();
            }
            first_row.push(scale * acc);
        }
        Self { first_row }
    }

    fn entry(&self, j: usize, k: usize) -> f64 {
        self.first_row[j.abs_diff(k)]
    }

    /// Quadratic form `vᵀMv` for a full grid vector.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let n = v.len();
        let mut acc = 0.0;
        for j in 0..n {
            acc += self.entry(j, j) * v[j] * v[j];
            for k in j + 1..n {
                acc += 2.0 * self.entry(j, k) * v[j] * v[k];
            }
        }
        acc
    }

    fn restricted(&self, cells: &[usize]) -> (DMatrix<f64>, f64) {
        let m = cells.len();
        let mut mat = DMatrix::zeros(m, m);
        for (a, &j) in cells.iter().enumerate() {
            for (b, &k) in cells.iter().enumerate() {
                mat[(a, b)] = self.entry(j, k);
            }
        }
        let ridge = RIDGE_REL * mat.trace();
        for a in 0..m {
            mat[(a, a)] += ridge;
        }
        (mat, ridge)
    }
}

/// Cells of the grid whose midpoints lie in `e`.
pub fn cells_in(grid: &GridFunction, e: &ElementarySet) -> Vec<usize> {
    (0..grid.n_samples()).filter(|&j| e.contains(grid.t_at(j))).collect()
}

fn pairing_vector(g: &GridFunction, cells: &[usize], mode: SpectrumMode) -> Vec<f64> {
    // h_j = mode * sum_k wt_k Re( conj(Phi_kj) g_hat_k ) dlam, with
    // Phi_kj = (2pi)^{-1/2} dt e^{-i lam_k t_j}
    let spec = fourier(g);
    let dt = g.dt();
    let dlam = spec.dlam();
    cells
        .iter()
        .map(|&j| {
            let tj = g.t_at(j);
            let mut acc = 0.0;
            for k in 0..spec.lambdas.len() {
                let lam = spec.lambdas[k];
                let phase = nalgebra::Complex::new(0.0, lam * tj).exp();
                acc += spec.weight(k) * (phase * spec.values[k]).re;
            }
            mode.factor() * INV_SQRT_2PI * dt * acc * dlam
        })
        .collect()
}

/// Detailed pairing result: the sup value plus the regularization actually
/// applied to the restricted form.
#[derive(Debug, Clone, Copy)]
pub struct PairingReport {
    pub value: f64,
    pub ridge: f64,
    pub cells: usize,
}

/// `sup { |⟨f̂, ĝ⟩_{L₂(dλ)}| : supp f ⊆ e, ‖f‖_ν ≤ 1 }` at grid resolution.
///
/// Equals `√(hᵀ M⁻¹ h)` for the restricted ν-Gram form `M` and pairing
/// vector `h`; an empty restriction gives 0.
pub fn weak_sup_pairing(
    e: &ElementarySet,
    g: &GridFunction,
    d: &SpectralDensity,
) -> Result<f64, PairingError> {
    weak_sup_pairing_detailed(e, g, d).map(|r| r.value)
}

/// [`weak_sup_pairing`] with the applied ridge reported.
pub fn weak_sup_pairing_detailed(
    e: &ElementarySet,
    g: &GridFunction,
    d: &SpectralDensity,
) -> Result<PairingReport, PairingError> {
    let mode = SpectrumMode::SymmetricEnergy;
    let cells = cells_in(g, e);
    if cells.is_empty() {
        return Ok(PairingReport { value: 0.0, ridge: 0.0, cells: 0 });
    }
    if cells.len() > DENSE_LIMIT {
        return Err(PairingError::GridTooLarge(cells.len(), DENSE_LIMIT));
    }
    let gram = NuGram::build(g, d, mode);
    let (mat, ridge) = gram.restricted(&cells);
    let h = DVector::from_vec(pairing_vector(g, &cells, mode));
    let chol = Cholesky::new(mat).ok_or(PairingError::Factorization)?;
    let x = chol.solve(&h);
    Ok(PairingReport { value: h.dot(&x).max(0.0).sqrt(), ridge, cells: cells.len() })
}

/// ν-distance from `f` to the span of grid functions supported on
/// `[0,1]∖e`, via restricted least squares in the ν-metric.
pub fn projection_defect(
    e: &ElementarySet,
    f: &GridFunction,
    d: &SpectralDensity,
) -> Result<f64, PairingError> {
    let mode = SpectrumMode::SymmetricEnergy;
    let inside = cells_in(f, e);
    if inside.is_empty() {
        return Ok(0.0); // f itself lies in the span
    }
    let all: Vec<usize> = (0..f.n_samples()).collect();
    let outside: Vec<usize> = all.iter().cloned().filter(|j| !inside.contains(j)).collect();
    if outside.len() > DENSE_LIMIT {
        return Err(PairingError::GridTooLarge(outside.len(), DENSE_LIMIT));
    }
    let gram = NuGram::build(f, d, mode);
    let total = gram.quad_form(f.values());
    if outside.is_empty() {
        return Ok(total.max(0.0).sqrt());
    }
    // minimize (f-u)' M (f-u) over u supported outside e:
    // M_SS u_S = (M f)_S, defect^2 = f'Mf - u_S'(Mf)_S
    let n = f.n_samples();
    let mut mf = vec![0.0; n];
    for (j, slot) in mf.iter_mut().enumerate() {
        let mut acc = 0.0;
        for k in 0..n {
            acc += gram.entry(j, k) * f.values()[k];
        }
        *slot = acc;
    }
    let rhs = DVector::from_vec(outside.iter().map(|&j| mf[j]).collect::<Vec<_>>());
    let (mat, _ridge) = gram.restricted(&outside);
    let chol = Cholesky::new(mat).ok_or(PairingError::Factorization)?;
    let u = chol.solve(&rhs);
    Ok((total - u.dot(&rhs)).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elementary::EquidistantFamily;
    use crate::grid::nu_norm;
    use approx::assert_relative_eq;

    fn bump(n: usize) -> GridFunction {
        GridFunction::from_fn(0.0, 1.0, n, |t| {
            let u = (t - 0.5) * 6.0;
            (-u * u).exp()
        })
        .unwrap()
    }

    #[test]
    fn empty_set_pairs_to_zero() {
        let g = bump(128);
        let d = SpectralDensity::white();
        assert_eq!(weak_sup_pairing(&ElementarySet::empty(), &g, &d).unwrap(), 0.0);
        assert_eq!(projection_defect(&ElementarySet::empty(), &g, &d).unwrap(), 0.0);
    }

    #[test]
    fn gram_quadratic_form_matches_nu_norm() {
        let g = bump(256);
        let d = SpectralDensity::log_power(-1.0).unwrap();
        let gram = NuGram::build(&g, &d, SpectrumMode::SymmetricEnergy);
        let via_gram = gram.quad_form(g.values()).sqrt();
        assert_relative_eq!(via_gram, nu_norm(&g, &d), max_relative = 1e-9);
    }

    #[test]
    fn white_density_full_set_gives_l2_norm() {
        // with w == 1 the Gram form is dt * I, so the sup equals ||g||_L2
        let g = bump(256);
        let d = SpectralDensity::white();
        let v = weak_sup_pairing(&ElementarySet::full(), &g, &d).unwrap();
        assert_relative_eq!(v, g.l2_norm(), max_relative = 1e-8);
    }

    #[test]
    fn pairing_matches_projected_gradient_ascent() {
        // independent oracle: maximize h·c over the ellipsoid c'Mc <= 1 by
        // gradient steps with projection back onto the constraint
        let g = bump(64);
        let d = SpectralDensity::log_power(-1.0).unwrap();
        let e = ElementarySet::new([(0.25, 0.75)]).unwrap();
        let exact = weak_sup_pairing(&e, &g, &d).unwrap();

        let mode = SpectrumMode::SymmetricEnergy;
        let cells = cells_in(&g, &e);
        let gram = NuGram::build(&g, &d, mode);
        let h = pairing_vector(&g, &cells, mode);
        let m = cells.len();
        // gradient ascent on the scale-invariant ratio h·c / sqrt(c'Mc);
        // its unique maximizing direction is M^{-1}h
        let mut c = h.clone();
        let lam_max: f64 = (0..m)
            .map(|a| (0..m).map(|b| gram.entry(cells[a], cells[b]).abs()).sum())
            .fold(0.0, f64::max);
        let step = 0.5 / lam_max;
        let mut val = 0.0;
        for _ in 0..20_000 {
            let mut mc = vec![0.0; m];
            for a in 0..m {
                for b in 0..m {
                    mc[a] += gram.entry(cells[a], cells[b]) * c[b];
                }
            }
            let q: f64 = c.iter().zip(&mc).map(|(a, b)| a * b).sum();
            let s = q.sqrt();
            for a in 0..m {
                c[a] /= s;
                mc[a] /= s;
            }
            val = h.iter().zip(&c).map(|(a, b)| a * b).sum();
            for a in 0..m {
                c[a] += step * (h[a] - val * mc[a]);
            }
        }
        assert_relative_eq!(val, exact, max_relative = 1e-3);
    }

    #[test]
    fn pairing_monotone_in_the_set() {
        let g = bump(128);
        let d = SpectralDensity::log_power(-1.0).unwrap();
        let small = ElementarySet::new([(0.3, 0.5)]).unwrap();
        let large = ElementarySet::new([(0.2, 0.7)]).unwrap();
        let a = weak_sup_pairing(&small, &g, &d).unwrap();
        let b = weak_sup_pairing(&large, &g, &d).unwrap();
        assert!(a <= b + 1e-10, "{a} vs {b}");
    }

    #[test]
    fn pairing_grid_stability() {
        let d = SpectralDensity::log_power(-1.0).unwrap();
        let e = ElementarySet::new([(0.25, 0.625)]).unwrap();
        let coarse = bump(128);
        let fine = bump(256);
        let a = weak_sup_pairing(&e, &coarse, &d).unwrap();
        let b = weak_sup_pairing(&e, &fine, &d).unwrap();
        assert!(((b - a) / a).abs() <= 0.02, "{a} vs {b}");
    }

    #[test]
    fn defect_bounded_by_norm_and_decreases_with_eps() {
        let d = SpectralDensity::log_power(-1.0).unwrap();
        let n = 512;
        let f = GridFunction::from_fn(0.0, 1.0, n, |_| 1.0).unwrap();
        let norm = nu_norm(&f, &d);
        let mut prev = f64::INFINITY;
        for k in [2u64, 4, 8, 16] {
            let eps = 0.4 / k as f64;
            let e = EquidistantFamily::new(k, eps).unwrap().to_set().unwrap();
            let defect = projection_defect(&e, &f, &d).unwrap();
            assert!(defect <= norm + 1e-9);
            // restriction bound: defect <= ||f 1_E||_nu <= sup_w^1/2 * sqrt(eps) * sqrt(2)
            let cap = d.w(crate::spectral::E_SQUARED).sqrt() * eps.sqrt() * 2f64.sqrt();
            assert!(defect <= cap + 1e-6, "defect {defect} vs cap {cap}");
            assert!(defect <= prev);
            prev = defect;
        }
    }
}
