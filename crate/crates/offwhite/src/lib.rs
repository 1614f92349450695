//! Numerical laboratory for off-white-noise spectral criteria, ν-norm
//! Fourier analysis, elementary-set infinitesimality diagnostics, Gaussian
//! measure geometry, and fractal random sets.
//!
//! The crate is organized around the objects the computations are relative
//! to:
//!
//! * [`spectral`] — spectral densities `w(λ) = e^{φ(λ)}` on the half-line and
//!   the double-energy / single-integral off-white criteria;
//! * [`grid`] — grid functions, unitary-convention spectra, the ν-norm, sign
//!   flips, and the closed-form transform of equidistant combs;
//! * [`elementary`] — the Boolean algebra of finite interval unions and the
//!   equidistant probe families;
//! * [`rates`] — sufficient/necessary rate criteria and the separating
//!   sequences that distinguish log-power densities;
//! * [`pairing`] — grid-level weak sup-pairing and ν-projection defects;
//! * [`gauss`] — Hellinger affinity products, equivalence defects, principal
//!   angles, and the two-plane orthogonalizing construction;
//! * [`randset`] — Cantor targets, the degenerate torus diffusion with its
//!   hit set, box dimension, the barrier diagnostic, and gap-encoded
//!   combinatorial sets.

pub mod elementary;
pub mod gauss;
pub mod grid;
pub mod pairing;
pub mod rates;
pub mod randset;
pub mod spectral;

pub use elementary::{make_equidistant, ElementarySet, EquidistantFamily};
pub use gauss::{
    affinity, affinity_distance, delta_bound, fhs_defect, log_affinity, orthogonalizing_norm,
    principal_angles, EigenRatioSeq, QuadraticFormPair, SubspacePair,
};
pub use grid::{
    fhat_comb_closed_form, flip_decay_experiment, fourier, fourier_step, nu_norm,
    nu_norm_sq_mode, sign_flip, FrequencySpectrum, GridFunction, SpectrumMode,
};
pub use pairing::{projection_defect, weak_sup_pairing};
pub use rates::{
    necessary_check, separation_witness, sufficient_check, CriterionVerdict, GeometricSchedule,
    RateFunction, SeparationWitness, Trend,
};
pub use spectral::{
    check_bounded_decay, check_offwhite, check_offwhite_with, DensityKind, DensitySpec,
    OffWhiteCertificate, OffWhiteVerdict, SpectralDensity,
};

/// Crate version for report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
