//! Rate functions and the sufficient/necessary criteria for the
//! infinitesimality of equidistant families.
//!
//! For a sequence of equidistant families `(n_k, ε_k)`:
//!
//! * sufficient side (lower bound `ν(dλ) ≥ β(λ)dλ`, `β` decreasing with
//!   `λ²β(λ)` increasing): `mes((E)_{+δ}) / β(1/δ) → 0` certifies the
//!   weak-closure condition; with the stronger `λβ(λ)`-increasing tag it is
//!   equivalent to `(1/ε) β(n/ε) → ∞` at `δ = ε/n`;
//! * necessary side (upper bound `ν(dλ) ≤ α(λ)dλ`, `α` slowly varying):
//!   `(1/ε) α(n/ε) → 0` forces `‖f_n − f‖_ν → 0`, so the condition fails.
//!
//! [`separation_witness`] builds one sequence that satisfies the sufficient
//! criterion for a `β`-dominated density while triggering the necessary
//! failure for an `α`-dominated one — the desk-scale engine behind the
//! continuum of mutually distinguishable products.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::elementary::{EquidistantFamily, SetError};

#[derive(Debug, Error)]
pub enum RateError {
    #[error("rate contract violated: {0}")]
    ContractViolation(String),
    #[error("ratio test failed: {0}")]
    RatioTest(String),
    #[error("witness construction failed: {0}")]
    Witness(String),
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneTag {
    Decreasing,
    Increasing,
    None,
}

/// A positive rate function on `(0, ∞)` with declared monotonicity tags.
///
/// Tags are verified on a logarithmic sample grid at construction time, not
/// assumed.
#[derive(Clone)]
pub struct RateFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub monotone: MonotoneTag,
    /// `λ ↦ λ²f(λ)` increasing.
    pub lambda_sq_increasing: bool,
    /// `λ ↦ λf(λ)` increasing (the stronger tag enabling the simplified
    /// sufficient criterion).
    pub lambda_increasing: bool,
    label: String,
}

impl fmt::Debug for RateFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RateFunction({})", self.label)
    }
}

/// Verification grid: logarithmic ladder over the large-λ regime the
/// criteria operate in.
const GRID_LO: f64 = 10.0;
const GRID_HI: f64 = 1e9;
const GRID_POINTS: usize = 64;

fn log_grid() -> impl Iterator<Item = f64> {
    let step = (GRID_HI / GRID_LO).powf(1.0 / (GRID_POINTS - 1) as f64);
    (0..GRID_POINTS).map(move |i| GRID_LO * step.powi(i as i32))
}

impl RateFunction {
    /// Builds a rate function, verifying the declared tags on the sample
    /// grid.
    pub fn new(
        label: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        monotone: MonotoneTag,
        lambda_sq_increasing: bool,
        lambda_increasing: bool,
    ) -> Result<Self, RateError> {
        let rate = Self {
            f: Arc::new(f),
            monotone,
            lambda_sq_increasing,
            lambda_increasing,
            label: label.into(),
        };
        rate.verify()?;
        Ok(rate)
    }

    /// `ln^{-a} λ` with the standard tags (requires `a ≥ 0`).
    ///
    /// `λ·ln^{-a}λ` only increases beyond `e^a`; when that escapes the
    /// verification grid the strong tag is dropped rather than assumed.
    pub fn log_power_decay(a: f64) -> Result<Self, RateError> {
        if !(a >= 0.0) {
            return Err(RateError::ContractViolation(format!(
                "log_power_decay needs a >= 0, got {a}"
            )));
        }
        let make = |strong: bool| {
            Self::new(
                format!("ln^-{a}"),
                move |lam| lam.max(1.0 + 1e-9).ln().powf(-a),
                MonotoneTag::Decreasing,
                true,
                strong,
            )
        };
        make(true).or_else(|_| make(false))
    }

    /// Constant rate; weakly decreasing, so it satisfies the sufficient-side
    /// contract.
    pub fn constant(c: f64) -> Result<Self, RateError> {
        if !(c > 0.0) {
            return Err(RateError::ContractViolation("constant rate must be positive".into()));
        }
        Self::new(format!("const {c}"), move |_| c, MonotoneTag::Decreasing, true, true)
    }

    pub fn eval(&self, lam: f64) -> f64 {
        (self.f)(lam)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn verify(&self) -> Result<(), RateError> {
        let xs: Vec<f64> = log_grid().collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        if ys.iter().any(|y| !(y.is_finite() && *y > 0.0)) {
            return Err(RateError::ContractViolation(format!(
                "{} is not positive and finite on the sample grid",
                self.label
            )));
        }
        let tol = 1.0 + 1e-9;
        let check = |name: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(RateError::ContractViolation(format!("{}: {name} fails", self.label)))
            }
        };
        match self.monotone {
            MonotoneTag::Decreasing => check(
                "declared decreasing",
                ys.windows(2).all(|p| p[1] <= p[0] * tol),
            )?,
            MonotoneTag::Increasing => check(
                "declared increasing",
                ys.windows(2).all(|p| p[1] * tol >= p[0]),
            )?,
            MonotoneTag::None => {}
        }
        if self.lambda_sq_increasing {
            check(
                "lambda^2 f increasing",
                xs.windows(2)
                    .zip(ys.windows(2))
                    .all(|(x, y)| x[1] * x[1] * y[1] * tol >= x[0] * x[0] * y[0]),
            )?;
        }
        if self.lambda_increasing {
            check(
                "lambda f increasing",
                xs.windows(2)
                    .zip(ys.windows(2))
                    .all(|(x, y)| x[1] * y[1] * tol >= x[0] * y[0]),
            )?;
        }
        Ok(())
    }

    /// Spot check of slow variation: `f(2λ)/f(λ) → 1` along the log grid.
    pub fn verify_slowly_varying(&self) -> Result<(), RateError> {
        let devs: Vec<f64> = log_grid()
            .map(|x| (self.eval(2.0 * x) / self.eval(x) - 1.0).abs())
            .collect();
        let last = *devs.last().unwrap();
        let max = devs.iter().cloned().fold(0.0, f64::max);
        let trending = last <= max * (1.0 + 1e-9);
        if last < 0.15 && trending {
            Ok(())
        } else {
            Err(RateError::ContractViolation(format!(
                "{} fails the slow-variation spot check: |f(2λ)/f(λ)-1| ends at {last:.3}",
                self.label
            )))
        }
    }
}

/// Trend of a finite positive sequence, classified by frozen thresholds:
/// tends-to-zero needs the last value below `0.25·max` with the last five
/// values decreasing; tends-to-infinity dually (`last > 4·min`, last five
/// increasing).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    TendsToZero,
    TendsToInfinity,
    BoundedAway,
    Inconclusive,
}

pub fn classify_trend(values: &[f64]) -> Trend {
    if values.len() < 5 {
        return Trend::Inconclusive;
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let last = *values.last().unwrap();
    let tail = &values[values.len() - 5..];
    let tail_decreasing = tail.windows(2).all(|p| p[1] < p[0]);
    let tail_increasing = tail.windows(2).all(|p| p[1] > p[0]);
    if last < 0.25 * max && tail_decreasing {
        Trend::TendsToZero
    } else if last > 4.0 * min && tail_increasing {
        Trend::TendsToInfinity
    } else if last >= 0.25 * max {
        Trend::BoundedAway
    } else {
        Trend::Inconclusive
    }
}

/// Verdict on the weak-closure condition for the probed sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriterionVerdict {
    /// Sufficient criterion fires: condition satisfied.
    Satisfied,
    /// Ratio stays bounded away from zero: saturation, not satisfied.
    NotSatisfied,
    /// Necessary-side values tend to zero: `‖f_n − f‖_ν → 0`, condition fails.
    Fails,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SufficientReport {
    /// `mes((E_n)_{+δ_n}) / β(1/δ_n)` per index.
    pub ratios: Vec<f64>,
    /// Simplified criterion values `(1/ε_n)·β(n_n/ε_n)` (present when
    /// `λβ(λ)` is increasing).
    pub simplified: Option<Vec<f64>>,
    pub deltas: Vec<f64>,
    pub ratio_trend: Trend,
    pub simplified_trend: Option<Trend>,
    pub verdict: CriterionVerdict,
}

/// Evaluates the neighborhood-measure sufficient criterion.
///
/// `deltas`, when absent, default to `δ_n = ε_n/n`. The verdict is
/// `Satisfied` when the ratio tends to zero, or — equivalently under the
/// `λβ(λ)`-increasing tag — when the simplified values tend to infinity.
pub fn sufficient_check(
    fams: &[EquidistantFamily],
    beta: &RateFunction,
    deltas: Option<&[f64]>,
) -> Result<SufficientReport, RateError> {
    if beta.monotone != MonotoneTag::Decreasing || !beta.lambda_sq_increasing {
        return Err(RateError::ContractViolation(format!(
            "sufficient criterion needs beta decreasing with lambda^2 beta increasing ({})",
            beta.label
        )));
    }
    let deltas: Vec<f64> = match deltas {
        Some(d) => {
            if d.len() != fams.len() {
                return Err(RateError::ContractViolation(
                    "deltas must match the family sequence length".into(),
                ));
            }
            d.to_vec()
        }
        None => fams.iter().map(|f| f.eps / f.n as f64).collect(),
    };
    let mut ratios = Vec::with_capacity(fams.len());
    for (fam, &delta) in fams.iter().zip(&deltas) {
        if !(delta > 0.0) {
            return Err(RateError::ContractViolation("deltas must be positive".into()));
        }
        ratios.push(fam.neighborhood_measure(delta) / beta.eval(1.0 / delta));
    }
    let simplified: Option<Vec<f64>> = beta.lambda_increasing.then(|| {
        fams.iter()
            .map(|f| (1.0 / f.eps) * beta.eval(f.n as f64 / f.eps))
            .collect()
    });
    let ratio_trend = classify_trend(&ratios);
    let simplified_trend = simplified.as_deref().map(classify_trend);
    let verdict = if ratio_trend == Trend::TendsToZero
        || simplified_trend == Some(Trend::TendsToInfinity)
    {
        CriterionVerdict::Satisfied
    } else if ratio_trend == Trend::BoundedAway || ratio_trend == Trend::TendsToInfinity {
        CriterionVerdict::NotSatisfied
    } else {
        CriterionVerdict::Inconclusive
    };
    Ok(SufficientReport { ratios, simplified, deltas, ratio_trend, simplified_trend, verdict })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NecessaryReport {
    /// `(1/ε_n)·α(n_n/ε_n)` per index.
    pub values: Vec<f64>,
    pub trend: Trend,
    pub verdict: CriterionVerdict,
}

/// Evaluates the necessary criterion for a slowly varying upper rate `α`.
///
/// Values tending to zero mean the comb functions converge to the full
/// indicator in ν-norm, so the weak-closure condition fails.
pub fn necessary_check(
    fams: &[EquidistantFamily],
    alpha: &RateFunction,
) -> Result<NecessaryReport, RateError> {
    alpha.verify_slowly_varying()?;
    let values: Vec<f64> = fams
        .iter()
        .map(|f| (1.0 / f.eps) * alpha.eval(f.n as f64 / f.eps))
        .collect();
    let trend = classify_trend(&values);
    let verdict = match trend {
        Trend::TendsToZero => CriterionVerdict::Fails,
        _ => CriterionVerdict::Inconclusive,
    };
    Ok(NecessaryReport { values, trend, verdict })
}

/// One separating sequence: `λ_k` geometric, `n_k` the rounded-up geometric
/// mean of `λ_kα(λ_k)` and `λ_kβ(λ_k)`, clamped so that `ε_k = n_k/λ_k ≤ 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeparationWitness {
    pub ks: Vec<u32>,
    pub lambda_k: Vec<f64>,
    pub n_k: Vec<u64>,
    pub eps_k: Vec<f64>,
    pub delta_k: Vec<f64>,
    /// `(1/ε_k)·α(n_k/ε_k)` — must tend to zero.
    pub diag_alpha: Vec<f64>,
    /// `(1/ε_k)·β(n_k/ε_k)` — must tend to infinity.
    pub diag_beta: Vec<f64>,
    /// First index of the strictly monotone tail of both diagnostics.
    pub tail_start: usize,
}

impl SeparationWitness {
    pub fn families(&self) -> Result<Vec<EquidistantFamily>, SetError> {
        self.n_k
            .iter()
            .zip(&self.eps_k)
            .map(|(&n, &eps)| EquidistantFamily::new(n, eps))
            .collect()
    }

    pub fn to_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,lambda_k,n_k,eps_k,delta_k,diag_alpha,diag_beta")?;
        for i in 0..self.ks.len() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                self.ks[i],
                self.lambda_k[i],
                self.n_k[i],
                self.eps_k[i],
                self.delta_k[i],
                self.diag_alpha[i],
                self.diag_beta[i]
            )?;
        }
        Ok(())
    }
}

/// Geometric frequency schedule `λ_k = base·growthᵏ`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GeometricSchedule {
    pub base: f64,
    pub growth: f64,
}

impl Default for GeometricSchedule {
    fn default() -> Self {
        // lambda_k = e^k
        Self { base: 1.0, growth: std::f64::consts::E }
    }
}

/// Constructs the separating sequence for `α ≪ β` (rate-wise).
///
/// Fails when `β/α` does not grow along the log grid, or when some `n_k`
/// would fall below 1.
pub fn separation_witness(
    alpha: &RateFunction,
    beta: &RateFunction,
    count: u32,
    schedule: GeometricSchedule,
) -> Result<SeparationWitness, RateError> {
    alpha.verify_slowly_varying()?;
    if beta.monotone != MonotoneTag::Decreasing || !beta.lambda_sq_increasing {
        return Err(RateError::ContractViolation(format!(
            "witness needs beta decreasing with lambda^2 beta increasing ({})",
            beta.label
        )));
    }
    // limsup beta/alpha = infinity, probed on the log grid
    let ratios: Vec<f64> = log_grid().map(|x| beta.eval(x) / alpha.eval(x)).collect();
    let first = ratios[0];
    let last = *ratios.last().unwrap();
    if !(last > 4.0 * first && last > 4.0) {
        return Err(RateError::RatioTest(format!(
            "beta/alpha must grow without bound; sampled {first:.3} -> {last:.3}"
        )));
    }
    if count < 2 {
        return Err(RateError::Witness("witness needs at least two indices".into()));
    }

    let mut ks = Vec::new();
    let mut lambda_k = Vec::new();
    let mut n_k = Vec::new();
    let mut eps_k = Vec::new();
    let mut delta_k = Vec::new();
    let mut diag_alpha = Vec::new();
    let mut diag_beta = Vec::new();
    for k in 1..=count {
        let lam = schedule.base * schedule.growth.powi(k as i32);
        let low = lam * alpha.eval(lam);
        let high = lam * beta.eval(lam);
        if !(high > 0.0 && low > 0.0) {
            return Err(RateError::Witness(format!("rates vanish at lambda_{k} = {lam}")));
        }
        let geo = (low * high).sqrt();
        let n = geo.ceil().min(lam.floor()).max(1.0);
        let eps = n / lam;
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(RateError::Witness(format!("eps_{k} = {eps} escapes (0, 1]")));
        }
        ks.push(k);
        lambda_k.push(lam);
        n_k.push(n as u64);
        eps_k.push(eps);
        delta_k.push(eps / n);
        diag_alpha.push((1.0 / eps) * alpha.eval(n / eps));
        diag_beta.push((1.0 / eps) * beta.eval(n / eps));
    }

    // locate the strictly monotone tail of both diagnostics
    let mut tail_start = 0;
    for i in 1..ks.len() {
        if !(diag_alpha[i] < diag_alpha[i - 1] && diag_beta[i] > diag_beta[i - 1]) {
            tail_start = i;
        }
    }
    if tail_start > ks.len() / 2 {
        return Err(RateError::Witness(format!(
            "diagnostics fail to split: monotone tail starts only at index {tail_start}"
        )));
    }
    Ok(SeparationWitness {
        ks,
        lambda_k,
        n_k,
        eps_k,
        delta_k,
        diag_alpha,
        diag_beta,
        tail_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tags_are_verified_not_assumed() {
        // lambda * lambda^-2 = 1/lambda decreases: the strong tag must fail
        let err = RateFunction::new(
            "1/l^2",
            |lam| lam.powi(-2),
            MonotoneTag::Decreasing,
            true,
            true,
        );
        assert!(err.is_err());
        // lambda^2 * lambda^-2 = const passes the weak tag
        let ok = RateFunction::new(
            "1/l^2 weak",
            |lam| lam.powi(-2),
            MonotoneTag::Decreasing,
            true,
            false,
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn slow_variation_spot_check() {
        assert!(RateFunction::log_power_decay(2.0).unwrap().verify_slowly_varying().is_ok());
        assert!(RateFunction::constant(1.0).unwrap().verify_slowly_varying().is_ok());
        let sqrt = RateFunction::new(
            "sqrt",
            |lam| lam.sqrt(),
            MonotoneTag::Increasing,
            true,
            true,
        )
        .unwrap();
        assert!(sqrt.verify_slowly_varying().is_err());
    }

    #[test]
    fn necessary_values_follow_exact_arithmetic() {
        // alpha = ln^-2 and n/eps = e^k give values (1/eps)·k^-2 ~ k^-0.5
        let alpha = RateFunction::log_power_decay(2.0).unwrap();
        let mut fams = Vec::new();
        for k in 1..=30u32 {
            let lam = (k as f64).exp();
            let n = (lam / (k as f64).powf(1.5)).ceil().min(lam.floor()).max(1.0);
            fams.push(EquidistantFamily::new(n as u64, n / lam).unwrap());
        }
        let report = necessary_check(&fams, &alpha).unwrap();
        for (i, v) in report.values.iter().enumerate().skip(9) {
            let k = (i + 1) as f64;
            // rounding of n_k is negligible for large k
            assert_relative_eq!(*v, k.powf(-0.5), max_relative = 2e-3);
        }
        assert_eq!(report.trend, Trend::TendsToZero);
        assert_eq!(report.verdict, CriterionVerdict::Fails);
    }

    #[test]
    fn necessary_constant_alpha_inconclusive() {
        let alpha = RateFunction::constant(1.0).unwrap();
        let fams: Vec<EquidistantFamily> = (1..=12)
            .map(|k| EquidistantFamily::new(k, 1.0 / k as f64).unwrap())
            .collect();
        let report = necessary_check(&fams, &alpha).unwrap();
        assert_eq!(report.trend, Trend::TendsToInfinity);
        assert_eq!(report.verdict, CriterionVerdict::Inconclusive);
    }

    #[test]
    fn sufficient_constant_beta_with_shrinking_eps() {
        // criterion (1/eps)*c -> infinity whenever eps -> 0; the ratio at
        // delta = eps/n is 3*eps/c -> 0
        let beta = RateFunction::constant(0.5).unwrap();
        let fams: Vec<EquidistantFamily> = (1..=12)
            .map(|k| EquidistantFamily::new(1 << k, 0.5f64.powi(k as i32)).unwrap())
            .collect();
        let report = sufficient_check(&fams, &beta, None).unwrap();
        assert_eq!(report.verdict, CriterionVerdict::Satisfied);
        assert_eq!(report.ratio_trend, Trend::TendsToZero);
        let simplified = report.simplified.unwrap();
        assert!(simplified.last().unwrap() > &100.0);
    }

    #[test]
    fn sufficient_fixed_delta_saturates() {
        let beta = RateFunction::log_power_decay(1.0).unwrap();
        let fams: Vec<EquidistantFamily> = (1..=10)
            .map(|k| EquidistantFamily::new(1 << k, 0.5).unwrap())
            .collect();
        let deltas = vec![0.05; fams.len()];
        let report = sufficient_check(&fams, &beta, Some(&deltas)).unwrap();
        // neighborhood measure saturates at 1, beta(1/delta) is constant
        assert_eq!(report.verdict, CriterionVerdict::NotSatisfied);
        assert_eq!(report.ratio_trend, Trend::BoundedAway);
        let last = *report.ratios.last().unwrap();
        assert_relative_eq!(last, 1.0 / beta.eval(20.0), max_relative = 1e-9);
    }

    #[test]
    fn witness_matches_closed_form() {
        let alpha = RateFunction::log_power_decay(2.0).unwrap();
        let beta = RateFunction::log_power_decay(1.0).unwrap();
        let w = separation_witness(&alpha, &beta, 30, GeometricSchedule::default()).unwrap();
        assert_eq!(w.ks.len(), 30);
        // n_k = ceil(e^k / k^1.5) except where the eps <= 1 clamp bites (k=1)
        for i in 1..30 {
            let k = (i + 1) as f64;
            let expect = (k.exp() / k.powf(1.5)).ceil();
            assert_eq!(w.n_k[i] as f64, expect, "k={k}");
            assert!(w.eps_k[i] > 0.0 && w.eps_k[i] <= 1.0);
            assert_relative_eq!(w.eps_k[i], w.n_k[i] as f64 / w.lambda_k[i]);
        }
        // frozen diagonals at k = 30
        assert_relative_eq!(w.diag_alpha[29], 0.182574, max_relative = 1e-4);
        assert_relative_eq!(w.diag_beta[29], 5.477, max_relative = 1e-3);
        assert!(w.tail_start <= 2);
        for i in (w.tail_start + 1)..30 {
            assert!(w.diag_alpha[i] < w.diag_alpha[i - 1]);
            assert!(w.diag_beta[i] > w.diag_beta[i - 1]);
        }
    }

    #[test]
    fn sharper_exponent_gap_splits_harder() {
        // same geometric schedule, exponents (3, 1): diagonals ~ k^{-1} and
        // k^{+1} instead of k^{∓1/2}
        let alpha = RateFunction::log_power_decay(3.0).unwrap();
        let beta = RateFunction::log_power_decay(1.0).unwrap();
        let w = separation_witness(&alpha, &beta, 30, GeometricSchedule::default()).unwrap();
        assert_relative_eq!(w.diag_alpha[29], 1.0 / 30.0, max_relative = 1e-4);
        assert_relative_eq!(w.diag_beta[29], 30.0, max_relative = 1e-4);
        // sharper than the (2, 1) split on both sides
        let base = separation_witness(
            &RateFunction::log_power_decay(2.0).unwrap(),
            &beta,
            30,
            GeometricSchedule::default(),
        )
        .unwrap();
        assert!(w.diag_alpha[29] < base.diag_alpha[29]);
        assert!(w.diag_beta[29] > base.diag_beta[29]);
    }

    #[test]
    fn witness_rejects_equal_and_swapped_rates() {
        let alpha = RateFunction::log_power_decay(2.0).unwrap();
        let beta = RateFunction::log_power_decay(1.0).unwrap();
        assert!(matches!(
            separation_witness(&alpha, &alpha.clone(), 20, GeometricSchedule::default()),
            Err(RateError::RatioTest(_))
        ));
        assert!(matches!(
            separation_witness(&beta, &alpha, 20, GeometricSchedule::default()),
            Err(RateError::RatioTest(_))
        ));
    }

    #[test]
    fn witness_consistency_both_checks_on_same_sequence() {
        let alpha = RateFunction::log_power_decay(2.0).unwrap();
        let beta = RateFunction::log_power_decay(1.0).unwrap();
        let w = separation_witness(&alpha, &beta, 30, GeometricSchedule::default()).unwrap();
        let fams = w.families().unwrap();
        let nec = necessary_check(&fams, &alpha).unwrap();
        assert_eq!(nec.verdict, CriterionVerdict::Fails);
        let suf = sufficient_check(&fams, &beta, None).unwrap();
        assert_eq!(suf.verdict, CriterionVerdict::Satisfied);
    }

    #[test]
    fn trend_thresholds() {
        assert_eq!(classify_trend(&[1.0, 0.5, 0.4, 0.3, 0.2, 0.1]), Trend::TendsToZero);
        assert_eq!(classify_trend(&[1.0, 2.0, 3.0, 5.0, 7.0, 9.0]), Trend::TendsToInfinity);
        assert_eq!(classify_trend(&[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]), Trend::BoundedAway);
        assert_eq!(classify_trend(&[1.0, 0.2]), Trend::Inconclusive);
    }

    #[test]
    fn witness_csv_has_fixed_columns() {
        let alpha = RateFunction::log_power_decay(2.0).unwrap();
        let beta = RateFunction::log_power_decay(1.0).unwrap();
        let w = separation_witness(&alpha, &beta, 8, GeometricSchedule::default()).unwrap();
        let mut buf = Vec::new();
        w.to_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,lambda_k,n_k,eps_k,delta_k,diag_alpha,diag_beta\n"));
        assert_eq!(text.lines().count(), 9);
    }
}
