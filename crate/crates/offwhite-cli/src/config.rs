//! Experiment configuration: one JSON document per run, with one block per
//! subcommand. Unknown keys are rejected and configs round-trip unchanged,
//! so a report always embeds exactly what was run.

use serde::{Deserialize, Serialize};

use offwhite::randset::DiffusionParams;
use offwhite::DensitySpec;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separate: Option<SeparateBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flipdecay: Option<FlipDecayBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub randomset: Option<RandomSetBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kab: Option<KabBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gauss: Option<GaussBlock>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_check: Option<SpectralCheckBlock>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeparateBlock {
    /// Exponent of the dominated density `ln^{-a1}` (the faster decay).
    pub a1: f64,
    /// Exponent of the dominating density `ln^{-a2}`; requires `a1 > a2`.
    pub a2: f64,
    #[serde(default = "default_count")]
    pub count: u32,
    /// Comb sizes for the empirical norm table; capped by the grid.
    #[serde(default = "default_table_cap")]
    pub table_n_cap: u64,
}

fn default_count() -> u32 {
    30
}

fn default_table_cap() -> u64 {
    256
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FlipDecayBlock {
    pub density: DensitySpec,
    pub ns: Vec<u32>,
    #[serde(default = "default_samples")]
    pub n_samples: usize,
}

fn default_samples() -> usize {
    8192
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RandomSetBlock {
    pub diffusion: DiffusionParams,
    /// Box-dimension fit window; defaults derived from the hit tolerance.
    #[serde(default)]
    pub scale_lo: Option<f64>,
    #[serde(default)]
    pub scale_hi: Option<f64>,
    /// Also dump the full trajectory as binary (t, x, y) triples.
    #[serde(default)]
    pub dump_trajectory: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct KabBlock {
    pub spec: offwhite::randset::KabSpec,
    pub scenario: KabScenario,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KabScenario {
    Identity,
    Reflect,
    Distort,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GaussBlock {
    #[serde(default = "default_angles")]
    pub angle_points: usize,
    /// δ(α, n) columns to emit.
    #[serde(default = "default_ns")]
    pub ns: Vec<u32>,
    /// Ratios for the affinity table.
    #[serde(default = "default_ratios")]
    pub ratios: Vec<f64>,
}

fn default_angles() -> usize {
    100
}

fn default_ns() -> Vec<u32> {
    vec![1, 2, 5]
}

fn default_ratios() -> Vec<f64> {
    vec![0.5, 0.8, 1.0, 1.25, 2.0, 4.0]
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpectralCheckBlock {
    pub density: DensitySpec,
    pub cutoff: f64,
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[serde(default)]
    pub require_bounded: bool,
}

fn default_grid() -> usize {
    1024
}
