//! Machine-readable run report written by `infer --out`.

use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub backend: String,
    pub config: ConfigEcho,
    /// Sorted by descending posterior.
    pub results: Vec<HypothesisRow>,
}

#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    pub burn_in: usize,
    pub window: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub c: f64,
    pub ig_layer: usize,
    pub ig_x: usize,
    pub cycle_max: usize,
    pub seed: u64,
    pub enumeration_cap: f64,
    pub term_cap: usize,
}

#[derive(Debug, Serialize)]
pub struct HypothesisRow {
    pub var: u32,
    pub state: usize,
    pub likelihood: f64,
    pub joint: f64,
    pub posterior: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
    pub wall_ms: f64,
}
