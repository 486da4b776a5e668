//! The versioned JSON report. Every number is finite; anything that cannot
//! be computed is a `null` paired with a `*_reason` field. Fields serialize
//! in declaration order, so two runs over the same input differ only in
//! `generated_at_unix`.

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

pub fn unix_now() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    /// The only key that changes between identical runs.
    pub generated_at_unix: u64,
    pub input: InputSummary,
    pub threshold: ThresholdBlock,
    pub fit: FitBlock,
    pub baseline: BaselineBlock,
    pub risk: Vec<RiskRow>,
    pub sensitivity_file: Option<String>,
    pub diagnostics_files: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct InputSummary {
    pub path: String,
    pub label: String,
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Serialize)]
pub struct ThresholdBlock {
    /// `absolute:X` or `quantile:Q`, as configured.
    pub spec: String,
    pub resolved_u: f64,
}

#[derive(Debug, Serialize)]
pub struct FitBlock {
    pub xi: f64,
    pub beta: f64,
    pub u: f64,
    pub n_total: usize,
    pub n_exceed: usize,
    pub loglik: f64,
    pub converged: bool,
}

#[derive(Debug, Serialize)]
pub struct BaselineBlock {
    pub normal: Option<NormalBlock>,
    pub normal_reason: Option<String>,
    pub lognormal: Option<LogNormalBlock>,
    pub lognormal_reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct NormalBlock {
    pub mu: f64,
    pub sigma2: f64,
    pub loglik: f64,
}

#[derive(Debug, Serialize)]
pub struct LogNormalBlock {
    pub mu_log: f64,
    pub sigma2_log: f64,
    pub loglik: f64,
}

/// Risk estimates at one confidence level. The `wc_` fields are the two
/// display conventions for the worst-case region: the share-of-ES product
/// `alpha * ES` and the plain tail probability `1 - alpha`. Neither feeds
/// any estimator.
#[derive(Debug, Serialize)]
pub struct RiskRow {
    pub alpha: f64,
    pub out_of_tail: bool,
    pub pot_var: Option<f64>,
    pub pot_var_reason: Option<String>,
    pub pot_es: Option<f64>,
    pub pot_es_reason: Option<String>,
    pub empirical_var: f64,
    pub empirical_es: f64,
    pub empirical_degenerate_tail: bool,
    pub wc_alpha_times_es: Option<f64>,
    pub wc_alpha_times_es_reason: Option<String>,
    pub wc_tail_probability: f64,
    pub decomposition: Option<DecompositionBlock>,
    pub decomposition_reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct DecompositionBlock {
    /// Which baseline model the regions refer to.
    pub model: String,
    pub x_alpha: f64,
    pub mean: f64,
    pub p_el: f64,
    pub p_ul: f64,
    pub p_wc: f64,
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("report serialization");
    text.push('\n');
    text
}
