//! Deterministic simulation support.
//!
//! The uniform stream is splitmix64. The state advances by the golden-ratio
//! increment and each output is finalized with two xor-shift-multiply
//! rounds:
//!
//! - increment:   0x9E37_79B9_7F4A_7C15
//! - multiplier A: 0xBF58_476D_1CE4_E5B9 (after `z ^= z >> 30`)
//! - multiplier B: 0x94D0_49BB_1331_11EB (after `z ^= z >> 27`)
//! - final mix:    `z ^= z >> 31`
//!
//! The i-th output (0-based) is `mix(seed + (i + 1) * increment)`, so draws
//! are random-access: generation parallelizes without changing the stream.
//! A draw maps the top 53 bits to the open interval (0, 1) as
//! `(k + 0.5) / 2^53`, keeping inverse-CDF transforms away from both
//! endpoints. Identical seed and parameters produce identical output on
//! every platform.

use std::path::Path;

use evt_core::dist::{gpd_quantile, lognormal_quantile, GpdParams, LogNormalParams};
use evt_core::ingest::{write_single_column, LossSeries};
use evt_core::{Error, Result};

const INCREMENT: u64 = 0x9E37_79B9_7F4A_7C15;
const MULT_A: u64 = 0xBF58_476D_1CE4_E5B9;
const MULT_B: u64 = 0x94D0_49BB_1331_11EB;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MULT_A);
    z = (z ^ (z >> 27)).wrapping_mul(MULT_B);
    z ^ (z >> 31)
}

/// The i-th uniform draw of the stream for `seed`, strictly inside (0, 1).
pub fn uniform_at(seed: u64, index: u64) -> f64 {
    let word = mix(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(INCREMENT)));
    ((word >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Model family to draw variates from.
#[derive(Debug, Clone, Copy)]
pub enum SimModel {
    Gpd(GpdParams),
    LogNormal(LogNormalParams),
}

impl SimModel {
    /// Parse `gpd:XI:BETA` or `lognormal:MU:SIGMA2`.
    pub fn parse(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let bad = |m: &str| Error::Domain(format!("invalid model spec {spec:?}: {m}"));
        if parts.len() != 3 {
            return Err(bad("expected FAMILY:PARAM1:PARAM2"));
        }
        let a: f64 = parts[1]
            .parse()
            .map_err(|_| bad("first parameter is not a number"))?;
        let b: f64 = parts[2]
            .parse()
            .map_err(|_| bad("second parameter is not a number"))?;
        match parts[0] {
            "gpd" => Ok(SimModel::Gpd(GpdParams::new(a, b)?)),
            "lognormal" => Ok(SimModel::LogNormal(LogNormalParams::new(a, b)?)),
            other => Err(bad(&format!("unknown family {other:?}"))),
        }
    }

    fn quantile(&self, prob: f64) -> Result<f64> {
        match self {
            SimModel::Gpd(p) => gpd_quantile(prob, p),
            SimModel::LogNormal(p) => lognormal_quantile(prob, p),
        }
    }
}

/// Draw `n` variates by inverse-CDF transform of the seeded uniform stream
/// and shift them by `offset`.
pub fn simulate(seed: u64, n: usize, model: SimModel, offset: f64) -> Result<LossSeries> {
    if n == 0 {
        return Err(Error::Domain("simulation size must be at least 1".into()));
    }
    if !offset.is_finite() {
        return Err(Error::Domain(format!(
            "offset must be finite, got {offset}"
        )));
    }
    let values = evt_core::par::map_range(n, |i| {
        let u = uniform_at(seed, i as u64);
        offset + model.quantile(u).expect("uniform draws lie in (0,1)")
    });
    LossSeries::new(values, format!("sim-{seed}"))
}

/// Simulate and write the series as a single-column file.
pub fn simulate_to_file(
    seed: u64,
    n: usize,
    model: SimModel,
    offset: f64,
    path: &Path,
) -> Result<LossSeries> {
    let series = simulate(seed, n, model, offset)?;
    write_single_column(&series, path)?;
    Ok(series)
}
