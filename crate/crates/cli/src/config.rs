//! Post-parse validation: range checks, mutual exclusion, and defaults.
//! Violations exit with the configuration code.

use evt_core::ingest::LossSeries;
use evt_core::pot::empirical_var;

use crate::args::{FormatArg, SignArg, ThresholdArgs};
use crate::CliFailure;

/// Default confidence levels; 0.995 mirrors the precautionary regulatory
/// choice.
pub const DEFAULT_ALPHAS: [f64; 3] = [0.95, 0.99, 0.995];

pub fn to_format(arg: FormatArg) -> evt_core::ingest::Format {
    match arg {
        FormatArg::Single => evt_core::ingest::Format::SingleColumn,
        FormatArg::Ts => evt_core::ingest::Format::TimestampValue,
    }
}

pub fn to_sign(arg: SignArg) -> evt_core::ingest::SignConvention {
    match arg {
        SignArg::AsIs => evt_core::ingest::SignConvention::AsIs,
        SignArg::Negate => evt_core::ingest::SignConvention::Negate,
    }
}

/// Threshold given either as an absolute value or as an empirical quantile.
#[derive(Debug, Clone, Copy)]
pub enum ThresholdSpec {
    Absolute(f64),
    Quantile(f64),
}

impl ThresholdSpec {
    /// Exactly one of the two flags must be present.
    pub fn from_args(args: &ThresholdArgs) -> Result<Self, CliFailure> {
        match (args.threshold, args.threshold_quantile) {
            (Some(_), Some(_)) => Err(CliFailure::config(
                "--threshold and --threshold-quantile are mutually exclusive",
            )),
            (None, None) => Err(CliFailure::config(
                "one of --threshold or --threshold-quantile is required",
            )),
            (Some(u), None) => {
                if !u.is_finite() {
                    return Err(CliFailure::config(format!(
                        "--threshold must be finite, got {u}"
                    )));
                }
                Ok(ThresholdSpec::Absolute(u))
            }
            (None, Some(q)) => {
                if !(q > 0.0 && q < 1.0) {
                    return Err(CliFailure::config(format!(
                        "--threshold-quantile must lie in (0,1), got {q}"
                    )));
                }
                Ok(ThresholdSpec::Quantile(q))
            }
        }
    }

    pub fn from_args_optional(args: &ThresholdArgs) -> Result<Option<Self>, CliFailure> {
        if args.threshold.is_none() && args.threshold_quantile.is_none() {
            return Ok(None);
        }
        Self::from_args(args).map(Some)
    }

    pub fn describe(&self) -> String {
        match self {
            ThresholdSpec::Absolute(u) => format!("absolute:{u}"),
            ThresholdSpec::Quantile(q) => format!("quantile:{q}"),
        }
    }

    /// The threshold in loss units; a quantile spec resolves through the
    /// empirical quantile of the series.
    pub fn resolve(&self, series: &LossSeries) -> Result<f64, CliFailure> {
        match self {
            ThresholdSpec::Absolute(u) => Ok(*u),
            ThresholdSpec::Quantile(q) => Ok(empirical_var(series, *q)?.var),
        }
    }
}

/// Validate the alpha list, or supply the defaults when empty.
pub fn validated_alphas(alphas: &[f64]) -> Result<Vec<f64>, CliFailure> {
    if alphas.is_empty() {
        return Ok(DEFAULT_ALPHAS.to_vec());
    }
    for &a in alphas {
        if !(a > 0.0 && a < 1.0) {
            return Err(CliFailure::config(format!(
                "--alpha must lie in (0,1), got {a}"
            )));
        }
    }
    Ok(alphas.to_vec())
}

pub fn validated_band(band: Option<f64>) -> Result<Option<f64>, CliFailure> {
    match band {
        None => Ok(None),
        Some(d) if d.is_finite() && d >= 0.0 => Ok(Some(d)),
        Some(d) => Err(CliFailure::config(format!(
            "--band must be a non-negative number, got {d}"
        ))),
    }
}

/// An explicit threshold grid `MIN:MAX:COUNT`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn parse(spec: &str) -> Result<Self, CliFailure> {
        let bad = |m: &str| CliFailure::config(format!("invalid --grid {spec:?}: {m}"));
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected MIN:MAX:COUNT"));
        }
        let min: f64 = parts[0].parse().map_err(|_| bad("MIN is not a number"))?;
        let max: f64 = parts[1].parse().map_err(|_| bad("MAX is not a number"))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| bad("COUNT is not an integer"))?;
        if !min.is_finite() || !max.is_finite() || min >= max {
            return Err(bad("requires finite MIN < MAX"));
        }
        if count < 2 {
            return Err(bad("COUNT must be at least 2"));
        }
        Ok(Self { min, max, count })
    }

    pub fn thresholds(&self) -> Vec<f64> {
        (0..self.count)
            .map(|i| self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64)
            .collect()
    }
}

/// Default diagnostics grid: empirical value quantiles from 0.85 to 0.985,
/// deduplicated to keep the grid strictly increasing. Tail-focused so that
/// per-threshold refits stay affordable on million-point inputs; pass
/// `--grid` to widen.
pub fn default_grid(series: &LossSeries) -> Result<Vec<f64>, CliFailure> {
    let mut grid = Vec::with_capacity(14);
    for i in 0..14 {
        let q = 0.85 + 0.135 * i as f64 / 13.0;
        let u = empirical_var(series, q)?.var;
        if grid.last().is_none_or(|&last| u > last) {
            grid.push(u);
        }
    }
    Ok(grid)
}

/// Resolve the grid flag or fall back to the data-driven default.
pub fn resolve_grid(spec: &Option<String>, series: &LossSeries) -> Result<Vec<f64>, CliFailure> {
    match spec {
        Some(text) => Ok(GridSpec::parse(text)?.thresholds()),
        None => default_grid(series),
    }
}
