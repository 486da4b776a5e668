//! Out-of-sample calibration: fit on the leading fraction of the series,
//! then count how often the holdout exceeds each fitted VaR. A calibrated
//! model sees roughly `(1 - alpha) * N_holdout` exceedances; the report
//! carries the exact two-sided 99% binomial interval for that count.

use std::path::PathBuf;

use serde::Serialize;

use evt_core::ingest::{load_series, Format, LossSeries, SignConvention};
use evt_core::pot::{fit_pot, var_pot};
use evt_core::Error;

use crate::config::ThresholdSpec;
use crate::report::{to_pretty_json, unix_now, FitBlock, ThresholdBlock, SCHEMA_VERSION};
use crate::CliFailure;

pub const BACKTEST_CONFIDENCE: f64 = 0.99;

pub struct BacktestConfig {
    pub input: PathBuf,
    pub format: Format,
    pub sign: SignConvention,
    pub split: f64,
    pub threshold: ThresholdSpec,
    pub alphas: Vec<f64>,
    pub out_dir: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct BacktestRow {
    pub alpha: f64,
    pub var: Option<f64>,
    pub observed: Option<u64>,
    /// `(1 - alpha) * N_holdout`, exactly.
    pub expected: f64,
    pub interval_low: Option<u64>,
    pub interval_high: Option<u64>,
    pub inside_interval: Option<bool>,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct BacktestReport {
    pub schema_version: u32,
    pub generated_at_unix: u64,
    pub n_total: usize,
    pub n_train: usize,
    pub n_holdout: usize,
    pub threshold: ThresholdBlock,
    pub fit: FitBlock,
    pub confidence: f64,
    pub rows: Vec<BacktestRow>,
}

/// Exact binomial quantile scan: the smallest `k` with `CDF(k) >= q`, for
/// the two tail levels of an equal-tailed interval. Log-space terms keep
/// the scan stable for large `n`.
pub fn binomial_interval(n: u64, p: f64, confidence: f64) -> (u64, u64) {
    let tail = 0.5 * (1.0 - confidence);
    let (q_lo, q_hi) = (tail, 1.0 - tail);
    let nf = n as f64;
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let ln_n_fact = libm::lgamma(nf + 1.0);

    let mut cdf = 0.0;
    let mut low = None;
    let mut high = None;
    for k in 0..=n {
        let kf = k as f64;
        let ln_pmf = ln_n_fact - libm::lgamma(kf + 1.0) - libm::lgamma(nf - kf + 1.0)
            + kf * ln_p
            + (nf - kf) * ln_q;
        cdf += ln_pmf.exp();
        if low.is_none() && cdf >= q_lo {
            low = Some(k);
        }
        if cdf >= q_hi {
            high = Some(k);
            break;
        }
    }
    (low.unwrap_or(n), high.unwrap_or(n))
}

pub fn run_backtest(config: &BacktestConfig) -> Result<BacktestReport, CliFailure> {
    if !(config.split > 0.0 && config.split < 1.0) {
        return Err(CliFailure::config(format!(
            "--split must lie strictly inside (0,1) so both halves are nonempty, got {}",
            config.split
        )));
    }
    let series = load_series(&config.input, config.format, config.sign)?;
    let n_train = (config.split * series.n() as f64).floor() as usize;
    let n_holdout = series.n() - n_train;
    if n_train == 0 || n_holdout == 0 {
        return Err(CliFailure::config(format!(
            "split {} leaves an empty half (train {n_train}, holdout {n_holdout})",
            config.split
        )));
    }

    let train = LossSeries::new(
        series.values()[..n_train].to_vec(),
        format!("{}-train", series.label()),
    )?;
    let holdout = &series.values()[n_train..];

    let u = config.threshold.resolve(&train)?;
    let fit = fit_pot(&train, u)?;
    if !fit.converged() {
        return Err(CliFailure::fit(format!(
            "GPD fit did not converge at threshold {u}"
        )));
    }

    let mut rows = Vec::with_capacity(config.alphas.len());
    for &alpha in &config.alphas {
        let expected = (1.0 - alpha) * n_holdout as f64;
        match var_pot(alpha, &fit) {
            Ok(est) => {
                let observed = evt_core::par::count(holdout, |&x| x > est.var) as u64;
                let (lo, hi) =
                    binomial_interval(n_holdout as u64, 1.0 - alpha, BACKTEST_CONFIDENCE);
                rows.push(BacktestRow {
                    alpha,
                    var: Some(est.var),
                    observed: Some(observed),
                    expected,
                    interval_low: Some(lo),
                    interval_high: Some(hi),
                    inside_interval: Some(observed >= lo && observed <= hi),
                    reason: None,
                });
            }
            Err(err @ Error::OutOfTail { .. }) => {
                rows.push(BacktestRow {
                    alpha,
                    var: None,
                    observed: None,
                    expected,
                    interval_low: None,
                    interval_high: None,
                    inside_interval: None,
                    reason: Some(err.to_string()),
                });
            }
            Err(other) => return Err(other.into()),
        }
    }

    let report = BacktestReport {
        schema_version: SCHEMA_VERSION,
        generated_at_unix: unix_now(),
        n_total: series.n(),
        n_train,
        n_holdout,
        threshold: ThresholdBlock {
            spec: config.threshold.describe(),
            resolved_u: u,
        },
        fit: FitBlock {
            xi: fit.params().xi(),
            beta: fit.params().beta(),
            u: fit.u(),
            n_total: fit.n_total(),
            n_exceed: fit.n_exceed(),
            loglik: fit.loglik(),
            converged: fit.converged(),
        },
        confidence: BACKTEST_CONFIDENCE,
        rows,
    };

    std::fs::create_dir_all(&config.out_dir).map_err(|e| {
        CliFailure::input(format!("cannot create {}: {e}", config.out_dir.display()))
    })?;
    let path = config.out_dir.join("backtest.json");
    std::fs::write(&path, to_pretty_json(&report))
        .map_err(|e| CliFailure::input(format!("cannot write {}: {e}", path.display())))?;

    Ok(report)
}
