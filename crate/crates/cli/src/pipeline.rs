//! The `analyze` pipeline: load, resolve the threshold, fit the tail,
//! compute closed-form and empirical risk estimates at every confidence
//! level, and emit the report plus plot data.
//!
//! All computation happens before anything touches the output directory, so
//! a failing run leaves no partial outputs.

use std::path::{Path, PathBuf};

use evt_core::diagnostics::{
    borderline_sensitivity, mean_excess_curve, threshold_stability, SensitivityReport,
};
use evt_core::fit::{fit_lognormal, fit_normal};
use evt_core::ingest::{load_series, Format, LossSeries, SignConvention};
use evt_core::pot::{empirical_es, es_pot, fit_pot, risk_decomposition, BaselineModel, PotFit};
use evt_core::Error;

use crate::config::{resolve_grid, ThresholdSpec};
use crate::plotdata::{
    density_curves_csv, histogram_csv, mean_excess_csv, scatter_csv, stability_csv, svg_files,
    threshold_csv, OutputFile,
};
use crate::report::{
    to_pretty_json, unix_now, BaselineBlock, DecompositionBlock, FitBlock, InputSummary,
    LogNormalBlock, NormalBlock, Report, RiskRow, ThresholdBlock, SCHEMA_VERSION,
};
use crate::CliFailure;

pub struct AnalyzeConfig {
    pub input: PathBuf,
    pub format: Format,
    pub sign: SignConvention,
    pub threshold: ThresholdSpec,
    pub alphas: Vec<f64>,
    pub band: Option<f64>,
    pub grid: Option<String>,
    pub out_dir: PathBuf,
    pub svg: bool,
}

pub struct AnalyzeOutcome {
    pub report: Report,
    pub sensitivity: Option<SensitivityReport>,
    pub written: Vec<PathBuf>,
}

fn input_summary(path: &Path, series: &LossSeries) -> InputSummary {
    let values = series.values();
    let n = series.n();
    InputSummary {
        path: path.display().to_string(),
        label: series.label().to_string(),
        n,
        min: values.iter().cloned().fold(f64::INFINITY, f64::min),
        max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        mean: evt_core::par::sum_map(values, |&x| x) / n as f64,
    }
}

fn risk_row(
    alpha: f64,
    fit: &PotFit,
    series: &LossSeries,
    baseline: Option<(&str, BaselineModel)>,
) -> Result<RiskRow, CliFailure> {
    let (out_of_tail, pot_var, pot_var_reason, pot_es, pot_es_reason) = match es_pot(alpha, fit) {
        Ok(est) => {
            let es_reason = if est.es.is_none() {
                Some("mean excess is infinite for shape >= 1".to_string())
            } else {
                None
            };
            (false, Some(est.var), None, est.es, es_reason)
        }
        Err(err @ Error::OutOfTail { .. }) => {
            let reason = err.to_string();
            (true, None, Some(reason.clone()), None, Some(reason))
        }
        Err(other) => return Err(other.into()),
    };

    let empirical = empirical_es(series, alpha)?;
    let wc_alpha_times_es = pot_es.map(|es| alpha * es);
    let wc_alpha_times_es_reason = if wc_alpha_times_es.is_none() {
        Some("closed-form ES unavailable at this level".to_string())
    } else {
        None
    };

    let (decomposition, decomposition_reason) = match baseline {
        None => (
            None,
            Some("no baseline model available for this series".to_string()),
        ),
        Some((name, model)) => match risk_decomposition(&model, alpha) {
            Ok(d) => (
                Some(DecompositionBlock {
                    model: name.to_string(),
                    x_alpha: d.x_alpha,
                    mean: d.mean,
                    p_el: d.regions.p_el,
                    p_ul: d.regions.p_ul,
                    p_wc: d.regions.p_wc,
                }),
                None,
            ),
            Err(err) => (None, Some(err.to_string())),
        },
    };

    Ok(RiskRow {
        alpha,
        out_of_tail,
        pot_var,
        pot_var_reason,
        pot_es,
        pot_es_reason,
        empirical_var: empirical.var,
        empirical_es: empirical.es.expect("empirical ES is always defined"),
        empirical_degenerate_tail: empirical.degenerate_tail,
        wc_alpha_times_es,
        wc_alpha_times_es_reason,
        wc_tail_probability: 1.0 - alpha,
        decomposition,
        decomposition_reason,
    })
}

pub fn run_analyze(config: &AnalyzeConfig) -> Result<AnalyzeOutcome, CliFailure> {
    let series = load_series(&config.input, config.format, config.sign)?;
    let u = config.threshold.resolve(&series)?;

    let fit = fit_pot(&series, u)?;
    if !fit.converged() {
        return Err(CliFailure::fit(format!(
            "GPD fit did not converge at threshold {u}"
        )));
    }

    let (normal, normal_reason) = match fit_normal(series.values()) {
        Ok(f) => (Some((f.params, f.loglik)), None),
        Err(err) => (None, Some(err.to_string())),
    };
    let (lognormal, lognormal_reason) = match fit_lognormal(series.values()) {
        Ok(f) => (Some((f.params, f.loglik)), None),
        Err(err) => (None, Some(err.to_string())),
    };

    // Region decomposition prefers the LogNormal picture when it exists;
    // losses are often positive and right-skewed.
    let baseline_for_decomposition: Option<(&str, BaselineModel)> = match (&lognormal, &normal) {
        (Some((p, _)), _) => Some(("lognormal", BaselineModel::LogNormal(*p))),
        (None, Some((p, _))) => Some(("normal", BaselineModel::Normal(*p))),
        (None, None) => None,
    };

    let mut risk = Vec::with_capacity(config.alphas.len());
    for &alpha in &config.alphas {
        risk.push(risk_row(alpha, &fit, &series, baseline_for_decomposition)?);
    }

    let grid = resolve_grid(&config.grid, &series)?;
    let me_curve = mean_excess_curve(&series, &grid)?;
    let (xi_curve, scale_curve) = threshold_stability(&series, &grid)?;
    let first_alpha = config.alphas[0];

    let sensitivity = match config.band {
        Some(delta) => Some(borderline_sensitivity(&series, u, delta, first_alpha)?),
        None => None,
    };

    let mut files: Vec<OutputFile> = vec![
        histogram_csv(series.values()),
        density_curves_csv(
            series.values(),
            normal.as_ref().map(|(p, _)| p),
            lognormal.as_ref().map(|(p, _)| p),
            &fit,
        ),
        scatter_csv(&series, u),
        threshold_csv(u),
        mean_excess_csv(&me_curve),
        stability_csv(&xi_curve, &scale_curve),
    ];
    if config.svg {
        files.extend(svg_files(
            series.values(),
            &series,
            normal.as_ref().map(|(p, _)| p),
            lognormal.as_ref().map(|(p, _)| p),
            &fit,
            &me_curve,
            &xi_curve,
            &scale_curve,
        ));
    }
    if let Some(s) = &sensitivity {
        files.push(OutputFile {
            name: "sensitivity.json".into(),
            contents: to_pretty_json(s),
        });
    }

    let report = Report {
        schema_version: SCHEMA_VERSION,
        generated_at_unix: unix_now(),
        input: input_summary(&config.input, &series),
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
        baseline: BaselineBlock {
            normal: normal.map(|(p, loglik)| NormalBlock {
                mu: p.mu(),
                sigma2: p.sigma2(),
                loglik,
            }),
            normal_reason,
            lognormal: lognormal.map(|(p, loglik)| LogNormalBlock {
                mu_log: p.mu_log(),
                sigma2_log: p.sigma2_log(),
                loglik,
            }),
            lognormal_reason,
        },
        risk,
        sensitivity_file: sensitivity.as_ref().map(|_| "sensitivity.json".to_string()),
        diagnostics_files: files.iter().map(|f| f.name.clone()).collect(),
    };

    // Computation is done; only now touch the filesystem.
    let written = write_outputs(&config.out_dir, &report, &files)?;

    Ok(AnalyzeOutcome {
        report,
        sensitivity,
        written,
    })
}

pub fn write_outputs(
    out_dir: &Path,
    report: &Report,
    files: &[OutputFile],
) -> Result<Vec<PathBuf>, CliFailure> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliFailure::input(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut written = Vec::with_capacity(files.len() + 1);
    let report_path = out_dir.join("report.json");
    std::fs::write(&report_path, to_pretty_json(report))
        .map_err(|e| CliFailure::input(format!("cannot write {}: {e}", report_path.display())))?;
    written.push(report_path);
    for file in files {
        let path = out_dir.join(&file.name);
        std::fs::write(&path, &file.contents)
            .map_err(|e| CliFailure::input(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
