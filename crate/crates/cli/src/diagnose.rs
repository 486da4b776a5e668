//! The `diagnose` pipeline: threshold-grid curves and, when a band is
//! given, the borderline sensitivity report.

use std::path::PathBuf;

use evt_core::diagnostics::{
    borderline_sensitivity, mean_excess_curve, threshold_stability, var_es_stability,
};
use evt_core::ingest::{load_series, Format, SignConvention};

use crate::config::{resolve_grid, ThresholdSpec};
use crate::plotdata::{mean_excess_csv, stability_csv, var_es_stability_csv, OutputFile};
use crate::report::to_pretty_json;
use crate::svg::{chart, Layer, Mark};
use crate::CliFailure;

pub struct DiagnoseConfig {
    pub input: PathBuf,
    pub format: Format,
    pub sign: SignConvention,
    pub threshold: Option<ThresholdSpec>,
    pub alphas: Vec<f64>,
    pub band: Option<f64>,
    pub grid: Option<String>,
    pub out_dir: PathBuf,
    pub svg: bool,
}

pub fn run_diagnose(config: &DiagnoseConfig) -> Result<Vec<PathBuf>, CliFailure> {
    if config.band.is_some() && config.threshold.is_none() {
        return Err(CliFailure::config(
            "--band requires --threshold or --threshold-quantile",
        ));
    }

    let series = load_series(&config.input, config.format, config.sign)?;
    let grid = resolve_grid(&config.grid, &series)?;
    let first_alpha = config.alphas[0];

    let me_curve = mean_excess_curve(&series, &grid)?;
    let (xi_curve, scale_curve) = threshold_stability(&series, &grid)?;
    let (var_curve, es_curve) = var_es_stability(&series, &grid, first_alpha)?;

    let mut files = vec![
        mean_excess_csv(&me_curve),
        stability_csv(&xi_curve, &scale_curve),
        var_es_stability_csv(&var_curve, &es_curve, first_alpha),
    ];

    if let (Some(delta), Some(threshold)) = (config.band, &config.threshold) {
        let u = threshold.resolve(&series)?;
        let sensitivity = borderline_sensitivity(&series, u, delta, first_alpha)?;
        files.push(OutputFile {
            name: "sensitivity.json".into(),
            contents: to_pretty_json(&sensitivity),
        });
    }

    if config.svg {
        files.push(OutputFile {
            name: "mean_excess.svg".into(),
            contents: chart(
                "mean excess",
                &[Layer {
                    name: "mean excess",
                    mark: Mark::Line,
                    points: me_curve.present(),
                }],
            ),
        });
        files.push(OutputFile {
            name: "stability.svg".into(),
            contents: chart(
                "refit stability",
                &[
                    Layer {
                        name: "shape",
                        mark: Mark::Line,
                        points: xi_curve.present(),
                    },
                    Layer {
                        name: "modified scale",
                        mark: Mark::Line,
                        points: scale_curve.present(),
                    },
                ],
            ),
        });
        files.push(OutputFile {
            name: "var_es_stability.svg".into(),
            contents: chart(
                "risk stability",
                &[
                    Layer {
                        name: "var",
                        mark: Mark::Line,
                        points: var_curve.present(),
                    },
                    Layer {
                        name: "es",
                        mark: Mark::Line,
                        points: es_curve.present(),
                    },
                ],
            ),
        });
    }

    std::fs::create_dir_all(&config.out_dir).map_err(|e| {
        CliFailure::input(format!("cannot create {}: {e}", config.out_dir.display()))
    })?;
    let mut written = Vec::with_capacity(files.len());
    for file in &files {
        let path = config.out_dir.join(&file.name);
        std::fs::write(&path, &file.contents)
            .map_err(|e| CliFailure::input(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}
