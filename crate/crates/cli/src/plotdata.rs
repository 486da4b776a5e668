//! Plot-data emission: plain CSV with a header row, one file per display.
//! Values use the shortest round-trip decimal form; absent statistics are
//! empty fields. `--svg` additionally renders each CSV as a standalone
//! vector image.

use evt_core::diagnostics::DiagnosticsCurve;
use evt_core::dist::{gpd_log_density, lognormal_pdf, normal_pdf, LogNormalParams, NormalParams};
use evt_core::ingest::LossSeries;
use evt_core::pot::PotFit;

use crate::svg::{chart, Layer, Mark};

/// One file to be written under the output directory.
#[derive(Debug, Clone)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

// `!(max > min)` also catches the all-NaN-free degenerate single-value
// case where max == min.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn degenerate_range(n: usize, min: f64, max: f64) -> bool {
    n == 0 || !(max > min)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Equal-width histogram over `[min, max]`; the last bin is closed on both
/// sides so the counts always sum to the sample size.
pub fn histogram_csv(values: &[f64]) -> OutputFile {
    let n = values.len();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::from("bin_lo,bin_hi,count,density\n");

    if degenerate_range(n, min, max) {
        out.push_str(&format!("{min},{max},{n},\n"));
        return OutputFile {
            name: "histogram.csv".into(),
            contents: out,
        };
    }

    let bins = ((n as f64).sqrt().ceil() as usize).clamp(10, 100);
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let idx = (((x - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    for (i, &count) in counts.iter().enumerate() {
        let lo = min + i as f64 * width;
        let hi = if i + 1 == bins {
            max
        } else {
            min + (i + 1) as f64 * width
        };
        let density = count as f64 / (n as f64 * width);
        out.push_str(&format!("{lo},{hi},{count},{density}\n"));
    }
    OutputFile {
        name: "histogram.csv".into(),
        contents: out,
    }
}

/// Fitted density overlays on a value grid: Normal and LogNormal body
/// curves plus the rescaled tail density `(m/N) * g(x - u)` above the
/// threshold. The grid always contains the Normal mean (where the Normal
/// curve peaks), the LogNormal mode, and the threshold itself.
pub fn density_curves_csv(
    values: &[f64],
    normal: Option<&NormalParams>,
    lognormal: Option<&LogNormalParams>,
    fit: &PotFit,
) -> OutputFile {
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut grid: Vec<f64> = (0..=512)
        .map(|i| min + (max - min) * i as f64 / 512.0)
        .collect();
    if let Some(p) = normal {
        grid.push(p.mu());
    }
    if let Some(p) = lognormal {
        grid.push(p.mode());
    }
    grid.push(fit.u());
    grid.retain(|x| x.is_finite());
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let exceed_frac = fit.n_exceed() as f64 / fit.n_total() as f64;
    let mut out = String::from("x,normal_pdf,lognormal_pdf,tail_density\n");
    for &x in &grid {
        let n_col = opt(normal.map(|p| normal_pdf(x, p)));
        let l_col = opt(lognormal.and_then(|p| {
            if x > 0.0 {
                lognormal_pdf(x, p).ok()
            } else {
                None
            }
        }));
        let t_col = opt(if x >= fit.u() {
            Some(exceed_frac * gpd_log_density(x - fit.u(), fit.params()).exp())
        } else {
            None
        });
        out.push_str(&format!("{x},{n_col},{l_col},{t_col}\n"));
    }
    OutputFile {
        name: "density_curves.csv".into(),
        contents: out,
    }
}

/// Observation scatter in source order with the exceedance flag.
pub fn scatter_csv(series: &LossSeries, u: f64) -> OutputFile {
    let mut out = String::from("index,value,exceeds\n");
    for (i, &x) in series.values().iter().enumerate() {
        out.push_str(&format!("{i},{x},{}\n", u8::from(x > u)));
    }
    OutputFile {
        name: "scatter.csv".into(),
        contents: out,
    }
}

/// The resolved threshold, alone, for drawing the threshold line.
pub fn threshold_csv(u: f64) -> OutputFile {
    OutputFile {
        name: "threshold.csv".into(),
        contents: format!("u\n{u}\n"),
    }
}

pub fn mean_excess_csv(curve: &DiagnosticsCurve) -> OutputFile {
    let mut out = String::from("u,mean_excess,m\n");
    for ((&u, stat), &m) in curve.u_grid().iter().zip(curve.stat()).zip(curve.m_per_u()) {
        out.push_str(&format!("{u},{},{m}\n", opt(*stat)));
    }
    OutputFile {
        name: "mean_excess.csv".into(),
        contents: out,
    }
}

pub fn stability_csv(xi: &DiagnosticsCurve, scale: &DiagnosticsCurve) -> OutputFile {
    let mut out = String::from("u,refit_xi,modified_scale,m\n");
    for i in 0..xi.u_grid().len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            xi.u_grid()[i],
            opt(xi.stat()[i]),
            opt(scale.stat()[i]),
            xi.m_per_u()[i]
        ));
    }
    OutputFile {
        name: "stability.csv".into(),
        contents: out,
    }
}

pub fn var_es_stability_csv(
    var: &DiagnosticsCurve,
    es: &DiagnosticsCurve,
    alpha: f64,
) -> OutputFile {
    let mut out = format!("# alpha = {alpha}\nu,var,es,m\n");
    for i in 0..var.u_grid().len() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            var.u_grid()[i],
            opt(var.stat()[i]),
            opt(es.stat()[i]),
            var.m_per_u()[i]
        ));
    }
    OutputFile {
        name: "var_es_stability.csv".into(),
        contents: out,
    }
}

fn curve_points(curve: &DiagnosticsCurve) -> Vec<(f64, f64)> {
    curve.present()
}

/// Render the SVG companions for the emitted CSVs.
#[allow(clippy::too_many_arguments)]
pub fn svg_files(
    values: &[f64],
    series: &LossSeries,
    normal: Option<&NormalParams>,
    lognormal: Option<&LogNormalParams>,
    fit: &PotFit,
    mean_excess: &DiagnosticsCurve,
    xi: &DiagnosticsCurve,
    scale: &DiagnosticsCurve,
) -> Vec<OutputFile> {
    let mut files = Vec::new();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    // Histogram bars.
    if max > min {
        let bins = ((values.len() as f64).sqrt().ceil() as usize).clamp(10, 100);
        let width = (max - min) / bins as f64;
        let mut counts = vec![0usize; bins];
        for &x in values {
            let idx = (((x - min) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let mut points: Vec<(f64, f64)> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                (
                    min + i as f64 * width,
                    c as f64 / (values.len() as f64 * width),
                )
            })
            .collect();
        points.push((max, 0.0));
        files.push(OutputFile {
            name: "histogram.svg".into(),
            contents: chart(
                "empirical density",
                &[Layer {
                    name: "histogram",
                    mark: Mark::Bars,
                    points,
                }],
            ),
        });
    }

    // Density overlays.
    let grid: Vec<f64> = (0..=512)
        .map(|i| min + (max - min) * i as f64 / 512.0)
        .collect();
    let exceed_frac = fit.n_exceed() as f64 / fit.n_total() as f64;
    let mut layers = Vec::new();
    if let Some(p) = normal {
        layers.push(Layer {
            name: "normal",
            mark: Mark::Line,
            points: grid.iter().map(|&x| (x, normal_pdf(x, p))).collect(),
        });
    }
    if let Some(p) = lognormal {
        layers.push(Layer {
            name: "lognormal",
            mark: Mark::Line,
            points: grid
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| (x, lognormal_pdf(x, p).expect("positive x")))
                .collect(),
        });
    }
    layers.push(Layer {
        name: "tail",
        mark: Mark::Line,
        points: grid
            .iter()
            .filter(|&&x| x >= fit.u())
            .map(|&x| {
                (
                    x,
                    exceed_frac * gpd_log_density(x - fit.u(), fit.params()).exp(),
                )
            })
            .collect(),
    });
    files.push(OutputFile {
        name: "density_curves.svg".into(),
        contents: chart("fitted densities", &layers),
    });

    // Exceedance scatter with the threshold line.
    let scatter: Vec<(f64, f64)> = series
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| (i as f64, x))
        .collect();
    let line = vec![(0.0, fit.u()), ((series.n() - 1).max(1) as f64, fit.u())];
    files.push(OutputFile {
        name: "scatter.svg".into(),
        contents: chart(
            "observations and threshold",
            &[
                Layer {
                    name: "observations",
                    mark: Mark::Points,
                    points: scatter,
                },
                Layer {
                    name: "threshold",
                    mark: Mark::Line,
                    points: line,
                },
            ],
        ),
    });

    files.push(OutputFile {
        name: "mean_excess.svg".into(),
        contents: chart(
            "mean excess",
            &[Layer {
                name: "mean excess",
                mark: Mark::Line,
                points: curve_points(mean_excess),
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
                    points: curve_points(xi),
                },
                Layer {
                    name: "modified scale",
                    mark: Mark::Line,
                    points: curve_points(scale),
                },
            ],
        ),
    });
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use evt_core::dist::GpdParams;

    #[test]
    fn histogram_counts_sum_to_n() {
        let values: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin() * 10.0).collect();
        let file = histogram_csv(&values);
        let total: usize = file
            .contents
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap())
            .sum();
        assert_eq!(total, 1000);
    }

    #[test]
    fn histogram_handles_degenerate_range() {
        let file = histogram_csv(&[3.0, 3.0, 3.0]);
        assert!(file.contents.lines().count() == 2);
        assert!(file.contents.contains("3,3,3,"));
    }

    #[test]
    fn threshold_file_round_trips_exactly() {
        let u = 16.226235280311382f64;
        let file = threshold_csv(u);
        let parsed: f64 = file.contents.lines().nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed.to_bits(), u.to_bits());
    }

    #[test]
    fn density_grid_contains_the_normal_mean_exactly() {
        let values: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let normal = NormalParams::new(50.5, 833.25).unwrap();
        let fit = PotFit::new(GpdParams::new(0.1, 1.0).unwrap(), 90.0, 100, 10, 0.0, true).unwrap();
        let file = density_curves_csv(&values, Some(&normal), None, &fit);
        let peak = normal_pdf(50.5, &normal);
        let row = file
            .contents
            .lines()
            .find(|l| l.starts_with("50.5,"))
            .expect("mean row present");
        let reported: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((reported - peak).abs() <= 1e-9);
    }
}
