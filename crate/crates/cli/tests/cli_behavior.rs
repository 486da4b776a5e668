//! End-to-end behavior of the `evt` binary: exit codes, file outputs, and
//! run-to-run determinism.

use std::path::Path;
use std::process::{Command, Output};

fn evt(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evt"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal termination")
}

fn write_ladder(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("ladder.csv");
    let text: String = (1..=100).map(|i| format!("{i}\n")).collect();
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn analyze_resolves_quantile_threshold_through_order_statistics() {
    let dir = tempfile::tempdir().unwrap();
    write_ladder(dir.path());
    let out = evt(
        &[
            "analyze",
            "--input",
            "ladder.csv",
            "--threshold-quantile",
            "0.9",
            "--alpha",
            "0.95",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    assert_eq!(report["threshold"]["resolved_u"], 90.0);
    assert_eq!(report["fit"]["n_total"], 100);
    assert_eq!(report["fit"]["n_exceed"], 10);
    assert_eq!(report["risk"][0]["empirical_var"], 95.0);
    assert_eq!(report["risk"][0]["empirical_es"], 98.0);
}

#[test]
fn analyze_marks_out_of_tail_levels_and_still_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    write_ladder(dir.path());
    let out = evt(
        &[
            "analyze",
            "--input",
            "ladder.csv",
            "--threshold",
            "80",
            "--alpha",
            "0.5",
            "--alpha",
            "0.95",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    let rows = report["risk"].as_array().unwrap();
    assert_eq!(rows[0]["out_of_tail"], true);
    assert!(rows[0]["pot_var"].is_null());
    assert!(rows[0]["pot_var_reason"].is_string());
    assert!(rows[0]["empirical_var"].is_number());
    assert_eq!(rows[1]["out_of_tail"], false);
    assert!(rows[1]["pot_var"].is_number());
}

#[test]
fn missing_input_exits_2_with_no_partial_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = evt(
        &[
            "analyze",
            "--input",
            "no-such-file.csv",
            "--threshold-quantile",
            "0.9",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
    assert!(!dir.path().join("out").exists(), "no outputs on failure");
}

#[test]
fn malformed_row_exits_2_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "1.0\n2.0\nbogus\n").unwrap();
    let out = evt(
        &[
            "analyze",
            "--input",
            "bad.csv",
            "--threshold-quantile",
            "0.9",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn contradictory_threshold_flags_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    write_ladder(dir.path());
    let both = evt(
        &[
            "analyze",
            "--input",
            "ladder.csv",
            "--threshold",
            "80",
            "--threshold-quantile",
            "0.9",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&both), 4);
    let neither = evt(
        &["analyze", "--input", "ladder.csv", "--out", "out"],
        dir.path(),
    );
    assert_eq!(exit_code(&neither), 4);
    let bad_alpha = evt(
        &[
            "analyze",
            "--input",
            "ladder.csv",
            "--threshold",
            "80",
            "--alpha",
            "1.5",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&bad_alpha), 4);
    assert!(!dir.path().join("out").exists());
}

#[test]
fn insufficient_exceedances_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    write_ladder(dir.path());
    let out = evt(
        &[
            "analyze",
            "--input",
            "ladder.csv",
            "--threshold",
            "95",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&out), 3);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("need at least 10"), "stderr: {stderr}");
    assert!(stderr.contains("have 5"), "stderr: {stderr}");
}

#[test]
fn negate_and_timestamp_format_flow_through() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("date,return\n");
    for i in 1..=100 {
        text.push_str(&format!("2020-01-{:02},{}\n", (i % 28) + 1, -(i as f64)));
    }
    std::fs::write(dir.path().join("returns.csv"), text).unwrap();
    let out = evt(
        &[
            "analyze",
            "--input",
            "returns.csv",
            "--format",
            "ts",
            "--sign",
            "negate",
            "--threshold-quantile",
            "0.9",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(
        exit_code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    // Negated returns become the loss ladder 1..=100.
    assert_eq!(report["threshold"]["resolved_u"], 90.0);
    assert_eq!(report["input"]["max"], 100.0);
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let run = evt(
            &[
                "simulate",
                "--seed",
                "9",
                "--n",
                "5",
                "--model",
                "gpd:0.3:1.0",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_eq!(exit_code(&run), 0);
    }
    let a = std::fs::read(dir.path().join("a/simulated.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b/simulated.csv")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().filter(|&&c| c == b'\n').count(), 5);
}

#[test]
fn simulate_rejects_invalid_model_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let run = evt(
        &[
            "simulate",
            "--seed",
            "9",
            "--n",
            "5",
            "--model",
            "gpd:0.3:-1",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&run), 4);
}

#[test]
fn analyze_report_and_plot_files_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let sim = evt(
        &[
            "simulate",
            "--seed",
            "31",
            "--n",
            "5000",
            "--model",
            "gpd:0.25:1.0",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&sim), 0);
    for out in ["r1", "r2"] {
        let run = evt(
            &[
                "analyze",
                "--input",
                "sim/simulated.csv",
                "--threshold-quantile",
                "0.9",
                "--band",
                "0.05",
                "--out",
                out,
            ],
            dir.path(),
        );
        assert_eq!(exit_code(&run), 0);
    }
    let mut names: Vec<String> = std::fs::read_dir(dir.path().join("r1"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        vec![
            "density_curves.csv",
            "histogram.csv",
            "mean_excess.csv",
            "report.json",
            "scatter.csv",
            "sensitivity.json",
            "stability.csv",
            "threshold.csv",
        ]
    );
    for name in &names {
        let a = std::fs::read_to_string(dir.path().join("r1").join(name)).unwrap();
        let b = std::fs::read_to_string(dir.path().join("r2").join(name)).unwrap();
        if name == "report.json" {
            let strip = |t: &str| {
                t.lines()
                    .filter(|l| !l.contains("generated_at_unix"))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            assert_eq!(strip(&a), strip(&b));
        } else {
            assert_eq!(a, b, "{name} differs");
        }
    }
}

#[test]
fn threshold_file_contains_exactly_the_resolved_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let sim = evt(
        &[
            "simulate",
            "--seed",
            "77",
            "--n",
            "2000",
            "--model",
            "lognormal:0:1",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&sim), 0);
    let run = evt(
        &[
            "analyze",
            "--input",
            "sim/simulated.csv",
            "--threshold-quantile",
            "0.92",
            "--out",
            "out",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&run), 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/report.json")).unwrap())
            .unwrap();
    let resolved = report["threshold"]["resolved_u"].as_f64().unwrap();
    let text = std::fs::read_to_string(dir.path().join("out/threshold.csv")).unwrap();
    let from_file: f64 = text.lines().nth(1).unwrap().parse().unwrap();
    assert_eq!(from_file.to_bits(), resolved.to_bits());

    // Histogram counts partition the sample.
    let hist = std::fs::read_to_string(dir.path().join("out/histogram.csv")).unwrap();
    let total: usize = hist
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(2).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(total, 2000);
}

#[test]
fn diagnose_writes_curves_and_validates_band() {
    let dir = tempfile::tempdir().unwrap();
    let sim = evt(
        &[
            "simulate",
            "--seed",
            "5",
            "--n",
            "3000",
            "--model",
            "gpd:0.2:1.0",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&sim), 0);

    let band_without_threshold = evt(
        &[
            "diagnose",
            "--input",
            "sim/simulated.csv",
            "--band",
            "0.1",
            "--out",
            "d0",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&band_without_threshold), 4);

    let run = evt(
        &[
            "diagnose",
            "--input",
            "sim/simulated.csv",
            "--grid",
            "0.5:3.0:12",
            "--threshold-quantile",
            "0.9",
            "--band",
            "0.1",
            "--svg",
            "--out",
            "diag",
        ],
        dir.path(),
    );
    assert_eq!(
        exit_code(&run),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    for file in [
        "mean_excess.csv",
        "stability.csv",
        "var_es_stability.csv",
        "sensitivity.json",
        "mean_excess.svg",
        "stability.svg",
        "var_es_stability.svg",
    ] {
        assert!(
            dir.path().join("diag").join(file).exists(),
            "missing {file}"
        );
    }
    let sensitivity: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("diag/sensitivity.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(sensitivity["estimates"].as_array().unwrap().len(), 3);

    // An explicit grid with too few points is a config contradiction.
    let thin_grid = evt(
        &[
            "diagnose",
            "--input",
            "sim/simulated.csv",
            "--grid",
            "0.5:3.0:1",
            "--out",
            "d2",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&thin_grid), 4);
}

#[test]
fn backtest_splits_and_reports_expected_counts() {
    let dir = tempfile::tempdir().unwrap();
    let sim = evt(
        &[
            "simulate",
            "--seed",
            "13",
            "--n",
            "20000",
            "--model",
            "gpd:0.2:1.0",
            "--out",
            "sim",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&sim), 0);

    let bad_split = evt(
        &[
            "backtest",
            "--input",
            "sim/simulated.csv",
            "--split",
            "1.0",
            "--threshold-quantile",
            "0.9",
            "--out",
            "bt",
        ],
        dir.path(),
    );
    assert_eq!(exit_code(&bad_split), 4);

    let run = evt(
        &[
            "backtest",
            "--input",
            "sim/simulated.csv",
            "--split",
            "0.5",
            "--threshold-quantile",
            "0.9",
            "--alpha",
            "0.95",
            "--out",
            "bt",
        ],
        dir.path(),
    );
    assert_eq!(
        exit_code(&run),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&run.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("bt/backtest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["n_train"], 10000);
    assert_eq!(report["n_holdout"], 10000);
    let row = &report["rows"][0];
    let expected = row["expected"].as_f64().unwrap();
    assert_eq!(expected, (1.0 - 0.95) * 10000.0);
    assert!(row["observed"].is_number());
    assert!(row["interval_low"].as_u64().unwrap() < row["interval_high"].as_u64().unwrap());
}
