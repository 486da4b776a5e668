use std::process::ExitCode;

use clap::Parser;

use evt_cli::args::{AnalyzeArgs, BacktestArgs, Cli, Command, DiagnoseArgs, SimulateArgs};
use evt_cli::backtest::{run_backtest, BacktestConfig};
use evt_cli::config::{to_format, to_sign, validated_alphas, validated_band, ThresholdSpec};
use evt_cli::diagnose::{run_diagnose, DiagnoseConfig};
use evt_cli::pipeline::{run_analyze, AnalyzeConfig};
use evt_cli::sim::{simulate_to_file, SimModel};
use evt_cli::CliFailure;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Diagnose(args) => diagnose(args),
        Command::Simulate(args) => simulate(args),
        Command::Backtest(args) => backtest(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code)
        }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

fn analyze(args: AnalyzeArgs) -> Result<(), CliFailure> {
    let config = AnalyzeConfig {
        input: args.input.input.clone(),
        format: to_format(args.input.format),
        sign: to_sign(args.input.sign),
        threshold: ThresholdSpec::from_args(&args.threshold)?,
        alphas: validated_alphas(&args.alphas)?,
        band: validated_band(args.band)?,
        grid: args.grid.clone(),
        out_dir: args.out.clone(),
        svg: args.svg,
    };
    let outcome = run_analyze(&config)?;
    let report = &outcome.report;

    println!(
        "input: {} ({} observations, min {}, max {}, mean {:.6})",
        report.input.path, report.input.n, report.input.min, report.input.max, report.input.mean
    );
    println!(
        "threshold: {} -> u = {}",
        report.threshold.spec, report.threshold.resolved_u
    );
    println!(
        "fit: xi = {:.6}, beta = {:.6}, exceedances = {}/{}, loglik = {:.4}",
        report.fit.xi, report.fit.beta, report.fit.n_exceed, report.fit.n_total, report.fit.loglik
    );
    println!("alpha      pot_var      pot_es       emp_var      emp_es");
    for row in &report.risk {
        println!(
            "{:<10} {:<12} {:<12} {:<12} {:<12}{}",
            row.alpha,
            fmt_opt(row.pot_var),
            fmt_opt(row.pot_es),
            format!("{:.6}", row.empirical_var),
            format!("{:.6}", row.empirical_es),
            if row.out_of_tail {
                "  (out of tail)"
            } else {
                ""
            }
        );
    }
    if let Some(s) = &outcome.sensitivity {
        println!(
            "band sensitivity: delta = {}, var spread = {:.6}, es spread = {}",
            s.delta,
            s.var_spread.spread,
            s.es_spread
                .map(|e| format!("{:.6}", e.spread))
                .unwrap_or_else(|| "-".into())
        );
    }
    println!(
        "wrote {} files to {}",
        outcome.written.len(),
        config.out_dir.display()
    );
    Ok(())
}

fn diagnose(args: DiagnoseArgs) -> Result<(), CliFailure> {
    let config = DiagnoseConfig {
        input: args.input.input.clone(),
        format: to_format(args.input.format),
        sign: to_sign(args.input.sign),
        threshold: ThresholdSpec::from_args_optional(&args.threshold)?,
        alphas: validated_alphas(&args.alphas)?,
        band: validated_band(args.band)?,
        grid: args.grid.clone(),
        out_dir: args.out.clone(),
        svg: args.svg,
    };
    let written = run_diagnose(&config)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<(), CliFailure> {
    let model = SimModel::parse(&args.model)?;
    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliFailure::input(format!("cannot create {}: {e}", args.out.display())))?;
    let path = args.out.join("simulated.csv");
    let series = simulate_to_file(args.seed, args.n, model, args.offset, &path)?;
    println!(
        "wrote {} variates to {} (seed {}, model {})",
        series.n(),
        path.display(),
        args.seed,
        args.model
    );
    Ok(())
}

fn backtest(args: BacktestArgs) -> Result<(), CliFailure> {
    let config = BacktestConfig {
        input: args.input.input.clone(),
        format: to_format(args.input.format),
        sign: to_sign(args.input.sign),
        split: args.split,
        threshold: ThresholdSpec::from_args(&args.threshold)?,
        alphas: validated_alphas(&args.alphas)?,
        out_dir: args.out.clone(),
    };
    let report = run_backtest(&config)?;
    println!(
        "train {} / holdout {}, threshold {} -> u = {}",
        report.n_train, report.n_holdout, report.threshold.spec, report.threshold.resolved_u
    );
    println!("alpha      var          observed   expected     interval(99%)   calibrated");
    for row in &report.rows {
        let interval = match (row.interval_low, row.interval_high) {
            (Some(lo), Some(hi)) => format!("[{lo}, {hi}]"),
            _ => "-".into(),
        };
        println!(
            "{:<10} {:<12} {:<10} {:<12.2} {:<15} {}",
            row.alpha,
            fmt_opt(row.var),
            row.observed
                .map(|o| o.to_string())
                .unwrap_or_else(|| "-".into()),
            row.expected,
            interval,
            row.inside_interval
                .map(|b| if b { "yes" } else { "NO" }.to_string())
                .unwrap_or_else(|| "-".into()),
        );
    }
    println!("wrote {}", config.out_dir.join("backtest.json").display());
    Ok(())
}
