use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flowcast::data::{load_csv, write_csv, MinMaxScaler};
use flowcast::experiment::{
    comparative_reference_table, load_table, prepare, run_comparative, run_epoch_sweep,
    run_input_ablation, run_single_model, run_step_sweep, ExperimentConfig, SweepParam,
};
use flowcast::metrics::EvalReport;
use flowcast::model::{load_model, save_model};
use flowcast::{Error, Result};

/// Stream-flow forecasting experiments: synthetic catchments, LSTM/RNN/MLP/SVR
/// training, model comparison, input ablation, and window/horizon sweeps.
#[derive(Parser)]
#[command(name = "flowcast", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic catchment and write it as CSV.
    Generate {
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Hours to generate (overrides config).
        #[arg(long)]
        hours: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Extra `key=value` config overrides (repeatable).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Train a single model and persist it with its scaler.
    Train {
        /// Model kind: lstm, rnn, mlp, or svr.
        #[arg(long)]
        model: String,
        /// Input CSV (omit to train on synthetic data).
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Run directory for model.txt, scaler.txt, report.json, ...
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Train and evaluate all configured models on identical data.
    Compare {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Train one LSTM per input combination (flow/rain/areal grid).
    Ablate {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Sweep the forecast horizon, the window length, or the epoch budget.
    Sweep {
        /// One of: predict_step, encoder_step, epochs.
        #[arg(long)]
        param: String,
        /// Comma-separated values, strictly increasing (e.g. 1,3,6,9,12).
        #[arg(long)]
        steps: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Evaluate a stored model against a CSV.
    Evaluate {
        /// Model file written by `train`.
        #[arg(long)]
        model: PathBuf,
        /// Scaler file written next to the model.
        #[arg(long)]
        scaler: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn build_config(
    config: Option<&PathBuf>,
    data: Option<&PathBuf>,
    seed: Option<u64>,
    out: Option<&PathBuf>,
    overrides: &[String],
) -> Result<ExperimentConfig> {
    let mut cfg = match config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(d) = data {
        cfg.set("data", &d.display().to_string())?;
    }
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = out {
        cfg.set("out_dir", &o.display().to_string())?;
    }
    for kv in overrides {
        let (key, value) = kv
            .split_once('=')
            .ok_or_else(|| Error::config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(key.trim(), value)?;
    }
    Ok(cfg)
}

fn print_report_line(report: &EvalReport) {
    println!(
        "  {:<18} n={:<6} RMSE {:>10.3}  MAE {:>10.3}  R2 {:>7.4}",
        report.run_id, report.n, report.rmse, report.mae, report.r2
    );
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            out,
            seed,
            hours,
            config,
            overrides,
        } => {
            let mut cfg = build_config(config.as_ref(), None, Some(seed), None, &overrides)?;
            if let Some(h) = hours {
                cfg.set("synthetic_hours", &h.to_string())?;
            }
            let table = load_table(&cfg, seed)?;
            write_csv(&table, &out)?;
            println!(
                "wrote {} hours ({} segments) to {}",
                table.len(),
                table.segments().len(),
                out.display()
            );
        }
        Command::Train {
            model,
            data,
            seed,
            out,
            config,
            overrides,
        } => {
            let mut cfg =
                build_config(config.as_ref(), data.as_ref(), seed, out.as_ref(), &overrides)?;
            cfg.models = vec![model.to_lowercase()];
            let seed = cfg.seed.unwrap_or(0);
            let table = load_table(&cfg, seed)?;
            let prepared = prepare(&cfg, &table, cfg.encoder_steps, cfg.predict_step, cfg.inputs)?;
            println!(
                "training {} on {} rows ({} features), testing on {}",
                cfg.models[0],
                prepared.train_scaled.n_samples(),
                prepared.train_scaled.n_features(),
                prepared.test_scaled.n_samples()
            );
            let run = run_single_model(&cfg.models[0], &prepared, &cfg, seed);
            if let Some(logs) = &run.epochs {
                for log in logs {
                    println!(
                        "  epoch {:>4}  train {:.6}  test {:.6}  ({:.2}s)",
                        log.epoch, log.train_loss, log.test_loss, log.seconds
                    );
                }
            }
            match &run.outcome {
                Ok(report) => print_report_line(report),
                Err(e) => return Err(Error::Data(e.clone())),
            }
            if let Some(dir) = &cfg.out_dir {
                std::fs::create_dir_all(dir)?;
                if let Some(trained) = &run.trained {
                    save_model(trained, dir.join("model.txt"))?;
                }
                prepared.scaler.save(dir.join("scaler.txt"))?;
                if let Some(logs) = &run.epochs {
                    std::fs::write(
                        dir.join("epochs.csv"),
                        flowcast::experiment::epoch_csv(logs, cfg.timing),
                    )?;
                }
                std::fs::write(
                    dir.join("trace.csv"),
                    flowcast::experiment::trace_csv(
                        &prepared.test_raw.target_times,
                        &prepared.test_raw.targets,
                        std::slice::from_ref(&run),
                    ),
                )?;
                if let Ok(report) = &run.outcome {
                    std::fs::write(dir.join("report.json"), format!("{}\n", report.to_json()))?;
                }
                std::fs::write(dir.join("config.resolved"), cfg.resolved_text())?;
                println!("outputs in {}", dir.display());
            }
        }
        Command::Compare {
            seed,
            data,
            out,
            config,
            overrides,
        } => {
            let cfg = build_config(config.as_ref(), data.as_ref(), Some(seed), out.as_ref(), &overrides)?;
            let output = run_comparative(&cfg)?;
            println!("comparative results (seed {seed}):");
            for run in &output.runs {
                match &run.outcome {
                    Ok(report) => print_report_line(report),
                    Err(e) => println!("  {:<18} FAILED: {e}", run.model),
                }
            }
            print!("{}", comparative_reference_table());
            if let Some(dir) = &output.out_dir {
                println!("outputs in {}", dir.display());
            }
        }
        Command::Ablate {
            seed,
            data,
            out,
            config,
            overrides,
        } => {
            let cfg = build_config(config.as_ref(), data.as_ref(), Some(seed), out.as_ref(), &overrides)?;
            let output = run_input_ablation(&cfg)?;
            println!("input ablation, one LSTM per combination (seed {seed}):");
            for (combo, outcome) in &output.rows {
                match outcome {
                    Ok(report) => print_report_line(report),
                    Err(e) => println!("  {combo:<18} FAILED: {e}"),
                }
            }
            if let Some(dir) = &output.out_dir {
                println!("outputs in {}", dir.display());
            }
        }
        Command::Sweep {
            param,
            steps,
            seed,
            data,
            out,
            config,
            overrides,
        } => {
            let cfg = build_config(config.as_ref(), data.as_ref(), Some(seed), out.as_ref(), &overrides)?;
            let values: Vec<usize> = steps
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::config(format!("--steps: {e}")))
                })
                .collect::<Result<_>>()?;
            match param.as_str() {
                "predict_step" | "encoder_step" => {
                    let sweep_param = if param == "predict_step" {
                        SweepParam::PredictStep
                    } else {
                        SweepParam::EncoderStep
                    };
                    let result = run_step_sweep(&cfg, sweep_param, &values)?;
                    println!("{} sweep (seed {seed}):", result.parameter);
                    for point in &result.points {
                        for run in &point.runs {
                            match &run.outcome {
                                Ok(report) => print_report_line(report),
                                Err(e) => println!(
                                    "  {}={:<5} {:<8} FAILED: {e}",
                                    result.parameter, point.value, run.model
                                ),
                            }
                        }
                    }
                    if let Some(dir) = &result.out_dir {
                        println!("outputs in {}", dir.display());
                    }
                }
                "epochs" => {
                    let output = run_epoch_sweep(&cfg, &values)?;
                    println!(
                        "epoch study to {} epochs (seed {seed}):",
                        values.last().unwrap()
                    );
                    for log in &output.logs {
                        println!(
                            "  epoch {:>4}  train {:.6}  test {:.6}",
                            log.epoch, log.train_loss, log.test_loss
                        );
                    }
                    println!("minimum test loss at epoch {}", output.min_test_loss_epoch);
                    if let Some(dir) = &output.out_dir {
                        println!("outputs in {}", dir.display());
                    }
                }
                other => {
                    return Err(Error::config(format!(
                        "unknown sweep parameter {other:?} (expected predict_step|encoder_step|epochs)"
                    )))
                }
            }
        }
        Command::Evaluate {
            model,
            scaler,
            data,
            config,
            overrides,
        } => {
            let cfg = build_config(config.as_ref(), None, None, None, &overrides)?;
            let model = load_model(&model)?;
            let scaler = MinMaxScaler::load(&scaler)?;
            let table = load_csv(&data)?;
            let (report, _, _, _) = flowcast::experiment::evaluate_stored_model(
                &model,
                &scaler,
                &table,
                cfg.encoder_steps,
                cfg.predict_step,
                cfg.inputs,
                cfg.r2_convention,
                &format!("{}:{}", model.kind(), data.display()),
            )?;
            println!("{}", report.to_json());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
