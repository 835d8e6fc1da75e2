//! Experiment runners: the SVR/MLP/LSTM comparison, the input-combination
//! ablation, horizon and window-length sweeps, and the epoch/loss study.
//! Every runner is a pure function of (config, seed) and writes
//! machine-readable outputs (`report.json`, `trace.csv`, `epochs.csv`,
//! `sweep.csv`, `config.resolved`) into the configured run directory.

mod config;
mod reference;

pub use config::{DatasetSource, ExperimentConfig, ScaleFit};
pub use reference::{
    comparative_reference_table, AblationReferenceRow, ReferenceRow, ABLATION_REFERENCE,
    COMPARATIVE_REFERENCE,
};

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::{
    generate_synthetic, load_csv, series_to_supervised, split, MinMaxScaler, SupervisedMatrix,
    TimeSeriesTable, VariableSelection,
};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, EvalReport, R2Convention};
use crate::model::{svr_fit, AnyModel, Lstm, Mlp, Rnn};
use crate::num::{Matrix, SeededRng};
use crate::train::{predict_all, train, EpochLog};

/// Windowed, split, and scaled data shared by every model in one run.
#[derive(Debug, Clone)]
pub struct PreparedData {
    pub train_raw: SupervisedMatrix,
    pub test_raw: SupervisedMatrix,
    pub train_scaled: SupervisedMatrix,
    pub test_scaled: SupervisedMatrix,
    pub scaler: MinMaxScaler,
}

impl PreparedData {
    pub fn n_variables(&self) -> usize {
        self.train_raw.n_variables
    }
}

/// Loads the configured table (CSV or seeded synthetic catchment).
pub fn load_table(cfg: &ExperimentConfig, seed: u64) -> Result<TimeSeriesTable> {
    match &cfg.dataset {
        DatasetSource::Csv(path) => load_csv(path),
        DatasetSource::Synthetic(s) => {
            let data_seed = cfg.data_seed.unwrap_or(seed);
            generate_synthetic(&mut SeededRng::new(data_seed), s)
        }
    }
}

/// Windows, splits, and scales the table for the given geometry.
pub fn prepare(
    cfg: &ExperimentConfig,
    table: &TimeSeriesTable,
    encoder_steps: usize,
    predict_step: usize,
    inputs: VariableSelection,
) -> Result<PreparedData> {
    let windowed = series_to_supervised(table, encoder_steps, predict_step, inputs)?;
    debug_assert_eq!(windowed.n_features(), encoder_steps * inputs.n_variables());
    let (train_raw, test_raw) = split(&windowed, cfg.split)?;
    let scaler = match cfg.scale_fit {
        ScaleFit::Train => MinMaxScaler::fit(&train_raw)?,
        ScaleFit::All => MinMaxScaler::fit(&windowed)?,
    };
    let train_scaled = scaler.transform(&train_raw)?;
    let test_scaled = scaler.transform(&test_raw)?;
    Ok(PreparedData {
        train_raw,
        test_raw,
        train_scaled,
        test_scaled,
        scaler,
    })
}

/// FNV-1a over the matrix dimensions and raw f64 bits; used to certify that
/// every model in a run consumed identical inputs.
pub fn fingerprint(m: &SupervisedMatrix) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bits: u64| {
        for b in bits.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(m.features.rows() as u64);
    eat(m.features.cols() as u64);
    for v in m.features.data() {
        eat(v.to_bits());
    }
    for v in &m.targets {
        eat(v.to_bits());
    }
    h
}

/// One model's result inside a run.
#[derive(Debug, Clone)]
pub struct ModelRun {
    pub model: String,
    pub outcome: std::result::Result<EvalReport, String>,
    /// Test-period predictions in physical units, when the model succeeded.
    pub predictions: Option<Vec<f64>>,
    /// Per-epoch log for the neural models.
    pub epochs: Option<Vec<EpochLog>>,
    /// Trained model, for persistence.
    pub trained: Option<AnyModel>,
    /// Recorded deviations, e.g. the SVR training-row cap.
    pub note: Option<String>,
}

fn eval_physical(
    run_id: &str,
    scaled_preds: &[f64],
    data: &PreparedData,
    convention: R2Convention,
) -> Result<(EvalReport, Vec<f64>)> {
    let physical = data.scaler.inverse_transform_targets(scaled_preds);
    let report = evaluate(&physical, &data.test_raw.targets, convention, run_id)?;
    Ok((report, physical))
}

/// Trains and evaluates one model by name over prepared data.
///
/// Metrics are computed in physical units (predictions inverse-scaled before
/// evaluation); epoch logs stay in the scaled training space.
pub fn run_single_model(
    name: &str,
    data: &PreparedData,
    cfg: &ExperimentConfig,
    seed: u64,
) -> ModelRun {
    let result = run_single_model_inner(name, data, cfg, seed);
    match result {
        Ok(run) => run,
        Err(e) => ModelRun {
            model: name.to_string(),
            outcome: Err(e.to_string()),
            predictions: None,
            epochs: None,
            trained: None,
            note: None,
        },
    }
}

fn run_single_model_inner(
    name: &str,
    data: &PreparedData,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<ModelRun> {
    let encoder = data.train_raw.encoder_steps;
    let n_vars = data.n_variables();
    let n_features = data.train_raw.n_features();
    let mut train_cfg = cfg.train;
    train_cfg.seed = seed;
    let mut init_rng = SeededRng::new(seed);
    let mut note = None;

    let (outcome, predictions, epochs, trained) = match name {
        "lstm" => {
            let model = Lstm::new(n_vars, cfg.hidden_size, encoder, &mut init_rng)?;
            let (model, logs) = train(model, &data.train_scaled, &data.test_scaled, &train_cfg)?;
            let preds = predict_all(&model, &data.test_scaled)?;
            let (report, physical) = eval_physical(name, &preds, data, cfg.r2_convention)?;
            (report, physical, Some(logs), AnyModel::Lstm(model))
        }
        "rnn" => {
            let model = Rnn::new(n_vars, cfg.hidden_size, encoder, &mut init_rng)?;
            let (model, logs) = train(model, &data.train_scaled, &data.test_scaled, &train_cfg)?;
            let preds = predict_all(&model, &data.test_scaled)?;
            let (report, physical) = eval_physical(name, &preds, data, cfg.r2_convention)?;
            (report, physical, Some(logs), AnyModel::Rnn(model))
        }
        "mlp" => {
            let model = Mlp::new(n_features, cfg.mlp_hidden, &mut init_rng)?;
            let (model, logs) = train(model, &data.train_scaled, &data.test_scaled, &train_cfg)?;
            let preds = predict_all(&model, &data.test_scaled)?;
            let (report, physical) = eval_physical(name, &preds, data, cfg.r2_convention)?;
            (report, physical, Some(logs), AnyModel::Mlp(model))
        }
        "svr" => {
            let n = data.train_scaled.n_samples();
            let stride = n.div_ceil(cfg.svr_cap.max(1)).max(1);
            if stride > 1 {
                note = Some(format!(
                    "svr trained on {} of {n} rows (cap {}, chronological stride {stride})",
                    n.div_ceil(stride),
                    cfg.svr_cap
                ));
            }
            let rows: Vec<Vec<f64>> = (0..n)
                .step_by(stride)
                .map(|i| data.train_scaled.features.row(i).to_vec())
                .collect();
            let targets: Vec<f64> = (0..n)
                .step_by(stride)
                .map(|i| data.train_scaled.targets[i])
                .collect();
            let x = Matrix::from_rows(&rows)?;
            let model = svr_fit(&x, &targets, &cfg.svr)?;
            let preds: Vec<f64> = (0..data.test_scaled.n_samples())
                .map(|i| model.predict(data.test_scaled.features.row(i)))
                .collect::<Result<_>>()?;
            let (report, physical) = eval_physical(name, &preds, data, cfg.r2_convention)?;
            (report, physical, None, AnyModel::Svr(model))
        }
        other => {
            return Err(Error::config(format!("unknown model {other:?}")));
        }
    };
    Ok(ModelRun {
        model: name.to_string(),
        outcome: Ok(outcome),
        predictions: Some(predictions),
        epochs,
        trained: Some(trained),
        note,
    })
}

#[derive(Debug, Clone, Serialize)]
struct ModelError {
    model: String,
    error: String,
}

#[derive(Debug, Clone, Serialize)]
struct ReportFile {
    run: String,
    seed: u64,
    reports: Vec<EvalReport>,
    errors: Vec<ModelError>,
    notes: Vec<String>,
}

/// Result of one comparative run over every configured model.
#[derive(Debug, Clone)]
pub struct CompareOutput {
    pub runs: Vec<ModelRun>,
    pub observed: Vec<f64>,
    pub times: Vec<i64>,
    pub out_dir: Option<PathBuf>,
}

/// Trains every configured model on byte-identical train/test matrices and
/// evaluates them on the same test period. A failing model is reported and
/// the rest still complete.
pub fn run_comparative(cfg: &ExperimentConfig) -> Result<CompareOutput> {
    let seed = cfg.require_seed()?;
    let table = load_table(cfg, seed)?;
    let data = prepare(cfg, &table, cfg.encoder_steps, cfg.predict_step, cfg.inputs)?;
    let fp = (fingerprint(&data.train_scaled), fingerprint(&data.test_scaled));

    let mut runs = Vec::new();
    for name in &cfg.models {
        assert_eq!(
            fp,
            (fingerprint(&data.train_scaled), fingerprint(&data.test_scaled)),
            "shared matrices changed between models"
        );
        runs.push(run_single_model(name, &data, cfg, seed));
    }
    let output = CompareOutput {
        runs,
        observed: data.test_raw.targets.clone(),
        times: data.test_raw.target_times.clone(),
        out_dir: cfg.out_dir.clone(),
    };
    if let Some(dir) = &cfg.out_dir {
        write_compare_outputs(dir, cfg, seed, &output)?;
    }
    Ok(output)
}

fn report_file(run: &str, seed: u64, runs: &[ModelRun]) -> ReportFile {
    ReportFile {
        run: run.to_string(),
        seed,
        reports: runs
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok().cloned())
            .collect(),
        errors: runs
            .iter()
            .filter_map(|r| {
                r.outcome.as_ref().err().map(|e| ModelError {
                    model: r.model.clone(),
                    error: e.clone(),
                })
            })
            .collect(),
        notes: runs.iter().filter_map(|r| r.note.clone()).collect(),
    }
}

fn write_compare_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    seed: u64,
    output: &CompareOutput,
) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let report = report_file("compare", seed, &output.runs);
    std::fs::write(
        dir.join("report.json"),
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    std::fs::write(
        dir.join("trace.csv"),
        trace_csv(&output.times, &output.observed, &output.runs),
    )?;
    let mut report_csv = format!("{}\n", EvalReport::csv_header());
    for r in report.reports.iter() {
        report_csv.push_str(&r.to_csv_row());
        report_csv.push('\n');
    }
    std::fs::write(dir.join("report.csv"), report_csv)?;
    write_epoch_files(dir, &output.runs, cfg.timing)?;
    std::fs::write(dir.join("config.resolved"), cfg.resolved_text())?;
    Ok(())
}

/// Observed-vs-predicted test traces, one column per successful model.
pub fn trace_csv(times: &[i64], observed: &[f64], runs: &[ModelRun]) -> String {
    let with_preds: Vec<&ModelRun> = runs.iter().filter(|r| r.predictions.is_some()).collect();
    let mut out = String::from("timestamp,observed");
    for r in &with_preds {
        let _ = write!(out, ",{}", r.model);
    }
    out.push('\n');
    for (i, (&t, &obs)) in times.iter().zip(observed).enumerate() {
        let _ = write!(out, "{t},{obs}");
        for r in &with_preds {
            let _ = write!(out, ",{}", r.predictions.as_ref().unwrap()[i]);
        }
        out.push('\n');
    }
    out
}

/// `epoch,train_loss,test_loss,seconds` rows. Timing is left empty unless
/// requested, keeping the artifact byte-reproducible across runs.
pub fn epoch_csv(logs: &[EpochLog], include_timing: bool) -> String {
    let mut out = String::from("epoch,train_loss,test_loss,seconds\n");
    for log in logs {
        if include_timing {
            let _ = writeln!(
                out,
                "{},{},{},{:.3}",
                log.epoch, log.train_loss, log.test_loss, log.seconds
            );
        } else {
            let _ = writeln!(out, "{},{},{},", log.epoch, log.train_loss, log.test_loss);
        }
    }
    out
}

fn write_epoch_files(dir: &Path, runs: &[ModelRun], timing: bool) -> Result<()> {
    let neural: Vec<&ModelRun> = runs.iter().filter(|r| r.epochs.is_some()).collect();
    let primary = neural
        .iter()
        .find(|r| r.model == "lstm")
        .or_else(|| neural.first())
        .copied();
    if let Some(p) = primary {
        std::fs::write(
            dir.join("epochs.csv"),
            epoch_csv(p.epochs.as_ref().unwrap(), timing),
        )?;
    }
    for r in neural {
        if primary.map(|p| p.model == r.model) == Some(true) {
            continue;
        }
        std::fs::write(
            dir.join(format!("epochs_{}.csv", r.model)),
            epoch_csv(r.epochs.as_ref().unwrap(), timing),
        )?;
    }
    Ok(())
}

/// Ablation over the seven populated input combinations.
pub const ABLATION_COMBOS: [&str; 7] = [
    "flow",
    "flow+rain",
    "flow+areal",
    "flow+rain+areal",
    "rain",
    "areal",
    "rain+areal",
];

fn selection_from_text(text: &str) -> Result<VariableSelection> {
    let mut sel = VariableSelection {
        flow: false,
        rain: false,
        areal: false,
    };
    for part in text.split('+') {
        match part {
            "flow" => sel.flow = true,
            "rain" => sel.rain = true,
            "areal" => sel.areal = true,
            other => return Err(Error::config(format!("unknown input {other:?}"))),
        }
    }
    sel.validate()?;
    Ok(sel)
}

#[derive(Debug, Clone)]
pub struct AblationOutput {
    pub rows: Vec<(String, std::result::Result<EvalReport, String>)>,
    pub out_dir: Option<PathBuf>,
}

/// Trains one LSTM per input combination on a shared table; feature
/// dimensions adapt per combination.
pub fn run_input_ablation(cfg: &ExperimentConfig) -> Result<AblationOutput> {
    let seed = cfg.require_seed()?;
    let table = load_table(cfg, seed)?;
    let mut rows = Vec::new();
    for combo in ABLATION_COMBOS {
        let sel = selection_from_text(combo)?;
        let outcome = prepare(cfg, &table, cfg.encoder_steps, cfg.predict_step, sel)
            .and_then(|data| {
                assert_eq!(
                    data.train_raw.n_features(),
                    cfg.encoder_steps * sel.n_variables(),
                    "ablation feature-dimension law"
                );
                match run_single_model("lstm", &data, cfg, seed) {
                    ModelRun {
                        outcome: Ok(mut report),
                        ..
                    } => {
                        report.run_id = combo.to_string();
                        Ok(report)
                    }
                    ModelRun { outcome: Err(e), .. } => Err(Error::Data(e)),
                }
            })
            .map_err(|e| e.to_string());
        rows.push((combo.to_string(), outcome));
    }
    let output = AblationOutput {
        rows,
        out_dir: cfg.out_dir.clone(),
    };
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        let runs: Vec<ModelRun> = output
            .rows
            .iter()
            .map(|(combo, outcome)| ModelRun {
                model: combo.clone(),
                outcome: outcome.clone(),
                predictions: None,
                epochs: None,
                trained: None,
                note: None,
            })
            .collect();
        let report = report_file("ablate", seed, &runs);
        std::fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )?;
        std::fs::write(dir.join("ablation.csv"), ablation_csv(&output))?;
        std::fs::write(dir.join("config.resolved"), cfg.resolved_text())?;
    }
    Ok(output)
}

/// `inputs,n,rmse,mae,r2,error` rows in the fixed combination order.
pub fn ablation_csv(output: &AblationOutput) -> String {
    let mut out = String::from("inputs,n,rmse,mae,r2,error\n");
    for (combo, outcome) in &output.rows {
        match outcome {
            Ok(r) => {
                let _ = writeln!(out, "{combo},{},{},{},{},", r.n, r.rmse, r.mae, r.r2);
            }
            Err(e) => {
                let _ = writeln!(out, "{combo},,,,,{}", e.replace([',', '\n'], ";"));
            }
        }
    }
    out
}

/// Which window parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    PredictStep,
    EncoderStep,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::PredictStep => "predict_step",
            SweepParam::EncoderStep => "encoder_step",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub value: usize,
    pub runs: Vec<ModelRun>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: &'static str,
    pub points: Vec<SweepPoint>,
    pub out_dir: Option<PathBuf>,
}

/// One full train/evaluate cycle per swept value, re-windowing every time.
/// Each point gets the fresh seed `master + value`; a point whose windowing
/// fails is recorded as an error and the sweep continues.
pub fn run_step_sweep(cfg: &ExperimentConfig, param: SweepParam, steps: &[usize]) -> Result<SweepResult> {
    let seed = cfg.require_seed()?;
    if steps.is_empty() {
        return Err(Error::config("sweep needs at least one step value".to_string()));
    }
    if steps.iter().any(|&s| s < 1) {
        return Err(Error::config("sweep steps must be >= 1".to_string()));
    }
    for w in steps.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::config(format!(
                "sweep steps must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
    }
    let table = load_table(cfg, seed)?;
    let mut points = Vec::with_capacity(steps.len());
    for &value in steps {
        let point_seed = seed + value as u64;
        let (encoder, predict) = match param {
            SweepParam::PredictStep => (cfg.encoder_steps, value),
            SweepParam::EncoderStep => (value, cfg.predict_step),
        };
        let runs = match prepare(cfg, &table, encoder, predict, cfg.inputs) {
            Ok(data) => cfg
                .models
                .iter()
                .map(|name| {
                    let mut run = run_single_model(name, &data, cfg, point_seed);
                    if let Ok(report) = &mut run.outcome {
                        report.run_id = format!("{}={value}/{name}", param.name());
                    }
                    run
                })
                .collect(),
            Err(e) => cfg
                .models
                .iter()
                .map(|name| ModelRun {
                    model: name.clone(),
                    outcome: Err(e.to_string()),
                    predictions: None,
                    epochs: None,
                    trained: None,
                    note: None,
                })
                .collect(),
        };
        points.push(SweepPoint { value, runs });
    }
    let result = SweepResult {
        parameter: param.name(),
        points,
        out_dir: cfg.out_dir.clone(),
    };
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("sweep.csv"), sweep_csv(&result))?;
        let all_runs: Vec<ModelRun> = result.points.iter().flat_map(|p| p.runs.clone()).collect();
        let report = report_file(result.parameter, seed, &all_runs);
        std::fs::write(
            dir.join("report.json"),
            serde_json::to_string_pretty(&report).expect("report serializes"),
        )?;
        std::fs::write(dir.join("config.resolved"), cfg.resolved_text())?;
    }
    Ok(result)
}

/// Forecast-horizon sweep: re-windows and retrains at each predict step.
pub fn run_predict_step_sweep(cfg: &ExperimentConfig, steps: &[usize]) -> Result<SweepResult> {
    run_step_sweep(cfg, SweepParam::PredictStep, steps)
}

/// Window-length sweep: re-windows and retrains at each encoder step.
pub fn run_encoder_step_sweep(cfg: &ExperimentConfig, steps: &[usize]) -> Result<SweepResult> {
    run_step_sweep(cfg, SweepParam::EncoderStep, steps)
}

/// `parameter,value,model,n,rmse,mae,r2,error` — one row per (value, model),
/// errors recorded in place so the grid never has silent gaps.
pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from("parameter,value,model,n,rmse,mae,r2,error\n");
    for point in &result.points {
        for run in &point.runs {
            match &run.outcome {
                Ok(r) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},{},{},",
                        result.parameter, point.value, run.model, r.n, r.rmse, r.mae, r.r2
                    );
                }
                Err(e) => {
                    let _ = writeln!(
                        out,
                        "{},{},{},,,,,{}",
                        result.parameter,
                        point.value,
                        run.model,
                        e.replace([',', '\n'], ";")
                    );
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct EpochSweepOutput {
    pub logs: Vec<EpochLog>,
    pub min_test_loss_epoch: usize,
    pub out_dir: Option<PathBuf>,
}

/// Single training run to `max(grid)` epochs with the full loss log
/// captured; reports where the test loss bottoms out.
pub fn run_epoch_sweep(cfg: &ExperimentConfig, grid: &[usize]) -> Result<EpochSweepOutput> {
    let seed = cfg.require_seed()?;
    if grid.is_empty() {
        return Err(Error::config("epoch grid must not be empty".to_string()));
    }
    if grid.iter().any(|&g| g < 1) {
        return Err(Error::config("epoch grid values must be >= 1".to_string()));
    }
    for w in grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::config("epoch grid must be ascending".to_string()));
        }
    }
    let mut run_cfg = cfg.clone();
    run_cfg.train.epochs = *grid.last().unwrap();
    let table = load_table(&run_cfg, seed)?;
    let data = prepare(
        &run_cfg,
        &table,
        run_cfg.encoder_steps,
        run_cfg.predict_step,
        run_cfg.inputs,
    )?;
    let model_name = run_cfg
        .models
        .iter()
        .find(|m| *m != "svr")
        .cloned()
        .unwrap_or_else(|| "lstm".to_string());
    let run = run_single_model(&model_name, &data, &run_cfg, seed);
    let logs = match (run.outcome, run.epochs) {
        (Ok(_), Some(logs)) => logs,
        (Err(e), _) => return Err(Error::Data(e)),
        (Ok(_), None) => {
            return Err(Error::config(format!(
                "model {model_name} produces no epoch log"
            )))
        }
    };
    let min_test_loss_epoch = logs
        .iter()
        .min_by(|a, b| a.test_loss.partial_cmp(&b.test_loss).unwrap())
        .map(|l| l.epoch)
        .unwrap_or(0);
    let output = EpochSweepOutput {
        logs,
        min_test_loss_epoch,
        out_dir: cfg.out_dir.clone(),
    };
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("epochs.csv"), epoch_csv(&output.logs, cfg.timing))?;
        std::fs::write(
            dir.join("report.json"),
            format!(
                "{{\"run\":\"epochs\",\"seed\":{seed},\"min_test_loss_epoch\":{}}}\n",
                output.min_test_loss_epoch
            ),
        )?;
        std::fs::write(dir.join("config.resolved"), cfg.resolved_text())?;
    }
    Ok(output)
}

/// Evaluates a stored model against a table: windows it with the model's
/// geometry, scales with the stored scaler, and reports physical-unit
/// metrics. Returns (report, target times, observed, predicted).
pub fn evaluate_stored_model(
    model: &AnyModel,
    scaler: &MinMaxScaler,
    table: &TimeSeriesTable,
    encoder_steps: usize,
    predict_step: usize,
    inputs: VariableSelection,
    convention: R2Convention,
    run_id: &str,
) -> Result<(EvalReport, Vec<i64>, Vec<f64>, Vec<f64>)> {
    let windowed = series_to_supervised(table, encoder_steps, predict_step, inputs)?;
    if windowed.n_features() != model.input_len() {
        return Err(Error::shape(
            "evaluate",
            format!(
                "model expects {} features, windowing produced {}",
                model.input_len(),
                windowed.n_features()
            ),
        ));
    }
    let scaled = scaler.transform(&windowed)?;
    let preds_scaled: Vec<f64> = (0..scaled.n_samples())
        .map(|i| model.predict(scaled.features.row(i)))
        .collect::<Result<_>>()?;
    let predicted = scaler.inverse_transform_targets(&preds_scaled);
    let report = evaluate(&predicted, &windowed.targets, convention, run_id)?;
    Ok((report, windowed.target_times, windowed.targets.clone(), predicted))
}
