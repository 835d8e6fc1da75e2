//! Browser demo bindings: generate a synthetic catchment, train a
//! forecasting model epoch by epoch, and explore the forecast-horizon
//! accuracy trade-off, all in-page. Results cross the JS boundary as JSON
//! strings.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use flowcast::data::{generate_synthetic, SyntheticConfig, VariableSelection};
use flowcast::experiment::{prepare, DatasetSource, ExperimentConfig, PreparedData};
use flowcast::metrics::{evaluate, R2Convention};
use flowcast::model::{Lstm, Mlp, Rnn};
use flowcast::num::SeededRng;
use flowcast::train::{predict_all, EpochLog, Trainer};

fn err_to_js(e: flowcast::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn synth_config(hours: usize, storm_rate: f64, recession: f64, noise_std: f64) -> SyntheticConfig {
    SyntheticConfig {
        n_hours: hours,
        storm_rate,
        recession,
        noise_std,
        ..SyntheticConfig::default()
    }
}

#[derive(Serialize)]
struct SeriesOut {
    times: Vec<i64>,
    flow: Vec<f64>,
    areal_rain: Vec<f64>,
}

/// Synthetic catchment preview: hourly flow plus catchment-mean rainfall.
#[wasm_bindgen]
pub fn generate_series(
    seed: u64,
    hours: usize,
    storm_rate: f64,
    recession: f64,
    noise_std: f64,
) -> Result<String, JsValue> {
    let cfg = synth_config(hours, storm_rate, recession, noise_std);
    let table = generate_synthetic(&mut SeededRng::new(seed), &cfg).map_err(err_to_js)?;
    let areal = flowcast::data::areal_rainfall(&table, None).map_err(err_to_js)?;
    let out = SeriesOut {
        times: table.times().to_vec(),
        flow: table.flow().to_vec(),
        areal_rain: areal,
    };
    Ok(serde_json::to_string(&out).unwrap())
}

enum AnyTrainer {
    Lstm(Trainer<Lstm>),
    Rnn(Trainer<Rnn>),
    Mlp(Trainer<Mlp>),
}

impl AnyTrainer {
    fn epoch_step(&mut self, data: &PreparedData) -> flowcast::Result<EpochLog> {
        match self {
            AnyTrainer::Lstm(t) => t.epoch_step(&data.train_scaled, &data.test_scaled),
            AnyTrainer::Rnn(t) => t.epoch_step(&data.train_scaled, &data.test_scaled),
            AnyTrainer::Mlp(t) => t.epoch_step(&data.train_scaled, &data.test_scaled),
        }
    }

    fn is_done(&self) -> bool {
        match self {
            AnyTrainer::Lstm(t) => t.is_done(),
            AnyTrainer::Rnn(t) => t.is_done(),
            AnyTrainer::Mlp(t) => t.is_done(),
        }
    }

    fn predict_test(&self, data: &PreparedData) -> flowcast::Result<Vec<f64>> {
        match self {
            AnyTrainer::Lstm(t) => predict_all(t.model(), &data.test_scaled),
            AnyTrainer::Rnn(t) => predict_all(t.model(), &data.test_scaled),
            AnyTrainer::Mlp(t) => predict_all(t.model(), &data.test_scaled),
        }
    }
}

#[derive(Serialize)]
struct EpochOut {
    epoch: usize,
    train_loss: f64,
    test_loss: f64,
    done: bool,
}

#[derive(Serialize)]
struct TraceOut {
    times: Vec<i64>,
    observed: Vec<f64>,
    predicted: Vec<f64>,
    rmse: f64,
    mae: f64,
    r2: f64,
}

fn demo_experiment_config(
    seed: u64,
    synth: SyntheticConfig,
    encoder: usize,
    predict: usize,
    hidden: usize,
    epochs: usize,
) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.dataset = DatasetSource::Synthetic(synth);
    cfg.encoder_steps = encoder;
    cfg.predict_step = predict;
    cfg.hidden_size = hidden;
    cfg.mlp_hidden = hidden;
    cfg.train.epochs = epochs;
    cfg.train.batch_size = 32;
    cfg.seed = Some(seed);
    cfg
}

fn prepare_demo(cfg: &ExperimentConfig, seed: u64) -> flowcast::Result<PreparedData> {
    let table = flowcast::experiment::load_table(cfg, seed)?;
    prepare(
        cfg,
        &table,
        cfg.encoder_steps,
        cfg.predict_step,
        VariableSelection::FLOW_AND_RAIN,
    )
}

/// In-page training session; call `epoch_step` repeatedly (e.g. from a
/// timer) so the page stays responsive, then `test_trace` for the forecast.
#[wasm_bindgen]
pub struct TrainSession {
    data: PreparedData,
    trainer: AnyTrainer,
}

#[wasm_bindgen]
impl TrainSession {
    #[wasm_bindgen(constructor)]
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        model: String,
        seed: u64,
        hours: usize,
        storm_rate: f64,
        recession: f64,
        noise_std: f64,
        encoder_steps: usize,
        predict_step: usize,
        hidden: usize,
        epochs: usize,
    ) -> Result<TrainSession, JsValue> {
        let synth = synth_config(hours, storm_rate, recession, noise_std);
        let cfg = demo_experiment_config(seed, synth, encoder_steps, predict_step, hidden, epochs);
        let data = prepare_demo(&cfg, seed).map_err(err_to_js)?;
        let n_vars = data.n_variables();
        let n_features = data.train_scaled.n_features();
        let mut rng = SeededRng::new(seed);
        let trainer = match model.as_str() {
            "lstm" => AnyTrainer::Lstm(
                Trainer::new(
                    Lstm::new(n_vars, hidden, encoder_steps, &mut rng).map_err(err_to_js)?,
                    &data.train_scaled,
                    &data.test_scaled,
                    &cfg.train,
                )
                .map_err(err_to_js)?,
            ),
            "rnn" => AnyTrainer::Rnn(
                Trainer::new(
                    Rnn::new(n_vars, hidden, encoder_steps, &mut rng).map_err(err_to_js)?,
                    &data.train_scaled,
                    &data.test_scaled,
                    &cfg.train,
                )
                .map_err(err_to_js)?,
            ),
            "mlp" => AnyTrainer::Mlp(
                Trainer::new(
                    Mlp::new(n_features, hidden, &mut rng).map_err(err_to_js)?,
                    &data.train_scaled,
                    &data.test_scaled,
                    &cfg.train,
                )
                .map_err(err_to_js)?,
            ),
            other => return Err(JsValue::from_str(&format!("unknown model {other:?}"))),
        };
        Ok(TrainSession { data, trainer })
    }

    pub fn train_rows(&self) -> usize {
        self.data.train_scaled.n_samples()
    }

    pub fn test_rows(&self) -> usize {
        self.data.test_scaled.n_samples()
    }

    /// Runs one epoch; JSON `{epoch, train_loss, test_loss, done}`.
    pub fn epoch_step(&mut self) -> Result<String, JsValue> {
        if self.trainer.is_done() {
            return Err(JsValue::from_str("training already finished"));
        }
        let log = self.trainer.epoch_step(&self.data).map_err(err_to_js)?;
        let out = EpochOut {
            epoch: log.epoch,
            train_loss: log.train_loss,
            test_loss: log.test_loss,
            done: self.trainer.is_done(),
        };
        Ok(serde_json::to_string(&out).unwrap())
    }

    /// Observed vs predicted over the test period, physical units, with
    /// RMSE/MAE/R².
    pub fn test_trace(&self) -> Result<String, JsValue> {
        let scaled = self.trainer.predict_test(&self.data).map_err(err_to_js)?;
        let predicted = self.data.scaler.inverse_transform_targets(&scaled);
        let observed = self.data.test_raw.targets.clone();
        let report =
            evaluate(&predicted, &observed, R2Convention::ObservedMean, "demo").map_err(err_to_js)?;
        let out = TraceOut {
            times: self.data.test_raw.target_times.clone(),
            observed,
            predicted,
            rmse: report.rmse,
            mae: report.mae,
            r2: report.r2,
        };
        Ok(serde_json::to_string(&out).unwrap())
    }
}

#[derive(Serialize)]
struct HorizonOut {
    predict_step: usize,
    rmse: f64,
    mae: f64,
    r2: f64,
}

/// One point of the forecast-horizon study: trains a small LSTM at the given
/// predict step and reports its test metrics.
#[wasm_bindgen]
pub fn horizon_point(
    seed: u64,
    hours: usize,
    predict_step: usize,
    encoder_steps: usize,
    hidden: usize,
    epochs: usize,
) -> Result<String, JsValue> {
    let synth = synth_config(hours, 0.02, 0.06, 0.02);
    let cfg = demo_experiment_config(seed, synth, encoder_steps, predict_step, hidden, epochs);
    let data = prepare_demo(&cfg, seed).map_err(err_to_js)?;
    let mut rng = SeededRng::new(seed + predict_step as u64);
    let model =
        Lstm::new(data.n_variables(), hidden, encoder_steps, &mut rng).map_err(err_to_js)?;
    let mut train_cfg = cfg.train;
    train_cfg.seed = seed + predict_step as u64;
    let (model, _) =
        flowcast::train::train(model, &data.train_scaled, &data.test_scaled, &train_cfg)
            .map_err(err_to_js)?;
    let scaled = predict_all(&model, &data.test_scaled).map_err(err_to_js)?;
    let predicted = data.scaler.inverse_transform_targets(&scaled);
    let report = evaluate(
        &predicted,
        &data.test_raw.targets,
        R2Convention::ObservedMean,
        "horizon",
    )
    .map_err(err_to_js)?;
    let out = HorizonOut {
        predict_step,
        rmse: report.rmse,
        mae: report.mae,
        r2: report.r2,
    };
    Ok(serde_json::to_string(&out).unwrap())
}
