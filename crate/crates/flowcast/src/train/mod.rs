//! Mini-batch training with selectable loss and optimizer, plus the
//! finite-difference gradient checker.

mod gradcheck;
mod optim;

pub use gradcheck::{batch_gradients, batch_loss, check_against, gradient_check, GradCheckReport};
pub use optim::{clip_global_norm, optimizer_step_blocks, OptimizerKind, OptimizerState};

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::data::SupervisedMatrix;
use crate::error::{Error, Result};
use crate::model::{NeuralModel, ParamBlocks};
use crate::num::SeededRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Loss {
    Mse,
    Mae,
}

impl Loss {
    pub fn name(&self) -> &'static str {
        match self {
            Loss::Mse => "mse",
            Loss::Mae => "mae",
        }
    }
}

impl std::str::FromStr for Loss {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mse" => Ok(Loss::Mse),
            "mae" => Ok(Loss::Mae),
            other => Err(Error::config(format!("unknown loss {other:?} (expected mse|mae)"))),
        }
    }
}

/// Loss value and its gradient with respect to the predictions.
///
/// MSE: mean squared error, gradient `2(p-t)/m`. MAE: mean absolute error,
/// subgradient `sign(p-t)/m` (zero at ties).
pub fn loss_and_grad(loss: Loss, predictions: &[f64], targets: &[f64]) -> Result<(f64, Vec<f64>)> {
    if predictions.len() != targets.len() || predictions.is_empty() {
        return Err(Error::shape(
            "loss_and_grad",
            format!(
                "{} predictions vs {} targets (need equal, non-zero)",
                predictions.len(),
                targets.len()
            ),
        ));
    }
    let m = predictions.len() as f64;
    match loss {
        Loss::Mse => {
            let mut total = 0.0;
            let mut grad = Vec::with_capacity(predictions.len());
            for (&p, &t) in predictions.iter().zip(targets) {
                let d = p - t;
                total += d * d;
                grad.push(2.0 * d / m);
            }
            Ok((total / m, grad))
        }
        Loss::Mae => {
            let mut total = 0.0;
            let mut grad = Vec::with_capacity(predictions.len());
            for (&p, &t) in predictions.iter().zip(targets) {
                let d = p - t;
                total += d.abs();
                grad.push(d.signum() * if d == 0.0 { 0.0 } else { 1.0 } / m);
            }
            Ok((total / m, grad))
        }
    }
}

/// Training regime: optimizer, learning rate, batching, loss, seed, clipping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub optimizer: OptimizerKind,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub loss: Loss,
    pub seed: u64,
    pub clip_norm: f64,
    pub shuffle_each_epoch: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            optimizer: OptimizerKind::adam(),
            learning_rate: 0.001,
            batch_size: 72,
            epochs: 30,
            loss: Loss::Mse,
            seed: 0,
            clip_norm: 5.0,
            shuffle_each_epoch: true,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size < 1 {
            return Err(Error::config("batch_size must be >= 1".to_string()));
        }
        if self.epochs < 1 {
            return Err(Error::config("epochs must be >= 1".to_string()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config(format!(
                "learning_rate must be > 0 (got {})",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

/// One epoch's record: losses in the (scaled) training space plus wall time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub train_loss: f64,
    pub test_loss: f64,
    pub seconds: f64,
}

/// Loss of a model over a whole set, without touching any parameter.
pub fn evaluate_loss<M: NeuralModel>(model: &M, set: &SupervisedMatrix, loss: Loss) -> Result<f64> {
    let preds = predict_all(model, set)?;
    Ok(loss_and_grad(loss, &preds, &set.targets)?.0)
}

/// Predictions for every row of a set, in order.
pub fn predict_all<M: NeuralModel>(model: &M, set: &SupervisedMatrix) -> Result<Vec<f64>> {
    (0..set.n_samples())
        .map(|i| model.predict(set.features.row(i)))
        .collect()
}

/// Incremental mini-batch trainer; one call to [`Trainer::epoch_step`] runs
/// one full pass over the training rows.
///
/// Each epoch shuffles the training rows (seeded), walks them in batches of
/// `batch_size` (the final short batch included), and applies one optimizer
/// step per batch. Train loss is the batch-size-weighted mean over the epoch;
/// test loss is evaluated after each epoch and never influences updates.
/// The whole run is a pure function of (data, config, seed) apart from the
/// recorded wall time.
pub struct Trainer<M: NeuralModel> {
    model: M,
    cfg: TrainConfig,
    rng: SeededRng,
    order: Vec<usize>,
    state: OptimizerState,
    block_names: Vec<String>,
    epochs_run: usize,
    logs: Vec<EpochLog>,
}

impl<M: NeuralModel> Trainer<M> {
    pub fn new(model: M, train_set: &SupervisedMatrix, test_set: &SupervisedMatrix, cfg: &TrainConfig) -> Result<Self> {
        cfg.validate()?;
        if train_set.n_samples() == 0 {
            return Err(Error::data("empty training set".to_string()));
        }
        if train_set.n_features() != model.input_len() {
            return Err(Error::shape(
                "train",
                format!(
                    "model expects {} features, training set has {}",
                    model.input_len(),
                    train_set.n_features()
                ),
            ));
        }
        if test_set.n_features() != train_set.n_features() {
            return Err(Error::shape(
                "train",
                format!(
                    "test set has {} features, training set {}",
                    test_set.n_features(),
                    train_set.n_features()
                ),
            ));
        }
        let state = OptimizerState::new(&model);
        let block_names = model.block_names();
        Ok(Trainer {
            model,
            cfg: *cfg,
            rng: SeededRng::new(cfg.seed),
            order: (0..train_set.n_samples()).collect(),
            state,
            block_names,
            epochs_run: 0,
            logs: Vec::with_capacity(cfg.epochs),
        })
    }

    pub fn is_done(&self) -> bool {
        self.epochs_run >= self.cfg.epochs
    }

    pub fn model(&self) -> &M {
        &self.model
    }

    pub fn logs(&self) -> &[EpochLog] {
        &self.logs
    }

    pub fn into_parts(self) -> (M, Vec<EpochLog>) {
        (self.model, self.logs)
    }

    /// Runs one epoch over the same train/test sets the trainer was built
    /// with and returns its log entry.
    pub fn epoch_step(
        &mut self,
        train_set: &SupervisedMatrix,
        test_set: &SupervisedMatrix,
    ) -> Result<EpochLog> {
        let epoch = self.epochs_run + 1;
        let n = train_set.n_samples();
        if n != self.order.len() {
            return Err(Error::shape(
                "train",
                format!("training set changed size: {} rows, expected {}", n, self.order.len()),
            ));
        }
        let started = Instant::now();
        if self.cfg.shuffle_each_epoch {
            self.rng.shuffle(&mut self.order);
        }
        let mut weighted_loss = 0.0;
        for (batch_idx, batch) in self.order.chunks(self.cfg.batch_size).enumerate() {
            let diverged = |detail: String| Error::Diverged {
                epoch,
                batch: batch_idx,
                detail,
                last_good: if epoch > 1 {
                    format!("{}", epoch - 1)
                } else {
                    "none".to_string()
                },
            };

            let mut preds = Vec::with_capacity(batch.len());
            let mut traces = Vec::with_capacity(batch.len());
            for &i in batch {
                let (p, t) = self.model.forward_traced(train_set.features.row(i))?;
                preds.push(p);
                traces.push(t);
            }
            let batch_targets: Vec<f64> = batch.iter().map(|&i| train_set.targets[i]).collect();
            let (loss, dpreds) = loss_and_grad(self.cfg.loss, &preds, &batch_targets)?;
            if !loss.is_finite() {
                return Err(diverged(format!("batch loss {loss}")));
            }
            let mut grads = self.model.zero_grads();
            for ((&i, trace), dp) in batch.iter().zip(&traces).zip(&dpreds) {
                self.model
                    .backward(train_set.features.row(i), trace, *dp, &mut grads)?;
            }
            {
                let mut grad_blocks = grads.blocks_mut();
                clip_global_norm(&mut grad_blocks, self.cfg.clip_norm);
            }
            optimizer_step_blocks(
                &mut self.state,
                &mut self.model.blocks_mut(),
                &grads.blocks(),
                &self.block_names,
                self.cfg.optimizer,
                self.cfg.learning_rate,
            )
            .map_err(|e| diverged(e.to_string()))?;
            weighted_loss += loss * batch.len() as f64;
        }
        let train_loss = weighted_loss / n as f64;
        let test_loss = evaluate_loss(&self.model, test_set, self.cfg.loss)?;
        if !train_loss.is_finite() || !test_loss.is_finite() {
            return Err(Error::Diverged {
                epoch,
                batch: 0,
                detail: format!("epoch losses train={train_loss} test={test_loss}"),
                last_good: format!("{}", epoch.saturating_sub(1)),
            });
        }
        let log = EpochLog {
            epoch,
            train_loss,
            test_loss,
            seconds: started.elapsed().as_secs_f64(),
        };
        self.epochs_run = epoch;
        self.logs.push(log.clone());
        Ok(log)
    }
}

/// Full mini-batch training run; see [`Trainer`] for the loop contract.
pub fn train<M: NeuralModel>(
    model: M,
    train_set: &SupervisedMatrix,
    test_set: &SupervisedMatrix,
    cfg: &TrainConfig,
) -> Result<(M, Vec<EpochLog>)> {
    let mut trainer = Trainer::new(model, train_set, test_set, cfg)?;
    while !trainer.is_done() {
        trainer.epoch_step(train_set, test_set)?;
    }
    Ok(trainer.into_parts())
}
