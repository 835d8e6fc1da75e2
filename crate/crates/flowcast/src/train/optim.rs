use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ParamBlocks;

const EPS: f64 = 1e-8;

/// First-order update rule. Standard fixed hyperparameters: momentum and
/// RMSProp decay 0.9, Adam (0.9, 0.999), epsilon 1e-8.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum OptimizerKind {
    Momentum { coefficient: f64 },
    Adagrad,
    RmsProp { decay: f64 },
    Adam { beta1: f64, beta2: f64 },
}

impl OptimizerKind {
    pub fn momentum() -> Self {
        OptimizerKind::Momentum { coefficient: 0.9 }
    }

    pub fn rmsprop() -> Self {
        OptimizerKind::RmsProp { decay: 0.9 }
    }

    pub fn adam() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OptimizerKind::Momentum { .. } => "momentum",
            OptimizerKind::Adagrad => "adagrad",
            OptimizerKind::RmsProp { .. } => "rmsprop",
            OptimizerKind::Adam { .. } => "adam",
        }
    }
}

impl std::str::FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "momentum" => Ok(OptimizerKind::momentum()),
            "adagrad" => Ok(OptimizerKind::Adagrad),
            "rmsprop" => Ok(OptimizerKind::rmsprop()),
            "adam" => Ok(OptimizerKind::adam()),
            other => Err(Error::config(format!(
                "unknown optimizer {other:?} (expected momentum|adagrad|rmsprop|adam)"
            ))),
        }
    }
}

/// Per-parameter accumulators mirroring the model's block layout.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
    step: u64,
}

impl OptimizerState {
    pub fn new<M: ParamBlocks>(model: &M) -> Self {
        let shapes: Vec<usize> = model.blocks().iter().map(|b| b.len()).collect();
        OptimizerState {
            first: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            second: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// Applies one update to every parameter block. Rejects non-finite gradients,
/// naming the offending block. `params` and `grads` must align with the
/// state's layout.
pub fn optimizer_step_blocks(
    state: &mut OptimizerState,
    params: &mut [&mut [f64]],
    grads: &[&[f64]],
    block_names: &[String],
    kind: OptimizerKind,
    learning_rate: f64,
) -> Result<()> {
    if params.len() != state.first.len() || grads.len() != state.first.len() {
        return Err(Error::shape(
            "optimizer_step",
            format!(
                "state has {} blocks, params {} / grads {}",
                state.first.len(),
                params.len(),
                grads.len()
            ),
        ));
    }
    for (b, g) in grads.iter().enumerate() {
        if g.iter().any(|v| !v.is_finite()) {
            let name = block_names.get(b).map(String::as_str).unwrap_or("?");
            return Err(Error::data(format!("non-finite gradient in parameter block {name}")));
        }
    }
    state.step += 1;
    match kind {
        OptimizerKind::Momentum { coefficient } => {
            for b in 0..params.len() {
                let vel = &mut state.first[b];
                for ((p, &g), v) in params[b].iter_mut().zip(grads[b]).zip(vel.iter_mut()) {
                    *v = coefficient * *v + g;
                    *p -= learning_rate * *v;
                }
            }
        }
        OptimizerKind::Adagrad => {
            for b in 0..params.len() {
                let acc = &mut state.second[b];
                for ((p, &g), a) in params[b].iter_mut().zip(grads[b]).zip(acc.iter_mut()) {
                    *a += g * g;
                    *p -= learning_rate * g / (a.sqrt() + EPS);
                }
            }
        }
        OptimizerKind::RmsProp { decay } => {
            for b in 0..params.len() {
                let acc = &mut state.second[b];
                for ((p, &g), a) in params[b].iter_mut().zip(grads[b]).zip(acc.iter_mut()) {
                    *a = decay * *a + (1.0 - decay) * g * g;
                    *p -= learning_rate * g / (a.sqrt() + EPS);
                }
            }
        }
        OptimizerKind::Adam { beta1, beta2 } => {
            let t = state.step as i32;
            let bc1 = 1.0 - beta1.powi(t);
            let bc2 = 1.0 - beta2.powi(t);
            for b in 0..params.len() {
                let (m_acc, v_acc) = (&mut state.first[b], &mut state.second[b]);
                for (((p, &g), m), v) in params[b]
                    .iter_mut()
                    .zip(grads[b])
                    .zip(m_acc.iter_mut())
                    .zip(v_acc.iter_mut())
                {
                    *m = beta1 * *m + (1.0 - beta1) * g;
                    *v = beta2 * *v + (1.0 - beta2) * g * g;
                    let m_hat = *m / bc1;
                    let v_hat = *v / bc2;
                    *p -= learning_rate * m_hat / (v_hat.sqrt() + EPS);
                }
            }
        }
    }
    Ok(())
}

/// Scales all gradient blocks so the global L2 norm does not exceed `clip`.
pub fn clip_global_norm(grads: &mut [&mut [f64]], clip: f64) {
    if clip <= 0.0 {
        return;
    }
    let norm: f64 = grads
        .iter()
        .map(|b| b.iter().map(|v| v * v).sum::<f64>())
        .sum::<f64>()
        .sqrt();
    if norm > clip {
        let scale = clip / norm;
        for block in grads.iter_mut() {
            for v in block.iter_mut() {
                *v *= scale;
            }
        }
    }
}
