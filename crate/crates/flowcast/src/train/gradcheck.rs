use super::{loss_and_grad, Loss};
use crate::error::Result;
use crate::model::{NeuralModel, ParamBlocks};
use crate::num::Matrix;

/// Outcome of a finite-difference sweep; report-only, never an error.
#[derive(Debug, Clone)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub worst_block: String,
    pub worst_index: usize,
    pub worst_analytic: f64,
    pub worst_numeric: f64,
    pub n_parameters: usize,
}

/// Batch loss of a model over feature rows.
pub fn batch_loss<M: NeuralModel>(
    model: &M,
    features: &Matrix,
    targets: &[f64],
    loss: Loss,
) -> Result<f64> {
    let preds: Vec<f64> = (0..features.rows())
        .map(|i| model.predict(features.row(i)))
        .collect::<Result<_>>()?;
    Ok(loss_and_grad(loss, &preds, targets)?.0)
}

/// Analytic batch-loss gradients, accumulated sample by sample through each
/// model's hand-derived backward pass.
pub fn batch_gradients<M: NeuralModel>(
    model: &M,
    features: &Matrix,
    targets: &[f64],
    loss: Loss,
) -> Result<(f64, M::Grads)> {
    let mut preds = Vec::with_capacity(features.rows());
    let mut traces = Vec::with_capacity(features.rows());
    for i in 0..features.rows() {
        let (p, t) = model.forward_traced(features.row(i))?;
        preds.push(p);
        traces.push(t);
    }
    let (loss_value, dpreds) = loss_and_grad(loss, &preds, targets)?;
    let mut grads = model.zero_grads();
    for (i, (trace, dp)) in traces.iter().zip(&dpreds).enumerate() {
        model.backward(features.row(i), trace, *dp, &mut grads)?;
    }
    Ok((loss_value, grads))
}

/// Compares supplied analytic gradients against central finite differences
/// `(L(p+h) - L(p-h)) / 2h`, parameter by parameter. Relative errors use the
/// guard `max(|analytic|, |numeric|, 1e-8)` in the denominator.
pub fn check_against<M: NeuralModel>(
    model: &M,
    analytic: &M::Grads,
    features: &Matrix,
    targets: &[f64],
    loss: Loss,
    step: f64,
) -> Result<GradCheckReport> {
    let names = model.block_names();
    let analytic_blocks = analytic.blocks();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst_block: String::new(),
        worst_index: 0,
        worst_analytic: 0.0,
        worst_numeric: 0.0,
        n_parameters: model.n_parameters(),
    };
    for (b, name) in names.iter().enumerate() {
        for idx in 0..analytic_blocks[b].len() {
            let mut plus = model.clone();
            plus.blocks_mut()[b][idx] += step;
            let mut minus = model.clone();
            minus.blocks_mut()[b][idx] -= step;
            let numeric = (batch_loss(&plus, features, targets, loss)?
                - batch_loss(&minus, features, targets, loss)?)
                / (2.0 * step);
            let a = analytic_blocks[b][idx];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
            if rel > report.max_rel_error {
                report.max_rel_error = rel;
                report.worst_block = name.clone();
                report.worst_index = idx;
                report.worst_analytic = a;
                report.worst_numeric = numeric;
            }
        }
    }
    Ok(report)
}

/// Full gradient check: computes analytic gradients, then sweeps every
/// parameter with central differences.
pub fn gradient_check<M: NeuralModel>(
    model: &M,
    features: &Matrix,
    targets: &[f64],
    loss: Loss,
    step: f64,
) -> Result<GradCheckReport> {
    let (_, grads) = batch_gradients(model, features, targets, loss)?;
    check_against(model, &grads, features, targets, loss, step)
}
