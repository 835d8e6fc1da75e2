//! The four predictors: vanilla RNN, LSTM, single-hidden-layer MLP, and
//! epsilon-SVR with an RBF kernel. The neural models expose hand-derived
//! analytic gradients for the training loop and gradient checker.

mod lstm;
mod mlp;
mod persist;
mod rnn;
mod svr;

pub use lstm::{GateTrace, GateWeights, Lstm, LstmGrads, LstmState, LstmTrace};
pub use mlp::{Mlp, MlpActivation, MlpGrads};
pub use persist::{load_model, save_model, AnyModel};
pub use rnn::{HiddenActivation, OutputActivation, Rnn, RnnGrads};
pub use svr::{rbf_kernel, svr_dual_objective, svr_fit, svr_kkt_violation, SvrFitConfig, SvrModel};

use crate::error::Result;

/// Flat views over a model's learnable parameters, in a fixed block order
/// shared with its gradient type. The optimizer walks these.
pub trait ParamBlocks {
    fn block_names(&self) -> Vec<String>;
    fn blocks(&self) -> Vec<&[f64]>;
    fn blocks_mut(&mut self) -> Vec<&mut [f64]>;

    fn n_parameters(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }
}

/// A differentiable scalar regressor over a flat feature row.
///
/// `forward_traced` records whatever intermediate state `backward` needs;
/// `backward` accumulates d(prediction)/d(params) scaled by `d_pred` into a
/// matching gradient set.
pub trait NeuralModel: ParamBlocks + Clone {
    type Trace;
    type Grads: ParamBlocks;

    /// Expected feature-row length.
    fn input_len(&self) -> usize;

    fn zero_grads(&self) -> Self::Grads;

    fn forward_traced(&self, features: &[f64]) -> Result<(f64, Self::Trace)>;

    fn backward(
        &self,
        features: &[f64],
        trace: &Self::Trace,
        d_pred: f64,
        grads: &mut Self::Grads,
    ) -> Result<()>;

    fn predict(&self, features: &[f64]) -> Result<f64> {
        Ok(self.forward_traced(features)?.0)
    }
}
