use serde::{Deserialize, Serialize};

use super::{NeuralModel, ParamBlocks};
use crate::error::{Error, Result};
use crate::num::{init_uniform, sigmoid_scalar, Matrix, ScaleRule, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HiddenActivation {
    Tanh,
    Sigmoid,
}

impl HiddenActivation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            HiddenActivation::Tanh => z.tanh(),
            HiddenActivation::Sigmoid => sigmoid_scalar(z),
        }
    }

    /// Derivative expressed through the activation value.
    #[inline]
    fn deriv_from_value(self, a: f64) -> f64 {
        match self {
            HiddenActivation::Tanh => 1.0 - a * a,
            HiddenActivation::Sigmoid => a * (1.0 - a),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputActivation {
    Identity,
    Tanh,
    Sigmoid,
}

impl OutputActivation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            OutputActivation::Identity => z,
            OutputActivation::Tanh => z.tanh(),
            OutputActivation::Sigmoid => sigmoid_scalar(z),
        }
    }

    #[inline]
    fn deriv_from_value(self, a: f64) -> f64 {
        match self {
            OutputActivation::Identity => 1.0,
            OutputActivation::Tanh => 1.0 - a * a,
            OutputActivation::Sigmoid => a * (1.0 - a),
        }
    }
}

/// Vanilla recurrent cell: `h_t = act(recur_wᵀ h_prev + input_wᵀ x_t)`,
/// `y_t = out_act(readout_wᵀ h_t)`. No biases.
///
/// Weight orientation follows the transposed-product convention, so
/// `input_w` is input x hidden, `recur_w` is hidden x hidden, and
/// `readout_w` is hidden x output.
#[derive(Debug, Clone, PartialEq)]
pub struct Rnn {
    input_size: usize,
    hidden_size: usize,
    encoder_steps: usize,
    pub recur_w: Matrix,
    pub input_w: Matrix,
    pub readout_w: Matrix,
    pub hidden_activation: HiddenActivation,
    pub output_activation: OutputActivation,
}

#[derive(Debug, Clone)]
pub struct RnnGrads {
    pub recur_w: Matrix,
    pub input_w: Matrix,
    pub readout_w: Matrix,
}

/// Hidden states of every step; `hidden[0]` is the zero initial state.
#[derive(Debug, Clone)]
pub struct RnnTrace {
    pub hidden: Vec<Vec<f64>>,
    pub output_value: f64,
}

impl Rnn {
    pub fn new(
        input_size: usize,
        hidden_size: usize,
        encoder_steps: usize,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if hidden_size < 1 || input_size < 1 || encoder_steps < 1 {
            return Err(Error::config(format!(
                "rnn dims must all be >= 1 (input {input_size}, hidden {hidden_size}, encoder {encoder_steps})"
            )));
        }
        Ok(Rnn {
            input_size,
            hidden_size,
            encoder_steps,
            recur_w: init_uniform(rng, hidden_size, hidden_size, ScaleRule::Glorot)?,
            input_w: init_uniform(rng, input_size, hidden_size, ScaleRule::Glorot)?,
            readout_w: init_uniform(rng, hidden_size, 1, ScaleRule::Glorot)?,
            hidden_activation: HiddenActivation::Tanh,
            output_activation: OutputActivation::Identity,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }

    pub fn encoder_steps(&self) -> usize {
        self.encoder_steps
    }

    /// One recurrent step, returning the new hidden state and the cell
    /// output vector.
    pub fn cell_forward(&self, x: &[f64], h_prev: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        if x.len() != self.input_size {
            return Err(Error::shape(
                "rnn_cell_forward",
                format!("input length {} != input_size {}", x.len(), self.input_size),
            ));
        }
        if h_prev.len() != self.hidden_size {
            return Err(Error::shape(
                "rnn_cell_forward",
                format!("state length {} != hidden_size {}", h_prev.len(), self.hidden_size),
            ));
        }
        let mut z = self.recur_w.matvec_t(h_prev)?;
        let zx = self.input_w.matvec_t(x)?;
        for (z, zx) in z.iter_mut().zip(zx) {
            *z = self.hidden_activation.apply(*z + zx);
        }
        let y: Vec<f64> = self
            .readout_w
            .matvec_t(&z)?
            .into_iter()
            .map(|v| self.output_activation.apply(v))
            .collect();
        Ok((z, y))
    }

    fn check_window(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.input_len() {
            return Err(Error::shape(
                "rnn_forward",
                format!(
                    "feature row of length {} cannot be split into {} steps of {} variables",
                    features.len(),
                    self.encoder_steps,
                    self.input_size
                ),
            ));
        }
        Ok(())
    }
}

impl ParamBlocks for Rnn {
    fn block_names(&self) -> Vec<String> {
        vec![
            "recur_w".to_string(),
            "input_w".to_string(),
            "readout_w".to_string(),
        ]
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![self.recur_w.data(), self.input_w.data(), self.readout_w.data()]
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.recur_w.data_mut(),
            self.input_w.data_mut(),
            self.readout_w.data_mut(),
        ]
    }
}

impl ParamBlocks for RnnGrads {
    fn block_names(&self) -> Vec<String> {
        vec![
            "recur_w".to_string(),
            "input_w".to_string(),
            "readout_w".to_string(),
        ]
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![self.recur_w.data(), self.input_w.data(), self.readout_w.data()]
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.recur_w.data_mut(),
            self.input_w.data_mut(),
            self.readout_w.data_mut(),
        ]
    }
}

impl NeuralModel for Rnn {
    type Trace = RnnTrace;
    type Grads = RnnGrads;

    fn input_len(&self) -> usize {
        self.encoder_steps * self.input_size
    }

    fn zero_grads(&self) -> RnnGrads {
        RnnGrads {
            recur_w: Matrix::zeros(self.recur_w.rows(), self.recur_w.cols()),
            input_w: Matrix::zeros(self.input_w.rows(), self.input_w.cols()),
            readout_w: Matrix::zeros(self.readout_w.rows(), self.readout_w.cols()),
        }
    }

    fn forward_traced(&self, features: &[f64]) -> Result<(f64, RnnTrace)> {
        self.check_window(features)?;
        let mut hidden = Vec::with_capacity(self.encoder_steps + 1);
        hidden.push(vec![0.0; self.hidden_size]);
        for t in 0..self.encoder_steps {
            let x = &features[t * self.input_size..(t + 1) * self.input_size];
            let mut z = self.recur_w.matvec_t(hidden.last().unwrap())?;
            let zx = self.input_w.matvec_t(x)?;
            for (z, zx) in z.iter_mut().zip(zx) {
                *z = self.hidden_activation.apply(*z + zx);
            }
            hidden.push(z);
        }
        let pre = self.readout_w.matvec_t(hidden.last().unwrap())?[0];
        let y = self.output_activation.apply(pre);
        Ok((
            y,
            RnnTrace {
                hidden,
                output_value: y,
            },
        ))
    }

    fn backward(
        &self,
        features: &[f64],
        trace: &RnnTrace,
        d_pred: f64,
        grads: &mut RnnGrads,
    ) -> Result<()> {
        self.check_window(features)?;
        if trace.hidden.len() != self.encoder_steps + 1
            || trace.hidden[0].len() != self.hidden_size
        {
            return Err(Error::shape(
                "rnn_backward",
                format!(
                    "trace of {} states does not match encoder {}",
                    trace.hidden.len(),
                    self.encoder_steps
                ),
            ));
        }
        let h_last = &trace.hidden[self.encoder_steps];
        let d_out = d_pred * self.output_activation.deriv_from_value(trace.output_value);
        // readout_w is hidden x 1: d readout = h_last * d_out.
        grads.readout_w.add_outer(h_last, &[d_out]);
        let mut dh: Vec<f64> = self.readout_w.data().iter().map(|&w| w * d_out).collect();

        for t in (0..self.encoder_steps).rev() {
            let x = &features[t * self.input_size..(t + 1) * self.input_size];
            let h = &trace.hidden[t + 1];
            let h_prev = &trace.hidden[t];
            let dz: Vec<f64> = dh
                .iter()
                .zip(h)
                .map(|(&d, &a)| d * self.hidden_activation.deriv_from_value(a))
                .collect();
            // z = recur_wᵀ h_prev + input_wᵀ x, so d recur_w = h_prev ⊗ dz and
            // d input_w = x ⊗ dz.
            grads.recur_w.add_outer(h_prev, &dz);
            grads.input_w.add_outer(x, &dz);
            dh = self.recur_w.matvec(&dz)?;
        }
        Ok(())
    }
}
