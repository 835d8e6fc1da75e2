use serde::{Deserialize, Serialize};

use super::{NeuralModel, ParamBlocks};
use crate::error::{Error, Result};
use crate::num::{dot, init_uniform, sigmoid_scalar, Matrix, ScaleRule, SeededRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MlpActivation {
    Tanh,
    Sigmoid,
    Relu,
}

impl MlpActivation {
    #[inline]
    fn apply(self, z: f64) -> f64 {
        match self {
            MlpActivation::Tanh => z.tanh(),
            MlpActivation::Sigmoid => sigmoid_scalar(z),
            MlpActivation::Relu => z.max(0.0),
        }
    }

    #[inline]
    fn deriv_from_value(self, a: f64) -> f64 {
        match self {
            MlpActivation::Tanh => 1.0 - a * a,
            MlpActivation::Sigmoid => a * (1.0 - a),
            MlpActivation::Relu => {
                if a > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// One-hidden-layer perceptron over the flat feature row:
/// `y = w2ᵀ act(w1ᵀ x + b1) + b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    input_size: usize,
    hidden_size: usize,
    /// input x hidden.
    pub w1: Matrix,
    pub b1: Vec<f64>,
    /// hidden weights of the scalar output.
    pub w2: Vec<f64>,
    pub b2: f64,
    pub activation: MlpActivation,
}

#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

/// Hidden activations of one forward pass.
#[derive(Debug, Clone)]
pub struct MlpTrace {
    pub hidden: Vec<f64>,
}

impl Mlp {
    pub fn new(input_size: usize, hidden_size: usize, rng: &mut SeededRng) -> Result<Self> {
        if input_size < 1 || hidden_size < 1 {
            return Err(Error::config(format!(
                "mlp dims must be >= 1 (input {input_size}, hidden {hidden_size})"
            )));
        }
        Ok(Mlp {
            input_size,
            hidden_size,
            w1: init_uniform(rng, input_size, hidden_size, ScaleRule::Glorot)?,
            b1: vec![0.0; hidden_size],
            w2: init_uniform(rng, hidden_size, 1, ScaleRule::Glorot)?.data().to_vec(),
            b2: 0.0,
            activation: MlpActivation::Tanh,
        })
    }

    pub fn input_size(&self) -> usize {
        self.input_size
    }

    pub fn hidden_size(&self) -> usize {
        self.hidden_size
    }
}

impl ParamBlocks for Mlp {
    fn block_names(&self) -> Vec<String> {
        vec!["w1".into(), "b1".into(), "w2".into(), "b2".into()]
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![
            self.w1.data(),
            self.b1.as_slice(),
            self.w2.as_slice(),
            std::slice::from_ref(&self.b2),
        ]
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w1.data_mut(),
            self.b1.as_mut_slice(),
            self.w2.as_mut_slice(),
            std::slice::from_mut(&mut self.b2),
        ]
    }
}

impl ParamBlocks for MlpGrads {
    fn block_names(&self) -> Vec<String> {
        vec!["w1".into(), "b1".into(), "w2".into(), "b2".into()]
    }

    fn blocks(&self) -> Vec<&[f64]> {
        vec![
            self.w1.data(),
            self.b1.as_slice(),
            self.w2.as_slice(),
            std::slice::from_ref(&self.b2),
        ]
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w1.data_mut(),
            self.b1.as_mut_slice(),
            self.w2.as_mut_slice(),
            std::slice::from_mut(&mut self.b2),
        ]
    }
}

impl NeuralModel for Mlp {
    type Trace = MlpTrace;
    type Grads = MlpGrads;

    fn input_len(&self) -> usize {
        self.input_size
    }

    fn zero_grads(&self) -> MlpGrads {
        MlpGrads {
            w1: Matrix::zeros(self.input_size, self.hidden_size),
            b1: vec![0.0; self.hidden_size],
            w2: vec![0.0; self.hidden_size],
            b2: 0.0,
        }
    }

    fn forward_traced(&self, features: &[f64]) -> Result<(f64, MlpTrace)> {
        if features.len() != self.input_size {
            return Err(Error::shape(
                "mlp_forward",
                format!("feature length {} != input_size {}", features.len(), self.input_size),
            ));
        }
        let mut hidden = self.w1.matvec_t(features)?;
        for (h, b) in hidden.iter_mut().zip(&self.b1) {
            *h = self.activation.apply(*h + b);
        }
        let y = dot(&self.w2, &hidden) + self.b2;
        Ok((y, MlpTrace { hidden }))
    }

    fn backward(
        &self,
        features: &[f64],
        trace: &MlpTrace,
        d_pred: f64,
        grads: &mut MlpGrads,
    ) -> Result<()> {
        if features.len() != self.input_size || trace.hidden.len() != self.hidden_size {
            return Err(Error::shape(
                "mlp_backward",
                format!(
                    "features {} / trace {} do not match {}x{}",
                    features.len(),
                    trace.hidden.len(),
                    self.input_size,
                    self.hidden_size
                ),
            ));
        }
        grads.b2 += d_pred;
        let mut dz1 = vec![0.0; self.hidden_size];
        for k in 0..self.hidden_size {
            grads.w2[k] += d_pred * trace.hidden[k];
            dz1[k] = d_pred * self.w2[k] * self.activation.deriv_from_value(trace.hidden[k]);
            grads.b1[k] += dz1[k];
        }
        grads.w1.add_outer(features, &dz1);
        Ok(())
    }
}
