use super::{NeuralModel, ParamBlocks};
use crate::error::{Error, Result};
use crate::num::{dot, init_uniform, sigmoid_scalar, Matrix, ScaleRule, SeededRng};

/// One gate's parameters: `z = input_w * x + recur_w * h_prev + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct GateWeights {
    /// hidden x input.
    pub input_w: Matrix,
    /// hidden x hidden.
    pub recur_w: Matrix,
    pub bias: Vec<f64>,
}

impl GateWeights {
    fn new(input_size: usize, hidden_size: usize, rng: &mut SeededRng) -> Result<Self> {
        Ok(GateWeights {
            input_w: init_uniform(rng, hidden_size, input_size, ScaleRule::Glorot)?,
            recur_w: init_uniform(rng, hidden_size, hidden_size, ScaleRule::Glorot)?,
            bias: vec![0.0; hidden_size],
        })
    }

    fn zeros_like(&self) -> GateWeights {
        GateWeights {
            input_w: Matrix::zeros(self.input_w.rows(), self.input_w.cols()),
            recur_w: Matrix::zeros(self.recur_w.rows(), self.recur_w.cols()),
            bias: vec![0.0; self.bias.len()],
        }
    }

    /// Pre-activation vector for one step.
    fn preact(&self, x: &[f64], h_prev: &[f64]) -> Result<Vec<f64>> {
        let mut z = self.input_w.matvec(x)?;
        let r = self.recur_w.matvec(h_prev)?;
        for ((z, r), b) in z.iter_mut().zip(&r).zip(&self.bias) {
            *z += r + b;
        }
        Ok(z)
    }
}

/// Hidden and cell state of one LSTM step.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden_size: usize) -> Self {
        LstmState {
            h: vec![0.0; hidden_size],
            c: vec![0.0; hidden_size],
        }
    }
}

/// Gate activations recorded during one forward step, kept for
/// backpropagation through time.
#[derive(Debug, Clone)]
pub struct GateTrace {
    pub forget: Vec<f64>,
    pub input: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output: Vec<f64>,
}

/// Full unrolled record of a window forward pass: `states[0]` is the zero
/// initial state, `states[t+1]` the state after step `t`.
#[derive(Debug, Clone)]
pub struct LstmTrace {
    pub states: Vec<LstmState>,
    pub gates: Vec<GateTrace>,
}

/// LSTM regressor: gated recurrence over the input window, then a linear
/// readout of the final hidden state.
#[derive(Debug, Clone, PartialEq)]
pub struct Lstm {
    input_size: usize,
    hidden_size: usize,
    encoder_steps: usize,
    pub forget: GateWeights,
    pub input: GateWeights,
    pub candidate: GateWeights,
    pub output: GateWeights,
    pub readout_w: Vec<f64>,
    pub readout_b: f64,
}

/// Gradients mirroring [`Lstm`] block-for-block.
#[derive(Debug, Clone)]
pub struct LstmGrads {
    pub forget: GateWeights,
    pub input: GateWeights,
    pub candidate: GateWeights,
    pub output: GateWeights,
    pub readout_w: Vec<f64>,
    pub readout_b: f64,
}

impl Lstm {
    pub fn new(
        input_size: usize,
        hidden_size: usize,
        encoder_steps: usize,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if hidden_size < 1 || input_size < 1 || encoder_steps < 1 {
            return Err(Error::config(format!(
                "lstm dims must all be >= 1 (input {input_size}, hidden {hidden_size}, encoder {encoder_steps})"
            )));
        }
        Ok(Lstm {
            input_size,
            hidden_size,
            encoder_steps,
            forget: GateWeights::new(input_size, hidden_size, rng)?,
            input: GateWeights::new(input_size, hidden_size, rng)?,
            candidate: GateWeights::new(input_size, hidden_size, rng)?,
            output: GateWeights::new(input_size, hidden_size, rng)?,
            readout_w: init_uniform(rng, hidden_size, 1, ScaleRule::Glorot)?.data().to_vec(),
            readout_b: 0.0,
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

    /// One gated step: sigmoid forget/input/output gates, tanh candidate,
    /// multiplicative cell update, gated tanh output.
    pub fn cell_forward(&self, x: &[f64], prev: &LstmState) -> Result<(LstmState, GateTrace)> {
        if x.len() != self.input_size {
            return Err(Error::shape(
                "lstm_cell_forward",
                format!("input length {} != input_size {}", x.len(), self.input_size),
            ));
        }
        if prev.h.len() != self.hidden_size || prev.c.len() != self.hidden_size {
            return Err(Error::shape(
                "lstm_cell_forward",
                format!(
                    "state lengths {}/{} != hidden_size {}",
                    prev.h.len(),
                    prev.c.len(),
                    self.hidden_size
                ),
            ));
        }
        let f: Vec<f64> = self.forget.preact(x, &prev.h)?.iter().map(|&z| sigmoid_scalar(z)).collect();
        let i: Vec<f64> = self.input.preact(x, &prev.h)?.iter().map(|&z| sigmoid_scalar(z)).collect();
        let g: Vec<f64> = self.candidate.preact(x, &prev.h)?.iter().map(|&z| z.tanh()).collect();
        let o: Vec<f64> = self.output.preact(x, &prev.h)?.iter().map(|&z| sigmoid_scalar(z)).collect();

        let mut c = vec![0.0; self.hidden_size];
        let mut h = vec![0.0; self.hidden_size];
        for k in 0..self.hidden_size {
            c[k] = f[k] * prev.c[k] + i[k] * g[k];
            h[k] = o[k] * c[k].tanh();
        }
        Ok((
            LstmState { h, c },
            GateTrace {
                forget: f,
                input: i,
                candidate: g,
                output: o,
            },
        ))
    }

    fn window_step<'a>(&self, features: &'a [f64], t: usize) -> &'a [f64] {
        &features[t * self.input_size..(t + 1) * self.input_size]
    }

    fn check_window(&self, features: &[f64]) -> Result<()> {
        if features.len() != self.input_len() {
            return Err(Error::shape(
                "lstm_sequence_forward",
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

impl ParamBlocks for Lstm {
    fn block_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for gate in ["forget", "input", "candidate", "output"] {
            names.push(format!("{gate}.input_w"));
            names.push(format!("{gate}.recur_w"));
            names.push(format!("{gate}.bias"));
        }
        names.push("readout_w".to_string());
        names.push("readout_b".to_string());
        names
    }

    fn blocks(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(14);
        for gate in [&self.forget, &self.input, &self.candidate, &self.output] {
            out.push(gate.input_w.data());
            out.push(gate.recur_w.data());
            out.push(gate.bias.as_slice());
        }
        out.push(self.readout_w.as_slice());
        out.push(std::slice::from_ref(&self.readout_b));
        out
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(14);
        for gate in [
            &mut self.forget,
            &mut self.input,
            &mut self.candidate,
            &mut self.output,
        ] {
            out.push(gate.input_w.data_mut());
            out.push(gate.recur_w.data_mut());
            out.push(gate.bias.as_mut_slice());
        }
        out.push(self.readout_w.as_mut_slice());
        out.push(std::slice::from_mut(&mut self.readout_b));
        out
    }
}

impl ParamBlocks for LstmGrads {
    fn block_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        for gate in ["forget", "input", "candidate", "output"] {
            names.push(format!("{gate}.input_w"));
            names.push(format!("{gate}.recur_w"));
            names.push(format!("{gate}.bias"));
        }
        names.push("readout_w".to_string());
        names.push("readout_b".to_string());
        names
    }

    fn blocks(&self) -> Vec<&[f64]> {
        let mut out = Vec::with_capacity(14);
        for gate in [&self.forget, &self.input, &self.candidate, &self.output] {
            out.push(gate.input_w.data());
            out.push(gate.recur_w.data());
            out.push(gate.bias.as_slice());
        }
        out.push(self.readout_w.as_slice());
        out.push(std::slice::from_ref(&self.readout_b));
        out
    }

    fn blocks_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = Vec::with_capacity(14);
        for gate in [
            &mut self.forget,
            &mut self.input,
            &mut self.candidate,
            &mut self.output,
        ] {
            out.push(gate.input_w.data_mut());
            out.push(gate.recur_w.data_mut());
            out.push(gate.bias.as_mut_slice());
        }
        out.push(self.readout_w.as_mut_slice());
        out.push(std::slice::from_mut(&mut self.readout_b));
        out
    }
}

impl NeuralModel for Lstm {
    type Trace = LstmTrace;
    type Grads = LstmGrads;

    fn input_len(&self) -> usize {
        self.encoder_steps * self.input_size
    }

    fn zero_grads(&self) -> LstmGrads {
        LstmGrads {
            forget: self.forget.zeros_like(),
            input: self.input.zeros_like(),
            candidate: self.candidate.zeros_like(),
            output: self.output.zeros_like(),
            readout_w: vec![0.0; self.readout_w.len()],
            readout_b: 0.0,
        }
    }

    fn forward_traced(&self, features: &[f64]) -> Result<(f64, LstmTrace)> {
        self.check_window(features)?;
        let mut states = Vec::with_capacity(self.encoder_steps + 1);
        let mut gates = Vec::with_capacity(self.encoder_steps);
        states.push(LstmState::zeros(self.hidden_size));
        for t in 0..self.encoder_steps {
            let (next, trace) = self.cell_forward(self.window_step(features, t), states.last().unwrap())?;
            states.push(next);
            gates.push(trace);
        }
        let h_last = &states.last().unwrap().h;
        let pred = dot(&self.readout_w, h_last) + self.readout_b;
        Ok((pred, LstmTrace { states, gates }))
    }

    fn backward(
        &self,
        features: &[f64],
        trace: &LstmTrace,
        d_pred: f64,
        grads: &mut LstmGrads,
    ) -> Result<()> {
        self.check_window(features)?;
        if trace.states.len() != self.encoder_steps + 1
            || trace.gates.len() != self.encoder_steps
            || trace.states[0].h.len() != self.hidden_size
        {
            return Err(Error::shape(
                "lstm_backward",
                format!(
                    "trace ({} states, {} gate steps) does not match encoder {} / hidden {}",
                    trace.states.len(),
                    trace.gates.len(),
                    self.encoder_steps,
                    self.hidden_size
                ),
            ));
        }
        let n = self.hidden_size;

        let h_last = &trace.states[self.encoder_steps].h;
        grads.readout_b += d_pred;
        let mut dh: Vec<f64> = self.readout_w.iter().map(|&w| d_pred * w).collect();
        for (g, &h) in grads.readout_w.iter_mut().zip(h_last) {
            *g += d_pred * h;
        }

        let mut dc = vec![0.0; n];
        for t in (0..self.encoder_steps).rev() {
            let x = self.window_step(features, t);
            let prev = &trace.states[t];
            let cur = &trace.states[t + 1];
            let gate = &trace.gates[t];

            let mut dz_f = vec![0.0; n];
            let mut dz_i = vec![0.0; n];
            let mut dz_g = vec![0.0; n];
            let mut dz_o = vec![0.0; n];
            for k in 0..n {
                let tanh_c = cur.c[k].tanh();
                let o = gate.output[k];
                dz_o[k] = dh[k] * tanh_c * o * (1.0 - o);
                dc[k] += dh[k] * o * (1.0 - tanh_c * tanh_c);

                let f = gate.forget[k];
                let i = gate.input[k];
                let g = gate.candidate[k];
                dz_f[k] = dc[k] * prev.c[k] * f * (1.0 - f);
                dz_i[k] = dc[k] * g * i * (1.0 - i);
                dz_g[k] = dc[k] * i * (1.0 - g * g);
            }

            let mut dh_prev = vec![0.0; n];
            for (gw, gg, dz) in [
                (&self.forget, &mut grads.forget, &dz_f),
                (&self.input, &mut grads.input, &dz_i),
                (&self.candidate, &mut grads.candidate, &dz_g),
                (&self.output, &mut grads.output, &dz_o),
            ] {
                gg.input_w.add_outer(dz, x);
                gg.recur_w.add_outer(dz, &prev.h);
                for (b, &d) in gg.bias.iter_mut().zip(dz) {
                    *b += d;
                }
                let back = gw.recur_w.matvec_t(dz)?;
                for (acc, v) in dh_prev.iter_mut().zip(back) {
                    *acc += v;
                }
            }

            for k in 0..n {
                dc[k] *= gate.forget[k];
            }
            dh = dh_prev;
        }
        Ok(())
    }
}
