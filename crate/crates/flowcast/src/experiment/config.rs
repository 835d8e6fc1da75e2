use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::data::{SplitSpec, SyntheticConfig, VariableSelection};
use crate::error::{Error, Result};
use crate::metrics::R2Convention;
use crate::model::SvrFitConfig;
use crate::train::TrainConfig;

/// Where the hourly table comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Csv(PathBuf),
    Synthetic(SyntheticConfig),
}

/// Whether the scaler statistics come from the training split only or from
/// the full windowed matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleFit {
    Train,
    All,
}

/// Everything one experiment run needs; every field has a config-file key of
/// the same name and a CLI override.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetSource,
    pub encoder_steps: usize,
    pub predict_step: usize,
    pub inputs: VariableSelection,
    /// Models to run, lowercase names in execution order.
    pub models: Vec<String>,
    pub train: TrainConfig,
    pub seed: Option<u64>,
    /// Dataset-generation seed; defaults to the master seed. Lets a single
    /// sweep point (which trains with `seed + value` on shared data) be
    /// reproduced as a standalone run.
    pub data_seed: Option<u64>,
    pub split: SplitSpec,
    pub scale_fit: ScaleFit,
    pub r2_convention: R2Convention,
    pub hidden_size: usize,
    pub mlp_hidden: usize,
    pub svr: SvrFitConfig,
    /// Chronologically strided cap on SVR training rows.
    pub svr_cap: usize,
    pub out_dir: Option<PathBuf>,
    /// Record wall time in epochs.csv (off keeps artifacts byte-reproducible).
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: DatasetSource::Synthetic(SyntheticConfig::default()),
            encoder_steps: 12,
            predict_step: 6,
            inputs: VariableSelection::FLOW_AND_RAIN,
            models: vec!["svr".into(), "mlp".into(), "lstm".into()],
            train: TrainConfig::default(),
            seed: None,
            data_seed: None,
            split: SplitSpec::Fraction(0.7),
            scale_fit: ScaleFit::Train,
            r2_convention: R2Convention::ObservedMean,
            hidden_size: 64,
            mlp_hidden: 64,
            svr: SvrFitConfig {
                c: 0.095,
                gamma: 0.165,
                epsilon: 0.01,
                tol: 1e-3,
                max_iter: 100_000,
            },
            svr_cap: 4000,
            out_dir: None,
            timing: false,
        }
    }
}

fn parse_inputs(text: &str) -> Result<VariableSelection> {
    let mut sel = VariableSelection {
        flow: false,
        rain: false,
        areal: false,
    };
    for part in text.split('+') {
        match part.trim() {
            "flow" => sel.flow = true,
            "rain" => sel.rain = true,
            "areal" => sel.areal = true,
            other => {
                return Err(Error::config(format!(
                    "unknown input variable {other:?} (expected flow|rain|areal joined by '+')"
                )))
            }
        }
    }
    sel.validate()?;
    Ok(sel)
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "on" | "1" => Ok(true),
        "false" | "off" | "0" => Ok(false),
        other => Err(Error::config(format!("{key}: expected true|false, got {other:?}"))),
    }
}

macro_rules! parse_num {
    ($key:expr, $v:expr) => {
        $v.parse()
            .map_err(|e| Error::config(format!("{}: {e}", $key)))?
    };
}

impl ExperimentConfig {
    /// Applies one `key = value` assignment; unknown keys are config errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        match key {
            "data" => self.dataset = DatasetSource::Csv(PathBuf::from(v)),
            "synthetic_hours" => self.synthetic_mut().n_hours = parse_num!(key, v),
            "storm_rate" => self.synthetic_mut().storm_rate = parse_num!(key, v),
            "storm_mean_duration" => self.synthetic_mut().storm_mean_duration = parse_num!(key, v),
            "storm_mean_intensity" => self.synthetic_mut().storm_mean_intensity = parse_num!(key, v),
            "recession" => self.synthetic_mut().recession = parse_num!(key, v),
            "outflow_coeff" => self.synthetic_mut().outflow_coeff = parse_num!(key, v),
            "noise_std" => self.synthetic_mut().noise_std = parse_num!(key, v),
            "base_inflow" => self.synthetic_mut().base_inflow = parse_num!(key, v),
            "initial_storage" => self.synthetic_mut().initial_storage = parse_num!(key, v),
            "encoder_steps" => self.encoder_steps = parse_num!(key, v),
            "predict_step" => self.predict_step = parse_num!(key, v),
            "inputs" => self.inputs = parse_inputs(v)?,
            "models" => {
                self.models = v.split(',').map(|m| m.trim().to_lowercase()).collect();
                for m in &self.models {
                    if !matches!(m.as_str(), "svr" | "mlp" | "lstm" | "rnn") {
                        return Err(Error::config(format!("unknown model {m:?}")));
                    }
                }
            }
            "optimizer" => self.train.optimizer = v.parse()?,
            "learning_rate" => self.train.learning_rate = parse_num!(key, v),
            "batch_size" => self.train.batch_size = parse_num!(key, v),
            "epochs" => self.train.epochs = parse_num!(key, v),
            "loss" => self.train.loss = v.parse()?,
            "clip_norm" => self.train.clip_norm = parse_num!(key, v),
            "shuffle" => self.train.shuffle_each_epoch = parse_bool(key, v)?,
            "seed" => self.seed = Some(parse_num!(key, v)),
            "data_seed" => self.data_seed = Some(parse_num!(key, v)),
            "train_fraction" => self.split = SplitSpec::Fraction(parse_num!(key, v)),
            "train_count" => self.split = SplitSpec::Count(parse_num!(key, v)),
            "scale_fit" => {
                self.scale_fit = match v {
                    "train" => ScaleFit::Train,
                    "all" => ScaleFit::All,
                    other => {
                        return Err(Error::config(format!(
                            "scale_fit: expected train|all, got {other:?}"
                        )))
                    }
                }
            }
            "r2_convention" => self.r2_convention = v.parse()?,
            "hidden_size" => self.hidden_size = parse_num!(key, v),
            "mlp_hidden" => self.mlp_hidden = parse_num!(key, v),
            "svr_c" => self.svr.c = parse_num!(key, v),
            "svr_gamma" => self.svr.gamma = parse_num!(key, v),
            "svr_epsilon" => self.svr.epsilon = parse_num!(key, v),
            "svr_tol" => self.svr.tol = parse_num!(key, v),
            "svr_max_iter" => self.svr.max_iter = parse_num!(key, v),
            "svr_cap" => self.svr_cap = parse_num!(key, v),
            "out_dir" => self.out_dir = Some(PathBuf::from(v)),
            "timing" => self.timing = parse_bool(key, v)?,
            other => return Err(Error::config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    fn synthetic_mut(&mut self) -> &mut SyntheticConfig {
        if let DatasetSource::Csv(_) = self.dataset {
            self.dataset = DatasetSource::Synthetic(SyntheticConfig::default());
        }
        match &mut self.dataset {
            DatasetSource::Synthetic(s) => s,
            DatasetSource::Csv(_) => unreachable!(),
        }
    }

    /// Loads a flat `key = value` file over the defaults. `#` starts a
    /// comment; blank lines are ignored.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let text = std::fs::read_to_string(path.as_ref())?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!(
                    "{}:{}: expected `key = value`, got {raw:?}",
                    path.as_ref().display(),
                    i + 1
                ))
            })?;
            cfg.set(key.trim(), value)?;
        }
        Ok(cfg)
    }

    /// Full effective configuration in the same flat format, for
    /// reproducibility (`config.resolved`).
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        match &self.dataset {
            DatasetSource::Csv(p) => {
                let _ = writeln!(out, "data = {}", p.display());
            }
            DatasetSource::Synthetic(s) => {
                let _ = writeln!(out, "synthetic_hours = {}", s.n_hours);
                let _ = writeln!(out, "storm_rate = {}", s.storm_rate);
                let _ = writeln!(out, "storm_mean_duration = {}", s.storm_mean_duration);
                let _ = writeln!(out, "storm_mean_intensity = {}", s.storm_mean_intensity);
                let _ = writeln!(out, "recession = {}", s.recession);
                let _ = writeln!(out, "outflow_coeff = {}", s.outflow_coeff);
                let _ = writeln!(out, "noise_std = {}", s.noise_std);
                let _ = writeln!(out, "base_inflow = {}", s.base_inflow);
                let _ = writeln!(out, "initial_storage = {}", s.initial_storage);
            }
        }
        let _ = writeln!(out, "encoder_steps = {}", self.encoder_steps);
        let _ = writeln!(out, "predict_step = {}", self.predict_step);
        let _ = writeln!(out, "inputs = {}", self.inputs.describe());
        let _ = writeln!(out, "models = {}", self.models.join(","));
        let _ = writeln!(out, "optimizer = {}", self.train.optimizer.name());
        let _ = writeln!(out, "learning_rate = {}", self.train.learning_rate);
        let _ = writeln!(out, "batch_size = {}", self.train.batch_size);
        let _ = writeln!(out, "epochs = {}", self.train.epochs);
        let _ = writeln!(out, "loss = {}", self.train.loss.name());
        let _ = writeln!(out, "clip_norm = {}", self.train.clip_norm);
        let _ = writeln!(out, "shuffle = {}", self.train.shuffle_each_epoch);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed = {seed}");
        }
        if let Some(ds) = self.data_seed {
            let _ = writeln!(out, "data_seed = {ds}");
        }
        match self.split {
            SplitSpec::Count(c) => {
                let _ = writeln!(out, "train_count = {c}");
            }
            SplitSpec::Fraction(f) => {
                let _ = writeln!(out, "train_fraction = {f}");
            }
        }
        let _ = writeln!(
            out,
            "scale_fit = {}",
            match self.scale_fit {
                ScaleFit::Train => "train",
                ScaleFit::All => "all",
            }
        );
        let _ = writeln!(out, "r2_convention = {}", self.r2_convention.name());
        let _ = writeln!(out, "hidden_size = {}", self.hidden_size);
        let _ = writeln!(out, "mlp_hidden = {}", self.mlp_hidden);
        let _ = writeln!(out, "svr_c = {}", self.svr.c);
        let _ = writeln!(out, "svr_gamma = {}", self.svr.gamma);
        let _ = writeln!(out, "svr_epsilon = {}", self.svr.epsilon);
        let _ = writeln!(out, "svr_tol = {}", self.svr.tol);
        let _ = writeln!(out, "svr_max_iter = {}", self.svr.max_iter);
        let _ = writeln!(out, "svr_cap = {}", self.svr_cap);
        if let Some(dir) = &self.out_dir {
            let _ = writeln!(out, "out_dir = {}", dir.display());
        }
        let _ = writeln!(out, "timing = {}", self.timing);
        out
    }

    /// Master seed; required for every reproducible runner.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| Error::config("seed is required (pass --seed or set `seed =`)".to_string()))
    }
}
