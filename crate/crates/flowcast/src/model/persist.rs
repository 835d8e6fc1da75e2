use std::fmt::Write as _;
use std::path::Path;

use super::{
    HiddenActivation, Lstm, Mlp, MlpActivation, OutputActivation, ParamBlocks, Rnn, SvrModel,
};
use crate::error::{Error, Result};
use crate::num::{Matrix, SeededRng};

const MAGIC: &str = "flowcast-model v1";

/// Any trained predictor, for uniform save/load/evaluate plumbing.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Lstm(Lstm),
    Rnn(Rnn),
    Mlp(Mlp),
    Svr(SvrModel),
}

impl AnyModel {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyModel::Lstm(_) => "lstm",
            AnyModel::Rnn(_) => "rnn",
            AnyModel::Mlp(_) => "mlp",
            AnyModel::Svr(_) => "svr",
        }
    }

    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        use super::NeuralModel;
        match self {
            AnyModel::Lstm(m) => m.predict(features),
            AnyModel::Rnn(m) => m.predict(features),
            AnyModel::Mlp(m) => m.predict(features),
            AnyModel::Svr(m) => m.predict(features),
        }
    }

    pub fn input_len(&self) -> usize {
        use super::NeuralModel;
        match self {
            AnyModel::Lstm(m) => m.input_len(),
            AnyModel::Rnn(m) => m.input_len(),
            AnyModel::Mlp(m) => m.input_len(),
            AnyModel::Svr(m) => m.support_vectors.cols(),
        }
    }
}

fn write_value(out: &mut String, v: f64) {
    // 17 significant digits round-trip f64 exactly.
    let _ = write!(out, "{v:.16e}");
}

fn write_block(out: &mut String, name: &str, values: &[f64]) {
    let _ = writeln!(out, "block {name} {}", values.len());
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write_value(out, *v);
    }
    out.push('\n');
}

/// Serializes a model as a self-describing flat text file: a header with the
/// model kind, shapes, and hyperparameters, then every parameter block at 17
/// significant digits.
pub fn save_model(model: &AnyModel, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{MAGIC}");
    let _ = writeln!(out, "kind {}", model.kind());
    match model {
        AnyModel::Lstm(m) => {
            let _ = writeln!(out, "meta input_size {}", m.input_size());
            let _ = writeln!(out, "meta hidden_size {}", m.hidden_size());
            let _ = writeln!(out, "meta encoder_steps {}", m.encoder_steps());
            for (name, block) in m.block_names().into_iter().zip(m.blocks()) {
                write_block(&mut out, &name, block);
            }
        }
        AnyModel::Rnn(m) => {
            let _ = writeln!(out, "meta input_size {}", m.input_size());
            let _ = writeln!(out, "meta hidden_size {}", m.hidden_size());
            let _ = writeln!(out, "meta encoder_steps {}", m.encoder_steps());
            let _ = writeln!(out, "meta hidden_activation {:?}", m.hidden_activation);
            let _ = writeln!(out, "meta output_activation {:?}", m.output_activation);
            for (name, block) in m.block_names().into_iter().zip(m.blocks()) {
                write_block(&mut out, &name, block);
            }
        }
        AnyModel::Mlp(m) => {
            let _ = writeln!(out, "meta input_size {}", m.input_size());
            let _ = writeln!(out, "meta hidden_size {}", m.hidden_size());
            let _ = writeln!(out, "meta activation {:?}", m.activation);
            for (name, block) in m.block_names().into_iter().zip(m.blocks()) {
                write_block(&mut out, &name, block);
            }
        }
        AnyModel::Svr(m) => {
            let _ = writeln!(out, "meta n_support {}", m.dual_coeffs.len());
            let _ = writeln!(out, "meta n_features {}", m.support_vectors.cols());
            let indices: Vec<String> = m.support_indices.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "meta support_indices {}", indices.join(","));
            for (name, v) in [
                ("c", m.c),
                ("gamma", m.gamma),
                ("epsilon_tube", m.epsilon_tube),
                ("bias", m.bias),
            ] {
                let mut s = String::new();
                write_value(&mut s, v);
                let _ = writeln!(out, "scalar {name} {s}");
            }
            write_block(&mut out, "support_vectors", m.support_vectors.data());
            write_block(&mut out, "dual_coeffs", &m.dual_coeffs);
        }
    }
    std::fs::write(path, out)?;
    Ok(())
}

struct Parsed {
    kind: String,
    meta: Vec<(String, String)>,
    scalars: Vec<(String, f64)>,
    blocks: Vec<(String, Vec<f64>)>,
}

impl Parsed {
    fn meta_str(&self, name: &str) -> Result<&str> {
        self.meta
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::ModelFormat(format!("missing meta field {name}")))
    }

    fn meta_usize(&self, name: &str) -> Result<usize> {
        self.meta_str(name)?
            .parse()
            .map_err(|e| Error::ModelFormat(format!("meta {name}: {e}")))
    }

    fn scalar(&self, name: &str) -> Result<f64> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| Error::ModelFormat(format!("missing scalar {name}")))
    }

    fn block(&self, name: &str) -> Result<&[f64]> {
        self.blocks
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::ModelFormat(format!("missing block {name}")))
    }
}

fn parse_file(text: &str) -> Result<Parsed> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| Error::ModelFormat("empty model file".to_string()))?;
    if first.trim() != MAGIC {
        return Err(Error::ModelFormat(format!(
            "bad magic line {first:?}, expected {MAGIC:?}"
        )));
    }
    let mut kind = None;
    let mut meta = Vec::new();
    let mut scalars = Vec::new();
    let mut blocks = Vec::new();
    while let Some((lineno, line)) = lines.next() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, ' ');
        let tag = parts.next().unwrap_or_default();
        match tag {
            "kind" => kind = parts.next().map(str::to_string),
            "meta" => {
                let name = parts
                    .next()
                    .ok_or_else(|| Error::ModelFormat(format!("line {}: bare meta", lineno + 1)))?;
                meta.push((name.to_string(), parts.next().unwrap_or_default().to_string()));
            }
            "scalar" => {
                let name = parts
                    .next()
                    .ok_or_else(|| Error::ModelFormat(format!("line {}: bare scalar", lineno + 1)))?;
                let v: f64 = parts
                    .next()
                    .unwrap_or_default()
                    .trim()
                    .parse()
                    .map_err(|e| Error::ModelFormat(format!("line {}: {e}", lineno + 1)))?;
                scalars.push((name.to_string(), v));
            }
            "block" => {
                let name = parts
                    .next()
                    .ok_or_else(|| Error::ModelFormat(format!("line {}: bare block", lineno + 1)))?
                    .to_string();
                let len: usize = parts
                    .next()
                    .unwrap_or_default()
                    .trim()
                    .parse()
                    .map_err(|e| Error::ModelFormat(format!("line {}: {e}", lineno + 1)))?;
                let (vlineno, vline) = lines.next().ok_or_else(|| {
                    Error::ModelFormat(format!("line {}: block {name} missing values", lineno + 2))
                })?;
                let values: Vec<f64> = if len == 0 {
                    Vec::new()
                } else {
                    vline
                        .split_whitespace()
                        .map(|s| {
                            s.parse::<f64>().map_err(|e| {
                                Error::ModelFormat(format!("line {}: {e}", vlineno + 1))
                            })
                        })
                        .collect::<Result<_>>()?
                };
                if values.len() != len {
                    return Err(Error::ModelFormat(format!(
                        "block {name} declared {len} values, found {}",
                        values.len()
                    )));
                }
                blocks.push((name, values));
            }
            other => {
                return Err(Error::ModelFormat(format!(
                    "line {}: unknown tag {other:?}",
                    lineno + 1
                )));
            }
        }
    }
    Ok(Parsed {
        kind: kind.ok_or_else(|| Error::ModelFormat("missing kind line".to_string()))?,
        meta,
        scalars,
        blocks,
    })
}

fn fill_blocks<M: ParamBlocks>(model: &mut M, parsed: &Parsed) -> Result<()> {
    for (name, dst) in model.block_names().into_iter().zip(model.blocks_mut()) {
        let src = parsed.block(&name)?;
        if src.len() != dst.len() {
            return Err(Error::ModelFormat(format!(
                "block {name}: file has {} values, model needs {}",
                src.len(),
                dst.len()
            )));
        }
        dst.copy_from_slice(src);
    }
    Ok(())
}

/// Loads any model saved by [`save_model`]; the decimal round-trip is exact.
pub fn load_model(path: impl AsRef<Path>) -> Result<AnyModel> {
    let text = std::fs::read_to_string(path.as_ref())?;
    let parsed = parse_file(&text)?;
    let mut throwaway = SeededRng::new(0);
    match parsed.kind.as_str() {
        "lstm" => {
            let mut m = Lstm::new(
                parsed.meta_usize("input_size")?,
                parsed.meta_usize("hidden_size")?,
                parsed.meta_usize("encoder_steps")?,
                &mut throwaway,
            )?;
            fill_blocks(&mut m, &parsed)?;
            Ok(AnyModel::Lstm(m))
        }
        "rnn" => {
            let mut m = Rnn::new(
                parsed.meta_usize("input_size")?,
                parsed.meta_usize("hidden_size")?,
                parsed.meta_usize("encoder_steps")?,
                &mut throwaway,
            )?;
            m.hidden_activation = match parsed.meta_str("hidden_activation")? {
                "Tanh" => HiddenActivation::Tanh,
                "Sigmoid" => HiddenActivation::Sigmoid,
                other => return Err(Error::ModelFormat(format!("unknown hidden activation {other}"))),
            };
            m.output_activation = match parsed.meta_str("output_activation")? {
                "Identity" => OutputActivation::Identity,
                "Tanh" => OutputActivation::Tanh,
                "Sigmoid" => OutputActivation::Sigmoid,
                other => return Err(Error::ModelFormat(format!("unknown output activation {other}"))),
            };
            fill_blocks(&mut m, &parsed)?;
            Ok(AnyModel::Rnn(m))
        }
        "mlp" => {
            let mut m = Mlp::new(
                parsed.meta_usize("input_size")?,
                parsed.meta_usize("hidden_size")?,
                &mut throwaway,
            )?;
            m.activation = match parsed.meta_str("activation")? {
                "Tanh" => MlpActivation::Tanh,
                "Sigmoid" => MlpActivation::Sigmoid,
                "Relu" => MlpActivation::Relu,
                other => return Err(Error::ModelFormat(format!("unknown activation {other}"))),
            };
            fill_blocks(&mut m, &parsed)?;
            Ok(AnyModel::Mlp(m))
        }
        "svr" => {
            let n_support = parsed.meta_usize("n_support")?;
            let n_features = parsed.meta_usize("n_features")?;
            let indices_text = parsed.meta_str("support_indices")?;
            let support_indices: Vec<usize> = if indices_text.is_empty() {
                Vec::new()
            } else {
                indices_text
                    .split(',')
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|e| Error::ModelFormat(format!("support index: {e}")))
                    })
                    .collect::<Result<_>>()?
            };
            let sv_data = parsed.block("support_vectors")?.to_vec();
            let support_vectors = if n_support == 0 {
                Matrix::zeros(0, n_features)
            } else {
                Matrix::from_vec(n_support, n_features, sv_data)?
            };
            Ok(AnyModel::Svr(SvrModel {
                support_vectors,
                dual_coeffs: parsed.block("dual_coeffs")?.to_vec(),
                support_indices,
                bias: parsed.scalar("bias")?,
                c: parsed.scalar("c")?,
                gamma: parsed.scalar("gamma")?,
                epsilon_tube: parsed.scalar("epsilon_tube")?,
            }))
        }
        other => Err(Error::ModelFormat(format!("unknown model kind {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{svr_fit, SvrFitConfig};

    #[test]
    fn lstm_round_trip_is_exact() {
        let m = Lstm::new(3, 5, 4, &mut SeededRng::new(77)).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&AnyModel::Lstm(m.clone()), f.path()).unwrap();
        let back = load_model(f.path()).unwrap();
        match back {
            AnyModel::Lstm(b) => assert_eq!(m, b),
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn rnn_and_mlp_round_trip() {
        let mut rnn = Rnn::new(2, 3, 2, &mut SeededRng::new(1)).unwrap();
        rnn.hidden_activation = HiddenActivation::Sigmoid;
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&AnyModel::Rnn(rnn.clone()), f.path()).unwrap();
        assert_eq!(load_model(f.path()).unwrap(), AnyModel::Rnn(rnn));

        let mut mlp = Mlp::new(4, 6, &mut SeededRng::new(2)).unwrap();
        mlp.activation = MlpActivation::Relu;
        save_model(&AnyModel::Mlp(mlp.clone()), f.path()).unwrap();
        assert_eq!(load_model(f.path()).unwrap(), AnyModel::Mlp(mlp));
    }

    #[test]
    fn svr_round_trip() {
        let x = Matrix::from_rows(&[vec![0.0], vec![0.5], vec![1.0], vec![1.5]]).unwrap();
        let y = vec![0.0, 0.9, 0.1, 1.2];
        let m = svr_fit(
            &x,
            &y,
            &SvrFitConfig {
                epsilon: 0.05,
                ..SvrFitConfig::default()
            },
        )
        .unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        save_model(&AnyModel::Svr(m.clone()), f.path()).unwrap();
        assert_eq!(load_model(f.path()).unwrap(), AnyModel::Svr(m));
    }

    #[test]
    fn rejects_garbage() {
        let f = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f.path(), "not a model\n").unwrap();
        assert!(load_model(f.path()).is_err());
    }
}
