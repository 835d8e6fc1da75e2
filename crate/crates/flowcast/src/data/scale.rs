use std::path::Path;

use super::window::SupervisedMatrix;
use crate::error::{Error, Result};
use crate::num::Matrix;

const SPAN_GUARD: f64 = 1e-12;

/// Per-column min-max normalization to [0, 1]: `x' = (x - min) / (max - min)`.
///
/// The scaler covers every feature column plus the target column (stored
/// last). Columns whose training span is below the epsilon guard map to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MinMaxScaler {
    names: Vec<String>,
    mins: Vec<f64>,
    maxs: Vec<f64>,
}

impl MinMaxScaler {
    /// Captures per-column min/max from the given rows (pass the training
    /// split to keep the test period out of the statistics).
    pub fn fit(matrix: &SupervisedMatrix) -> Result<MinMaxScaler> {
        if matrix.n_samples() == 0 {
            return Err(Error::data("cannot fit scaler on zero rows".to_string()));
        }
        let n_cols = matrix.n_features() + 1;
        let mut mins = vec![f64::INFINITY; n_cols];
        let mut maxs = vec![f64::NEG_INFINITY; n_cols];
        for i in 0..matrix.n_samples() {
            for (j, &v) in matrix.features.row(i).iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
            let t = matrix.targets[i];
            mins[n_cols - 1] = mins[n_cols - 1].min(t);
            maxs[n_cols - 1] = maxs[n_cols - 1].max(t);
        }
        let mut names = matrix.feature_names.clone();
        names.push(matrix.target_name.clone());
        Ok(MinMaxScaler { names, mins, maxs })
    }

    pub fn n_columns(&self) -> usize {
        self.names.len()
    }

    pub fn column_min(&self, j: usize) -> f64 {
        self.mins[j]
    }

    pub fn column_max(&self, j: usize) -> f64 {
        self.maxs[j]
    }

    #[inline]
    fn fwd(&self, j: usize, v: f64) -> f64 {
        let span = self.maxs[j] - self.mins[j];
        if span <= SPAN_GUARD {
            0.0
        } else {
            (v - self.mins[j]) / span
        }
    }

    #[inline]
    fn inv(&self, j: usize, v: f64) -> f64 {
        let span = self.maxs[j] - self.mins[j];
        if span <= SPAN_GUARD {
            self.mins[j]
        } else {
            v * span + self.mins[j]
        }
    }

    fn check_columns(&self, matrix: &SupervisedMatrix) -> Result<()> {
        if matrix.n_features() + 1 != self.n_columns() {
            return Err(Error::shape(
                "scaler",
                format!(
                    "scaler fitted for {} columns, matrix has {} features + target",
                    self.n_columns(),
                    matrix.n_features()
                ),
            ));
        }
        Ok(())
    }

    /// Scales features and target of a supervised matrix.
    pub fn transform(&self, matrix: &SupervisedMatrix) -> Result<SupervisedMatrix> {
        self.check_columns(matrix)?;
        let n_features = matrix.n_features();
        let mut out = matrix.clone();
        for i in 0..out.n_samples() {
            let row = &mut out.features.data_mut()[i * n_features..(i + 1) * n_features];
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.fwd(j, *v);
            }
        }
        let t_col = self.n_columns() - 1;
        for t in &mut out.targets {
            *t = self.fwd(t_col, *t);
        }
        Ok(out)
    }

    /// Exact algebraic inverse of [`MinMaxScaler::transform`].
    pub fn inverse_transform(&self, matrix: &SupervisedMatrix) -> Result<SupervisedMatrix> {
        self.check_columns(matrix)?;
        let n_features = matrix.n_features();
        let mut out = matrix.clone();
        for i in 0..out.n_samples() {
            let row = &mut out.features.data_mut()[i * n_features..(i + 1) * n_features];
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.inv(j, *v);
            }
        }
        let t_col = self.n_columns() - 1;
        for t in &mut out.targets {
            *t = self.inv(t_col, *t);
        }
        Ok(out)
    }

    /// Maps predictions (or any values in the target column's scale) back to
    /// physical units.
    pub fn inverse_transform_targets(&self, values: &[f64]) -> Vec<f64> {
        let t_col = self.n_columns() - 1;
        values.iter().map(|&v| self.inv(t_col, v)).collect()
    }

    pub fn transform_targets(&self, values: &[f64]) -> Vec<f64> {
        let t_col = self.n_columns() - 1;
        values.iter().map(|&v| self.fwd(t_col, v)).collect()
    }

    /// Scales a bare feature matrix (no target column).
    pub fn transform_features(&self, features: &Matrix) -> Result<Matrix> {
        if features.cols() + 1 != self.n_columns() {
            return Err(Error::shape(
                "scaler",
                format!(
                    "scaler fitted for {} columns, matrix has {}",
                    self.n_columns(),
                    features.cols()
                ),
            ));
        }
        let mut out = features.clone();
        let cols = out.cols();
        for i in 0..out.rows() {
            let row = &mut out.data_mut()[i * cols..(i + 1) * cols];
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.fwd(j, *v);
            }
        }
        Ok(out)
    }

    /// Persists per-column `name,min,max` triples; 17 significant digits
    /// round-trip `f64` exactly.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for j in 0..self.n_columns() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e}\n",
                self.names[j], self.mins[j], self.maxs[j]
            ));
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<MinMaxScaler> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let mut names = Vec::new();
        let mut mins = Vec::new();
        let mut maxs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::data(format!(
                    "scaler file line {}: expected name,min,max",
                    i + 1
                )));
            }
            names.push(parts[0].to_string());
            mins.push(parts[1].parse().map_err(|e| {
                Error::data(format!("scaler file line {}: bad min ({e})", i + 1))
            })?);
            maxs.push(parts[2].parse().map_err(|e| {
                Error::data(format!("scaler file line {}: bad max ({e})", i + 1))
            })?);
        }
        if names.is_empty() {
            return Err(Error::data("empty scaler file".to_string()));
        }
        for j in 0..names.len() {
            if mins[j] > maxs[j] {
                return Err(Error::data(format!(
                    "scaler column {} has min {} > max {}",
                    names[j], mins[j], maxs[j]
                )));
            }
        }
        Ok(MinMaxScaler { names, mins, maxs })
    }
}
