//! The three evaluation criteria — RMSE, MAE, R² — computed on
//! physical-unit (inverse-scaled) predictions, plus the combined report.
//!
//! Summation is fixed left-to-right so results are identical across
//! platforms and runs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which series anchors the total-variation denominator of R².
///
/// `ObservedMean` is the standard definition. `PredictedMean` instead
/// measures deviations of the predictions about their own mean, an
/// alternative reading kept selectable for faithful comparisons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum R2Convention {
    ObservedMean,
    PredictedMean,
}

impl std::str::FromStr for R2Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "observed" | "observed_mean" => Ok(R2Convention::ObservedMean),
            "predicted" | "predicted_mean" => Ok(R2Convention::PredictedMean),
            other => Err(Error::config(format!(
                "unknown r2 convention {other:?} (expected observed|predicted)"
            ))),
        }
    }
}

impl R2Convention {
    pub fn name(&self) -> &'static str {
        match self {
            R2Convention::ObservedMean => "observed_mean",
            R2Convention::PredictedMean => "predicted_mean",
        }
    }
}

fn check_lengths(op: &'static str, predicted: &[f64], observed: &[f64]) -> Result<()> {
    if predicted.len() != observed.len() || predicted.is_empty() {
        return Err(Error::shape(
            op,
            format!(
                "{} predictions vs {} observations (need equal, non-zero)",
                predicted.len(),
                observed.len()
            ),
        ));
    }
    Ok(())
}

/// Root of the mean squared residual.
pub fn rmse(predicted: &[f64], observed: &[f64]) -> Result<f64> {
    check_lengths("rmse", predicted, observed)?;
    let mut acc = 0.0;
    for (&p, &o) in predicted.iter().zip(observed) {
        let d = p - o;
        acc += d * d;
    }
    Ok((acc / predicted.len() as f64).sqrt())
}

/// Mean absolute residual.
pub fn mae(predicted: &[f64], observed: &[f64]) -> Result<f64> {
    check_lengths("mae", predicted, observed)?;
    let mut acc = 0.0;
    for (&p, &o) in predicted.iter().zip(observed) {
        acc += (p - o).abs();
    }
    Ok(acc / predicted.len() as f64)
}

/// Coefficient of determination `1 - SS_res / SS_tot`.
///
/// A constant reference series makes the denominator zero; that is an
/// undefined metric, not a silent zero.
pub fn r2(predicted: &[f64], observed: &[f64], convention: R2Convention) -> Result<f64> {
    check_lengths("r2", predicted, observed)?;
    if predicted.len() < 2 {
        return Err(Error::shape(
            "r2",
            format!("need at least 2 points, got {}", predicted.len()),
        ));
    }
    let mut ss_res = 0.0;
    for (&p, &o) in predicted.iter().zip(observed) {
        let d = p - o;
        ss_res += d * d;
    }
    let reference: &[f64] = match convention {
        R2Convention::ObservedMean => observed,
        R2Convention::PredictedMean => predicted,
    };
    let mean = reference.iter().sum::<f64>() / reference.len() as f64;
    let mut ss_tot = 0.0;
    for &v in reference {
        let d = v - mean;
        ss_tot += d * d;
    }
    if ss_tot <= 0.0 {
        return Err(Error::UndefinedMetric(format!(
            "r2 denominator is zero ({} series is constant)",
            match convention {
                R2Convention::ObservedMean => "observed",
                R2Convention::PredictedMean => "predicted",
            }
        )));
    }
    Ok(1.0 - ss_res / ss_tot)
}

/// The (RMSE, MAE, R²) triple for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub run_id: String,
    pub n: usize,
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn csv_header() -> &'static str {
        "run_id,n,rmse,mae,r2"
    }

    pub fn to_csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.run_id, self.n, self.rmse, self.mae, self.r2)
    }
}

/// All three metrics over the same residuals.
pub fn evaluate(
    predicted: &[f64],
    observed: &[f64],
    convention: R2Convention,
    run_id: impl Into<String>,
) -> Result<EvalReport> {
    let rmse_v = rmse(predicted, observed)?;
    let mae_v = mae(predicted, observed)?;
    let r2_v = r2(predicted, observed, convention)?;
    // RMS-mean inequality on identical residuals; a violation would mean a
    // bug in one of the metric paths.
    assert!(
        rmse_v >= mae_v - 1e-12,
        "rmse {rmse_v} < mae {mae_v} on the same residuals"
    );
    Ok(EvalReport {
        run_id: run_id.into(),
        n: predicted.len(),
        rmse: rmse_v,
        mae: mae_v,
        r2: r2_v,
    })
}
