use serde::{Deserialize, Serialize};

use super::table::{TimeSeriesTable, N_STATIONS};
use crate::error::{Error, Result};
use crate::num::SeededRng;

/// Storm and reservoir parameters for the synthetic catchment.
///
/// Rainfall is a sum of stochastic storm pulses; flow follows a linear
/// reservoir: `S(t+1) = (1-k)*S(t) + sum_j w_j * P_j(t - tau_j)` with
/// `Q(t) = c * S(t) * (1 + eta)`. Peaks rise abruptly and recede slowly,
/// mimicking small-river flood behaviour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_hours: usize,
    /// Probability that a new storm event starts at any given hour.
    pub storm_rate: f64,
    /// Mean storm duration in hours.
    pub storm_mean_duration: f64,
    /// Mean storm peak intensity, mm/h.
    pub storm_mean_intensity: f64,
    /// Reservoir recession constant k, in (0, 1).
    pub recession: f64,
    /// Outflow coefficient c mapping storage to discharge.
    pub outflow_coeff: f64,
    /// Multiplicative observation noise std on Q.
    pub noise_std: f64,
    /// Constant inflow keeping a base flow between storms.
    pub base_inflow: f64,
    pub initial_storage: f64,
    /// Routing weight of each station's rainfall into the reservoir.
    pub station_weights: Vec<f64>,
    /// Hours of travel delay from each station to the gauge.
    pub station_lags: Vec<usize>,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            n_hours: 8000,
            storm_rate: 0.02,
            storm_mean_duration: 10.0,
            storm_mean_intensity: 6.0,
            recession: 0.06,
            outflow_coeff: 0.35,
            noise_std: 0.02,
            base_inflow: 2.0,
            initial_storage: 30.0,
            station_weights: vec![1.0; N_STATIONS],
            station_lags: (0..N_STATIONS).map(|j| 1 + j % 6).collect(),
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_hours < 100 {
            return Err(Error::config(format!(
                "synthetic n_hours must be >= 100 (got {})",
                self.n_hours
            )));
        }
        if !(self.recession > 0.0 && self.recession < 1.0) {
            return Err(Error::config(format!(
                "recession k must lie in (0, 1), got {}",
                self.recession
            )));
        }
        if self.station_weights.len() != N_STATIONS || self.station_lags.len() != N_STATIONS {
            return Err(Error::config(format!(
                "station_weights and station_lags must have {N_STATIONS} entries"
            )));
        }
        if self.station_weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::config("station weights must be non-negative".to_string()));
        }
        for (name, v) in [
            ("storm_rate", self.storm_rate),
            ("storm_mean_duration", self.storm_mean_duration),
            ("storm_mean_intensity", self.storm_mean_intensity),
            ("outflow_coeff", self.outflow_coeff),
        ] {
            if v <= 0.0 && name != "storm_rate" {
                return Err(Error::config(format!("{name} must be positive (got {v})")));
            }
            if v < 0.0 {
                return Err(Error::config(format!("{name} must be non-negative (got {v})")));
            }
        }
        if self.noise_std < 0.0 || self.base_inflow < 0.0 || self.initial_storage < 0.0 {
            return Err(Error::config(
                "noise_std, base_inflow, initial_storage must be non-negative".to_string(),
            ));
        }
        Ok(())
    }
}

/// Routes station rainfall through the linear reservoir, producing hourly
/// discharge.
pub fn route_flow(rng: &mut SeededRng, rain: &[Vec<f64>], cfg: &SyntheticConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if rain.len() != N_STATIONS {
        return Err(Error::shape(
            "route_flow",
            format!("expected {N_STATIONS} rain series, got {}", rain.len()),
        ));
    }
    let n = rain[0].len();
    let mut storage = cfg.initial_storage;
    let mut flow = Vec::with_capacity(n);
    for t in 0..n {
        let q = cfg.outflow_coeff * storage * (1.0 + rng.normal(0.0, cfg.noise_std));
        flow.push(q.max(0.0));
        let mut inflow = cfg.base_inflow;
        for j in 0..N_STATIONS {
            let lag = cfg.station_lags[j];
            if t >= lag {
                inflow += cfg.station_weights[j] * rain[j][t - lag];
            }
        }
        storage = (1.0 - cfg.recession) * storage + inflow;
    }
    Ok(flow)
}

/// Generates a full synthetic catchment table: seeded storm pulses over the
/// eleven stations, then reservoir-routed flow. Deterministic per seed.
pub fn generate_synthetic(rng: &mut SeededRng, cfg: &SyntheticConfig) -> Result<TimeSeriesTable> {
    cfg.validate()?;
    let n = cfg.n_hours;
    let mut rain = vec![vec![0.0f64; n]; N_STATIONS];
    for t in 0..n {
        if !rng.chance(cfg.storm_rate) {
            continue;
        }
        // One storm event: shared rise/fall shape, per-station exposure,
        // small per-hour jitter.
        let duration = (rng.exponential(cfg.storm_mean_duration).round() as usize).max(2);
        let peak = rng.exponential(cfg.storm_mean_intensity);
        let exposure: Vec<f64> = (0..N_STATIONS).map(|_| rng.uniform(0.25, 1.0)).collect();
        for h in 0..duration {
            if t + h >= n {
                break;
            }
            let x = (h as f64 + 0.5) / duration as f64;
            let shape = if x < 0.35 { x / 0.35 } else { (1.0 - x) / 0.65 };
            for (j, series) in rain.iter_mut().enumerate() {
                let jitter = rng.uniform(0.75, 1.25);
                series[t + h] += peak * exposure[j] * shape * jitter;
            }
        }
    }
    let flow = route_flow(rng, &rain, cfg)?;
    TimeSeriesTable::new((0..n as i64).collect(), flow, rain)
}
