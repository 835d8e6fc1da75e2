//! Hourly stream-flow forecasting toolkit.
//!
//! The crate covers the full pipeline: CSV/synthetic catchment data, the
//! series-to-supervised windowing transform, min-max scaling, from-scratch
//! LSTM / RNN / MLP / epsilon-SVR models with hand-derived gradients,
//! mini-batch training with selectable optimizers, RMSE/MAE/R² evaluation,
//! and experiment runners (model comparison, input ablation, horizon and
//! window-length sweeps, epoch studies) with reproducible file outputs.

pub mod data;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod model;
pub mod num;
pub mod train;

pub use error::{Error, Result};
