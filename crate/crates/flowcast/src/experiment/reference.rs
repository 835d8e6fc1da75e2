//! Published Tunxi-catchment results from the study this toolkit
//! re-implements (Hu, Yan, Hang & Feng, "Stream-flow Forecasting of Small
//! Rivers Based on LSTM", 2020), kept as reference constants.
//!
//! The Tunxi gauge and rain-station records (1981-2003) are not publicly
//! available, so these numbers cannot be recomputed here; they are displayed
//! next to synthetic-data results for orientation only.

/// One model's published error triple (RMSE and MAE in m³/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub model: &'static str,
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
}

/// Published comparative results on the Tunxi test period.
pub const COMPARATIVE_REFERENCE: [ReferenceRow; 3] = [
    ReferenceRow {
        model: "svr",
        rmse: 136.022,
        mae: 63.939,
        r2: 0.917,
    },
    ReferenceRow {
        model: "mlp",
        rmse: 99.359,
        mae: 35.248,
        r2: 0.956,
    },
    ReferenceRow {
        model: "lstm",
        rmse: 82.007,
        mae: 27.752,
        r2: 0.970,
    },
];

/// One input-combination cell of the published ablation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AblationReferenceRow {
    /// Input combination in this toolkit's naming (`flow`, `flow+rain`, ...).
    pub inputs: &'static str,
    pub rmse: f64,
    pub mae: f64,
    pub r2: f64,
}

/// Published LSTM errors per input combination (the eighth cell, no inputs
/// at all, is not a valid configuration and was likewise never reported).
pub const ABLATION_REFERENCE: [AblationReferenceRow; 7] = [
    AblationReferenceRow {
        inputs: "flow",
        rmse: 148.864,
        mae: 43.188,
        r2: 0.900,
    },
    AblationReferenceRow {
        inputs: "flow+rain",
        rmse: 82.007,
        mae: 27.752,
        r2: 0.970,
    },
    AblationReferenceRow {
        inputs: "flow+areal",
        rmse: 94.008,
        mae: 29.751,
        r2: 0.960,
    },
    AblationReferenceRow {
        inputs: "flow+rain+areal",
        rmse: 85.772,
        mae: 30.138,
        r2: 0.967,
    },
    AblationReferenceRow {
        inputs: "rain",
        rmse: 274.344,
        mae: 156.489,
        r2: 0.661,
    },
    AblationReferenceRow {
        inputs: "areal",
        rmse: 282.146,
        mae: 157.497,
        r2: 0.639,
    },
    AblationReferenceRow {
        inputs: "rain+areal",
        rmse: 282.126,
        mae: 152.190,
        r2: 0.641,
    },
];

/// Plain-text table of the comparative reference, for reports and logs.
pub fn comparative_reference_table() -> String {
    let mut out = String::from("published Tunxi reference (not recomputable without the source data):\n");
    out.push_str("  model   RMSE      MAE      R2\n");
    for row in COMPARATIVE_REFERENCE {
        out.push_str(&format!(
            "  {:<6} {:>8.3} {:>8.3} {:>7.3}\n",
            row.model, row.rmse, row.mae, row.r2
        ));
    }
    out
}
