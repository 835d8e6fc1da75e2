//! Catchment data handling: timestamped flow/rain tables, CSV ingestion,
//! areal rainfall, the series-to-supervised windowing transform, min-max
//! scaling, splitting, and the synthetic catchment generator.

mod scale;
mod synthetic;
mod table;
mod window;

pub use scale::MinMaxScaler;
pub use synthetic::{generate_synthetic, route_flow, SyntheticConfig};
pub use table::{areal_rainfall, load_csv, write_csv, TimeSeriesTable, N_STATIONS};
pub use window::{
    layout_target_column, layout_total_columns, offset_label, series_to_supervised, split,
    SplitSpec, SupervisedMatrix, VariableSelection,
};
