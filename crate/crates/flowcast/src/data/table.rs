use std::ops::Range;
use std::path::Path;

use chrono::{NaiveDateTime, Timelike};

use crate::error::{Error, Result};

/// Number of precipitation stations in the standard gauge layout.
pub const N_STATIONS: usize = 11;

/// Hourly multivariate series: one stream-flow column and eleven station
/// rainfall columns, with awareness of gaps in the hourly record.
///
/// Windows never span a segment break, so the table tracks where the hourly
/// timestamps jump by more than one hour.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesTable {
    times: Vec<i64>,
    flow: Vec<f64>,
    stations: Vec<Vec<f64>>,
    areal: Option<Vec<f64>>,
    segment_starts: Vec<usize>,
}

impl TimeSeriesTable {
    /// Builds a table, validating ordering and value ranges and computing
    /// segment breaks from timestamp gaps greater than one hour.
    pub fn new(times: Vec<i64>, flow: Vec<f64>, stations: Vec<Vec<f64>>) -> Result<Self> {
        if stations.len() != N_STATIONS {
            return Err(Error::data(format!(
                "expected {N_STATIONS} rain station columns, got {}",
                stations.len()
            )));
        }
        let n = times.len();
        if flow.len() != n || stations.iter().any(|s| s.len() != n) {
            return Err(Error::data("column lengths do not match timestamps".to_string()));
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::data(format!(
                    "timestamps not strictly increasing ({} then {})",
                    w[0], w[1]
                )));
            }
        }
        for (row, &q) in flow.iter().enumerate() {
            check_value(q, row + 1, "Q")?;
        }
        for (j, col) in stations.iter().enumerate() {
            for (row, &p) in col.iter().enumerate() {
                check_value(p, row + 1, &format!("P{}", j + 1))?;
            }
        }
        let mut segment_starts = vec![0];
        for (i, w) in times.windows(2).enumerate() {
            if w[1] - w[0] > 1 {
                segment_starts.push(i + 1);
            }
        }
        Ok(TimeSeriesTable {
            times,
            flow,
            stations,
            areal: None,
            segment_starts,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub fn flow(&self) -> &[f64] {
        &self.flow
    }

    pub fn station(&self, j: usize) -> &[f64] {
        &self.stations[j]
    }

    pub fn areal(&self) -> Option<&[f64]> {
        self.areal.as_deref()
    }

    /// Indices (excluding 0) at which a new contiguous segment starts.
    pub fn segment_breaks(&self) -> &[usize] {
        &self.segment_starts[1..]
    }

    /// Contiguous hourly index ranges, in order.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(self.segment_starts.len());
        for (i, &start) in self.segment_starts.iter().enumerate() {
            let end = self
                .segment_starts
                .get(i + 1)
                .copied()
                .unwrap_or(self.times.len());
            out.push(start..end);
        }
        out
    }

    /// Attaches the derived areal-rainfall column.
    pub fn with_areal(mut self, weights: Option<&[f64]>) -> Result<Self> {
        self.areal = Some(areal_rainfall(&self, weights)?);
        Ok(self)
    }
}

fn check_value(v: f64, row: usize, col: &str) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::data(format!("row {row}, column {col}: non-finite value")));
    }
    if v < 0.0 {
        return Err(Error::data(format!("row {row}, column {col}: negative value {v}")));
    }
    Ok(())
}

/// Catchment-wide rainfall as a weighted mean of the eleven stations.
///
/// Weights default to uniform (1/11 each); custom weights must be
/// non-negative and sum to 1.
pub fn areal_rainfall(table: &TimeSeriesTable, weights: Option<&[f64]>) -> Result<Vec<f64>> {
    let uniform = vec![1.0 / N_STATIONS as f64; N_STATIONS];
    let w = match weights {
        Some(w) => {
            if w.len() != N_STATIONS {
                return Err(Error::config(format!(
                    "areal rainfall needs {N_STATIONS} weights, got {}",
                    w.len()
                )));
            }
            if let Some(bad) = w.iter().find(|&&x| x < 0.0 || !x.is_finite()) {
                return Err(Error::config(format!("invalid areal weight {bad}")));
            }
            let sum: f64 = w.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::config(format!("areal weights sum to {sum}, expected 1")));
            }
            w.to_vec()
        }
        None => uniform,
    };
    let n = table.len();
    let mut out = vec![0.0; n];
    for (j, wj) in w.iter().enumerate() {
        for (o, &p) in out.iter_mut().zip(table.station(j)) {
            *o += wj * p;
        }
    }
    Ok(out)
}

fn expected_header() -> Vec<String> {
    let mut h = vec!["timestamp".to_string(), "Q".to_string()];
    for j in 1..=N_STATIONS {
        h.push(format!("P{j}"));
    }
    h
}

/// Parses one timestamp cell: either integer epoch-hours or
/// `YYYY-MM-DD HH:00`.
fn parse_timestamp(cell: &str, row: usize) -> Result<i64> {
    let cell = cell.trim();
    if let Ok(h) = cell.parse::<i64>() {
        return Ok(h);
    }
    let dt = NaiveDateTime::parse_from_str(cell, "%Y-%m-%d %H:%M").map_err(|_| {
        Error::data(format!(
            "row {row}, column timestamp: cannot parse {cell:?} as epoch-hours or YYYY-MM-DD HH:00"
        ))
    })?;
    if dt.minute() != 0 || dt.second() != 0 {
        return Err(Error::data(format!(
            "row {row}, column timestamp: {cell:?} is not on the hour"
        )));
    }
    Ok(dt.and_utc().timestamp() / 3600)
}

/// Loads an hourly flow/rain table from CSV.
///
/// Header must be exactly `timestamp,Q,P1,...,P11`. Negative or non-numeric
/// flow/rain cells are rejected with the offending row and column named.
pub fn load_csv(path: impl AsRef<Path>) -> Result<TimeSeriesTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path.as_ref())
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.as_ref().display())))?;

    let expected = expected_header();
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| Error::data(format!("bad header: {e}")))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != expected {
        return Err(Error::data(format!(
            "unexpected header {:?}, expected {:?}",
            header.join(","),
            expected.join(",")
        )));
    }

    let mut times = Vec::new();
    let mut flow = Vec::new();
    let mut stations: Vec<Vec<f64>> = vec![Vec::new(); N_STATIONS];
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::data(format!("row {row}: {e}")))?;
        if record.len() != expected.len() {
            return Err(Error::data(format!(
                "row {row}: expected {} fields, got {}",
                expected.len(),
                record.len()
            )));
        }
        times.push(parse_timestamp(&record[0], row)?);
        flow.push(parse_cell(&record[1], row, "Q")?);
        for (j, col) in stations.iter_mut().enumerate() {
            col.push(parse_cell(&record[j + 2], row, &format!("P{}", j + 1))?);
        }
    }
    TimeSeriesTable::new(times, flow, stations)
}

fn parse_cell(cell: &str, row: usize, col: &str) -> Result<f64> {
    let v: f64 = cell
        .parse()
        .map_err(|_| Error::data(format!("row {row}, column {col}: cannot parse {cell:?}")))?;
    check_value(v, row, col)?;
    Ok(v)
}

/// Writes a table in the same schema `load_csv` reads (integer epoch-hour
/// timestamps), so generated data is interchangeable with real data.
pub fn write_csv(table: &TimeSeriesTable, path: impl AsRef<Path>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path.as_ref())
        .map_err(|e| Error::data(format!("cannot write {}: {e}", path.as_ref().display())))?;
    writer
        .write_record(expected_header())
        .map_err(|e| Error::data(format!("csv write: {e}")))?;
    for i in 0..table.len() {
        let mut record = vec![table.times()[i].to_string(), table.flow()[i].to_string()];
        for j in 0..N_STATIONS {
            record.push(table.station(j)[i].to_string());
        }
        writer
            .write_record(&record)
            .map_err(|e| Error::data(format!("csv write: {e}")))?;
    }
    writer.flush()?;
    Ok(())
}
