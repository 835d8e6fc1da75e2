use serde::{Deserialize, Serialize};

use super::table::{areal_rainfall, TimeSeriesTable, N_STATIONS};
use crate::error::{Error, Result};
use crate::num::Matrix;

/// Which input variables feed the models. Stream-flow history is always the
/// prediction target; here it is toggled only as an *input*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSelection {
    pub flow: bool,
    pub rain: bool,
    pub areal: bool,
}

impl VariableSelection {
    pub const FLOW_AND_RAIN: VariableSelection = VariableSelection {
        flow: true,
        rain: true,
        areal: false,
    };

    pub fn validate(&self) -> Result<()> {
        if !self.flow && !self.rain && !self.areal {
            return Err(Error::config(
                "input selection must include at least one of flow, rain, areal".to_string(),
            ));
        }
        Ok(())
    }

    /// Number of variables per time step.
    pub fn n_variables(&self) -> usize {
        (self.flow as usize) + (self.rain as usize) * N_STATIONS + (self.areal as usize)
    }

    /// Per-time-step variable labels, flow first, then stations, then areal.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.n_variables());
        if self.flow {
            out.push("Q".to_string());
        }
        if self.rain {
            for j in 1..=N_STATIONS {
                out.push(format!("P{j}"));
            }
        }
        if self.areal {
            out.push("A".to_string());
        }
        out
    }

    /// Short text form used in reports: e.g. `flow+rain`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.flow {
            parts.push("flow");
        }
        if self.rain {
            parts.push("rain");
        }
        if self.areal {
            parts.push("areal");
        }
        parts.join("+")
    }
}

/// Lagged-feature rows with their future flow targets, as produced by the
/// windowing transform.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedMatrix {
    pub features: Matrix,
    pub targets: Vec<f64>,
    pub feature_names: Vec<String>,
    pub target_name: String,
    /// Epoch-hour of each row's target, for plotting traces.
    pub target_times: Vec<i64>,
    pub encoder_steps: usize,
    pub predict_step: usize,
    pub n_variables: usize,
}

impl SupervisedMatrix {
    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }
}

/// Label for a variable at a relative time offset: `Q(t-12)`, `P3(t+1)`,
/// `Q(t)` for offset zero.
pub fn offset_label(var: &str, offset: i64) -> String {
    match offset.cmp(&0) {
        std::cmp::Ordering::Less => format!("{var}(t-{})", -offset),
        std::cmp::Ordering::Equal => format!("{var}(t)"),
        std::cmp::Ordering::Greater => format!("{var}(t+{offset})"),
    }
}

/// Total column count of the conceptual windowed table before feature/target
/// selection: every variable at every offset from -encoder to +predict-1.
pub fn layout_total_columns(encoder_steps: usize, predict_step: usize, n_variables: usize) -> usize {
    n_variables * (encoder_steps + predict_step)
}

/// 1-based position of the flow target column in that conceptual table.
pub fn layout_target_column(encoder_steps: usize, predict_step: usize, n_variables: usize) -> usize {
    n_variables * (encoder_steps + predict_step - 1) + 1
}

/// Flattens the hourly table into supervised rows: for each valid anchor `t`,
/// features are the selected variables at offsets `t-encoder..t-1` (all
/// variables of one time step together, flow first) and the target is flow at
/// `t+predict-1`. Windows never span a segment break; segments too short to
/// host a single window contribute zero rows.
pub fn series_to_supervised(
    table: &TimeSeriesTable,
    encoder_steps: usize,
    predict_step: usize,
    selection: VariableSelection,
) -> Result<SupervisedMatrix> {
    if encoder_steps < 1 || predict_step < 1 {
        return Err(Error::config(format!(
            "encoder_steps and predict_step must be >= 1 (got {encoder_steps}, {predict_step})"
        )));
    }
    selection.validate()?;

    let areal_owned;
    let areal: Option<&[f64]> = if selection.areal {
        match table.areal() {
            Some(a) => Some(a),
            None => {
                areal_owned = areal_rainfall(table, None)?;
                Some(&areal_owned)
            }
        }
    } else {
        None
    };

    // Column accessors in per-time-step order.
    let mut columns: Vec<&[f64]> = Vec::new();
    if selection.flow {
        columns.push(table.flow());
    }
    if selection.rain {
        for j in 0..N_STATIONS {
            columns.push(table.station(j));
        }
    }
    if let Some(a) = areal {
        columns.push(a);
    }
    let n_vars = columns.len();
    debug_assert_eq!(n_vars, selection.n_variables());

    let labels = selection.labels();
    let mut feature_names = Vec::with_capacity(encoder_steps * n_vars);
    for step in 0..encoder_steps {
        let offset = step as i64 - encoder_steps as i64;
        for label in &labels {
            feature_names.push(offset_label(label, offset));
        }
    }
    let target_name = offset_label("Q", predict_step as i64 - 1);

    let window_span = encoder_steps + predict_step;
    let mut rows: Vec<f64> = Vec::new();
    let mut targets = Vec::new();
    let mut target_times = Vec::new();
    for seg in table.segments() {
        if seg.len() < window_span {
            continue;
        }
        for anchor in (seg.start + encoder_steps)..=(seg.end - predict_step) {
            for time in (anchor - encoder_steps)..anchor {
                for col in &columns {
                    rows.push(col[time]);
                }
            }
            let target_idx = anchor + predict_step - 1;
            targets.push(table.flow()[target_idx]);
            target_times.push(table.times()[target_idx]);
        }
    }
    if targets.is_empty() {
        return Err(Error::data(format!(
            "windowing produced no rows: no segment is longer than encoder {encoder_steps} + predict {predict_step} (usable segments need > {window_span} points; segment lengths: {:?})",
            table.segments().iter().map(|s| s.len()).collect::<Vec<_>>()
        )));
    }

    let n_features = encoder_steps * n_vars;
    let features = Matrix::from_vec(targets.len(), n_features, rows)?;
    Ok(SupervisedMatrix {
        features,
        targets,
        feature_names,
        target_name,
        target_times,
        encoder_steps,
        predict_step,
        n_variables: n_vars,
    })
}

/// Where to cut the chronological train/test boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SplitSpec {
    /// Exact number of training rows.
    Count(usize),
    /// Fraction of rows for training, in (0, 1).
    Fraction(f64),
}

impl SplitSpec {
    fn resolve(&self, n_samples: usize) -> Result<usize> {
        let count = match *self {
            SplitSpec::Count(c) => c,
            SplitSpec::Fraction(f) => {
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::config(format!("split fraction {f} not in (0, 1)")));
                }
                ((n_samples as f64) * f).round() as usize
            }
        };
        if count < 1 || count >= n_samples {
            return Err(Error::config(format!(
                "train count {count} must lie in [1, {}] for {n_samples} samples",
                n_samples - 1
            )));
        }
        Ok(count)
    }
}

/// Chronological split: the first rows train, the remainder test. No
/// shuffling crosses the boundary.
pub fn split(matrix: &SupervisedMatrix, spec: SplitSpec) -> Result<(SupervisedMatrix, SupervisedMatrix)> {
    let n = matrix.n_samples();
    let train_count = spec.resolve(n)?;
    let take = |range: std::ops::Range<usize>| -> SupervisedMatrix {
        let mut data = Vec::with_capacity(range.len() * matrix.n_features());
        for i in range.clone() {
            data.extend_from_slice(matrix.features.row(i));
        }
        SupervisedMatrix {
            features: Matrix::from_vec(range.len(), matrix.n_features(), data)
                .expect("slice of valid matrix"),
            targets: matrix.targets[range.clone()].to_vec(),
            feature_names: matrix.feature_names.clone(),
            target_name: matrix.target_name.clone(),
            target_times: matrix.target_times[range].to_vec(),
            encoder_steps: matrix.encoder_steps,
            predict_step: matrix.predict_step,
            n_variables: matrix.n_variables,
        }
    };
    Ok((take(0..train_count), take(train_count..n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_table(n: usize) -> TimeSeriesTable {
        let flow: Vec<f64> = (0..n).map(|i| 10.0 * (i + 1) as f64).collect();
        let stations: Vec<Vec<f64>> = (0..N_STATIONS)
            .map(|j| (0..n).map(|i| (100 * (j + 1) + i) as f64).collect())
            .collect();
        TimeSeriesTable::new((0..n as i64).collect(), flow, stations).unwrap()
    }

    #[test]
    fn standard_twelve_six_layout() {
        let full = VariableSelection {
            flow: true,
            rain: true,
            areal: false,
        };
        let l = 60;
        let m = series_to_supervised(&flat_table(l), 12, 6, full).unwrap();
        assert_eq!(m.n_samples(), l - 17);
        assert_eq!(m.n_features(), 144);
        assert_eq!(m.feature_names[0], "Q(t-12)");
        assert_eq!(m.feature_names[1], "P1(t-12)");
        assert_eq!(m.feature_names[143], "P11(t-1)");
        assert_eq!(m.target_name, "Q(t+5)");
        assert_eq!(layout_total_columns(12, 6, 12), 216);
        assert_eq!(layout_target_column(12, 6, 12), 205);
    }

    #[test]
    fn flow_only_hand_enumeration() {
        let t = TimeSeriesTable::new(
            vec![0, 1, 2],
            vec![10.0, 20.0, 30.0],
            vec![vec![0.0; 3]; N_STATIONS],
        )
        .unwrap();
        let sel = VariableSelection {
            flow: true,
            rain: false,
            areal: false,
        };
        let m = series_to_supervised(&t, 1, 1, sel).unwrap();
        assert_eq!(m.n_samples(), 2);
        assert_eq!(m.features.row(0), &[10.0]);
        assert_eq!(m.targets[0], 20.0);
        assert_eq!(m.features.row(1), &[20.0]);
        assert_eq!(m.targets[1], 30.0);
        assert_eq!(m.target_name, "Q(t)");
    }

    #[test]
    fn short_segment_contributes_zero_rows() {
        // Segment of length 5 and one of length 40; encoder 12 discards the
        // short one entirely.
        let mut times: Vec<i64> = (0..5).collect();
        times.extend(100..140);
        let n = times.len();
        let t = TimeSeriesTable::new(times, vec![1.0; n], vec![vec![0.0; n]; N_STATIONS]).unwrap();
        let m = series_to_supervised(&t, 12, 6, VariableSelection::FLOW_AND_RAIN).unwrap();
        assert_eq!(m.n_samples(), 40 - 17);
    }

    #[test]
    fn all_segments_too_short_is_an_error() {
        let t = flat_table(10);
        let err = series_to_supervised(&t, 12, 6, VariableSelection::FLOW_AND_RAIN).unwrap_err();
        assert!(matches!(err, Error::Data(_)), "{err}");
    }

    #[test]
    fn windows_never_span_gaps() {
        // Sentinel plant: two segments with wildly different flows; every
        // feature row must be drawn from a single segment.
        let mut times: Vec<i64> = (0..20).collect();
        times.extend(1000..1020);
        let mut flow = vec![1.0; 20];
        flow.extend(vec![1000.0; 20]);
        let n = times.len();
        let t = TimeSeriesTable::new(times, flow, vec![vec![0.0; n]; N_STATIONS]).unwrap();
        let sel = VariableSelection {
            flow: true,
            rain: false,
            areal: false,
        };
        let m = series_to_supervised(&t, 4, 2, sel).unwrap();
        for i in 0..m.n_samples() {
            let row = m.features.row(i);
            let all_low = row.iter().all(|&v| v == 1.0);
            let all_high = row.iter().all(|&v| v == 1000.0);
            assert!(all_low || all_high, "row {i} mixes segments: {row:?}");
            let target = m.targets[i];
            assert_eq!(target, if all_low { 1.0 } else { 1000.0 });
        }
        // Row-count law per segment: 20 - (4 + 2 - 1) = 15 each.
        assert_eq!(m.n_samples(), 30);
    }

    #[test]
    fn areal_column_derived_on_demand() {
        let sel = VariableSelection {
            flow: true,
            rain: false,
            areal: true,
        };
        let m = series_to_supervised(&flat_table(30), 3, 1, sel).unwrap();
        assert_eq!(m.n_variables, 2);
        assert_eq!(m.feature_names[1], "A(t-3)");
    }

    #[test]
    fn split_examples() {
        let m = series_to_supervised(
            &flat_table(27),
            1,
            1,
            VariableSelection {
                flow: true,
                rain: false,
                areal: false,
            },
        )
        .unwrap();
        assert_eq!(m.n_samples(), 26);
        let (train, test) = split(&m, SplitSpec::Count(20)).unwrap();
        assert_eq!((train.n_samples(), test.n_samples()), (20, 6));
        // Partition property: concatenation reconstructs the original.
        let mut all_targets = train.targets.clone();
        all_targets.extend_from_slice(&test.targets);
        assert_eq!(all_targets, m.targets);

        let (train, test) = split(&m, SplitSpec::Fraction(0.7)).unwrap();
        assert_eq!((train.n_samples(), test.n_samples()), (18, 8));

        assert!(split(&m, SplitSpec::Count(26)).is_err());
        assert!(split(&m, SplitSpec::Count(0)).is_err());
        assert!(split(&m, SplitSpec::Fraction(1.0)).is_err());
    }

    #[test]
    fn fraction_split_ten_rows() {
        let m = series_to_supervised(
            &flat_table(11),
            1,
            1,
            VariableSelection {
                flow: true,
                rain: false,
                areal: false,
            },
        )
        .unwrap();
        assert_eq!(m.n_samples(), 10);
        let (train, test) = split(&m, SplitSpec::Fraction(0.7)).unwrap();
        assert_eq!((train.n_samples(), test.n_samples()), (7, 3));
        assert!(split(&m, SplitSpec::Count(10)).is_err());
    }

    #[test]
    fn empty_selection_rejected() {
        let sel = VariableSelection {
            flow: false,
            rain: false,
            areal: false,
        };
        assert!(series_to_supervised(&flat_table(30), 2, 1, sel).is_err());
    }
}
