//! Acceptance suite: one test per contract criterion, each printing a
//! PASS line with the measured quantity (run with `--nocapture` to see them).
//!
//! Oracles here are deliberately independent re-implementations: scalar-loop
//! cell equations, naive metric summations, and a projected-gradient QP
//! solver for the SVR dual.

use flowcast::data::{
    generate_synthetic, series_to_supervised, split, MinMaxScaler, SplitSpec, SyntheticConfig,
    TimeSeriesTable, VariableSelection, N_STATIONS,
};
use flowcast::experiment::{
    run_comparative, run_input_ablation, run_step_sweep, DatasetSource, ExperimentConfig,
    SweepParam, ABLATION_REFERENCE, COMPARATIVE_REFERENCE,
};
use flowcast::metrics::{self, R2Convention};
use flowcast::model::{
    rbf_kernel, svr_dual_objective, svr_fit, svr_kkt_violation, Lstm, LstmState, Mlp, NeuralModel,
    ParamBlocks, Rnn, SvrFitConfig,
};
use flowcast::num::{Matrix, SeededRng};
use flowcast::train::{gradient_check, train, Loss, TrainConfig};

fn random_features(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    let data: Vec<f64> = (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

/// Targets a small residual away from the model's own outputs. Central
/// differences at h = 1e-6 carry an absolute roundoff floor of about
/// eps_f64 * loss / (2h); keeping the loss small keeps that floor below the
/// 1e-8 denominator guard for every parameter, so the comparison measures
/// the backward pass rather than f64 cancellation.
fn near_prediction_targets<M: NeuralModel>(model: &M, features: &Matrix, rng: &mut SeededRng) -> Vec<f64> {
    (0..features.rows())
        .map(|i| model.predict(features.row(i)).unwrap() + rng.uniform(-0.02, 0.02))
        .collect()
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_01_gradient_fidelity() {
    let started = std::time::Instant::now();
    let hiddens = [2usize, 4, 8];
    let encoders = [2usize, 3, 6];
    let inputs = [1usize, 5, 12];
    let mut rng = SeededRng::new(101);
    let mut worst_lstm = 0.0f64;
    for case in 0..20 {
        let hidden = hiddens[rng.usize_below(3)];
        let encoder = encoders[rng.usize_below(3)];
        let input = inputs[rng.usize_below(3)];
        let model = Lstm::new(input, hidden, encoder, &mut rng).unwrap();
        let features = random_features(&mut rng, 4, input * encoder);
        let targets = near_prediction_targets(&model, &features, &mut rng);
        let report = gradient_check(&model, &features, &targets, Loss::Mse, 1e-6).unwrap();
        assert!(
            report.max_rel_error < 1e-4,
            "case {case} (h={hidden} e={encoder} i={input}): {report:?}"
        );
        worst_lstm = worst_lstm.max(report.max_rel_error);
    }

    let mut worst_mlp = 0.0f64;
    for _ in 0..6 {
        let hidden = hiddens[rng.usize_below(3)];
        let input = inputs[rng.usize_below(3)];
        let model = Mlp::new(input, hidden, &mut rng).unwrap();
        let features = random_features(&mut rng, 4, input);
        let targets = near_prediction_targets(&model, &features, &mut rng);
        let report = gradient_check(&model, &features, &targets, Loss::Mse, 1e-6).unwrap();
        assert!(report.max_rel_error < 1e-6, "mlp: {report:?}");
        worst_mlp = worst_mlp.max(report.max_rel_error);
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 30.0, "gradient sweep took {secs:.1}s");
    println!(
        "PASS criterion 1: BPTT gradients, 20 LSTM configs worst rel err {worst_lstm:.2e} (<1e-4), MLP worst {worst_mlp:.2e} (<1e-6), {secs:.1}s"
    );
}

// ---------------------------------------------------------------- criterion 2

fn oracle_sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Plain scalar-loop transcription of the gated recurrence, independent of
/// the Matrix code paths.
#[allow(clippy::too_many_arguments)]
fn oracle_lstm_cell(
    m: &Lstm,
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let n = h_prev.len();
    let gate = |input_w: &Matrix, recur_w: &Matrix, bias: &[f64], k: usize| -> f64 {
        let mut z = bias[k];
        for (i, &xi) in x.iter().enumerate() {
            z += input_w[(k, i)] * xi;
        }
        for (j, &hj) in h_prev.iter().enumerate() {
            z += recur_w[(k, j)] * hj;
        }
        z
    };
    let mut h = vec![0.0; n];
    let mut c = vec![0.0; n];
    for k in 0..n {
        let f = oracle_sigmoid(gate(&m.forget.input_w, &m.forget.recur_w, &m.forget.bias, k));
        let i = oracle_sigmoid(gate(&m.input.input_w, &m.input.recur_w, &m.input.bias, k));
        let g = gate(&m.candidate.input_w, &m.candidate.recur_w, &m.candidate.bias, k).tanh();
        let o = oracle_sigmoid(gate(&m.output.input_w, &m.output.recur_w, &m.output.bias, k));
        c[k] = f * c_prev[k] + i * g;
        h[k] = o * c[k].tanh();
    }
    (h, c)
}

fn oracle_rnn_cell(m: &Rnn, x: &[f64], h_prev: &[f64]) -> (Vec<f64>, f64) {
    let n = h_prev.len();
    let mut h = vec![0.0; n];
    for j in 0..n {
        let mut z = 0.0;
        for (i, &hi) in h_prev.iter().enumerate() {
            z += m.recur_w[(i, j)] * hi;
        }
        for (i, &xi) in x.iter().enumerate() {
            z += m.input_w[(i, j)] * xi;
        }
        h[j] = z.tanh();
    }
    let mut y = 0.0;
    for (i, &hi) in h.iter().enumerate() {
        y += m.readout_w[(i, 0)] * hi;
    }
    (h, y)
}

#[test]
fn criterion_02_cell_oracle_equivalence() {
    let mut rng = SeededRng::new(202);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let hidden = 1 + rng.usize_below(6);
        let input = 1 + rng.usize_below(6);
        let lstm = Lstm::new(input, hidden, 1, &mut rng).unwrap();
        let x: Vec<f64> = (0..input).map(|_| rng.uniform(-2.0, 2.0)).collect();
        let prev = LstmState {
            h: (0..hidden).map(|_| rng.uniform(-1.0, 1.0)).collect(),
            c: (0..hidden).map(|_| rng.uniform(-2.0, 2.0)).collect(),
        };
        let (state, _) = lstm.cell_forward(&x, &prev).unwrap();
        let (h_oracle, c_oracle) = oracle_lstm_cell(&lstm, &x, &prev.h, &prev.c);
        for k in 0..hidden {
            let dh = (state.h[k] - h_oracle[k]).abs();
            let dc = (state.c[k] - c_oracle[k]).abs();
            assert!(dh < 1e-12 && dc < 1e-12, "case {case}: dh={dh:.2e} dc={dc:.2e}");
            worst = worst.max(dh).max(dc);
        }

        let rnn = Rnn::new(input, hidden, 1, &mut rng).unwrap();
        let h_prev: Vec<f64> = (0..hidden).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let (h, y) = rnn.cell_forward(&x, &h_prev).unwrap();
        let (h_o, y_o) = oracle_rnn_cell(&rnn, &x, &h_prev);
        for k in 0..hidden {
            let d = (h[k] - h_o[k]).abs();
            assert!(d < 1e-12, "case {case}: rnn dh={d:.2e}");
            worst = worst.max(d);
        }
        let dy = (y[0] - y_o).abs();
        assert!(dy < 1e-12);
        worst = worst.max(dy);
    }
    println!("PASS criterion 2: cell forwards match scalar-loop oracle on 100 cases, worst |diff| {worst:.2e} (<1e-12)");
}

// ---------------------------------------------------------------- criterion 3

#[test]
fn criterion_03_metric_oracle_equivalence() {
    let mut rng = SeededRng::new(303);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let n = 2 + rng.usize_below(40);
        let p: Vec<f64> = (0..n).map(|_| rng.uniform(-50.0, 150.0)).collect();
        let o: Vec<f64> = (0..n).map(|_| rng.uniform(-50.0, 150.0)).collect();

        let sq: f64 = p.iter().zip(&o).map(|(a, b)| (a - b) * (a - b)).sum();
        let naive_rmse = (sq / n as f64).sqrt();
        let naive_mae = p.iter().zip(&o).map(|(a, b)| (a - b).abs()).sum::<f64>() / n as f64;
        let mean_o = o.iter().sum::<f64>() / n as f64;
        let ss_tot: f64 = o.iter().map(|v| (v - mean_o) * (v - mean_o)).sum();
        let naive_r2 = 1.0 - sq / ss_tot;

        let rmse = metrics::rmse(&p, &o).unwrap();
        let mae = metrics::mae(&p, &o).unwrap();
        let r2 = metrics::r2(&p, &o, R2Convention::ObservedMean).unwrap();
        for (a, b) in [(rmse, naive_rmse), (mae, naive_mae), (r2, naive_r2)] {
            let d = (a - b).abs();
            assert!(d < 1e-10, "case {case}: {a} vs {b}");
            worst = worst.max(d);
        }
        assert!(rmse >= mae - 1e-12, "case {case}: rmse {rmse} < mae {mae}");

        let k = rng.uniform(0.25, 8.0);
        let pk: Vec<f64> = p.iter().map(|v| v * k).collect();
        let ok: Vec<f64> = o.iter().map(|v| v * k).collect();
        let r2k = metrics::r2(&pk, &ok, R2Convention::ObservedMean).unwrap();
        assert!((r2 - r2k).abs() < 1e-10, "case {case}: scale variance {r2} vs {r2k}");
    }
    println!("PASS criterion 3: rmse/mae/r2 match naive oracles on 1000 pairs, worst |diff| {worst:.2e} (<1e-10); rmse>=mae and scale invariance held");
}

// ---------------------------------------------------------------- criterion 4

fn single_segment_table(rng: &mut SeededRng, len: usize) -> TimeSeriesTable {
    let flow: Vec<f64> = (0..len).map(|_| rng.uniform(0.0, 500.0)).collect();
    let stations: Vec<Vec<f64>> = (0..N_STATIONS)
        .map(|_| (0..len).map(|_| rng.uniform(0.0, 30.0)).collect())
        .collect();
    TimeSeriesTable::new((0..len as i64).collect(), flow, stations).unwrap()
}

#[test]
fn criterion_04_windowing_row_count_law() {
    let mut rng = SeededRng::new(404);
    for case in 0..200 {
        let encoder = 1 + rng.usize_below(15);
        let predict = 1 + rng.usize_below(10);
        let extra = 1 + rng.usize_below(60);
        let len = encoder + predict - 1 + extra;
        let table = single_segment_table(&mut rng, len);
        let m = series_to_supervised(&table, encoder, predict, VariableSelection::FLOW_AND_RAIN)
            .unwrap();
        assert_eq!(
            m.n_samples(),
            len - (encoder + predict - 1),
            "case {case}: L={len} enc={encoder} pred={predict}"
        );
    }

    let table = single_segment_table(&mut rng, 80);
    let m = series_to_supervised(&table, 12, 6, VariableSelection::FLOW_AND_RAIN).unwrap();
    assert_eq!(m.n_features(), 144);
    assert_eq!(m.target_name, "Q(t+5)");
    assert_eq!(m.feature_names[0], "Q(t-12)");
    assert_eq!(flowcast::data::layout_total_columns(12, 6, 12), 216);
    assert_eq!(flowcast::data::layout_target_column(12, 6, 12), 205);
    println!("PASS criterion 4: row-count law held on 200 random triples; standard 12/6 layout has 144 features, 216 total columns, target Q(t+5) at column 205");
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_05_scaler_round_trip() {
    let mut rng = SeededRng::new(505);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let len = 30 + rng.usize_below(80);
        let table = single_segment_table(&mut rng, len);
        let m = series_to_supervised(&table, 3, 2, VariableSelection::FLOW_AND_RAIN).unwrap();
        let (train_raw, test_raw) = split(&m, SplitSpec::Fraction(0.7)).unwrap();
        let scaler = MinMaxScaler::fit(&train_raw).unwrap();

        let train_scaled = scaler.transform(&train_raw).unwrap();
        for i in 0..train_scaled.n_samples() {
            for &v in train_scaled.features.row(i) {
                assert!((-1e-12..=1.0 + 1e-12).contains(&v), "case {case}: {v}");
            }
        }
        for both in [&train_raw, &test_raw] {
            let back = scaler.inverse_transform(&scaler.transform(both).unwrap()).unwrap();
            for i in 0..both.n_samples() {
                for (a, b) in back.features.row(i).iter().zip(both.features.row(i)) {
                    let d = (a - b).abs();
                    assert!(d < 1e-12, "case {case}: {d:.2e}");
                    worst = worst.max(d);
                }
            }
            for (a, b) in back.targets.iter().zip(&both.targets) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    // Constant columns map to zero.
    let n = 40;
    let t = TimeSeriesTable::new(
        (0..n as i64).collect(),
        vec![3.5; n],
        vec![vec![1.25; n]; N_STATIONS],
    )
    .unwrap();
    let m = series_to_supervised(&t, 2, 1, VariableSelection::FLOW_AND_RAIN).unwrap();
    let scaler = MinMaxScaler::fit(&m).unwrap();
    let scaled = scaler.transform(&m).unwrap();
    assert!(scaled.features.data().iter().all(|&v| v == 0.0));
    assert!(scaled.targets.iter().all(|&v| v == 0.0));
    println!("PASS criterion 5: scaler round-trip identity on 100 tables, worst |diff| {worst:.2e} (<1e-12); train split in [0,1]; constant columns map to 0");
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_06_overfit_smoke() {
    let started = std::time::Instant::now();
    let cfg = SyntheticConfig {
        n_hours: 200,
        ..SyntheticConfig::default()
    };
    let table = generate_synthetic(&mut SeededRng::new(606), &cfg).unwrap();
    let m = series_to_supervised(&table, 12, 6, VariableSelection::FLOW_AND_RAIN).unwrap();
    let (subset, _) = split(&m, SplitSpec::Count(50)).unwrap();
    let scaler = MinMaxScaler::fit(&subset).unwrap();
    let scaled = scaler.transform(&subset).unwrap();

    let model = Lstm::new(12, 8, 12, &mut SeededRng::new(607)).unwrap();
    let train_cfg = TrainConfig {
        epochs: 500,
        batch_size: 8,
        seed: 608,
        ..TrainConfig::default()
    };
    let (_, logs) = train(model, &scaled, &scaled, &train_cfg).unwrap();
    let best = logs.iter().map(|l| l.train_loss).fold(f64::INFINITY, f64::min);
    let final_loss = logs.last().unwrap().train_loss;
    let secs = started.elapsed().as_secs_f64();
    assert!(
        final_loss < 1e-3,
        "memorization failed: final train MSE {final_loss:.3e} (best {best:.3e})"
    );
    assert!(secs < 60.0, "overfit smoke took {secs:.1}s");
    println!("PASS criterion 6: 50-sample LSTM memorization, train MSE {final_loss:.2e} (<1e-3) after {} epochs in {secs:.1}s", logs.len());
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn criterion_07_synthetic_comparative() {
    let started = std::time::Instant::now();
    let mut cfg = ExperimentConfig::default();
    cfg.dataset = DatasetSource::Synthetic(SyntheticConfig {
        n_hours: 8000,
        ..SyntheticConfig::default()
    });
    cfg.split = SplitSpec::Fraction(0.75);
    cfg.seed = Some(707);
    let output = run_comparative(&cfg).unwrap();
    // 8000 hours window to ~7983 rows; 0.75 puts ~6000 in train, ~2000 in test.
    assert!((1800..2200).contains(&output.observed.len()), "test rows {}", output.observed.len());

    let mut lstm_r2 = None;
    let mut ordering = Vec::new();
    for run in &output.runs {
        let report = run.outcome.as_ref().expect("every model completes");
        ordering.push(format!("{}={:.4}", run.model, report.r2));
        if run.model == "lstm" {
            lstm_r2 = Some(report.r2);
        }
    }
    let lstm_r2 = lstm_r2.expect("lstm present");
    let secs = started.elapsed().as_secs_f64();
    assert!(lstm_r2 >= 0.90, "LSTM R2 {lstm_r2:.4} below 0.90");
    assert!(secs < 900.0, "comparative run took {secs:.0}s (>15min)");
    println!(
        "PASS criterion 7: synthetic comparative in {secs:.0}s (<900s), LSTM R2 {lstm_r2:.4} (>=0.90); ordering recorded: {}",
        ordering.join(", ")
    );
}

// ---------------------------------------------------------------- criterion 8

#[test]
fn criterion_08_ablation_trend() {
    let mut cfg = ExperimentConfig::default();
    cfg.dataset = DatasetSource::Synthetic(SyntheticConfig {
        n_hours: 4000,
        noise_std: 0.01,
        ..SyntheticConfig::default()
    });
    cfg.hidden_size = 24;
    cfg.train.epochs = 20;
    cfg.seed = Some(7);
    let output = run_input_ablation(&cfg).unwrap();
    let r2_of = |combo: &str| -> f64 {
        output
            .rows
            .iter()
            .find(|(c, _)| c == combo)
            .and_then(|(_, o)| o.as_ref().ok())
            .map(|r| r.r2)
            .unwrap_or_else(|| panic!("missing combo {combo}"))
    };
    let flow_rain = r2_of("flow+rain");
    let rain_only = r2_of("rain");
    let flow_only = r2_of("flow");
    assert!(
        flow_rain > rain_only + 0.02,
        "R2(flow+rain)={flow_rain:.4} not above R2(rain)+0.02={:.4}",
        rain_only + 0.02
    );
    assert!(
        flow_rain >= flow_only,
        "R2(flow+rain)={flow_rain:.4} < R2(flow)={flow_only:.4}"
    );
    println!(
        "PASS criterion 8: ablation trend, R2(flow+rain)={flow_rain:.4} > R2(rain)+0.02={:.4} and >= R2(flow)={flow_only:.4}",
        rain_only + 0.02
    );
}

// ---------------------------------------------------------------- criterion 9

fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        for (rank, &i) in idx.iter().enumerate() {
            r[i] = rank as f64 + 1.0;
        }
        r
    }
    let rx = ranks(xs);
    let ry = ranks(ys);
    let n = xs.len() as f64;
    let d2: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - b) * (a - b)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

#[test]
fn criterion_09_predict_step_trend() {
    let mut cfg = ExperimentConfig::default();
    cfg.dataset = DatasetSource::Synthetic(SyntheticConfig {
        n_hours: 4000,
        noise_std: 0.005,
        recession: 0.12,
        storm_rate: 0.03,
        ..SyntheticConfig::default()
    });
    cfg.hidden_size = 24;
    cfg.train.epochs = 30;
    cfg.models = vec!["lstm".into()];
    cfg.seed = Some(7);
    let steps = [1usize, 3, 6, 9, 12];
    let sweep = run_step_sweep(&cfg, SweepParam::PredictStep, &steps).unwrap();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for point in &sweep.points {
        let report = point.runs[0].outcome.as_ref().expect("point trains");
        xs.push(point.value as f64);
        ys.push(report.r2);
    }
    let rho = spearman(&xs, &ys);
    assert!(rho <= -0.8, "Spearman(step, R2) = {rho:.3} (> -0.8); R2s: {ys:?}");
    println!(
        "PASS criterion 9: predict-step trend, Spearman {rho:.2} (<= -0.8), R2 over steps {steps:?}: {:?}",
        ys.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
}

// --------------------------------------------------------------- criterion 10

/// Monotone FISTA on the 2n-variable split dual with exact projection onto
/// the box-and-hyperplane feasible set; independent of the SMO path.
fn qp_oracle_solve(k: &Matrix, y: &[f64], c: f64, eps: f64, iters: usize) -> Vec<f64> {
    let n = y.len();
    // Lipschitz bound via power iteration on K (Hessian of the split problem
    // has largest eigenvalue 2*lambda_max(K)).
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lam = 1.0;
    for _ in 0..60 {
        let mut kv = vec![0.0; n];
        for i in 0..n {
            let row = k.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(&v) {
                acc += a * b;
            }
            kv[i] = acc;
        }
        lam = kv.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (vi, kvi) in v.iter_mut().zip(&kv) {
            *vi = kvi / lam.max(1e-300);
        }
    }
    let step = 1.0 / (2.0 * lam * 1.05);

    let project = |v: &[f64]| -> Vec<f64> {
        // clip(v_k - lambda * p_k) with bisection on lambda so that
        // sum(p * z) = 0.
        let residual = |lambda: f64| -> f64 {
            let mut s = 0.0;
            for m in 0..n {
                s += (v[m] - lambda).clamp(0.0, c);
                s -= (v[n + m] + lambda).clamp(0.0, c);
            }
            s
        };
        let bound = v.iter().fold(0.0f64, |a, &b| a.max(b.abs())) + c + 1.0;
        let (mut lo, mut hi) = (-bound, bound);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        let mut z = vec![0.0; 2 * n];
        for m in 0..n {
            z[m] = (v[m] - lambda).clamp(0.0, c);
            z[n + m] = (v[n + m] + lambda).clamp(0.0, c);
        }
        z
    };

    let objective = |z: &[f64]| -> f64 {
        let beta: Vec<f64> = (0..n).map(|m| z[m] - z[n + m]).collect();
        let mut quad = 0.0;
        for i in 0..n {
            let row = k.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(&beta) {
                acc += a * b;
            }
            quad += beta[i] * acc;
        }
        let linear: f64 = y.iter().zip(&beta).map(|(a, b)| a * b).sum();
        let l1: f64 = z.iter().sum();
        0.5 * quad - linear + eps * l1
    };

    let grad = |z: &[f64]| -> Vec<f64> {
        let beta: Vec<f64> = (0..n).map(|m| z[m] - z[n + m]).collect();
        let mut kb = vec![0.0; n];
        for i in 0..n {
            let row = k.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(&beta) {
                acc += a * b;
            }
            kb[i] = acc;
        }
        let mut g = vec![0.0; 2 * n];
        for m in 0..n {
            g[m] = kb[m] - y[m] + eps;
            g[n + m] = -kb[m] + y[m] + eps;
        }
        g
    };

    let mut z = project(&vec![0.0; 2 * n]);
    let mut momentum = z.clone();
    let mut t = 1.0f64;
    let mut best = z.clone();
    let mut best_f = objective(&z);
    for _ in 0..iters {
        let g = grad(&momentum);
        let trial: Vec<f64> = momentum.iter().zip(&g).map(|(zi, gi)| zi - step * gi).collect();
        let z_next = project(&trial);
        let f_next = objective(&z_next);
        if f_next > best_f {
            // Restart momentum when it overshoots.
            momentum = best.clone();
            t = 1.0;
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        momentum = z_next
            .iter()
            .zip(&z)
            .map(|(a, b)| a + (t - 1.0) / t_next * (a - b))
            .collect();
        z = z_next;
        t = t_next;
        best_f = f_next;
        best = z.clone();
    }
    (0..n).map(|m| best[m] - best[n + m]).collect()
}

#[test]
fn criterion_10_svr_against_qp_oracle() {
    let mut rng = SeededRng::new(1010);
    let n = 200;
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let t = 4.0 * std::f64::consts::PI * i as f64 / n as f64;
        rows.push(vec![t]);
        y.push(t.sin() + rng.normal(0.0, 0.03));
    }
    let x = Matrix::from_rows(&rows).unwrap();
    let cfg = SvrFitConfig {
        c: 1.0,
        gamma: 1.0,
        epsilon: 0.05,
        tol: 1e-3,
        max_iter: 200_000,
    };
    let model = svr_fit(&x, &y, &cfg).unwrap();

    let kkt = svr_kkt_violation(&model, &x, &y).unwrap();
    assert!(kkt <= 1e-3, "KKT violation {kkt:.2e}");

    let mae: f64 = (0..n)
        .map(|i| (model.predict(x.row(i)).unwrap() - y[i]).abs())
        .sum::<f64>()
        / n as f64;
    assert!(mae <= 0.15, "training MAE {mae:.4}");

    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            k[(i, j)] = rbf_kernel(x.row(i), x.row(j), cfg.gamma).unwrap();
        }
    }
    let beta_oracle = qp_oracle_solve(&k, &y, cfg.c, cfg.epsilon, 30_000);
    let dual_obj = |beta: &[f64]| -> f64 {
        let mut quad = 0.0;
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += k[(i, j)] * beta[j];
            }
            quad += beta[i] * acc;
        }
        let linear: f64 = y.iter().zip(beta).map(|(a, b)| a * b).sum();
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        -0.5 * quad + linear - cfg.epsilon * l1
    };
    let obj_oracle = dual_obj(&beta_oracle);
    let obj_smo = svr_dual_objective(&model, &y).unwrap();
    let gap = (obj_smo - obj_oracle).abs();
    assert!(
        gap <= 1e-3,
        "dual objective mismatch: SMO {obj_smo:.6} vs QP oracle {obj_oracle:.6}"
    );
    println!(
        "PASS criterion 10: SVR on noisy sine, KKT violation {kkt:.2e} (<=1e-3), |SMO-QP| objective gap {gap:.2e} (<=1e-3), training MAE {mae:.3} (<=0.15)"
    );
}

// --------------------------------------------------------------- criterion 12

#[test]
fn criterion_12_reference_constant_integrity() {
    let expected = [
        ("svr", 136.022, 63.939, 0.917),
        ("mlp", 99.359, 35.248, 0.956),
        ("lstm", 82.007, 27.752, 0.970),
    ];
    for ((model, rmse, mae, r2), row) in expected.iter().zip(COMPARATIVE_REFERENCE.iter()) {
        assert_eq!(row.model, *model);
        assert_eq!(row.rmse, *rmse);
        assert_eq!(row.mae, *mae);
        assert_eq!(row.r2, *r2);
    }
    let with_flow_rmse = [
        ("flow", 148.864),
        ("flow+rain", 82.007),
        ("flow+areal", 94.008),
        ("flow+rain+areal", 85.772),
    ];
    for (combo, rmse) in with_flow_rmse {
        let row = ABLATION_REFERENCE.iter().find(|r| r.inputs == combo).unwrap();
        assert_eq!(row.rmse, rmse, "{combo}");
    }
    let table = flowcast::experiment::comparative_reference_table();
    for needle in ["136.022", "63.939", "0.917", "99.359", "35.248", "0.956", "82.007", "27.752", "0.970"] {
        assert!(table.contains(needle), "reference table missing {needle}");
    }
    println!("PASS criterion 12: published reference constants reproduced exactly and labeled non-recomputable");
}
