//! Minimal dense linear algebra, activations, and seeded randomness.
//!
//! Everything downstream (models, training, the synthetic generator) is built
//! on these few primitives; there is no external numerical framework. All
//! storage is row-major `f64`.

mod matrix;
mod rng;

pub use matrix::Matrix;
pub use rng::SeededRng;

/// Weight initialization rule for [`init_uniform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleRule {
    /// U(-s, s) with s = sqrt(6 / (rows + cols)).
    Glorot,
    /// U(lo, hi); lo must not exceed hi.
    FixedRange(f64, f64),
}

use crate::error::{Error, Result};

/// Draws a freshly initialized weight matrix from the given rule.
///
/// Deterministic for a given RNG state.
pub fn init_uniform(rng: &mut SeededRng, rows: usize, cols: usize, rule: ScaleRule) -> Result<Matrix> {
    if rows == 0 || cols == 0 {
        return Err(Error::config(format!(
            "init_uniform requires rows, cols >= 1 (got {rows}x{cols})"
        )));
    }
    let (lo, hi) = match rule {
        ScaleRule::Glorot => {
            let s = (6.0 / (rows + cols) as f64).sqrt();
            (-s, s)
        }
        ScaleRule::FixedRange(lo, hi) => {
            if lo > hi {
                return Err(Error::config(format!(
                    "init_uniform: degenerate range ({lo} > {hi})"
                )));
            }
            (lo, hi)
        }
    };
    let mut m = Matrix::zeros(rows, cols);
    for v in m.data_mut() {
        *v = rng.uniform(lo, hi);
    }
    Ok(m)
}

/// Numerically stable logistic function.
///
/// Computed via the exp-of-negative-magnitude branch so extreme inputs
/// saturate instead of producing NaN, and the result is kept strictly
/// inside (0, 1).
#[inline]
pub fn sigmoid_scalar(x: f64) -> f64 {
    let v = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    v.max(f64::MIN_POSITIVE).min(1.0 - f64::EPSILON / 2.0)
}

/// Elementwise logistic function; outputs strictly in (0, 1).
pub fn sigmoid(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| sigmoid_scalar(x)).collect()
}

/// Elementwise hyperbolic tangent.
pub fn tanh_act(v: &[f64]) -> Vec<f64> {
    v.iter().map(|&x| x.tanh()).collect()
}

/// Dot product; lengths are the caller's responsibility on the hot path.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn matmul_identity() {
        let i2 = Matrix::identity(2);
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let p = i2.matmul(&a).unwrap();
        assert_eq!(p.data(), a.data());
    }

    #[test]
    fn matmul_row_times_column() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![3.0], vec![4.0]]).unwrap();
        let p = a.matmul(&b).unwrap();
        assert_eq!((p.rows(), p.cols()), (1, 1));
        assert_relative_eq!(p[(0, 0)], 11.0);
    }

    #[test]
    fn matmul_shape_error_names_both_shapes() {
        let a = Matrix::zeros(3, 2);
        let b = Matrix::zeros(3, 2);
        let err = a.matmul(&b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("3x2"), "message should name shapes: {msg}");
    }

    #[test]
    fn sigmoid_midpoint_and_saturation() {
        assert_relative_eq!(sigmoid(&[0.0])[0], 0.5);
        let lo = sigmoid(&[-1000.0])[0];
        assert!(lo > 0.0 && lo <= 1e-300, "saturated low: {lo}");
        assert!(lo.is_finite());
        assert_relative_eq!(sigmoid(&[1.0])[0], 0.731_058_578_630_004_9, epsilon = 1e-15);
    }

    #[test]
    fn tanh_values() {
        assert_eq!(tanh_act(&[0.0])[0], 0.0);
        assert!((tanh_act(&[1e6])[0] - 1.0).abs() < 1e-15);
        assert_relative_eq!(tanh_act(&[0.5])[0], 0.462_117_157_260_009_76, epsilon = 1e-15);
    }

    #[test]
    fn sigmoid_symmetry() {
        for &x in &[-7.5, -2.0, -0.3, 0.0, 0.9, 4.2, 11.0] {
            assert_relative_eq!(sigmoid_scalar(x) + sigmoid_scalar(-x), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn init_uniform_deterministic_per_seed() {
        let a = init_uniform(&mut SeededRng::new(42), 4, 4, ScaleRule::Glorot).unwrap();
        let b = init_uniform(&mut SeededRng::new(42), 4, 4, ScaleRule::Glorot).unwrap();
        assert_eq!(a.data(), b.data());
    }

    #[test]
    fn init_uniform_glorot_bounds() {
        let m = init_uniform(&mut SeededRng::new(7), 4, 4, ScaleRule::Glorot).unwrap();
        let s = (6.0f64 / 8.0).sqrt();
        assert!(m.data().iter().all(|v| v.abs() <= s));
    }

    #[test]
    fn init_uniform_degenerate_cases() {
        let z = init_uniform(&mut SeededRng::new(1), 2, 3, ScaleRule::FixedRange(0.0, 0.0)).unwrap();
        assert!(z.data().iter().all(|&v| v == 0.0));
        assert!(init_uniform(&mut SeededRng::new(1), 2, 3, ScaleRule::FixedRange(1.0, -1.0)).is_err());
    }

    #[test]
    fn activations_monotone_on_sorted_vectors() {
        let mut rng = SeededRng::new(99);
        let mut xs: Vec<f64> = (0..64).map(|_| rng.uniform(-18.0, 18.0)).collect();
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup();
        let s = sigmoid(&xs);
        let t = tanh_act(&xs);
        for w in s.windows(2) {
            assert!(w[0] < w[1], "sigmoid not strictly increasing");
        }
        for w in t.windows(2) {
            assert!(w[0] < w[1], "tanh not strictly increasing");
        }
    }

    #[test]
    fn matmul_associativity_small_random() {
        let mut rng = SeededRng::new(3);
        for _ in 0..20 {
            let (m, k, n, p) = (
                rng.usize_below(7) + 1,
                rng.usize_below(7) + 1,
                rng.usize_below(7) + 1,
                rng.usize_below(7) + 1,
            );
            let a = init_uniform(&mut rng, m, k, ScaleRule::FixedRange(-1.0, 1.0)).unwrap();
            let b = init_uniform(&mut rng, k, n, ScaleRule::FixedRange(-1.0, 1.0)).unwrap();
            let c = init_uniform(&mut rng, n, p, ScaleRule::FixedRange(-1.0, 1.0)).unwrap();
            let left = a.matmul(&b).unwrap().matmul(&c).unwrap();
            let right = a.matmul(&b.matmul(&c).unwrap()).unwrap();
            for (x, y) in left.data().iter().zip(right.data()) {
                assert!((x - y).abs() < 1e-10);
            }
        }
    }
}
