use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::num::Matrix;

/// RBF kernel `exp(-gamma * ||a - b||^2)`.
pub fn rbf_kernel(a: &[f64], b: &[f64], gamma: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::shape(
            "rbf_kernel",
            format!("vector lengths {} and {}", a.len(), b.len()),
        ));
    }
    if gamma <= 0.0 {
        return Err(Error::config(format!("rbf gamma must be > 0, got {gamma}")));
    }
    let mut d2 = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        d2 += d * d;
    }
    Ok((-gamma * d2).exp())
}

/// Hyperparameters of the epsilon-SVR solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvrFitConfig {
    pub c: f64,
    pub gamma: f64,
    /// Width of the insensitive tube.
    pub epsilon: f64,
    /// KKT stopping tolerance.
    pub tol: f64,
    /// Maximum number of working-pair updates before giving up.
    pub max_iter: usize,
}

impl Default for SvrFitConfig {
    fn default() -> Self {
        SvrFitConfig {
            c: 1.0,
            gamma: 1.0,
            epsilon: 0.01,
            tol: 1e-3,
            max_iter: 100_000,
        }
    }
}

/// Trained kernel regressor: `f(x) = sum_i beta_i K(sv_i, x) + bias`.
#[derive(Debug, Clone, PartialEq)]
pub struct SvrModel {
    pub support_vectors: Matrix,
    /// `alpha_i - alpha_i*` of each support vector.
    pub dual_coeffs: Vec<f64>,
    /// Row indices of the support vectors in the training matrix.
    pub support_indices: Vec<usize>,
    pub bias: f64,
    pub c: f64,
    pub gamma: f64,
    pub epsilon_tube: f64,
}

impl SvrModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.support_vectors.cols() && !self.dual_coeffs.is_empty() {
            return Err(Error::shape(
                "svr_predict",
                format!(
                    "feature length {} != support vector length {}",
                    x.len(),
                    self.support_vectors.cols()
                ),
            ));
        }
        let mut acc = self.bias;
        for (i, &beta) in self.dual_coeffs.iter().enumerate() {
            acc += beta * rbf_kernel(self.support_vectors.row(i), x, self.gamma)?;
        }
        Ok(acc)
    }
}

/// Bounded cache of kernel matrix rows, keyed by training-row index.
struct RowCache<'a> {
    x: &'a Matrix,
    gamma: f64,
    rows: HashMap<usize, Vec<f64>>,
    order: std::collections::VecDeque<usize>,
    cap: usize,
}

impl<'a> RowCache<'a> {
    fn new(x: &'a Matrix, gamma: f64) -> Self {
        let n = x.rows();
        // ~64 MB budget for cached rows.
        let cap = (64_000_000 / 8 / n.max(1)).clamp(2, n.max(2));
        RowCache {
            x,
            gamma,
            rows: HashMap::new(),
            order: std::collections::VecDeque::new(),
            cap,
        }
    }

    fn row(&mut self, m: usize) -> &[f64] {
        if !self.rows.contains_key(&m) {
            if self.rows.len() >= self.cap {
                if let Some(old) = self.order.pop_front() {
                    self.rows.remove(&old);
                }
            }
            let xm = self.x.row(m);
            let row: Vec<f64> = (0..self.x.rows())
                .map(|t| {
                    let mut d2 = 0.0;
                    for (a, b) in xm.iter().zip(self.x.row(t)) {
                        let d = a - b;
                        d2 += d * d;
                    }
                    (-self.gamma * d2).exp()
                })
                .collect();
            self.rows.insert(m, row);
            self.order.push_back(m);
        }
        self.rows.get(&m).unwrap()
    }
}

/// Fits epsilon-SVR by sequential minimal optimization on the dual.
///
/// Variables are the 2n split multipliers (alpha, alpha*); each iteration
/// picks the maximal violating pair, solves the two-variable subproblem
/// analytically, clips to the box, and updates the cached `K*beta` products.
/// Stops when the KKT gap falls below `tol`.
pub fn svr_fit(x: &Matrix, y: &[f64], cfg: &SvrFitConfig) -> Result<SvrModel> {
    let n = x.rows();
    if n < 2 {
        return Err(Error::config(format!("svr_fit needs at least 2 samples, got {n}")));
    }
    if y.len() != n {
        return Err(Error::shape(
            "svr_fit",
            format!("{} rows of features but {} targets", n, y.len()),
        ));
    }
    if cfg.c <= 0.0 || cfg.gamma <= 0.0 || cfg.epsilon < 0.0 {
        return Err(Error::config(format!(
            "svr_fit requires C > 0, gamma > 0, epsilon >= 0 (got C={}, gamma={}, epsilon={})",
            cfg.c, cfg.gamma, cfg.epsilon
        )));
    }

    let c = cfg.c;
    let eps = cfg.epsilon;
    // z[0..n] = alpha (p = +1), z[n..2n] = alpha* (p = -1); beta = alpha - alpha*.
    let mut z = vec![0.0f64; 2 * n];
    let mut k_beta = vec![0.0f64; n];
    let mut cache = RowCache::new(x, cfg.gamma);

    let slot_value = |m: usize, star: bool, k_beta: &[f64]| -> f64 {
        let f = y[m] - k_beta[m];
        if star {
            f + eps
        } else {
            f - eps
        }
    };

    let mut gap = f64::INFINITY;
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        // Maximal violating pair over the 2n slots.
        let mut best_up: Option<(usize, f64)> = None;
        let mut best_dn: Option<(usize, f64)> = None;
        for m in 0..n {
            let v_a = slot_value(m, false, &k_beta);
            let v_s = slot_value(m, true, &k_beta);
            // alpha slot: up if alpha < C, down if alpha > 0.
            if z[m] < c && best_up.is_none_or(|(_, bv)| v_a > bv) {
                best_up = Some((m, v_a));
            }
            if z[m] > 0.0 && best_dn.is_none_or(|(_, bv)| v_a < bv) {
                best_dn = Some((m, v_a));
            }
            // alpha* slot: up if alpha* > 0, down if alpha* < C.
            if z[n + m] > 0.0 && best_up.is_none_or(|(_, bv)| v_s > bv) {
                best_up = Some((n + m, v_s));
            }
            if z[n + m] < c && best_dn.is_none_or(|(_, bv)| v_s < bv) {
                best_dn = Some((n + m, v_s));
            }
        }
        let ((i, vi), (j, vj)) = match (best_up, best_dn) {
            (Some(a), Some(b)) => (a, b),
            _ => break,
        };
        gap = vi - vj;
        if gap <= cfg.tol {
            converged = true;
            break;
        }

        let (mi, star_i) = (i % n, i >= n);
        let (mj, star_j) = (j % n, j >= n);
        let p_i: f64 = if star_i { -1.0 } else { 1.0 };
        let p_j: f64 = if star_j { -1.0 } else { 1.0 };

        let k_ii = 1.0; // rbf(x, x) with any gamma
        let k_jj = 1.0;
        let k_ij = cache.row(mi)[mj];
        let quad = (k_ii + k_jj - 2.0 * k_ij).max(1e-12);

        // Gradient components of the two slots.
        let g_i = -p_i * vi;
        let g_j = -p_j * vj;

        let (dz_i, dz_j);
        if p_i != p_j {
            // Both move by the same delta.
            let delta_unclipped = -(g_i + g_j) / quad;
            let lo = (-z[i]).max(-z[j]);
            let hi = (c - z[i]).min(c - z[j]);
            let delta = delta_unclipped.clamp(lo, hi);
            dz_i = delta;
            dz_j = delta;
        } else {
            // Transfer: z_i grows by delta, z_j shrinks by delta.
            let delta_unclipped = -(g_i - g_j) / quad;
            let lo = (-z[i]).max(z[j] - c);
            let hi = (c - z[i]).min(z[j]);
            let delta = delta_unclipped.clamp(lo, hi);
            dz_i = delta;
            dz_j = -delta;
        }
        if dz_i == 0.0 && dz_j == 0.0 {
            // Numerically stuck pair; treat as converged at current gap.
            break;
        }
        z[i] = (z[i] + dz_i).clamp(0.0, c);
        z[j] = (z[j] + dz_j).clamp(0.0, c);

        let d_beta_i = p_i * dz_i;
        let d_beta_j = p_j * dz_j;
        if d_beta_i != 0.0 {
            let row = cache.row(mi);
            for (kb, &k) in k_beta.iter_mut().zip(row) {
                *kb += d_beta_i * k;
            }
        }
        if d_beta_j != 0.0 {
            let row = cache.row(mj);
            for (kb, &k) in k_beta.iter_mut().zip(row) {
                *kb += d_beta_j * k;
            }
        }
    }
    if !converged && gap > cfg.tol {
        return Err(Error::Convergence(format!(
            "svr_fit stopped after {} iterations with KKT gap {gap:.6e} > tol {:.1e}",
            cfg.max_iter, cfg.tol
        )));
    }

    // Bias from free multipliers, else from the feasible interval midpoint.
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for m in 0..n {
        let v_a = slot_value(m, false, &k_beta);
        let v_s = slot_value(m, true, &k_beta);
        if z[m] > 0.0 && z[m] < c {
            free_sum += v_a;
            free_count += 1;
        } else if z[m] == 0.0 {
            lower = lower.max(v_a);
        } else {
            upper = upper.min(v_a);
        }
        if z[n + m] > 0.0 && z[n + m] < c {
            free_sum += v_s;
            free_count += 1;
        } else if z[n + m] == 0.0 {
            upper = upper.min(v_s);
        } else {
            lower = lower.max(v_s);
        }
    }
    let bias = if free_count > 0 {
        free_sum / free_count as f64
    } else {
        let lo = if lower.is_finite() { lower } else { upper };
        let hi = if upper.is_finite() { upper } else { lower };
        0.5 * (lo + hi)
    };

    let mut support_indices = Vec::new();
    let mut dual = Vec::new();
    let mut sv_rows = Vec::new();
    for m in 0..n {
        let beta = z[m] - z[n + m];
        if beta != 0.0 {
            support_indices.push(m);
            dual.push(beta);
            sv_rows.push(x.row(m).to_vec());
        }
    }
    let support_vectors = Matrix::from_rows(&sv_rows).unwrap_or_else(|_| Matrix::zeros(0, x.cols()));

    Ok(SvrModel {
        support_vectors,
        dual_coeffs: dual,
        support_indices,
        bias,
        c,
        gamma: cfg.gamma,
        epsilon_tube: eps,
    })
}

/// Worst epsilon-insensitive KKT violation of a fitted model over its
/// training data. Zero (up to `tol`) certifies optimality.
pub fn svr_kkt_violation(model: &SvrModel, x: &Matrix, y: &[f64]) -> Result<f64> {
    let n = x.rows();
    let mut beta = vec![0.0; n];
    for (&idx, &b) in model.support_indices.iter().zip(&model.dual_coeffs) {
        beta[idx] = b;
    }
    let eps = model.epsilon_tube;
    let c = model.c;
    let bound_snap = 1e-9 * c.max(1.0);
    let mut worst = 0.0f64;
    for m in 0..n {
        let e = model.predict(x.row(m))? - y[m];
        let b = beta[m];
        let violation = if (b - c).abs() <= bound_snap {
            // beta = +C: requires y - f >= eps.
            (e + eps).max(0.0)
        } else if (b + c).abs() <= bound_snap {
            // beta = -C: requires f - y >= eps.
            (eps - e).max(0.0)
        } else if b > bound_snap {
            // free positive: y - f = eps.
            (e + eps).abs()
        } else if b < -bound_snap {
            // free negative: f - y = eps.
            (e - eps).abs()
        } else {
            // beta = 0: inside the tube.
            (e.abs() - eps).max(0.0)
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}

/// Dual objective value of a fitted model:
/// `-1/2 beta' K beta + y' beta - eps * sum |beta|`.
pub fn svr_dual_objective(model: &SvrModel, y: &[f64]) -> Result<f64> {
    let k = model.dual_coeffs.len();
    let mut quad = 0.0;
    for a in 0..k {
        for b in 0..k {
            quad += model.dual_coeffs[a]
                * model.dual_coeffs[b]
                * rbf_kernel(
                    model.support_vectors.row(a),
                    model.support_vectors.row(b),
                    model.gamma,
                )?;
        }
    }
    let mut linear = 0.0;
    let mut l1 = 0.0;
    for (sv, &beta) in model.support_indices.iter().zip(&model.dual_coeffs) {
        linear += y[*sv] * beta;
        l1 += beta.abs();
    }
    Ok(-0.5 * quad + linear - model.epsilon_tube * l1)
}
