//! Radial-kernel support vector machines trained with SMO.
//!
//! Binary problems are solved in the dual with second-order working-set
//! selection; multi-class prediction is one-vs-rest over the decision values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constraint.
    pub c: f64,
    /// Kernel width `gamma` in `exp(-gamma * |a - b|²)`. `None` picks
    /// `1 / (2 · median²)` of the pairwise training distances.
    pub gamma: Option<f64>,
    /// KKT violation tolerance.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            gamma: None,
            tolerance: 1e-3,
            max_iterations: 100_000,
        }
    }
}

pub(crate) fn rbf(gamma: f64, a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (a[0] - b[0], a[1] - b[1]);
    (-gamma * (dx * dx + dy * dy)).exp()
}

/// Median heuristic for the kernel width.
pub fn median_gamma(points: &[[f64; 2]]) -> Result<f64> {
    let mut dists = Vec::with_capacity(points.len() * points.len().saturating_sub(1) / 2);
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            dists.push((a[0] - b[0]).hypot(a[1] - b[1]));
        }
    }
    if dists.is_empty() {
        return Err(Error::TrainingFailure("need at least two points".into()));
    }
    let mid = dists.len() / 2;
    let (_, median, _) = dists.select_nth_unstable_by(mid, |a, b| a.total_cmp(b));
    let median = *median;
    if !(median > 0.0) {
        return Err(Error::TrainingFailure(
            "median pairwise distance is zero; points are degenerate".into(),
        ));
    }
    Ok(1.0 / (2.0 * median * median))
}

/// Solution of one binary dual problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct BinaryModel {
    /// `alpha_i * y_i` for every training point (zero for non-support vectors).
    pub coef: Vec<f64>,
    pub rho: f64,
}

/// Solves the binary C-SVM dual for labels `y ∈ {-1, +1}` over a precomputed
/// kernel matrix (row-major, `n × n`).
pub(crate) fn solve_binary(
    kernel: &[f64],
    y: &[f64],
    c: f64,
    tolerance: f64,
    max_iterations: usize,
) -> BinaryModel {
    let n = y.len();
    let k = |i: usize, j: usize| kernel[i * n + j];
    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα at α = 0
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    for _ in 0..max_iterations {
        // i: maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut i_sel = None;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let in_up = if y[t] > 0.0 { !upper(alpha[t]) } else { !lower(alpha[t]) };
            if in_up && v >= gmax {
                gmax = v;
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else { break };

        // j: second-order choice in I_low
        let mut gmax2 = f64::NEG_INFINITY;
        let mut obj_min = f64::INFINITY;
        let mut j_sel = None;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { !lower(alpha[t]) } else { !upper(alpha[t]) };
            if !in_low {
                continue;
            }
            let v = y[t] * grad[t];
            if v >= gmax2 {
                gmax2 = v;
            }
            let grad_diff = gmax + v;
            if grad_diff > 0.0 {
                let quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
                let quad = if quad > 0.0 { quad } else { TAU };
                let obj = -(grad_diff * grad_diff) / quad;
                if obj <= obj_min {
                    obj_min = obj;
                    j_sel = Some(t);
                }
            }
        }
        let j = match j_sel {
            Some(j) if gmax + gmax2 >= tolerance => j,
            _ => break,
        };

        let qij = y[i] * y[j] * k(i, j);
        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = k(i, i) + k(j, j) + 2.0 * qij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = k(i, i) + k(j, j) - 2.0 * qij;
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += y[t] * (y[i] * k(i, t) * di + y[j] * k(j, t) * dj);
        }
    }

    // bias from free vectors, else the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        0.5 * (ub + lb)
    };
    BinaryModel {
        coef: alpha.iter().zip(y).map(|(a, yy)| a * yy).collect(),
        rho,
    }
}

/// Multi-class one-vs-rest radial-kernel classifier over 2-D points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelClassifier<L> {
    classes: Vec<L>,
    gamma: f64,
    c: f64,
    support: Vec<[f64; 2]>,
    models: Vec<BinaryModel>,
}

impl<L: Clone + Ord> KernelClassifier<L> {
    pub fn fit(points: &[[f64; 2]], labels: &[L], params: &SvmParams) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::TrainingFailure("points and labels differ in length".into()));
        }
        if !(params.c > 0.0) {
            return Err(Error::TrainingFailure("C must be positive".into()));
        }
        let mut classes: Vec<L> = labels.to_vec();
        classes.sort();
        classes.dedup();
        if classes.len() < 2 {
            return Err(Error::TrainingFailure("need at least two classes".into()));
        }
        let gamma = match params.gamma {
            Some(g) if g > 0.0 => g,
            Some(_) => return Err(Error::TrainingFailure("gamma must be positive".into())),
            None => median_gamma(points)?,
        };

        let n = points.len();
        let mut kernel = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = rbf(gamma, points[i], points[j]);
                kernel[i * n + j] = v;
                kernel[j * n + i] = v;
            }
        }

        let mut models: Vec<BinaryModel> = classes
            .iter()
            .map(|class| {
                let y: Vec<f64> = labels
                    .iter()
                    .map(|l| if l == class { 1.0 } else { -1.0 })
                    .collect();
                solve_binary(&kernel, &y, params.c, params.tolerance, params.max_iterations)
            })
            .collect();

        // keep only points that support at least one model
        let keep: Vec<usize> = (0..n)
            .filter(|&i| models.iter().any(|m| m.coef[i] != 0.0))
            .collect();
        let support = keep.iter().map(|&i| points[i]).collect();
        for m in &mut models {
            m.coef = keep.iter().map(|&i| m.coef[i]).collect();
        }
        Ok(Self {
            classes,
            gamma,
            c: params.c,
            support,
            models,
        })
    }

    pub fn classes(&self) -> &[L] {
        &self.classes
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_support(&self) -> usize {
        self.support.len()
    }

    /// One decision value per class, in `classes()` order.
    pub fn decision_values(&self, p: [f64; 2]) -> Vec<f64> {
        let kernel_row: Vec<f64> = self.support.iter().map(|&s| rbf(self.gamma, s, p)).collect();
        self.models
            .iter()
            .map(|m| {
                m.coef
                    .iter()
                    .zip(&kernel_row)
                    .map(|(c, k)| c * k)
                    .sum::<f64>()
                    - m.rho
            })
            .collect()
    }

    /// Class with the largest decision value; ties go to the earlier class.
    pub fn predict(&self, p: [f64; 2]) -> L {
        let values = self.decision_values(p);
        let mut best = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best] {
                best = i;
            }
        }
        self.classes[best].clone()
    }
}
