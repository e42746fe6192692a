use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, invalid_data, Result};

/// Range of hand distances a user actually produced, used to normalise
/// their distances to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersonalSpace {
    pub observed_min: f64,
    pub observed_max: f64,
}

impl PersonalSpace {
    pub fn new(observed_min: f64, observed_max: f64) -> Result<Self> {
        if !(observed_min.is_finite() && observed_max.is_finite()) || observed_min >= observed_max {
            return Err(invalid_arg(format!(
                "personal space needs min < max, got [{observed_min}, {observed_max}]"
            )));
        }
        Ok(Self {
            observed_min,
            observed_max,
        })
    }

    /// Personal space spanned by a set of raw distance observations.
    pub fn from_observations(distances: &[f64]) -> Result<Self> {
        let (lo, hi) = distances
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| {
                (lo.min(d), hi.max(d))
            });
        Self::new(lo, hi)
    }

    pub fn normalize(&self, distance: f64) -> f64 {
        (distance - self.observed_min) / (self.observed_max - self.observed_min)
    }

    pub fn denormalize(&self, normalized: f64) -> f64 {
        self.observed_min + normalized * (self.observed_max - self.observed_min)
    }
}

/// Per-user nearest-mean classifier over normalised distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLayerModel {
    class_means: Vec<f64>,
    decision_boundaries: Vec<f64>,
}

impl DiscreteLayerModel {
    pub fn class_means(&self) -> &[f64] {
        &self.class_means
    }

    pub fn decision_boundaries(&self) -> &[f64] {
        &self.decision_boundaries
    }

    pub fn n_layers(&self) -> usize {
        self.class_means.len()
    }
}

/// Fits class means from `(layer, normalized distance)` samples. Layers are
/// `0..=max_label`; every one of them needs a sample and the means must rise
/// with the layer index.
pub fn fit_discrete_model(labeled_samples: &[(usize, f64)]) -> Result<DiscreteLayerModel> {
    let n_layers = labeled_samples
        .iter()
        .map(|&(l, _)| l + 1)
        .max()
        .ok_or_else(|| invalid_data("no samples"))?;
    let mut sums = vec![0.0; n_layers];
    let mut counts = vec![0usize; n_layers];
    for &(layer, d) in labeled_samples {
        if !d.is_finite() {
            return Err(invalid_data("non-finite distance"));
        }
        sums[layer] += d;
        counts[layer] += 1;
    }
    if let Some(missing) = counts.iter().position(|&c| c == 0) {
        return Err(invalid_data(format!("no samples for layer {missing}")));
    }
    let class_means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    if class_means.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid_data("layer means are not strictly increasing"));
    }
    let decision_boundaries = class_means
        .windows(2)
        .map(|w| 0.5 * (w[0] + w[1]))
        .collect();
    Ok(DiscreteLayerModel {
        class_means,
        decision_boundaries,
    })
}

/// Layer whose interval contains the distance. A distance exactly on a
/// boundary goes to the lower layer.
pub fn classify_discrete(model: &DiscreteLayerModel, normalized_distance: f64) -> usize {
    model
        .decision_boundaries
        .partition_point(|&b| b < normalized_distance)
}
