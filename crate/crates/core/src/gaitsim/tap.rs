use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng;
use crate::error::{invalid_arg, Result};
use crate::foottap::{chi2_quantile_2dof, Cell, FootGrid, Point2, TapSample};

/// Isotropic σ whose 95% probability ellipse has the given area (m²).
pub fn sigma_from_area(area: f64) -> f64 {
    (area / (std::f64::consts::PI * chi2_quantile_2dof(0.95))).sqrt()
}

/// Isotropic tap scatter per target row, innermost first. Rows beyond the
/// last entry reuse it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TapScatterParams {
    pub sigma_by_row: Vec<f64>,
}

impl Default for TapScatterParams {
    fn default() -> Self {
        // 95% ellipse areas of taps aimed at rows 1, 2 and 3
        Self { sigma_by_row: [0.005, 0.008, 0.0454].map(sigma_from_area).to_vec() }
    }
}

impl TapScatterParams {
    pub fn sigma(&self, row: u32) -> f64 {
        let i = (row.max(1) as usize - 1).min(self.sigma_by_row.len().saturating_sub(1));
        self.sigma_by_row.get(i).copied().unwrap_or(0.0)
    }

    /// Every row scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { sigma_by_row: self.sigma_by_row.iter().map(|s| s * factor).collect() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma_by_row.is_empty()
            || self.sigma_by_row.iter().any(|s| !(s.is_finite() && *s >= 0.0))
        {
            return Err(invalid_arg("tap scatter needs finite non-negative sigmas"));
        }
        if self.sigma_by_row.windows(2).any(|w| w[1] < w[0]) {
            return Err(invalid_arg("tap scatter must not shrink with row"));
        }
        Ok(())
    }
}

/// A tap aimed at `target`: Gaussian around the cell's polar centre with the
/// row's σ on each world axis.
pub fn gen_tap(
    grid: &FootGrid,
    target: Cell,
    scatter: &TapScatterParams,
    seed: u64,
) -> Result<TapSample> {
    scatter.validate()?;
    if !grid.contains_cell(target) {
        return Err(invalid_arg(format!("{target} is not on the grid")));
    }
    let c = grid.centroid(target);
    let sigma = scatter.sigma(target.row);
    let point = if sigma > 0.0 {
        let n = Normal::new(0.0, sigma).map_err(|e| invalid_arg(e.to_string()))?;
        let mut r = rng(seed);
        Point2::new(c.x + n.sample(&mut r), c.y + n.sample(&mut r))
    } else {
        c
    };
    Ok(TapSample { point, label: Some(target) })
}
