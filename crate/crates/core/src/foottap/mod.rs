//! Foot taps on a semicircular grid anchored to the dominant foot.
//!
//! Direct interfaces hit-test taps against the visible cells. Indirect
//! interfaces have no visible targets, so taps are classified with
//! radial-kernel SVMs and evaluated by repeated stratified cross-validation.
//! Scatter and overlap are described with 95% probability ellipses.

mod classify;
mod ellipse;
mod grid;
mod svm;

pub use classify::{accuracy, evaluate_cv, train_classifier, TapClassifier};
pub use ellipse::{
    adjacent_overlaps, chi2_quantile_2dof, ellipse_overlap, probability_ellipse, AxisOverlap,
    ProbabilityEllipse,
};
pub use grid::{build_grid, hit_test, Cell, CellBounds, FootGrid, Point2, INNER_RADIUS, ROW_HEIGHT};
pub use svm::{median_gamma, KernelClassifier, SvmParams};

use serde::{Deserialize, Serialize};

/// A tap position relative to the participant, with the intended cell when known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TapSample {
    pub point: Point2,
    pub label: Option<Cell>,
}

/// One line of a tap dataset file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TapRecord {
    pub x: f64,
    pub y: f64,
    pub row: u32,
    pub col: u32,
    pub condition: String,
    pub participant: String,
    pub t: f64,
}

impl TapRecord {
    pub fn sample(&self) -> TapSample {
        TapSample {
            point: Point2::new(self.x, self.y),
            label: Some(Cell::new(self.row, self.col)),
        }
    }
}
