//! Walk-the-Line: lateral lanes along the walking path, selected by
//! walking on one of them for a fixed selection time.

mod lanes;
mod scoring;
mod selector;

pub use lanes::{build_lanes, lane_at, LaneLayout, Track};
pub use scoring::{score_trial, ErrorKind, WalkTrialMetrics};
pub use selector::{
    selector_step, FailureReason, SelectorConfig, SelectorEvent, SelectorResult, SelectorState,
    TIME_EPSILON,
};

use serde::{Deserialize, Serialize};

/// One tracked head position: `x` lateral (right positive), `y` along the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
}
