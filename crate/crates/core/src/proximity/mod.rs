//! One-handed layered information space.
//!
//! The hand-reach axis (eye-to-hand distance) is cut into parallel layers.
//! This module partitions that axis, normalises it per user, classifies
//! discrete layer choices, scores hand trials and fuses the two IR distance
//! sensors of the wrist prototype.

mod discrete;
mod fusion;
mod layers;
mod metrics;

pub use discrete::{classify_discrete, fit_discrete_model, DiscreteLayerModel, PersonalSpace};
pub use fusion::{fuse_step, FusionParams, Sensor, SensorReading, SensorState};
pub use layers::{
    locate, partition_guideline, partition_uniform, zone_of, InteractionBounds, LayerSet,
    Location, Zone, GUIDELINE_THICKNESS, MIN_DISTANCE,
};
pub use metrics::{hand_trial_metrics, DistanceSample, HandTrialMetrics, HOLD_WINDOW};
