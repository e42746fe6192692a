use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, invalid_data, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sensor {
    S1,
    S2,
}

/// One sample from the two wrist-mounted IR distance sensors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    pub s1: f64,
    pub s2: f64,
    /// Whether the body is inside the first sensor's field of view.
    pub s1_sees_body: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionParams {
    /// Process noise added per step (m²).
    pub process_var: f64,
    /// Measurement noise of a single sensor (m²).
    pub measurement_var: f64,
}

impl Default for FusionParams {
    fn default() -> Self {
        Self {
            process_var: 1e-5,
            measurement_var: 4e-4,
        }
    }
}

/// Filtered distance estimate of a 1-D constant-position Kalman filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorState {
    pub estimate: f64,
    pub variance: f64,
    pub active_sensor: Sensor,
}

impl SensorState {
    pub fn new(estimate: f64, variance: f64) -> Result<Self> {
        if !estimate.is_finite() || !(variance > 0.0 && variance.is_finite()) {
            return Err(invalid_arg("estimate must be finite and variance positive"));
        }
        Ok(Self {
            estimate,
            variance,
            active_sensor: Sensor::S1,
        })
    }

    /// Starts the filter at the first reading with one measurement's variance.
    pub fn from_first_reading(reading: SensorReading, params: FusionParams) -> Result<Self> {
        let (z, sensor) = select(reading)?;
        Ok(Self {
            estimate: z,
            variance: params.measurement_var,
            active_sensor: sensor,
        })
    }
}

fn select(reading: SensorReading) -> Result<(f64, Sensor)> {
    if !(reading.s1.is_finite() && reading.s2.is_finite()) {
        return Err(invalid_data("non-finite sensor reading"));
    }
    Ok(if reading.s1_sees_body {
        (reading.s1, Sensor::S1)
    } else {
        (reading.s2, Sensor::S2)
    })
}

/// Handover plus one predict/update cycle. Sensor 1 is trusted while it sees
/// the body, otherwise sensor 2 supplies the measurement.
pub fn fuse_step(
    state: SensorState,
    reading: SensorReading,
    params: FusionParams,
) -> Result<SensorState> {
    if !(params.process_var > 0.0 && params.measurement_var > 0.0) {
        return Err(invalid_arg("process and measurement variance must be positive"));
    }
    let (z, sensor) = select(reading)?;

    let predicted_var = state.variance + params.process_var;
    let gain = predicted_var / (predicted_var + params.measurement_var);
    Ok(SensorState {
        estimate: state.estimate + gain * (z - state.estimate),
        variance: (1.0 - gain) * predicted_var,
        active_sensor: sensor,
    })
}
