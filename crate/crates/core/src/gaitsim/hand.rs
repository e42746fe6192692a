use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng;
use crate::error::{invalid_arg, Result};
use crate::proximity::{zone_of, DistanceSample, InteractionBounds, Zone, HOLD_WINDOW};

/// Per-zone reach behaviour, indexed near, medium, far (m).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HandReachParams {
    pub overshoot_mean: [f64; 3],
    pub overshoot_sd: [f64; 3],
    /// Mean drift magnitude over the hold window.
    pub holding_mean: [f64; 3],
    pub holding_sd: [f64; 3],
    pub sample_rate: f64,
    /// Pause between returning to the target and confirming (s).
    pub settle_time: f64,
}

impl Default for HandReachParams {
    fn default() -> Self {
        Self {
            overshoot_mean: [0.044, 0.021, 0.016],
            overshoot_sd: [0.017, 0.010, 0.007],
            holding_mean: [0.011, 0.010, 0.016],
            holding_sd: [0.011, 0.009, 0.018],
            sample_rate: 100.0,
            settle_time: 0.3,
        }
    }
}

impl HandReachParams {
    /// Reaches that stop exactly on target and hold still.
    pub fn ideal() -> Self {
        Self {
            overshoot_mean: [0.0; 3],
            overshoot_sd: [0.0; 3],
            holding_mean: [0.0; 3],
            holding_sd: [0.0; 3],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = self
            .overshoot_mean
            .iter()
            .chain(&self.overshoot_sd)
            .chain(&self.holding_mean)
            .chain(&self.holding_sd)
            .chain([&self.settle_time]);
        if all.into_iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(self.sample_rate > 0.0) {
            return Err(invalid_arg("reach parameters must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandTrace {
    pub samples: Vec<DistanceSample>,
    pub confirm_time: f64,
    /// Zone of the travel distance that drew the overshoot.
    pub zone: Zone,
    /// Sampled excursion past the target (m).
    pub overshoot: f64,
}

/// Minimum-jerk interpolation between `a` and `b` at phase `u ∈ [0, 1]`.
fn min_jerk(a: f64, b: f64, u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    a + (b - a) * u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

fn draw(rng: &mut impl Rng, mean: f64, sd: f64) -> f64 {
    let v = if sd > 0.0 {
        Normal::new(mean, sd).map_or(mean, |n| n.sample(rng))
    } else {
        mean
    };
    v.max(0.0)
}

/// Hand distance over a reach from `start` to `target`: a minimum-jerk
/// movement past the target by a zone-dependent overshoot, a minimum-jerk
/// return, a short settle, confirmation, and a linearly drifting hold.
pub fn gen_hand_trace(
    bounds: &InteractionBounds,
    start: f64,
    target: f64,
    reach: &HandReachParams,
    seed: u64,
) -> Result<HandTrace> {
    reach.validate()?;
    let range = bounds.min_distance..=bounds.max_distance;
    if !range.contains(&start) || !range.contains(&target) || start == target {
        return Err(invalid_arg("start and target must be distinct and within bounds"));
    }
    let zone = zone_of(bounds, start, target)
        .ok_or_else(|| invalid_arg("target outside the interaction bounds"))?;
    let z = zone.index();
    let mut r = rng(seed);
    let dir = (target - start).signum();
    let overshoot = draw(&mut r, reach.overshoot_mean[z], reach.overshoot_sd[z]);
    let drift = draw(&mut r, reach.holding_mean[z], reach.holding_sd[z])
        * if r.random::<bool>() { 1.0 } else { -1.0 };

    let apex = target + dir * overshoot;
    let t_out = 0.3 + 2.0 * (apex - start).abs();
    let t_back = if overshoot > 0.0 { 0.25 + 2.0 * overshoot } else { 0.0 };
    let confirm_time = t_out + t_back + reach.settle_time;
    let end = confirm_time + HOLD_WINDOW + 0.1;

    let n = (end * reach.sample_rate).ceil() as usize;
    let samples = (0..=n)
        .map(|k| {
            let t = k as f64 / reach.sample_rate;
            let d = if t < t_out {
                min_jerk(start, apex, t / t_out)
            } else if t < t_out + t_back {
                min_jerk(apex, target, (t - t_out) / t_back)
            } else if t <= confirm_time {
                target
            } else {
                target + drift * ((t - confirm_time) / HOLD_WINDOW).min(1.0)
            };
            DistanceSample { t, d }
        })
        .collect();
    Ok(HandTrace { samples, confirm_time, zone, overshoot })
}
