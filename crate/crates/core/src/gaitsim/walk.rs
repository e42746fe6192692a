use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::rng;
use crate::error::{invalid_arg, Result};
use crate::walkline::WalkSample;

/// Walking kinematics. Lateral head sway follows the stride at
/// `stride_freq` with amplitude `oscillation_amp` in each direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaitParams {
    /// Forward speed (m/s).
    pub speed: f64,
    /// Stride frequency (Hz).
    pub stride_freq: f64,
    /// Lateral sway amplitude (m).
    pub oscillation_amp: f64,
    /// Sway phase at t = 0 (rad).
    pub phase: f64,
    /// White tracking noise on x (m).
    pub lateral_noise_sd: f64,
    /// Samples per second.
    pub sample_rate: f64,
    /// Forward position at t = 0 (m).
    pub start_y: f64,
}

impl Default for GaitParams {
    fn default() -> Self {
        Self {
            speed: 1.2,
            stride_freq: 1.0,
            oscillation_amp: 0.0125,
            phase: 0.0,
            lateral_noise_sd: 0.005,
            sample_rate: 60.0,
            start_y: 0.0,
        }
    }
}

impl GaitParams {
    /// Same gait without sway or tracking noise.
    pub fn noiseless(self) -> Self {
        Self { oscillation_amp: 0.0, lateral_noise_sd: 0.0, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.speed,
            self.stride_freq,
            self.oscillation_amp,
            self.phase,
            self.lateral_noise_sd,
            self.sample_rate,
            self.start_y,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(invalid_arg("gait parameters must be finite"));
        }
        if !(self.speed > 0.0 && self.stride_freq > 0.0 && self.sample_rate > 0.0) {
            return Err(invalid_arg("speed, stride frequency and sample rate must be positive"));
        }
        if !(0.0..=0.02).contains(&self.oscillation_amp) || self.lateral_noise_sd < 0.0 {
            return Err(invalid_arg("sway amplitude must lie in [0, 0.02] m, noise >= 0"));
        }
        Ok(())
    }
}

/// Lateral shift toward `target_x`: a reaction delay, a constant-rate ramp
/// that overshoots by `overshoot_fraction · |target_x|`, then exponential
/// settling onto the target, plus a slow sinusoidal wander.
///
/// The defaults are fitted values, not measurements: they were tuned so that
/// simulated accuracy and stabilizing-error rates across lane counts and
/// selection times keep the measured rank order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftPlan {
    pub reaction_time: f64,
    pub lateral_rate: f64,
    pub overshoot_fraction: f64,
    pub settle_time_constant: f64,
    pub target_x: f64,
    /// Slow lateral wander while holding the lane: amplitude (m), frequency
    /// (Hz) and phase (rad). Starts at the reaction time with zero offset.
    pub wander_amp: f64,
    pub wander_freq: f64,
    pub wander_phase: f64,
}

impl Default for ShiftPlan {
    fn default() -> Self {
        Self {
            reaction_time: 0.5,
            lateral_rate: 0.54,
            overshoot_fraction: 0.02,
            settle_time_constant: 0.65,
            target_x: 0.0,
            wander_amp: 0.021,
            wander_freq: 0.32,
            wander_phase: 0.0,
        }
    }
}

impl ShiftPlan {
    pub fn toward(self, target_x: f64) -> Self {
        Self { target_x, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.reaction_time >= 0.0
            && self.lateral_rate > 0.0
            && self.overshoot_fraction >= 0.0
            && self.settle_time_constant > 0.0
            && self.target_x.is_finite()
            && self.reaction_time.is_finite()
            && self.overshoot_fraction.is_finite()
            && self.settle_time_constant.is_finite()
            && self.lateral_rate.is_finite()
            && self.wander_amp >= 0.0
            && self.wander_amp.is_finite()
            && self.wander_freq > 0.0
            && self.wander_freq.is_finite()
            && self.wander_phase.is_finite())
        {
            return Err(invalid_arg("shift plan rates and times must be positive"));
        }
        Ok(())
    }

    /// Lateral position of the peak excursion.
    pub fn peak(&self) -> f64 {
        self.target_x * (1.0 + self.overshoot_fraction)
    }

    /// Intended lateral position at time `t` after the task was shown.
    pub fn offset(&self, t: f64) -> f64 {
        if t < self.reaction_time {
            return 0.0;
        }
        let s = t - self.reaction_time;
        let wander = self.wander_amp * ((TAU * self.wander_freq * s + self.wander_phase).sin() - self.wander_phase.sin());
        if self.target_x == 0.0 {
            return wander;
        }
        let peak = self.peak();
        let ramp = peak.abs() / self.lateral_rate;
        let shift = if s < ramp {
            peak.signum() * self.lateral_rate * s
        } else {
            self.target_x + (peak - self.target_x) * (-(s - ramp) / self.settle_time_constant).exp()
        };
        shift + wander
    }
}

/// Samples `x(t) = plan(t) + amp·sin(2πft + phase) + ε`, `y(t) = start_y + speed·t`
/// on a regular grid over `[0, duration]`.
pub fn gen_walk_trace(
    gait: &GaitParams,
    plan: &ShiftPlan,
    duration: f64,
    seed: u64,
) -> Result<Vec<WalkSample>> {
    gait.validate()?;
    plan.validate()?;
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(invalid_arg("duration must be positive"));
    }
    let mut rng = rng(seed);
    let noise = Normal::new(0.0, gait.lateral_noise_sd)
        .map_err(|e| invalid_arg(e.to_string()))?;
    let n = (duration * gait.sample_rate).floor() as usize;
    Ok((0..=n)
        .map(|k| {
            let t = k as f64 / gait.sample_rate;
            let sway = gait.oscillation_amp * (TAU * gait.stride_freq * t + gait.phase).sin();
            let eps = if gait.lateral_noise_sd > 0.0 { noise.sample(&mut rng) } else { 0.0 };
            WalkSample { t, x: plan.offset(t) + sway + eps, y: gait.start_y + gait.speed * t }
        })
        .collect())
}

/// Between-trial behavioural spread applied on top of a base gait and plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShiftVariability {
    /// Walking speed drawn uniformly from this range (m/s).
    pub speed_range: (f64, f64),
    /// Sway amplitude drawn uniformly from this range; scaled by the base
    /// amplitude relative to its default so a zero base disables sway.
    pub amp_range: (f64, f64),
    /// Forward distance walked before the task appears: centre and
    /// half-width of a uniform draw (m).
    pub start_offset: (f64, f64),
    /// Lateral aiming error around the lane centre (m).
    pub aim_sd: f64,
    /// Spread of the overshoot fraction.
    pub overshoot_sd: f64,
    /// Log-normal spread of the lateral rate.
    pub rate_log_sd: f64,
    /// Spread of the reaction time (s).
    pub reaction_sd: f64,
    /// Log-normal spread of the settling time constant.
    pub settle_log_sd: f64,
    /// Wander amplitude drawn uniformly from `base · [1 - spread, 1 + spread]`.
    pub wander_spread: f64,
    /// Log-normal spread of the wander frequency.
    pub wander_freq_log_sd: f64,
}

impl Default for ShiftVariability {
    fn default() -> Self {
        Self {
            speed_range: (1.0, 1.5),
            amp_range: (0.010, 0.015),
            start_offset: (2.0, 0.5),
            aim_sd: 0.0115,
            overshoot_sd: 0.02,
            rate_log_sd: 0.78,
            reaction_sd: 0.1,
            settle_log_sd: 0.3,
            wander_spread: 1.0,
            wander_freq_log_sd: 0.3,
        }
    }
}

impl ShiftVariability {
    /// No between-trial spread: mid-range speed and start offset.
    pub fn none() -> Self {
        Self {
            speed_range: (1.2, 1.2),
            amp_range: (0.0125, 0.0125),
            start_offset: (2.0, 0.0),
            aim_sd: 0.0,
            overshoot_sd: 0.0,
            rate_log_sd: 0.0,
            reaction_sd: 0.0,
            settle_log_sd: 0.0,
            wander_spread: 0.0,
            wander_freq_log_sd: 0.0,
        }
    }
}

/// One simulated shift trial. The trace starts when the task is shown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkTrial {
    pub gait: GaitParams,
    pub plan: ShiftPlan,
    pub trace: Vec<WalkSample>,
    pub task_shown_at: f64,
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn gauss(rng: &mut impl Rng, sd: f64) -> f64 {
    if sd > 0.0 {
        Normal::new(0.0, sd).map_or(0.0, |n| n.sample(rng))
    } else {
        0.0
    }
}

/// Draws per-trial gait and plan around the base values and generates the
/// trace toward `target_x`. Starts at the randomised offset along the track
/// and runs for `duration` seconds.
pub fn sample_walk_trial(
    gait: &GaitParams,
    plan: &ShiftPlan,
    variability: &ShiftVariability,
    target_x: f64,
    duration: f64,
    seed: u64,
) -> Result<WalkTrial> {
    gait.validate()?;
    plan.validate()?;
    let mut r = rng(seed);
    let quiet = variability == &ShiftVariability::none();
    let base_amp = GaitParams::default().oscillation_amp;
    let g = GaitParams {
        speed: uniform(&mut r, variability.speed_range),
        oscillation_amp: uniform(&mut r, variability.amp_range) * gait.oscillation_amp / base_amp,
        phase: if quiet {
            gait.phase
        } else {
            r.random_range(0.0..TAU)
        },
        start_y: variability.start_offset.0
            + uniform(&mut r, (-variability.start_offset.1, variability.start_offset.1)),
        ..*gait
    };
    let p = ShiftPlan {
        reaction_time: (plan.reaction_time + gauss(&mut r, variability.reaction_sd)).max(0.1),
        lateral_rate: plan.lateral_rate * gauss(&mut r, variability.rate_log_sd).exp(),
        overshoot_fraction: (plan.overshoot_fraction + gauss(&mut r, variability.overshoot_sd))
            .max(0.0),
        settle_time_constant: plan.settle_time_constant
            * gauss(&mut r, variability.settle_log_sd).exp(),
        target_x: target_x + gauss(&mut r, variability.aim_sd),
        wander_amp: plan.wander_amp
            * uniform(&mut r, (1.0 - variability.wander_spread, 1.0 + variability.wander_spread)).max(0.0),
        wander_freq: plan.wander_freq * gauss(&mut r, variability.wander_freq_log_sd).exp(),
        wander_phase: if quiet { plan.wander_phase } else { r.random_range(0.0..TAU) },
    };
    let trace = gen_walk_trace(&g, &p, duration, r.random())?;
    Ok(WalkTrial { gait: g, plan: p, trace, task_shown_at: 0.0 })
}
