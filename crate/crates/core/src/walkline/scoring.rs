use serde::{Deserialize, Serialize};

use super::lanes::{LaneLayout, Track};
use super::selector::{
    selector_step, FailureReason, SelectorConfig, SelectorResult, SelectorState,
};
use super::WalkSample;
use crate::error::{invalid_arg, invalid_data, Result};

/// Direction in which the target lane was left after first reaching it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Kept moving in the direction of the initial lateral shift.
    Overshoot,
    /// Fell back toward the walking path.
    SwingBack,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkTrialMetrics {
    pub success: bool,
    pub selected_lane: Option<i32>,
    /// Activation time minus selection time, measured from task display.
    pub tct: f64,
    /// Path length walked during the TCT window.
    pub walked_distance: f64,
    /// Forward displacement during the same window.
    pub longitudinal_distance: f64,
    pub stabilizing_error: bool,
    pub error_kind: Option<ErrorKind>,
    pub failure_reason: Option<FailureReason>,
    pub activation_time: Option<f64>,
}

fn position_at(trace: &[WalkSample], t: f64) -> (f64, f64) {
    let idx = trace.partition_point(|s| s.t <= t);
    if idx == 0 {
        return (trace[0].x, trace[0].y);
    }
    if idx == trace.len() {
        let s = trace[idx - 1];
        return (s.x, s.y);
    }
    let (a, b) = (trace[idx - 1], trace[idx]);
    if b.t == a.t {
        return (b.x, b.y);
    }
    let f = (t - a.t) / (b.t - a.t);
    (a.x + f * (b.x - a.x), a.y + f * (b.y - a.y))
}

/// Path length of the trace between `start` and `end`, interpolating the
/// end points linearly.
fn arc_length(trace: &[WalkSample], start: f64, end: f64) -> f64 {
    if end <= start {
        return 0.0;
    }
    let mut points = vec![position_at(trace, start)];
    points.extend(
        trace
            .iter()
            .filter(|s| s.t > start && s.t < end)
            .map(|s| (s.x, s.y)),
    );
    points.push(position_at(trace, end));
    points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0).hypot(w[1].1 - w[0].1))
        .sum()
}

/// Replays a trace through the selector and scores it against `target`.
///
/// Samples before `task_shown_at` are ignored. The trial ends at the first
/// selection, at the end of the track, or when the trace runs out (counted
/// as reaching the end of the track).
pub fn score_trial(
    trace: &[WalkSample],
    target: i32,
    config: &SelectorConfig,
    layout: &LaneLayout,
    task_shown_at: f64,
) -> Result<WalkTrialMetrics> {
    let first = trace.first().ok_or_else(|| invalid_data("empty trace"))?;
    if first.t > task_shown_at {
        return Err(invalid_arg("trace starts after the task was shown"));
    }
    if target == 0 || !layout.contains_lane(target) {
        return Err(invalid_arg(format!("target lane {target} is not an option lane")));
    }
    let direction = target.signum() as f64;
    let target_center = layout.center(target);

    let mut state = SelectorState::new();
    let mut prev_t = task_shown_at;
    let mut error_kind = None;
    let mut end_t = trace.last().map_or(task_shown_at, |s| s.t);

    for &sample in trace.iter().filter(|s| s.t >= task_shown_at) {
        let (next, _) = selector_step(&state, config, layout, sample, prev_t)?;
        prev_t = sample.t;
        let left_target = state.current == Some(Track::Lane(target))
            && next.current != Some(Track::Lane(target));
        if left_target && error_kind.is_none() {
            error_kind = Some(if (sample.x - target_center) * direction > 0.0 {
                ErrorKind::Overshoot
            } else {
                ErrorKind::SwingBack
            });
        }
        state = next;
        if state.is_finished() {
            end_t = sample.t;
            break;
        }
    }

    let result = state
        .result
        .unwrap_or(SelectorResult::Failed(FailureReason::EndOfTrack));
    let (success, selected_lane, failure_reason, activation_time, tct) = match result {
        SelectorResult::Selected(k) => {
            let tct = (end_t - task_shown_at) - config.selection_time;
            let failure = (k != target).then_some(FailureReason::WrongLane);
            (k == target, Some(k), failure, Some(end_t), tct.max(0.0))
        }
        SelectorResult::Failed(reason) => (false, None, Some(reason), None, end_t - task_shown_at),
    };
    let window_end = task_shown_at + tct;
    let walked_distance = arc_length(trace, task_shown_at, window_end);
    let longitudinal_distance =
        position_at(trace, window_end).1 - position_at(trace, task_shown_at).1;

    Ok(WalkTrialMetrics {
        success,
        selected_lane,
        tct,
        walked_distance,
        longitudinal_distance,
        stabilizing_error: error_kind.is_some(),
        error_kind,
        failure_reason,
        activation_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walkline::build_lanes;

    fn sampled(f: impl Fn(f64) -> f64, duration: f64, speed: f64) -> Vec<WalkSample> {
        let n = (duration * 60.0).round() as usize;
        (0..=n)
            .map(|k| {
                let t = k as f64 / 60.0;
                WalkSample { t, x: f(t), y: speed * t }
            })
            .collect()
    }

    #[test]
    fn straight_ahead_never_selects() {
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(2.0 / 3.0).unwrap();
        let trace = sampled(|_| 0.0, 18.0, 1.2);
        let m = score_trial(&trace, 2, &cfg, &layout, 0.0).unwrap();
        assert!(!m.success);
        assert_eq!(m.failure_reason, Some(FailureReason::EndOfTrack));
        assert!(!m.stabilizing_error);
        assert_eq!(m.selected_lane, None);
    }

    #[test]
    fn overshoot_then_reentry() {
        // target +2 of 8 lanes: [0.1667, 0.2778); lane +3 beyond it
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(2.0 / 3.0).unwrap();
        let f = |t: f64| {
            if t < 1.5 {
                0.05
            } else if t < 1.9 {
                0.22
            } else if t < 2.3 {
                0.30
            } else {
                0.22
            }
        };
        let trace = sampled(f, 6.0, 1.2);
        let m = score_trial(&trace, 2, &cfg, &layout, 0.0).unwrap();
        assert!(m.success);
        assert_eq!(m.error_kind, Some(ErrorKind::Overshoot));
        // re-entry at the first sample >= 2.3 s; activation 40 samples later
        let reentry = (2.3f64 * 60.0).ceil() / 60.0;
        let activation = m.activation_time.unwrap();
        assert!((activation - (reentry + 40.0 / 60.0)).abs() < 1e-9);
        assert!((m.tct - (activation - 2.0 / 3.0)).abs() < 1e-12);
        assert!((m.tct - reentry).abs() < 1e-9);
    }

    #[test]
    fn swing_back_detected() {
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(1.0).unwrap();
        let f = |t: f64| if (1.0..1.4).contains(&t) { -0.25 } else if (1.4..1.7).contains(&t) { -0.15 } else if t >= 1.7 { -0.24 } else { 0.0 };
        let trace = sampled(f, 6.0, 1.2);
        let m = score_trial(&trace, -2, &cfg, &layout, 0.0).unwrap();
        assert!(m.success);
        assert_eq!(m.error_kind, Some(ErrorKind::SwingBack));
    }

    #[test]
    fn wrong_lane_fails() {
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(1.0 / 3.0).unwrap();
        let trace = sampled(|t| if t > 0.5 { 0.12 } else { 0.0 }, 5.0, 1.2);
        let m = score_trial(&trace, 3, &cfg, &layout, 0.0).unwrap();
        assert!(!m.success);
        assert_eq!(m.selected_lane, Some(1));
        assert_eq!(m.failure_reason, Some(FailureReason::WrongLane));
    }

    #[test]
    fn walked_distance_matches_straight_walk() {
        // jump onto the target at once: arc length of the TCT window is the
        // forward distance walked plus the single lateral step
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(1.0 / 3.0).unwrap();
        let trace = sampled(|t| if t >= 1.5 { 0.2222 } else { 0.0 }, 5.0, 1.2);
        let m = score_trial(&trace, 2, &cfg, &layout, 0.0).unwrap();
        assert!(m.success);
        assert!((m.tct - 1.5).abs() < 1e-9);
        assert!((m.longitudinal_distance - 1.8).abs() < 1e-9);
        assert!(m.walked_distance >= 1.8 && m.walked_distance < 1.8 + 0.23);
    }

    #[test]
    fn empty_and_late_traces_rejected() {
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(1.0).unwrap();
        assert!(score_trial(&[], 1, &cfg, &layout, 0.0).is_err());
        let trace = sampled(|_| 0.0, 1.0, 1.2);
        assert!(score_trial(&trace, 1, &cfg, &layout, -1.0).is_err());
        assert!(score_trial(&trace, 0, &cfg, &layout, 0.0).is_err());
    }

    #[test]
    fn time_shift_preserves_tct() {
        let layout = build_lanes(12, 1.0, 20.0).unwrap();
        let cfg = SelectorConfig::new(2.0 / 3.0).unwrap();
        let f = |t: f64| (0.3 * (t - 0.5).max(0.0)).min(0.23) + 0.01 * (6.0 * t).sin();
        let trace = sampled(f, 8.0, 1.2);
        let shift = 12.345;
        let shifted: Vec<_> = trace.iter().map(|s| WalkSample { t: s.t + shift, ..*s }).collect();
        let a = score_trial(&trace, 3, &cfg, &layout, 0.0).unwrap();
        let b = score_trial(&shifted, 3, &cfg, &layout, shift).unwrap();
        assert_eq!(a.success, b.success);
        assert!((a.tct - b.tct).abs() < 1e-9);
        assert!((b.activation_time.unwrap() - a.activation_time.unwrap() - shift).abs() < 1e-9);
    }
}
