use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, invalid_data, Error, Result};

/// Default duration the hand is held still after confirming a target.
pub const HOLD_WINDOW: f64 = 3.0;

/// Timestamped hand distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceSample {
    pub t: f64,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandTrialMetrics {
    pub tct: f64,
    pub overshoot_error: f64,
    pub holding_error: f64,
}

/// Linear interpolation of the distance at time `t`; `t` must lie inside the trace.
fn distance_at(trace: &[DistanceSample], t: f64) -> f64 {
    let idx = trace.partition_point(|s| s.t <= t);
    if idx == 0 {
        return trace[0].d;
    }
    if idx == trace.len() {
        return trace[idx - 1].d;
    }
    let (a, b) = (trace[idx - 1], trace[idx]);
    if b.t == a.t {
        return b.d;
    }
    a.d + (b.d - a.d) * (t - a.t) / (b.t - a.t)
}

/// Scores one hand trial.
///
/// * overshoot: largest distance from the target centre between first
///   entering or crossing `target` (half-open `[lo, hi)`) and the
///   confirmation.
/// * holding: largest drift from the confirmed position during `hold_window`.
/// * tct: confirmation time relative to the first sample.
pub fn hand_trial_metrics(
    trace: &[DistanceSample],
    target: (f64, f64),
    confirm_time: f64,
    hold_window: f64,
) -> Result<HandTrialMetrics> {
    let (first, last) = match (trace.first(), trace.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(invalid_data("empty trace")),
    };
    if target.0 >= target.1 {
        return Err(invalid_arg("target interval must have lo < hi"));
    }
    if hold_window < 0.0 || confirm_time < first.t {
        return Err(invalid_arg("confirm time precedes the trace or negative hold window"));
    }
    if trace.windows(2).any(|w| w[1].t < w[0].t) || trace.iter().any(|s| !s.d.is_finite()) {
        return Err(invalid_data("trace must be time-ordered and finite"));
    }
    if last.t + 1e-9 < confirm_time + hold_window {
        return Err(invalid_data(format!(
            "trace ends at {:.3} s but must cover {:.3} s",
            last.t,
            confirm_time + hold_window
        )));
    }

    let center = 0.5 * (target.0 + target.1);
    // a fast movement may cross a thin layer between two samples; the
    // crossing counts as reaching it
    let inside = |d: f64| d >= target.0 && d < target.1;
    let first_reach = (0..trace.len())
        .take_while(|&i| trace[i].t <= confirm_time)
        .find(|&i| {
            inside(trace[i].d)
                || (i > 0 && {
                    let (a, b) = (trace[i - 1].d, trace[i].d);
                    a.min(b) < target.0 && a.max(b) >= target.1
                })
        })
        .ok_or(Error::TargetNotReached)?;

    let confirmed_d = distance_at(trace, confirm_time);
    let overshoot_error = trace[first_reach..]
        .iter()
        .take_while(|s| s.t <= confirm_time)
        .map(|s| (s.d - center).abs())
        .fold((confirmed_d - center).abs(), f64::max);

    let hold_end = confirm_time + hold_window;
    let holding_error = trace
        .iter()
        .skip_while(|s| s.t < confirm_time)
        .take_while(|s| s.t <= hold_end)
        .map(|s| (s.d - confirmed_d).abs())
        .fold((distance_at(trace, hold_end) - confirmed_d).abs(), f64::max);

    Ok(HandTrialMetrics {
        tct: confirm_time - first.t,
        overshoot_error,
        holding_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trace_from(f: impl Fn(f64) -> f64, duration: f64) -> Vec<DistanceSample> {
        let n = (duration * 100.0).round() as usize;
        (0..=n)
            .map(|k| {
                let t = k as f64 / 100.0;
                DistanceSample { t, d: f(t) }
            })
            .collect()
    }

    #[test]
    fn still_hold_at_center() {
        // ramp from 0.30 to 0.40 over one second, then stay
        let trace = trace_from(|t| if t < 1.0 { 0.30 + 0.1 * t } else { 0.40 }, 5.0);
        let target = (0.38, 0.42);
        let m = hand_trial_metrics(&trace, target, 1.5, 3.0).unwrap();
        // first sample inside is d = 0.38, 2 cm below the centre
        assert!((m.overshoot_error - 0.02).abs() < 1e-9);
        assert_eq!(m.holding_error, 0.0);
        assert!((m.tct - 1.5).abs() < 1e-12);
    }

    #[test]
    fn injected_excursion_is_measured() {
        // reach centre at t = 1, swing 3 cm past it, settle back by t = 1.6
        let f = |t: f64| {
            if t < 1.0 {
                0.30 + 0.1 * t
            } else if t < 1.6 {
                0.40 + 0.03 * (std::f64::consts::PI * (t - 1.0) / 0.6).sin()
            } else {
                0.40
            }
        };
        let trace = trace_from(f, 6.0);
        let m = hand_trial_metrics(&trace, (0.395, 0.405), 2.0, 3.0).unwrap();
        assert!((m.overshoot_error - 0.03).abs() < 1e-4, "{}", m.overshoot_error);
    }

    #[test]
    fn unreached_target() {
        let trace = trace_from(|_| 0.3, 5.0);
        assert!(matches!(
            hand_trial_metrics(&trace, (0.4, 0.45), 1.0, 3.0),
            Err(Error::TargetNotReached)
        ));
    }

    #[test]
    fn crossing_between_samples_counts_as_reaching() {
        // jumps from 0.30 straight past the 2 mm layer to 0.45, then back
        let trace = trace_from(|t| if t < 1.0 { 0.30 } else if t < 1.5 { 0.45 } else { 0.40 }, 6.0);
        let m = hand_trial_metrics(&trace, (0.399, 0.401), 2.0, 3.0).unwrap();
        assert!((m.overshoot_error - 0.05).abs() < 1e-12);
    }

    #[test]
    fn short_trace_rejected() {
        let trace = trace_from(|_| 0.4, 2.0);
        assert!(matches!(
            hand_trial_metrics(&trace, (0.38, 0.42), 1.0, 3.0),
            Err(Error::InvalidData(_))
        ));
        assert!(hand_trial_metrics(&[], (0.38, 0.42), 1.0, 3.0).is_err());
    }

    #[test]
    fn holding_drift() {
        let trace = trace_from(|t| if t < 1.0 { 0.40 } else { 0.40 + 0.004 * (t - 1.0) }, 4.5);
        let m = hand_trial_metrics(&trace, (0.38, 0.42), 1.0, 3.0).unwrap();
        assert!((m.holding_error - 0.012).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn translation_invariant(shift in -0.2f64..0.2, amp in 0.0f64..0.05, drift in -0.01f64..0.01) {
            let f = |t: f64| {
                if t < 1.0 { 0.3 + 0.1 * t }
                else if t < 1.5 { 0.4 + amp * (std::f64::consts::PI * (t - 1.0) / 0.5).sin() }
                else { 0.4 + drift * (t - 1.5) }
            };
            let base = trace_from(f, 5.0);
            let moved: Vec<_> = base.iter().map(|s| DistanceSample { t: s.t, d: s.d + shift }).collect();
            let a = hand_trial_metrics(&base, (0.39, 0.41), 1.6, 3.0).unwrap();
            let b = hand_trial_metrics(&moved, (0.39 + shift, 0.41 + shift), 1.6, 3.0).unwrap();
            prop_assert!((a.overshoot_error - b.overshoot_error).abs() < 1e-9);
            prop_assert!((a.holding_error - b.holding_error).abs() < 1e-9);
            prop_assert_eq!(a.tct, b.tct);
        }
    }
}
