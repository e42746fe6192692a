use serde::{Deserialize, Serialize};

use super::lanes::{lane_at, LaneLayout, Track};
use super::WalkSample;
use crate::error::{invalid_arg, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    /// Continuous time on a lane needed to select it (s).
    pub selection_time: f64,
}

impl SelectorConfig {
    pub fn new(selection_time: f64) -> Result<Self> {
        if !(selection_time > 0.0 && selection_time.is_finite()) {
            return Err(invalid_arg("selection time must be positive"));
        }
        Ok(Self { selection_time })
    }

    /// Closed dwell threshold, forgiving rounding in sampled timestamps.
    pub fn reached(&self, dwell: f64) -> bool {
        dwell >= self.selection_time - TIME_EPSILON
    }
}

/// Timestamp tolerance (s) for the dwell threshold.
pub const TIME_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    WrongLane,
    EndOfTrack,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorResult {
    Selected(i32),
    Failed(FailureReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SelectorEvent {
    Entered { lane: i32, t: f64 },
    Left { lane: i32, t: f64 },
    /// Warning: the walker left the lane strip; the dwell timer is paused.
    OffTrack { t: f64 },
    Selected { lane: i32, t: f64 },
    EndOfTrack { t: f64 },
}

/// Dwell-timer automaton state. Advance it with [`selector_step`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorState {
    /// `None` until the first sample arrives.
    pub current: Option<Track>,
    pub dwell_elapsed: f64,
    pub opacity_fraction: f64,
    pub result: Option<SelectorResult>,
    // Start of the current uninterrupted stretch on the lane, and dwell
    // banked before an off-track pause.
    segment_start: f64,
    banked: f64,
    paused_lane: Option<i32>,
}

impl Default for SelectorState {
    fn default() -> Self {
        Self::new()
    }
}

impl SelectorState {
    pub fn new() -> Self {
        Self {
            current: None,
            dwell_elapsed: 0.0,
            opacity_fraction: 0.0,
            result: None,
            segment_start: 0.0,
            banked: 0.0,
            paused_lane: None,
        }
    }

    pub fn is_finished(&self) -> bool {
        self.result.is_some()
    }

    /// Lane currently under the walker, if on the strip.
    pub fn active_lane(&self) -> Option<i32> {
        self.current.and_then(Track::lane)
    }

    fn enter(&mut self, lane: i32, t: f64, events: &mut Vec<SelectorEvent>) {
        self.current = Some(Track::Lane(lane));
        self.segment_start = t;
        self.banked = 0.0;
        self.paused_lane = None;
        events.push(SelectorEvent::Entered { lane, t });
    }
}

/// Feeds one sample into the automaton.
///
/// Staying on a non-null lane accumulates `t - prev_t`; any lane change
/// resets the timer to zero. Leaving the strip pauses the timer, and
/// returning to the same lane resumes it. Reaching the selection time
/// (inclusive) selects the lane; reaching the end of the track first fails.
pub fn selector_step(
    state: &SelectorState,
    config: &SelectorConfig,
    layout: &LaneLayout,
    sample: WalkSample,
    prev_t: f64,
) -> Result<(SelectorState, Vec<SelectorEvent>)> {
    if state.is_finished() {
        return Err(Error::InvalidState("selector already finished".into()));
    }
    if !(sample.t.is_finite() && sample.x.is_finite() && sample.y.is_finite()) {
        return Err(invalid_arg("non-finite walk sample"));
    }
    if sample.t < prev_t {
        return Err(invalid_arg(format!(
            "sample time {} precedes previous time {prev_t}",
            sample.t
        )));
    }

    let t = sample.t;
    let mut next = state.clone();
    let mut events = Vec::new();
    let track = lane_at(layout, sample.x);

    match (state.current, track) {
        (None, Track::Lane(k)) => next.enter(k, t, &mut events),
        (None, Track::OffTrack) => {
            next.current = Some(Track::OffTrack);
            events.push(SelectorEvent::OffTrack { t });
        }
        (Some(Track::Lane(a)), Track::Lane(b)) if a == b => {}
        (Some(Track::Lane(a)), Track::Lane(b)) => {
            events.push(SelectorEvent::Left { lane: a, t });
            next.enter(b, t, &mut events);
        }
        (Some(Track::Lane(a)), Track::OffTrack) => {
            next.current = Some(Track::OffTrack);
            next.banked = state.dwell_elapsed;
            next.paused_lane = Some(a);
            events.push(SelectorEvent::OffTrack { t });
        }
        (Some(Track::OffTrack), Track::OffTrack) => {}
        (Some(Track::OffTrack), Track::Lane(b)) => {
            if state.paused_lane == Some(b) {
                next.current = Some(Track::Lane(b));
                next.segment_start = t;
                next.paused_lane = None;
            } else {
                if let Some(a) = state.paused_lane {
                    events.push(SelectorEvent::Left { lane: a, t });
                }
                next.enter(b, t, &mut events);
            }
        }
    }

    next.dwell_elapsed = match next.current {
        Some(Track::Lane(k)) if k != 0 => next.banked + (t - next.segment_start),
        Some(Track::OffTrack) => next.banked,
        _ => 0.0,
    };
    next.opacity_fraction = (next.dwell_elapsed / config.selection_time).min(1.0);

    match next.current {
        Some(Track::Lane(k)) if k != 0 && config.reached(next.dwell_elapsed) => {
            next.result = Some(SelectorResult::Selected(k));
            events.push(SelectorEvent::Selected { lane: k, t });
        }
        _ if sample.y >= layout.length => {
            next.result = Some(SelectorResult::Failed(FailureReason::EndOfTrack));
            events.push(SelectorEvent::EndOfTrack { t });
        }
        _ => {}
    }
    Ok((next, events))
}
