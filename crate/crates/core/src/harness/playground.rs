use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{LayerSpec, TapMode};
use super::record::Technique;
use crate::error::{invalid_arg, Error, Result};
use crate::foottap::{
    build_grid, hit_test, train_classifier, Cell, FootGrid, Point2, SvmParams, TapClassifier, TapSample, INNER_RADIUS,
    ROW_HEIGHT,
};
use crate::gaitsim::{derive_seed, gen_tap, TapScatterParams};
use crate::proximity::{locate, partition_guideline, partition_uniform, InteractionBounds, LayerSet};
use crate::walkline::{
    build_lanes, score_trial, LaneLayout, SelectorConfig, SelectorEvent, SelectorResult, SelectorState, WalkSample,
};

/// Client to server, one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlaygroundMsg {
    Configure {
        technique: Technique,
        #[serde(default)]
        params: serde_json::Value,
    },
    Input { t: f64, x: f64, y: f64 },
    Tap { x: f64, y: f64 },
    Distance { t: f64, d: f64 },
}

/// Server to client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PlaygroundReply {
    /// `active` is the lane or layer under the input, `dwell_fraction` the
    /// progress of its dwell timer in `[0, 1]`.
    State {
        active: Option<i64>,
        dwell_fraction: f64,
        events: Vec<serde_json::Value>,
    },
    Selected {
        target: String,
        metrics: BTreeMap<String, f64>,
    },
    Error {
        message: String,
    },
}

impl PlaygroundReply {
    pub fn to_line(&self) -> String {
        let mut s = serde_json::to_string(self).expect("replies serialise");
        s.push('\n');
        s
    }

    fn idle(events: Vec<serde_json::Value>) -> Self {
        PlaygroundReply::State { active: None, dwell_fraction: 0.0, events }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalklineParams {
    pub lanes: u32,
    pub selection_time: f64,
    pub width: f64,
    pub length: f64,
    /// Intended lane; when set, selections are scored against it.
    pub target: Option<i32>,
    /// Samples before this time are ignored (s).
    pub task_shown_at: Option<f64>,
}

impl Default for WalklineParams {
    fn default() -> Self {
        Self { lanes: 8, selection_time: 1.0, width: 1.0, length: 20.0, target: None, task_shown_at: None }
    }
}

/// A labelled calibration tap for the indirect interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationTap {
    pub x: f64,
    pub y: f64,
    pub row: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoottapParams {
    pub rows: u32,
    pub cols: u32,
    pub mode: TapMode,
    pub row_height: f64,
    pub inner_radius: f64,
    /// Training taps for indirect mode; synthetic ones are generated when empty.
    pub calibration: Vec<CalibrationTap>,
    pub calibration_taps: u32,
    pub seed: u64,
    pub target: Option<Cell>,
}

impl Default for FoottapParams {
    fn default() -> Self {
        Self {
            rows: 1,
            cols: 4,
            mode: TapMode::Direct,
            row_height: ROW_HEIGHT,
            inner_radius: INNER_RADIUS,
            calibration: Vec::new(),
            calibration_taps: 10,
            seed: 0,
            target: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProximityParams {
    pub layers: LayerSpec,
    pub min_distance: f64,
    pub max_distance: f64,
    /// Time the hand must rest in a layer to confirm it (s).
    pub confirm_time: f64,
    pub target: Option<usize>,
}

impl Default for ProximityParams {
    fn default() -> Self {
        Self { layers: LayerSpec::Uniform(4), min_distance: 0.125, max_distance: 0.725, confirm_time: 1.0, target: None }
    }
}

fn parse_params<T: for<'de> Deserialize<'de> + Default>(params: serde_json::Value) -> Result<T> {
    if params.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(params).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn event_value<T: Serialize>(e: &T) -> serde_json::Value {
    serde_json::to_value(e).expect("events serialise")
}

struct WalklineSession {
    params: WalklineParams,
    layout: LaneLayout,
    config: SelectorConfig,
    state: SelectorState,
    trace: Vec<WalkSample>,
    shown_at: Option<f64>,
    prev_t: f64,
}

impl WalklineSession {
    fn new(params: WalklineParams) -> Result<Self> {
        let layout = build_lanes(params.lanes, params.width, params.length)?;
        let config = SelectorConfig::new(params.selection_time)?;
        if let Some(t) = params.target {
            if t == 0 || !layout.contains_lane(t) {
                return Err(invalid_arg(format!("target lane {t} is not an option lane")));
            }
        }
        Ok(Self {
            shown_at: params.task_shown_at,
            params,
            layout,
            config,
            state: SelectorState::new(),
            trace: Vec::new(),
            prev_t: f64::NEG_INFINITY,
        })
    }

    fn restart(&mut self) {
        self.state = SelectorState::new();
        self.trace.clear();
        self.shown_at = None;
    }

    fn input(&mut self, sample: WalkSample) -> Result<Vec<PlaygroundReply>> {
        if sample.t < self.prev_t {
            return Err(invalid_arg(format!("sample time {} precedes {}", sample.t, self.prev_t)));
        }
        if self.state.is_finished() {
            self.restart();
        }
        let shown = *self.shown_at.get_or_insert(sample.t);
        self.trace.push(sample);
        self.prev_t = sample.t;
        if sample.t < shown {
            return Ok(vec![PlaygroundReply::idle(Vec::new())]);
        }
        let prev = self.trace.iter().rev().nth(1).map_or(shown, |s| s.t.max(shown));
        let (next, events) = crate::walkline::selector_step(&self.state, &self.config, &self.layout, sample, prev)?;
        self.state = next;
        let mut replies = vec![PlaygroundReply::State {
            active: self.state.active_lane().map(i64::from),
            dwell_fraction: self.state.opacity_fraction,
            events: events.iter().map(event_value).collect(),
        }];
        if let Some(SelectorResult::Selected(k)) = self.state.result {
            debug_assert!(events.iter().any(|e| matches!(e, SelectorEvent::Selected { .. })));
            let target = self.params.target.unwrap_or(k);
            let m = score_trial(&self.trace, target, &self.config, &self.layout, shown)?;
            let flag = |b: bool| if b { 1.0 } else { 0.0 };
            let mut metrics = BTreeMap::from([
                ("success".to_string(), flag(m.success)),
                ("tct".to_string(), m.tct),
                ("walked_distance".to_string(), m.walked_distance),
                ("longitudinal_distance".to_string(), m.longitudinal_distance),
                ("stabilizing_error".to_string(), flag(m.stabilizing_error)),
            ]);
            if let Some(t) = m.activation_time {
                metrics.insert("activation_time".into(), t);
            }
            replies.push(PlaygroundReply::Selected { target: k.to_string(), metrics });
        }
        Ok(replies)
    }
}

struct FoottapSession {
    params: FoottapParams,
    grid: FootGrid,
    classifier: Option<TapClassifier>,
}

impl FoottapSession {
    fn new(params: FoottapParams) -> Result<Self> {
        let grid = build_grid(params.rows, params.cols, params.row_height, params.inner_radius)?;
        if let Some(t) = params.target {
            if !grid.contains_cell(t) {
                return Err(invalid_arg(format!("target {t} is not in the grid")));
            }
        }
        let classifier = match params.mode {
            TapMode::Direct => None,
            TapMode::Indirect => {
                let samples: Vec<TapSample> = if params.calibration.is_empty() {
                    let scatter = TapScatterParams::default();
                    let cells: Vec<Cell> = grid.cells().collect();
                    let mut out = Vec::new();
                    for (ci, &cell) in cells.iter().enumerate() {
                        for k in 0..params.calibration_taps {
                            out.push(gen_tap(&grid, cell, &scatter, derive_seed(params.seed, ci as u64, k as u64))?);
                        }
                    }
                    out
                } else {
                    params
                        .calibration
                        .iter()
                        .map(|c| TapSample { point: Point2::new(c.x, c.y), label: Some(Cell::new(c.row, c.col)) })
                        .collect()
                };
                Some(train_classifier(&samples, &SvmParams::default(), params.seed)?)
            }
        };
        Ok(Self { params, grid, classifier })
    }

    fn tap(&self, p: Point2) -> Result<Vec<PlaygroundReply>> {
        if !(p.x.is_finite() && p.y.is_finite()) {
            return Err(invalid_arg("non-finite tap"));
        }
        let chosen = match &self.classifier {
            Some(clf) => Some(clf.predict([p.x, p.y])),
            None => hit_test(&self.grid, p),
        };
        let Some(cell) = chosen else {
            return Ok(vec![PlaygroundReply::idle(vec![serde_json::json!({"kind": "miss", "x": p.x, "y": p.y})])]);
        };
        let mut metrics =
            BTreeMap::from([("x".to_string(), p.x), ("y".to_string(), p.y), ("row".to_string(), cell.row as f64), ("col".to_string(), cell.col as f64)]);
        if let Some(t) = self.params.target {
            metrics.insert("success".into(), if t == cell { 1.0 } else { 0.0 });
        }
        Ok(vec![PlaygroundReply::Selected { target: cell.to_string(), metrics }])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LayerEvent {
    Entered { layer: usize, t: f64 },
    Left { layer: usize, t: f64 },
    OutOfBounds { t: f64 },
    Confirmed { layer: usize, t: f64 },
}

struct ProximitySession {
    params: ProximityParams,
    layers: LayerSet,
    current: Option<usize>,
    since: f64,
    first_t: Option<f64>,
    prev_t: f64,
    confirmed: bool,
}

impl ProximitySession {
    fn new(params: ProximityParams) -> Result<Self> {
        let bounds = InteractionBounds::new(params.min_distance, params.max_distance)?;
        let layers = match params.layers {
            LayerSpec::Uniform(n) => partition_uniform(bounds, n)?,
            LayerSpec::Guideline(_) => partition_guideline(bounds)?,
        };
        if !(params.confirm_time > 0.0) {
            return Err(invalid_arg("confirm time must be positive"));
        }
        if params.target.is_some_and(|t| t >= layers.len()) {
            return Err(invalid_arg("target layer out of range"));
        }
        Ok(Self {
            params,
            layers,
            current: None,
            since: 0.0,
            first_t: None,
            prev_t: f64::NEG_INFINITY,
            confirmed: false,
        })
    }

    fn distance(&mut self, t: f64, d: f64) -> Result<Vec<PlaygroundReply>> {
        if !(t.is_finite() && d.is_finite()) || t < self.prev_t {
            return Err(invalid_arg("distance samples must be finite and time-ordered"));
        }
        self.prev_t = t;
        if self.confirmed {
            self.confirmed = false;
            self.current = None;
            self.first_t = None;
        }
        let first_t = *self.first_t.get_or_insert(t);
        let mut events = Vec::new();
        let here = locate(&self.layers, d).layer();
        if here != self.current {
            if let Some(l) = self.current {
                events.push(LayerEvent::Left { layer: l, t });
            }
            events.push(match here {
                Some(l) => LayerEvent::Entered { layer: l, t },
                None => LayerEvent::OutOfBounds { t },
            });
            self.current = here;
            self.since = t;
        }
        let dwell = if here.is_some() { t - self.since } else { 0.0 };
        let fraction = (dwell / self.params.confirm_time).min(1.0);
        let mut replies = Vec::new();
        let mut selected = None;
        if let Some(l) = here {
            if dwell >= self.params.confirm_time - crate::walkline::TIME_EPSILON {
                events.push(LayerEvent::Confirmed { layer: l, t });
                self.confirmed = true;
                let mut metrics = BTreeMap::from([
                    ("distance".to_string(), d),
                    ("tct".to_string(), t - first_t),
                    ("thickness".to_string(), self.layers.thickness(l)),
                ]);
                if let Some(target) = self.params.target {
                    metrics.insert("success".into(), if target == l { 1.0 } else { 0.0 });
                }
                selected = Some(PlaygroundReply::Selected { target: l.to_string(), metrics });
            }
        }
        replies.push(PlaygroundReply::State {
            active: here.map(|l| l as i64),
            dwell_fraction: fraction,
            events: events.iter().map(event_value).collect(),
        });
        replies.extend(selected);
        Ok(replies)
    }
}

enum Active {
    Walkline(WalklineSession),
    Foottap(FoottapSession),
    Proximity(ProximitySession),
}

/// One client's playground session: a configured technique and its live
/// input state. Sessions share nothing.
#[derive(Default)]
pub struct PlaygroundSession {
    active: Option<Active>,
}

impl PlaygroundSession {
    pub fn new() -> Self {
        Self::default()
    }

    /// A session already configured with default parameters.
    pub fn preset(technique: Technique) -> Result<Self> {
        let mut s = Self::new();
        s.configure(technique, serde_json::Value::Null)?;
        Ok(s)
    }

    pub fn technique(&self) -> Option<Technique> {
        self.active.as_ref().map(|a| match a {
            Active::Walkline(_) => Technique::Walkline,
            Active::Foottap(_) => Technique::Foottap,
            Active::Proximity(_) => Technique::Proximity,
        })
    }

    fn configure(&mut self, technique: Technique, params: serde_json::Value) -> Result<()> {
        self.active = Some(match technique {
            Technique::Walkline => Active::Walkline(WalklineSession::new(parse_params(params)?)?),
            Technique::Foottap => Active::Foottap(FoottapSession::new(parse_params(params)?)?),
            Technique::Proximity => Active::Proximity(ProximitySession::new(parse_params(params)?)?),
        });
        Ok(())
    }

    pub fn handle(&mut self, msg: PlaygroundMsg) -> Result<Vec<PlaygroundReply>> {
        let mismatch = |want: &str| Error::InvalidState(format!("{want} input needs a configured {want} session"));
        match (msg, self.active.as_mut()) {
            (PlaygroundMsg::Configure { technique, params }, _) => {
                self.configure(technique, params)?;
                Ok(vec![PlaygroundReply::idle(Vec::new())])
            }
            (PlaygroundMsg::Input { t, x, y }, Some(Active::Walkline(s))) => s.input(WalkSample { t, x, y }),
            (PlaygroundMsg::Tap { x, y }, Some(Active::Foottap(s))) => s.tap(Point2::new(x, y)),
            (PlaygroundMsg::Distance { t, d }, Some(Active::Proximity(s))) => s.distance(t, d),
            (PlaygroundMsg::Input { .. }, _) => Err(mismatch("walkline")),
            (PlaygroundMsg::Tap { .. }, _) => Err(mismatch("foottap")),
            (PlaygroundMsg::Distance { .. }, _) => Err(mismatch("proximity")),
        }
    }

    /// Parses and handles one protocol line; failures become `error` replies.
    pub fn handle_line(&mut self, line: &str) -> Vec<PlaygroundReply> {
        let result = serde_json::from_str::<PlaygroundMsg>(line)
            .map_err(|e| Error::InvalidArgument(e.to_string()))
            .and_then(|msg| self.handle(msg));
        result.unwrap_or_else(|e| vec![PlaygroundReply::Error { message: e.to_string() }])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn configure(s: &mut PlaygroundSession, technique: &str, params: serde_json::Value) -> Vec<PlaygroundReply> {
        s.handle_line(&json!({"type": "configure", "technique": technique, "params": params}).to_string())
    }

    #[test]
    fn walkline_session_matches_offline_scoring() {
        let mut s = PlaygroundSession::new();
        configure(&mut s, "walkline", json!({"lanes": 8, "selection_time": 0.5, "target": 2}));
        let lane2 = 2.0 / 9.0;
        let trace: Vec<WalkSample> = (0..=90)
            .map(|k| {
                let t = k as f64 / 60.0;
                WalkSample { t, x: if t < 0.5 { 0.0 } else { lane2 }, y: 1.2 * t }
            })
            .collect();
        let mut selected = None;
        let mut fractions = Vec::new();
        for w in &trace {
            for r in s.handle(PlaygroundMsg::Input { t: w.t, x: w.x, y: w.y }).unwrap() {
                match r {
                    PlaygroundReply::State { dwell_fraction, .. } => fractions.push(dwell_fraction),
                    PlaygroundReply::Selected { target, metrics } => {
                        selected.get_or_insert((target, metrics));
                    }
                    PlaygroundReply::Error { message } => panic!("{message}"),
                }
            }
        }
        let (target, metrics) = selected.expect("selected");
        assert_eq!(target, "2");
        let layout = build_lanes(8, 1.0, 20.0).unwrap();
        let offline = score_trial(&trace, 2, &SelectorConfig::new(0.5).unwrap(), &layout, 0.0).unwrap();
        assert_eq!(metrics["tct"], offline.tct);
        assert_eq!(metrics["walked_distance"], offline.walked_distance);
        assert_eq!(metrics["success"], 1.0);
        assert!(fractions.windows(2).any(|w| w[1] > w[0]));
    }

    #[test]
    fn foottap_direct_and_indirect() {
        let mut s = PlaygroundSession::preset(Technique::Foottap).unwrap();
        let grid = build_grid(1, 4, ROW_HEIGHT, INNER_RADIUS).unwrap();
        let c = grid.centroid(Cell::new(1, 2));
        let out = s.handle(PlaygroundMsg::Tap { x: c.x, y: c.y }).unwrap();
        assert!(matches!(&out[0], PlaygroundReply::Selected { target, .. } if target == "r1c2"));
        let miss = s.handle(PlaygroundMsg::Tap { x: 0.0, y: 0.0 }).unwrap();
        assert!(matches!(&miss[0], PlaygroundReply::State { active: None, .. }));

        configure(&mut s, "foottap", json!({"mode": "indirect", "seed": 4}));
        let out = s.handle(PlaygroundMsg::Tap { x: c.x, y: c.y }).unwrap();
        assert!(matches!(&out[0], PlaygroundReply::Selected { target, .. } if target == "r1c2"));
    }

    #[test]
    fn proximity_dwell_confirms() {
        let mut s = PlaygroundSession::new();
        configure(&mut s, "proximity", json!({"layers": 4, "confirm_time": 0.5, "target": 3}));
        let mut out = Vec::new();
        for k in 0..=60 {
            let t = k as f64 / 100.0;
            out.extend(s.handle(PlaygroundMsg::Distance { t, d: 0.65 }).unwrap());
        }
        let sel: Vec<_> = out.iter().filter(|r| matches!(r, PlaygroundReply::Selected { .. })).collect();
        assert_eq!(sel.len(), 1);
        assert!(matches!(sel[0], PlaygroundReply::Selected { target, metrics } if target == "3" && metrics["success"] == 1.0));
    }

    #[test]
    fn errors_are_replies() {
        let mut s = PlaygroundSession::new();
        let input = json!({"type": "input", "t": 0.0, "x": 0.0, "y": 0.0}).to_string();
        assert!(matches!(&s.handle_line(&input)[0], PlaygroundReply::Error { .. }));
        assert!(matches!(&s.handle_line("nonsense")[0], PlaygroundReply::Error { .. }));
        assert!(matches!(&configure(&mut s, "walkline", json!({"lanes": 7}))[0], PlaygroundReply::Error { .. }));
        assert!(matches!(&configure(&mut s, "walkline", json!({"lanse": 8}))[0], PlaygroundReply::Error { .. }));
        assert!(matches!(&configure(&mut s, "walkline", json!({}))[0], PlaygroundReply::State { .. }));
        assert_eq!(s.technique(), Some(Technique::Walkline));
    }
}
