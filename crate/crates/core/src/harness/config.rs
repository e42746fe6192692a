use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::record::{Level, Technique};
use crate::error::{Error, Result};
use crate::foottap::{INNER_RADIUS, ROW_HEIGHT};
use crate::gaitsim::{GaitParams, HandReachParams, ShiftPlan, ShiftVariability, TapScatterParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TapMode {
    /// Visible targets, taps hit-tested against the cells.
    Direct,
    /// No visible targets, taps classified by a per-run trained model.
    Indirect,
}

impl TapMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TapMode::Direct => "direct",
            TapMode::Indirect => "indirect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GuidelineTag {
    Guideline,
}

/// A layer-count level: a uniform split or the guideline partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LayerSpec {
    Uniform(usize),
    Guideline(GuidelineTag),
}

impl LayerSpec {
    pub fn level(self) -> Level {
        match self {
            LayerSpec::Uniform(n) => Level::Num(n as f64),
            LayerSpec::Guideline(_) => Level::Text("guideline".into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalklineFactors {
    pub lanes: Vec<u32>,
    pub selection_time: Vec<f64>,
    /// Lateral extent of the lane area (m).
    pub width: f64,
    /// Length of the lane area (m).
    pub length: f64,
}

impl Default for WalklineFactors {
    fn default() -> Self {
        Self {
            lanes: vec![8, 12, 16],
            selection_time: vec![1.0 / 3.0, 2.0 / 3.0, 1.0],
            width: 1.0,
            length: 20.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoottapFactors {
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    pub mode: Vec<TapMode>,
    pub row_height: f64,
    pub inner_radius: f64,
    /// Calibration taps per cell used to train the indirect classifier.
    pub calibration_taps: u32,
    /// Normal model of the time from task display to the tap (s).
    pub tct_mean: f64,
    pub tct_sd: f64,
}

impl Default for FoottapFactors {
    fn default() -> Self {
        Self {
            rows: vec![1, 2, 3],
            cols: vec![2, 4, 6],
            mode: vec![TapMode::Direct],
            row_height: ROW_HEIGHT,
            inner_radius: INNER_RADIUS,
            calibration_taps: 10,
            tct_mean: 1.5,
            tct_sd: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProximityFactors {
    pub layers: Vec<LayerSpec>,
    pub min_distance: f64,
    /// Arm length: the far bound of the interaction space (m).
    pub max_distance: f64,
    pub hold_window: f64,
}

impl Default for ProximityFactors {
    fn default() -> Self {
        let mut layers: Vec<LayerSpec> = (2..=8).map(LayerSpec::Uniform).collect();
        layers.push(LayerSpec::Guideline(GuidelineTag::Guideline));
        Self { layers, min_distance: 0.125, max_distance: 0.725, hold_window: 3.0 }
    }
}

fn one() -> u32 {
    1
}

/// A full experiment description, read from a JSON document. Unknown keys
/// are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub technique: Technique,
    /// Trials per condition cell and run.
    #[serde(default = "one")]
    pub trials: u32,
    /// Simulated participants; each follows one row of the balanced Latin square.
    #[serde(default = "one")]
    pub runs: u32,
    #[serde(default)]
    pub seed: u64,
    /// Removes sway, tracking noise, overshoot and between-trial spread.
    #[serde(default)]
    pub noiseless: bool,
    #[serde(default)]
    pub walkline: WalklineFactors,
    #[serde(default)]
    pub foottap: FoottapFactors,
    #[serde(default)]
    pub proximity: ProximityFactors,
    #[serde(default)]
    pub gait: GaitParams,
    #[serde(default)]
    pub plan: ShiftPlan,
    #[serde(default)]
    pub variability: ShiftVariability,
    #[serde(default)]
    pub scatter: TapScatterParams,
    #[serde(default)]
    pub reach: HandReachParams,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(technique: Technique) -> Self {
        Self {
            technique,
            trials: 1,
            runs: 1,
            seed: 0,
            noiseless: false,
            walkline: WalklineFactors::default(),
            foottap: FoottapFactors::default(),
            proximity: ProximityFactors::default(),
            gait: GaitParams::default(),
            plan: ShiftPlan::default(),
            variability: ShiftVariability::default(),
            scatter: TapScatterParams::default(),
            reach: HandReachParams::default(),
            out: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if self.trials == 0 || self.runs == 0 {
            return bad("trials and runs must be at least 1");
        }
        match self.technique {
            Technique::Walkline => {
                let w = &self.walkline;
                if w.lanes.is_empty() || w.selection_time.is_empty() {
                    return bad("walkline needs lane counts and selection times");
                }
                if w.lanes.iter().any(|&n| n == 0 || n % 2 == 1) {
                    return bad("lane counts must be even and positive");
                }
                if w.selection_time.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
                    return bad("selection times must be positive");
                }
                if !(w.width > 0.0 && w.length > 0.0) {
                    return bad("lane area must have positive size");
                }
            }
            Technique::Foottap => {
                let f = &self.foottap;
                if f.rows.is_empty() || f.cols.is_empty() || f.mode.is_empty() {
                    return bad("foottap needs rows, cols and modes");
                }
                if f.rows.contains(&0) || f.cols.contains(&0) {
                    return bad("grid dimensions must be positive");
                }
                if !(f.row_height > 0.0 && f.inner_radius >= 0.0 && f.tct_mean > 0.0 && f.tct_sd >= 0.0) {
                    return bad("grid geometry and timing must be positive");
                }
                if f.mode.contains(&TapMode::Indirect) && f.calibration_taps < 2 {
                    return bad("indirect mode needs at least 2 calibration taps per cell");
                }
            }
            Technique::Proximity => {
                let p = &self.proximity;
                if p.layers.is_empty() || p.layers.contains(&LayerSpec::Uniform(0)) {
                    return bad("proximity needs positive layer counts");
                }
                if !(p.min_distance > 0.0 && p.max_distance > p.min_distance && p.hold_window >= 0.0) {
                    return bad("proximity bounds must satisfy 0 < min < max");
                }
            }
        }
        self.gait.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        self.plan.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        self.scatter.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        self.reach.validate().map_err(|e| Error::InvalidConfig(e.to_string()))?;
        Ok(())
    }

    /// Condition cells in a fixed order; the index into this list is the
    /// condition index used for seeding and counterbalancing.
    pub fn conditions(&self) -> Vec<BTreeMap<String, Level>> {
        let cell = |pairs: Vec<(&str, Level)>| -> BTreeMap<String, Level> {
            pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
        };
        match self.technique {
            Technique::Walkline => {
                let w = &self.walkline;
                w.lanes
                    .iter()
                    .flat_map(|&n| {
                        w.selection_time.iter().map(move |&s| {
                            cell(vec![("lanes", Level::Num(n as f64)), ("selection_time", Level::Num(s))])
                        })
                    })
                    .collect()
            }
            Technique::Foottap => {
                let f = &self.foottap;
                let mut out = Vec::new();
                for &mode in &f.mode {
                    for &r in &f.rows {
                        for &c in &f.cols {
                            out.push(cell(vec![
                                ("mode", Level::Text(mode.as_str().into())),
                                ("rows", Level::Num(r as f64)),
                                ("cols", Level::Num(c as f64)),
                            ]));
                        }
                    }
                }
                out
            }
            Technique::Proximity => self
                .proximity
                .layers
                .iter()
                .map(|l| cell(vec![("layers", l.level())]))
                .collect(),
        }
    }
}
