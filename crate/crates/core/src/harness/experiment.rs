use std::collections::BTreeMap;

use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::config::{ExperimentConfig, LayerSpec, TapMode};
use super::latin::balanced_latin_square;
use super::record::{Level, Technique, TrialRecord};
use crate::error::{Error, Result};
use crate::foottap::{build_grid, hit_test, train_classifier, Cell, FootGrid, SvmParams, TapClassifier, TapSample};
use crate::gaitsim::{
    derive_seed, gen_hand_trace, gen_tap, rng, sample_walk_trial, HandReachParams, ShiftPlan, ShiftVariability,
    TapScatterParams,
};
use crate::proximity::{
    hand_trial_metrics, locate, partition_guideline, partition_uniform, InteractionBounds, LayerSet, Location,
};
use crate::walkline::{build_lanes, score_trial, ErrorKind, FailureReason, SelectorConfig};

/// Offset separating calibration seeds from trial seeds.
const CALIBRATION_STREAM: u64 = 1 << 40;

struct Job {
    cond: usize,
    run: u32,
    trial: u32,
}

/// Runs every condition cell × run × trial and returns the records sorted
/// by (condition, run, trial). Trials run in parallel; the output does not
/// depend on scheduling.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_with(config, true)
}

/// Same as [`run_experiment`] on the calling thread.
pub fn run_experiment_sequential(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    run_with(config, false)
}

fn run_with(config: &ExperimentConfig, parallel: bool) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let conditions = config.conditions();
    let runner = Runner::new(config, &conditions)?;
    let jobs: Vec<Job> = (0..conditions.len())
        .flat_map(|cond| {
            (0..config.runs).flat_map(move |run| (0..config.trials).map(move |trial| Job { cond, run, trial }))
        })
        .collect();
    let mut records: Vec<TrialRecord> = if parallel {
        jobs.par_iter().map(|j| runner.trial(j)).collect::<Result<_>>()?
    } else {
        jobs.iter().map(|j| runner.trial(j)).collect::<Result<_>>()?
    };
    let index: BTreeMap<String, usize> = conditions
        .iter()
        .enumerate()
        .map(|(i, c)| (condition_key(c), i))
        .collect();
    records.sort_by_key(|r| (index[&condition_key(&r.condition)], r.run, r.trial));
    Ok(records)
}

fn condition_key(c: &BTreeMap<String, Level>) -> String {
    c.iter().map(|(k, v)| format!("{k}={v};")).collect()
}

/// Position of each condition in each run's presentation order.
fn positions(n_conditions: usize, runs: u32) -> Result<Vec<Vec<u32>>> {
    if n_conditions < 2 {
        return Ok(vec![vec![0; n_conditions]; runs as usize]);
    }
    let square = balanced_latin_square(n_conditions)?;
    Ok((0..runs as usize)
        .map(|run| {
            let row = &square[run % square.len()];
            let mut pos = vec![0u32; n_conditions];
            for (p, &c) in row.iter().enumerate() {
                pos[c] = p as u32;
            }
            pos
        })
        .collect())
}

enum Cells {
    Walkline(Vec<(u32, f64)>),
    Foottap(Vec<FoottapCell>),
    Proximity(Vec<ProximityCell>),
}

struct FoottapCell {
    grid: FootGrid,
    mode: TapMode,
    /// One classifier per run in indirect mode.
    classifiers: Vec<Option<TapClassifier>>,
}

struct ProximityCell {
    layers: LayerSet,
    targets: Vec<usize>,
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    conditions: &'a [BTreeMap<String, Level>],
    positions: Vec<Vec<u32>>,
    cells: Cells,
    plan: ShiftPlan,
    variability: ShiftVariability,
    scatter: TapScatterParams,
    reach: HandReachParams,
}

impl<'a> Runner<'a> {
    fn new(config: &'a ExperimentConfig, conditions: &'a [BTreeMap<String, Level>]) -> Result<Self> {
        let noiseless = config.noiseless;
        let plan = if noiseless {
            ShiftPlan { overshoot_fraction: 0.0, wander_amp: 0.0, ..config.plan }
        } else {
            config.plan
        };
        let variability = if noiseless { ShiftVariability::none() } else { config.variability };
        let scatter = if noiseless { config.scatter.scaled(0.0) } else { config.scatter.clone() };
        let reach = if noiseless { HandReachParams { sample_rate: config.reach.sample_rate, ..HandReachParams::ideal() } } else { config.reach };

        let cells = match config.technique {
            Technique::Walkline => Cells::Walkline(
                config
                    .walkline
                    .lanes
                    .iter()
                    .flat_map(|&n| config.walkline.selection_time.iter().map(move |&s| (n, s)))
                    .collect(),
            ),
            Technique::Foottap => {
                let f = &config.foottap;
                let mut out = Vec::new();
                let mut ci = 0u64;
                for &mode in &f.mode {
                    for &rows in &f.rows {
                        for &cols in &f.cols {
                            let grid = build_grid(rows, cols, f.row_height, f.inner_radius)?;
                            let classifiers = match mode {
                                TapMode::Direct => vec![None; config.runs as usize],
                                TapMode::Indirect => (0..config.runs)
                                    .into_par_iter()
                                    .map(|run| {
                                        calibrate(&grid, &scatter, f.calibration_taps, config.seed, ci, run)
                                            .map(Some)
                                    })
                                    .collect::<Result<_>>()?,
                            };
                            out.push(FoottapCell { grid, mode, classifiers });
                            ci += 1;
                        }
                    }
                }
                Cells::Foottap(out)
            }
            Technique::Proximity => {
                let p = &config.proximity;
                if p.hold_window > crate::proximity::HOLD_WINDOW {
                    return Err(Error::InvalidConfig(format!(
                        "hold window above {} s is not simulated",
                        crate::proximity::HOLD_WINDOW
                    )));
                }
                let bounds = InteractionBounds::new(p.min_distance, p.max_distance)?;
                let cells = p
                    .layers
                    .iter()
                    .map(|spec| {
                        let layers = match spec {
                            LayerSpec::Uniform(n) => partition_uniform(bounds, *n)?,
                            LayerSpec::Guideline(_) => partition_guideline(bounds)?,
                        };
                        // the hand starts at the reference point, so its own
                        // layer is not a target
                        let home = locate(&layers, layers.reference_point()).layer();
                        let targets: Vec<usize> = (0..layers.len()).filter(|&i| Some(i) != home).collect();
                        if targets.is_empty() {
                            return Err(Error::InvalidConfig("layout has no layer besides the start layer".into()));
                        }
                        Ok(ProximityCell { layers, targets })
                    })
                    .collect::<Result<_>>()?;
                Cells::Proximity(cells)
            }
        };
        Ok(Self {
            config,
            conditions,
            positions: positions(conditions.len(), config.runs)?,
            cells,
            plan,
            variability,
            scatter,
            reach,
        })
    }

    fn trial(&self, job: &Job) -> Result<TrialRecord> {
        let index = job.run as u64 * self.config.trials as u64 + job.trial as u64;
        let seed = derive_seed(self.config.seed, job.cond as u64, index);
        let mut record = TrialRecord {
            technique: self.config.technique,
            condition: self.conditions[job.cond].clone(),
            target: String::new(),
            success: false,
            tct: 0.0,
            metrics: BTreeMap::new(),
            seed,
            run: job.run,
            position: self.positions[job.run as usize][job.cond],
            trial: job.trial,
        };
        match &self.cells {
            Cells::Walkline(cells) => self.walkline(&mut record, cells[job.cond], job.trial)?,
            Cells::Foottap(cells) => self.foottap(&mut record, &cells[job.cond], job)?,
            Cells::Proximity(cells) => self.proximity(&mut record, &cells[job.cond], job.trial)?,
        }
        Ok(record)
    }

    fn walkline(&self, rec: &mut TrialRecord, (n_lanes, selection_time): (u32, f64), trial: u32) -> Result<()> {
        let w = &self.config.walkline;
        let layout = build_lanes(n_lanes, w.width, w.length)?;
        let options: Vec<i32> = layout.option_lanes().collect();
        let target = options[trial as usize % options.len()];
        let gait = if self.config.noiseless { self.config.gait.noiseless() } else { self.config.gait };
        let min_speed = self.variability.speed_range.0.min(self.variability.speed_range.1);
        let duration = (w.length - self.variability.start_offset.0).max(0.0) / min_speed + 1.0;
        let walk = sample_walk_trial(&gait, &self.plan, &self.variability, layout.center(target), duration, rec.seed)?;
        // the track ends at its far edge
        let trace: Vec<_> = walk.trace.iter().copied().take_while(|s| s.y <= w.length).collect();
        let trace = if trace.is_empty() { walk.trace[..1].to_vec() } else { trace };
        let m = score_trial(&trace, target, &SelectorConfig::new(selection_time)?, &layout, walk.task_shown_at)?;

        rec.target = target.to_string();
        rec.success = m.success;
        rec.tct = m.tct;
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        rec.metrics.extend([
            ("walked_distance".to_string(), m.walked_distance),
            ("longitudinal_distance".to_string(), m.longitudinal_distance),
            ("stabilizing_error".to_string(), flag(m.stabilizing_error)),
            ("overshoot".to_string(), flag(m.error_kind == Some(ErrorKind::Overshoot))),
            ("swing_back".to_string(), flag(m.error_kind == Some(ErrorKind::SwingBack))),
            ("wrong_lane".to_string(), flag(m.failure_reason == Some(FailureReason::WrongLane))),
            ("end_of_track".to_string(), flag(m.failure_reason == Some(FailureReason::EndOfTrack))),
            ("speed".to_string(), walk.gait.speed),
        ]);
        if let Some(lane) = m.selected_lane {
            rec.metrics.insert("selected_lane".into(), lane as f64);
        }
        Ok(())
    }

    fn foottap(&self, rec: &mut TrialRecord, cell: &FoottapCell, job: &Job) -> Result<()> {
        let cells: Vec<Cell> = cell.grid.cells().collect();
        let target = cells[job.trial as usize % cells.len()];
        let tap = gen_tap(&cell.grid, target, &self.scatter, rec.seed)?;
        let chosen = match cell.mode {
            TapMode::Direct => hit_test(&cell.grid, tap.point),
            TapMode::Indirect => {
                let clf = cell.classifiers[job.run as usize].as_ref().expect("trained per run");
                Some(clf.predict([tap.point.x, tap.point.y]))
            }
        };
        let f = &self.config.foottap;
        let mut r = rng(rec.seed ^ 0x7463_7400);
        let tct = if self.config.noiseless || f.tct_sd == 0.0 {
            f.tct_mean
        } else {
            let normal = Normal::new(f.tct_mean, f.tct_sd).map_err(|e| Error::InvalidConfig(e.to_string()))?;
            // truncated to positive times
            (0..64).map(|_| normal.sample(&mut r)).find(|&v| v > 0.0).unwrap_or(f.tct_mean)
        };

        rec.target = target.to_string();
        rec.success = chosen == Some(target);
        rec.tct = tct;
        rec.metrics.extend([("x".to_string(), tap.point.x), ("y".to_string(), tap.point.y)]);
        if let Some(c) = chosen {
            rec.metrics.insert("chosen_row".into(), c.row as f64);
            rec.metrics.insert("chosen_col".into(), c.col as f64);
        }
        Ok(())
    }

    fn proximity(&self, rec: &mut TrialRecord, cell: &ProximityCell, trial: u32) -> Result<()> {
        let layers = &cell.layers;
        let target = cell.targets[trial as usize % cell.targets.len()];
        let interval = layers.layer(target);
        let start = layers.reference_point();
        let trace = gen_hand_trace(&layers.bounds(), start, layers.center(target), &self.reach, rec.seed)?;
        let hold = self.config.proximity.hold_window;
        let m = hand_trial_metrics(&trace.samples, interval, trace.confirm_time, hold)?;
        let end = trace.confirm_time + hold;
        let held = trace
            .samples
            .iter()
            .filter(|s| s.t >= trace.confirm_time - 1e-9 && s.t <= end + 1e-9)
            .all(|s| locate(layers, s.d) == Location::Layer(target));

        rec.target = target.to_string();
        rec.success = held;
        rec.tct = m.tct;
        rec.metrics.extend([
            ("overshoot_error".to_string(), m.overshoot_error),
            ("holding_error".to_string(), m.holding_error),
            ("thickness".to_string(), layers.thickness(target)),
            ("zone".to_string(), trace.zone.index() as f64),
        ]);
        Ok(())
    }
}

/// Trains the indirect-mode classifier for one run from synthetic
/// calibration taps on every cell.
fn calibrate(
    grid: &FootGrid,
    scatter: &TapScatterParams,
    taps_per_cell: u32,
    master: u64,
    cond: u64,
    run: u32,
) -> Result<TapClassifier> {
    let cells: Vec<Cell> = grid.cells().collect();
    if cells.len() < 2 {
        return Err(Error::InvalidConfig("indirect mode needs at least two cells".into()));
    }
    let base = CALIBRATION_STREAM + run as u64 * (cells.len() as u64 * taps_per_cell as u64);
    let samples: Vec<TapSample> = cells
        .iter()
        .enumerate()
        .flat_map(|(ci, &cell)| {
            (0..taps_per_cell).map(move |k| (cell, base + (ci as u64 * taps_per_cell as u64) + k as u64))
        })
        .map(|(cell, i)| gen_tap(grid, cell, scatter, derive_seed(master, cond, i)))
        .collect::<Result<_>>()?;
    train_classifier(&samples, &SvmParams::default(), derive_seed(master, cond, CALIBRATION_STREAM - 1 - run as u64))
}
