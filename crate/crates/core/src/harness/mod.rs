//! Records, counterbalancing, statistics, the experiment runner,
//! persistence and the playground session server.

mod config;
mod experiment;
mod export;
mod latin;
mod playground;
mod record;
mod serve;
mod stats;

pub use config::{
    ExperimentConfig, FoottapFactors, GuidelineTag, LayerSpec, ProximityFactors, TapMode, WalklineFactors,
};
pub use experiment::{run_experiment, run_experiment_sequential};
pub use export::{
    export_records, export_stats, import_records, read_records_csv, read_records_jsonl, write_records_csv,
    write_records_jsonl, write_stats_csv, Format,
};
pub use latin::balanced_latin_square;
pub use playground::{
    CalibrationTap, FoottapParams, LayerEvent, PlaygroundMsg, PlaygroundReply, PlaygroundSession, ProximityParams,
    WalklineParams,
};
pub use record::{Level, Technique, TrialRecord};
pub use serve::serve_playground;
pub use stats::{describe, summarize, t_quantile, GroupStats, SummaryStats};
