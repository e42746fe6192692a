use std::io::{self, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::AtomicBool;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use log::info;

use abi::harness::{
    balanced_latin_square, describe, export_records, export_stats, import_records, run_experiment, serve_playground,
    write_records_jsonl, write_stats_csv, ExperimentConfig, Format, Technique,
};
use abi::infospace::{serve_dropspace, DropServerOptions};
use abi::{Error, Result};

#[derive(Parser)]
#[command(name = "abi", version, about = "Around-body interaction engine and experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an experiment and write one record per trial.
    Run {
        technique: Technique,
        /// JSON experiment config; flags below override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        lanes: Vec<u32>,
        #[arg(long = "selection-time", value_delimiter = ',')]
        selection_time: Vec<f64>,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        runs: Option<u32>,
        #[arg(long, env = "ABI_SEED")]
        seed: Option<u64>,
        /// Disable sway, noise and between-trial spread.
        #[arg(long)]
        noiseless: bool,
        /// Output file, `.csv` or JSONL; stdout (JSONL) when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Descriptive statistics of a records file.
    Stats {
        records: PathBuf,
        #[arg(long = "group-by", value_delimiter = ',')]
        group_by: Vec<String>,
        #[arg(long, default_value = "success")]
        metric: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print a balanced Latin square.
    Latinsquare { n: usize },
    /// Serve the playground protocol.
    Serve {
        #[arg(long, default_value_t = 7070)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        technique: Option<Technique>,
    },
    /// Serve the shared information space.
    Dropspace {
        #[arg(long, default_value_t = 7071)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long, env = "ABI_SEED", default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ABI_LOG", "warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { technique, config, lanes, selection_time, trials, runs, seed, noiseless, out } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::new(technique),
            };
            if cfg.technique != technique {
                return Err(Error::InvalidConfig(format!(
                    "config is for {} but {technique} was requested",
                    cfg.technique
                )));
            }
            if !lanes.is_empty() {
                cfg.walkline.lanes = lanes;
            }
            if !selection_time.is_empty() {
                cfg.walkline.selection_time = selection_time;
            }
            cfg.trials = trials.unwrap_or(cfg.trials);
            cfg.runs = runs.unwrap_or(cfg.runs);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.noiseless |= noiseless;
            cfg.validate()?;
            let records = run_experiment(&cfg)?;
            info!("{} records", records.len());
            match out.or(cfg.out) {
                Some(path) => export_records(&records, Format::from_path(&path), &path),
                None => write_records_jsonl(&records, io::stdout().lock()),
            }
        }
        Command::Stats { records, group_by, metric, out } => {
            let recs = import_records(&records)?;
            let stats = describe(&recs, &group_by, &metric)?;
            match out {
                Some(path) => export_stats(&stats, &group_by, &path),
                None => write_stats_csv(&stats, &group_by, io::stdout().lock()),
            }
        }
        Command::Latinsquare { n } => {
            let mut stdout = io::stdout().lock();
            for row in balanced_latin_square(n)? {
                let line: Vec<String> = row.iter().map(usize::to_string).collect();
                writeln!(stdout, "{}", line.join(" "))?;
            }
            Ok(())
        }
        Command::Serve { port, host, technique } => {
            let listener = TcpListener::bind((host.as_str(), port))?;
            eprintln!("playground protocol on {}", listener.local_addr()?);
            serve_playground(listener, technique, Arc::new(AtomicBool::new(false)))
        }
        Command::Dropspace { port, host, seed } => {
            let listener = TcpListener::bind((host.as_str(), port))?;
            eprintln!("dropspace protocol on {}", listener.local_addr()?);
            let options = DropServerOptions { seed, ..DropServerOptions::default() };
            serve_dropspace(listener, options, Arc::new(AtomicBool::new(false))).map(|_| ())
        }
    }
}
