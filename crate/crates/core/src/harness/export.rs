use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::record::{Level, TrialRecord};
use super::stats::GroupStats;
use crate::error::{invalid_data, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// Chosen by file extension; anything but `.csv` is JSONL.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Jsonl,
        }
    }
}

const TAIL: [&str; 4] = ["seed", "run", "position", "trial"];

/// Writes records as CSV. Columns: technique, condition keys (sorted),
/// target, success, tct, metric keys (sorted), seed, run, position, trial.
/// Absent condition or metric values are empty cells.
pub fn write_records_csv<W: Write>(records: &[TrialRecord], out: W) -> Result<()> {
    let cond_keys: BTreeSet<&str> = records.iter().flat_map(|r| r.condition.keys().map(String::as_str)).collect();
    let metric_keys: BTreeSet<&str> = records.iter().flat_map(|r| r.metrics.keys().map(String::as_str)).collect();
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = std::iter::once("technique")
        .chain(cond_keys.iter().copied())
        .chain(["target", "success", "tct"])
        .chain(metric_keys.iter().copied())
        .chain(TAIL)
        .collect();
    w.write_record(&header)?;
    for r in records {
        let mut row: Vec<String> = vec![r.technique.to_string()];
        row.extend(cond_keys.iter().map(|k| r.condition.get(*k).map(Level::to_string).unwrap_or_default()));
        row.extend([r.target.clone(), r.success.to_string(), r.tct.to_string()]);
        row.extend(metric_keys.iter().map(|k| r.metrics.get(*k).map(f64::to_string).unwrap_or_default()));
        row.extend([r.seed.to_string(), r.run.to_string(), r.position.to_string(), r.trial.to_string()]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn parse<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field.parse().map_err(|_| invalid_data(format!("bad {what} value {field:?}")))
}

/// Reads records written by [`write_records_csv`].
pub fn read_records_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let target = header.iter().position(|h| h == "target");
    let valid = header.first().map(String::as_str) == Some("technique")
        && header.len() >= 8
        && header[header.len() - 4..].iter().map(String::as_str).eq(TAIL)
        && target.is_some_and(|t| {
            t + 3 <= header.len() - 4 && header[t + 1] == "success" && header[t + 2] == "tct"
        });
    if !valid {
        return Err(invalid_data("unexpected CSV header"));
    }
    let t = target.expect("checked");
    let tail = header.len() - 4;
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let condition: BTreeMap<String, Level> = (1..t)
            .filter(|&i| !field(i).is_empty())
            .map(|i| (header[i].clone(), Level::parse(field(i))))
            .collect();
        let metrics = (t + 3..tail)
            .filter(|&i| !field(i).is_empty())
            .map(|i| Ok((header[i].clone(), parse::<f64>(field(i), &header[i])?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        out.push(TrialRecord {
            technique: field(0).parse()?,
            condition,
            target: field(t).to_string(),
            success: parse(field(t + 1), "success")?,
            tct: parse(field(t + 2), "tct")?,
            metrics,
            seed: parse(field(tail), "seed")?,
            run: parse(field(tail + 1), "run")?,
            position: parse(field(tail + 2), "position")?,
            trial: parse(field(tail + 3), "trial")?,
        });
    }
    Ok(out)
}

pub fn write_records_jsonl<W: Write>(records: &[TrialRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_records_jsonl<R: Read>(input: R) -> Result<Vec<TrialRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| invalid_data(format!("line {}: {e}", i + 1)))?);
    }
    Ok(out)
}

/// Stats table: one column per group key, then metric, n, mean, sd, se,
/// ci_lo, ci_hi. Unavailable values are empty.
pub fn write_stats_csv<W: Write>(stats: &[GroupStats], group_by: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = group_by
        .iter()
        .map(String::as_str)
        .chain(["metric", "n", "mean", "sd", "se", "ci_lo", "ci_hi"])
        .collect();
    w.write_record(&header)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for g in stats {
        let s = &g.stats;
        let mut row: Vec<String> = group_by.iter().map(|k| g.group.get(k).cloned().unwrap_or_default()).collect();
        row.extend([
            g.metric.clone(),
            s.n.to_string(),
            s.mean.to_string(),
            opt(s.sd),
            opt(s.se),
            opt(s.ci95.map(|c| c.0)),
            opt(s.ci95.map(|c| c.1)),
        ]);
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn export_records(records: &[TrialRecord], format: Format, path: &Path) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_records_csv(records, out),
        Format::Jsonl => write_records_jsonl(records, out),
    }
}

pub fn import_records(path: &Path) -> Result<Vec<TrialRecord>> {
    let input = File::open(path).map_err(Error::Io)?;
    match Format::from_path(path) {
        Format::Csv => read_records_csv(input),
        Format::Jsonl => read_records_jsonl(input),
    }
}

pub fn export_stats(stats: &[GroupStats], group_by: &[String], path: &Path) -> Result<()> {
    write_stats_csv(stats, group_by, BufWriter::new(File::create(path)?))
}
