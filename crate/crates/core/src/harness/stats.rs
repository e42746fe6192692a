use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::record::TrialRecord;
use crate::error::{invalid_arg, Result};

/// Descriptive statistics of one sample. `sd`, `se` and `ci95` need n ≥ 2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n: usize,
    pub mean: f64,
    pub sd: Option<f64>,
    pub se: Option<f64>,
    pub ci95: Option<(f64, f64)>,
}

/// Quantile of Student's t with `df` degrees of freedom, found by bisection
/// on the CDF to within 1e-6.
pub fn t_quantile(p: f64, df: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) || !(df > 0.0) {
        return Err(invalid_arg("t quantile needs 0 < p < 1 and df > 0"));
    }
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| invalid_arg(e.to_string()))?;
    let (mut lo, mut hi) = (-1.0, 1.0);
    while dist.cdf(lo) > p {
        lo *= 2.0;
    }
    while dist.cdf(hi) < p {
        hi *= 2.0;
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if dist.cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(invalid_arg("no values to summarise"));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return Ok(SummaryStats { n, mean, sd: None, se: None, ci95: None });
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let sd = var.sqrt();
    let se = sd / (n as f64).sqrt();
    let half = t_quantile(0.975, (n - 1) as f64)? * se;
    Ok(SummaryStats { n, mean, sd: Some(sd), se: Some(se), ci95: Some((mean - half, mean + half)) })
}

/// Statistics for one combination of group values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub group: BTreeMap<String, String>,
    pub metric: String,
    pub stats: SummaryStats,
}

/// Summarises `metric` per combination of `group_by` values. Records
/// without the metric or a group key are skipped. Groups come out ordered
/// by the group values, numerically where they parse as numbers.
pub fn describe(records: &[TrialRecord], group_by: &[String], metric: &str) -> Result<Vec<GroupStats>> {
    let mut groups: BTreeMap<Vec<GroupKey>, Vec<f64>> = BTreeMap::new();
    for r in records {
        let Some(v) = r.metric(metric) else { continue };
        let key: Option<Vec<GroupKey>> =
            group_by.iter().map(|k| r.group_value(k).map(GroupKey::new)).collect();
        if let Some(key) = key {
            groups.entry(key).or_default().push(v);
        }
    }
    groups
        .into_iter()
        .map(|(key, values)| {
            Ok(GroupStats {
                group: group_by.iter().cloned().zip(key.into_iter().map(|k| k.text)).collect(),
                metric: metric.to_string(),
                stats: summarize(&values)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct GroupKey {
    text: String,
}

impl GroupKey {
    fn new(text: String) -> Self {
        Self { text }
    }
}

impl Ord for GroupKey {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.text.parse::<f64>(), other.text.parse::<f64>()) {
            (Ok(a), Ok(b)) => a.total_cmp(&b).then_with(|| self.text.cmp(&other.text)),
            (Ok(_), Err(_)) => std::cmp::Ordering::Less,
            (Err(_), Ok(_)) => std::cmp::Ordering::Greater,
            _ => self.text.cmp(&other.text),
        }
    }
}

impl PartialOrd for GroupKey {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
