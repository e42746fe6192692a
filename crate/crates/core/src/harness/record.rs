use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Technique {
    Proximity,
    Foottap,
    Walkline,
}

impl Technique {
    pub fn as_str(self) -> &'static str {
        match self {
            Technique::Proximity => "proximity",
            Technique::Foottap => "foottap",
            Technique::Walkline => "walkline",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proximity" => Ok(Technique::Proximity),
            "foottap" => Ok(Technique::Foottap),
            "walkline" => Ok(Technique::Walkline),
            other => Err(Error::InvalidConfig(format!("unknown technique {other:?}"))),
        }
    }
}

/// A condition level: numeric (lane count, selection time) or categorical
/// (interface mode, guideline partition).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Level {
    Num(f64),
    Text(String),
}

impl Level {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Level::Num(v) => Some(*v),
            Level::Text(_) => None,
        }
    }

    /// Numbers first in numeric order, then text.
    pub fn cmp_key(&self, other: &Level) -> std::cmp::Ordering {
        match (self, other) {
            (Level::Num(a), Level::Num(b)) => a.total_cmp(b),
            (Level::Num(_), Level::Text(_)) => std::cmp::Ordering::Less,
            (Level::Text(_), Level::Num(_)) => std::cmp::Ordering::Greater,
            (Level::Text(a), Level::Text(b)) => a.cmp(b),
        }
    }

    /// Inverse of `Display`: numbers parse back as numbers.
    pub fn parse(s: &str) -> Level {
        match s.parse::<f64>() {
            Ok(v) => Level::Num(v),
            Err(_) => Level::Text(s.to_string()),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Num(v) => write!(f, "{v}"),
            Level::Text(s) => f.write_str(s),
        }
    }
}

impl From<f64> for Level {
    fn from(v: f64) -> Self {
        Level::Num(v)
    }
}

impl From<&str> for Level {
    fn from(s: &str) -> Self {
        Level::Text(s.to_string())
    }
}

/// Scored outcome of one simulated or live trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub technique: Technique,
    pub condition: BTreeMap<String, Level>,
    pub target: String,
    pub success: bool,
    pub tct: f64,
    #[serde(default)]
    pub metrics: BTreeMap<String, f64>,
    pub seed: u64,
    /// Participant or run index.
    pub run: u32,
    /// Place of this condition in the run's counterbalanced order.
    pub position: u32,
    /// Trial index within the condition cell.
    pub trial: u32,
}

impl TrialRecord {
    /// Value of `metric`: `success` (as 0/1), `tct`, or an extra metric.
    pub fn metric(&self, metric: &str) -> Option<f64> {
        match metric {
            "success" => Some(if self.success { 1.0 } else { 0.0 }),
            "tct" => Some(self.tct),
            other => self.metrics.get(other).copied(),
        }
    }

    /// Group label for a key: a condition key, `technique`, `target` or `run`.
    pub fn group_value(&self, key: &str) -> Option<String> {
        match key {
            "technique" => Some(self.technique.to_string()),
            "target" => Some(self.target.clone()),
            "run" => Some(self.run.to_string()),
            other => self.condition.get(other).map(Level::to_string),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_json_is_untagged() {
        let c: BTreeMap<String, Level> =
            serde_json::from_str(r#"{"lanes":8,"mode":"direct","s":0.3333333333333333}"#).unwrap();
        assert_eq!(c["lanes"], Level::Num(8.0));
        assert_eq!(c["mode"], Level::Text("direct".into()));
        assert_eq!(c["s"], Level::Num(1.0 / 3.0));
        assert_eq!(Level::parse(&Level::Num(1.0 / 3.0).to_string()), Level::Num(1.0 / 3.0));
        assert_eq!(Level::Num(8.0).to_string(), "8");
    }

    #[test]
    fn technique_names() {
        for t in [Technique::Proximity, Technique::Foottap, Technique::Walkline] {
            assert_eq!(t.to_string().parse::<Technique>().unwrap(), t);
        }
        assert!(matches!("dance".parse::<Technique>(), Err(Error::InvalidConfig(_))));
    }
}
