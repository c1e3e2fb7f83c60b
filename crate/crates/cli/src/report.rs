use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// A flat list of numbers for `--csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// What a command produced, before it is wrapped into a [`Report`].
#[derive(Debug, Clone)]
pub struct Outcome {
    pub results: Value,
    pub pass: bool,
    pub series: Vec<Series>,
}

impl Outcome {
    pub fn new(results: impl Serialize, pass: bool) -> Self {
        Self {
            results: serde_json::to_value(results).expect("reports serialize to JSON"),
            pass,
            series: Vec::new(),
        }
    }

    pub fn with_series(mut self, series: Vec<Series>) -> Self {
        self.series = series;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    /// SHA-256 over the command, the effective flags and the scenario text.
    pub inputs_digest: String,
    pub results: Value,
    pub pass: bool,
    #[serde(skip)]
    pub series: Vec<Series>,
}

pub fn digest(command: &str, flags: &str, scenario: &str) -> String {
    let mut h = Sha256::new();
    for part in [command, flags, scenario] {
        h.update((part.len() as u64).to_le_bytes());
        h.update(part.as_bytes());
    }
    hex::encode(h.finalize())
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize to JSON");
        s.push('\n');
        s
    }

    /// `series,index,value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("series,index,value\n");
        for s in &self.series {
            for (i, v) in s.values.iter().enumerate() {
                out.push_str(&format!("{},{},{:e}\n", s.label, i, v));
            }
        }
        out
    }
}
