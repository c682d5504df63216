//! Run reports and their table/json/csv renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreEntry {
    pub label: String,
    pub score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub scores: Vec<ScoreEntry>,
    pub diagnostics: BTreeMap<String, Value>,
    pub metadata: Metadata,
}

impl RunReport {
    pub fn new(method: impl Into<String>) -> Self {
        Self {
            method: method.into(),
            alpha: None,
            scores: Vec::new(),
            diagnostics: BTreeMap::new(),
            metadata: Metadata::default(),
        }
    }

    /// Sets scores sorted descending; equal scores keep input order.
    pub fn with_scores(mut self, labels: &[String], scores: &[f64], stderr: Option<&[f64]>) -> Self {
        let mut entries: Vec<ScoreEntry> = labels
            .iter()
            .enumerate()
            .map(|(i, label)| ScoreEntry {
                label: label.clone(),
                score: scores[i],
                stderr: stderr.map(|s| s[i]),
            })
            .collect();
        entries.sort_by(|a, b| b.score.total_cmp(&a.score));
        self.scores = entries;
        self
    }

    pub fn diag(&mut self, key: &str, value: impl Into<Value>) {
        self.diagnostics.insert(key.to_owned(), value.into());
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Table => self.render_table(),
        }
    }

    fn has_stderr(&self) -> bool {
        self.scores.iter().any(|s| s.stderr.is_some())
    }

    fn render_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        let with_se = self.has_stderr();
        let header: &[&str] = if with_se {
            &["label", "score", "stderr"]
        } else {
            &["label", "score"]
        };
        writer.write_record(header).expect("in-memory write");
        for entry in &self.scores {
            let mut row = vec![entry.label.clone(), sig12(entry.score)];
            if with_se {
                row.push(entry.stderr.map(sig12).unwrap_or_default());
            }
            writer.write_record(&row).expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
    }

    fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "method: {}", self.method);
        if let Some(alpha) = self.alpha {
            let _ = write!(out, " (alpha = {})", sig12(alpha));
        }
        out.push('\n');
        let with_se = self.has_stderr();
        let width = self
            .scores
            .iter()
            .map(|s| s.label.chars().count())
            .chain(std::iter::once(5))
            .max()
            .unwrap_or(5);
        let _ = write!(out, "{:<width$}  {:>18}", "label", "score");
        if with_se {
            let _ = write!(out, "  {:>18}", "stderr");
        }
        out.push('\n');
        for entry in &self.scores {
            let _ = write!(out, "{:<width$}  {:>18}", entry.label, sig12(entry.score));
            if with_se {
                let _ = write!(out, "  {:>18}", entry.stderr.map(sig12).unwrap_or_default());
            }
            out.push('\n');
        }
        if !self.diagnostics.is_empty() {
            out.push_str("diagnostics:\n");
            for (key, value) in &self.diagnostics {
                let _ = writeln!(out, "  {key}: {}", compact(value));
            }
        }
        let meta = serde_json::to_value(&self.metadata).expect("metadata serializes");
        if let Value::Object(map) = meta {
            if !map.is_empty() {
                out.push_str("metadata:\n");
                for (key, value) in map {
                    let _ = writeln!(out, "  {key}: {}", compact(&value));
                }
            }
        }
        out
    }
}

fn compact(value: &Value) -> String {
    match value {
        Value::Number(n) => n.as_f64().map_or_else(
            || n.to_string(),
            |x| {
                if n.is_f64() {
                    sig12(x)
                } else {
                    n.to_string()
                }
            },
        ),
        Value::String(s) => s.clone(),
        Value::Array(items) => format!("[{}]", items.iter().map(compact).collect::<Vec<_>>().join(", ")),
        other => other.to_string(),
    }
}

/// Twelve significant digits, plain notation for moderate magnitudes and
/// scientific otherwise, trailing zeros trimmed.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_owned()
        }
    } else {
        s
    }
}
