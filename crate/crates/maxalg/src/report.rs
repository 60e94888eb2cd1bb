//! Command results in JSON or plain text.

use std::fmt::Write;

use maxalg_core::Weight;
use serde::Serialize;
use serde_json::{json, Value};

use crate::model::JsonWeight;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct Verdict {
    pub check: String,
    pub holds: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Verdict {
    pub fn new(check: impl Into<String>, holds: bool, detail: impl Into<String>) -> Self {
        Verdict {
            check: check.into(),
            holds,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }
}

/// What a command produced. Contains no timing or other run-dependent
/// data, so equal inputs give byte-identical output.
#[derive(Clone, PartialEq, Debug, Default, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> Self {
        RunReport {
            command: command.into(),
            ..Default::default()
        }
    }

    /// 0 when every verdict holds, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.verdicts.iter().all(|v| v.holds) {
            0
        } else {
            1
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialise");
                s.push('\n');
                s
            }
            Format::Text => self.render_text(),
        }
    }

    fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command: {}", self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed: {seed}");
        }
        for r in &self.records {
            let _ = writeln!(s, "  {}", compact(r));
        }
        if let Some(r) = &self.result {
            match r {
                Value::Object(map) => {
                    for (k, v) in map {
                        let _ = writeln!(s, "{k}: {}", compact(v));
                    }
                }
                other => {
                    let _ = writeln!(s, "result: {}", compact(other));
                }
            }
        }
        if !self.verdicts.is_empty() {
            let width = self.verdicts.iter().map(|v| v.check.len()).max().unwrap_or(0);
            for v in &self.verdicts {
                let status = if v.holds { "PASS" } else { "FAIL" };
                let _ = write!(s, "{status}  {:width$}  {}", v.check, v.detail);
                if let Some(w) = &v.witness {
                    let _ = write!(s, " (witness: {w})");
                }
                s.push('\n');
            }
            let passed = self.verdicts.iter().filter(|v| v.holds).count();
            let _ = writeln!(s, "{passed}/{} checks hold", self.verdicts.len());
        }
        s
    }
}

fn compact(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn weights_json(v: &[Weight]) -> Value {
    json!(v.iter().copied().map(JsonWeight).collect::<Vec<_>>())
}

pub fn weight_json(w: Weight) -> Value {
    json!(JsonWeight(w))
}
