use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use hypgrpd_core::Error;

pub const SCHEMA: &str = "hypgrpd/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Table,
}

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// A checked property failed.
    Violation,
    /// A budget ran out before the answer was settled.
    Budget,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Budget => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violation => "violation",
            Status::Budget => "budget-exhausted",
        }
    }
}

/// Failure before a report could be produced.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(msg: impl Into<String>) -> Self {
        Failure { code: 2, message: msg.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Budget(_)) { 3 } else { 2 };
        Failure { code, message: e.to_string() }
    }
}

pub type CmdResult = Result<Report, Failure>;

/// Where an input came from, with the SHA-256 of its bytes.
#[derive(Clone, Debug)]
pub struct InputRef {
    pub role: String,
    pub source: String,
    pub sha256: String,
}

impl InputRef {
    pub fn new(role: &str, source: impl Into<String>, bytes: &[u8]) -> Self {
        InputRef { role: role.into(), source: source.into(), sha256: hex::encode(Sha256::digest(bytes)) }
    }

    /// Inputs built from presets or flags are hashed through their canonical JSON.
    pub fn canonical(role: &str, source: impl Into<String>, v: &Value) -> Self {
        Self::new(role, source, v.to_string().as_bytes())
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputRef>,
    pub budgets: BTreeMap<String, Value>,
    pub seed: u64,
    pub truncated: bool,
    pub status: Status,
    pub result: Value,
    pub dot: Option<String>,
}

impl Report {
    pub fn new(command: &str, seed: u64) -> Self {
        Report {
            command: command.into(),
            inputs: Vec::new(),
            budgets: BTreeMap::new(),
            seed,
            truncated: false,
            status: Status::Ok,
            result: Value::Null,
            dot: None,
        }
    }

    pub fn input(mut self, i: InputRef) -> Self {
        self.inputs.push(i);
        self
    }

    pub fn budget(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.budgets.insert(name.into(), v.into());
        self
    }

    pub fn truncated(mut self, t: bool) -> Self {
        self.truncated |= t;
        self
    }

    pub fn violation_if(mut self, bad: bool) -> Self {
        if bad && self.status == Status::Ok {
            self.status = Status::Violation;
        }
        self
    }

    pub fn budget_exhausted_if(mut self, bad: bool) -> Self {
        if bad {
            self.status = Status::Budget;
        }
        self
    }

    pub fn result(mut self, v: Value) -> Self {
        self.result = v;
        self
    }

    pub fn dot(mut self, d: String) -> Self {
        self.dot = Some(d);
        self
    }

    pub fn to_json(&self) -> Value {
        let inputs: Vec<Value> = self.inputs.iter().map(|i| json!({"role": i.role, "source": i.source, "sha256": i.sha256})).collect();
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs": inputs,
            "budgets": self.budgets,
            "seed": self.seed,
            "truncated": self.truncated,
            "status": self.status.name(),
            "result": self.result,
        })
    }

    pub fn render(&self, format: Format) -> Result<String, Failure> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                Ok(s)
            }
            Format::Dot => self.dot.clone().ok_or_else(|| Failure::input(format!("{} does not produce a graph; DOT output is unavailable", self.command))),
            Format::Table => Ok(self.table()),
        }
    }

    fn table(&self) -> String {
        let mut rows: Vec<(String, String)> = vec![
            ("schema".into(), SCHEMA.into()),
            ("command".into(), self.command.clone()),
            ("status".into(), self.status.name().into()),
            ("seed".into(), self.seed.to_string()),
            ("truncated".into(), self.truncated.to_string()),
        ];
        for i in &self.inputs {
            rows.push((format!("input.{}", i.role), format!("{} sha256:{}", i.source, i.sha256)));
        }
        for (k, v) in &self.budgets {
            rows.push((format!("budget.{k}"), scalar(v)));
        }
        match &self.result {
            Value::Object(m) => flatten("", m, &mut rows),
            v => rows.push(("result".into(), scalar(v))),
        }
        let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        rows.iter().map(|(k, v)| format!("{k:w$}  {v}\n")).collect()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        v => v.to_string(),
    }
}

fn flatten(prefix: &str, m: &Map<String, Value>, rows: &mut Vec<(String, String)>) {
    for (k, v) in m {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Object(inner) => flatten(&key, inner, rows),
            v => rows.push((key, scalar(v))),
        }
    }
}
