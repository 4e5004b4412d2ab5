use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!("grushin-cli ", env!("CARGO_PKG_VERSION"));

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Io(String),
    Domain(grushin::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Parse(_) => "ParseError",
            CliError::Io(_) => "IoError",
            CliError::Domain(e) => e.name(),
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Io(m) => m.clone(),
            CliError::Domain(e) => e.to_string(),
        }
    }

    pub fn record(&self, command: Option<&str>) -> Value {
        json!({
            "error": {
                "command": command,
                "exit_code": self.exit_code(),
                "kind": self.kind(),
                "message": self.message(),
            }
        })
    }
}

impl From<grushin::Error> for CliError {
    fn from(e: grushin::Error) -> Self {
        CliError::Domain(e)
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report values are plain data")
}

/// SHA-256 of the canonical JSON of `{command, inputs}`.
pub fn inputs_digest(command: &str, inputs: &Value) -> String {
    let canonical = json!({ "command": command, "inputs": inputs }).to_string();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn report(command: &str, inputs: &Value, payload: Value) -> Value {
    json!({
        "command": command,
        "inputs_digest": inputs_digest(command, inputs),
        "payload": payload,
        "tool_version": TOOL_VERSION,
    })
}

/// Single-line JSON with sorted keys and shortest round-trip floats.
pub fn render(value: &Value) -> String {
    let mut s = value.to_string();
    s.push('\n');
    s
}

pub fn write_csv(path: &Path, omega: &[f64], margin: &[f64]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["omega", "margin"]).map_err(io)?;
    for (o, m) in omega.iter().zip(margin) {
        w.write_record([o.to_string(), m.to_string()]).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
