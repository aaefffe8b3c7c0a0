//! The JSON envelope wrapped around every command result, and the mapping
//! from library errors to exit codes.

use nullgauge::Error;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1.0";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "n/a")]
    NotApplicable,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportEnvelope {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub verdict: Verdict,
    pub payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorReport>,
    pub tool_version: &'static str,
}

/// Exit code conventions.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAIL: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const SAMPLING: i32 = 3;
    pub const SINGULAR: i32 = 4;
    pub const POLE: i32 = 5;
}

pub fn error_kind(e: &Error) -> (&'static str, i32) {
    match e {
        Error::Parse(_) => ("parse", exit::USAGE),
        Error::VariableOutOfScope { .. } => ("variable-out-of-scope", exit::USAGE),
        Error::OrderOverflow(_) => ("order-overflow", exit::USAGE),
        Error::InvalidParameter(_) => ("invalid-parameter", exit::USAGE),
        Error::EndpointMismatch { .. } => ("endpoint-mismatch", exit::USAGE),
        Error::SamplingExhausted { .. } => ("sampling-exhausted", exit::SAMPLING),
        Error::Eval(_) => ("singularity", exit::SINGULAR),
        Error::SingularityOnPath { .. } => ("singularity-on-path", exit::SINGULAR),
        Error::Pole { .. } => ("pole", exit::POLE),
    }
}

pub fn exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Pass | Verdict::NotApplicable => exit::PASS,
        Verdict::Fail => exit::FAIL,
    }
}

/// Flattens a JSON value into `path = value` lines for text output.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        Value::String(s) => out.push(format!("{prefix} = {s}")),
        other => out.push(format!("{prefix} = {other}")),
    }
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelopes contain only JSON-representable data")
    }

    pub fn to_text(&self) -> String {
        let mut lines = vec![format!("{}: {}", self.command, self.verdict.as_str())];
        if let Some(e) = &self.error {
            lines.push(format!("error ({}): {}", e.kind, e.message));
        }
        if !self.payload.is_null() {
            flatten("", &self.payload, &mut lines);
        }
        lines.join("\n")
    }
}
