//! Command reports and their JSON and text renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{exit, CliError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub result: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub breakdown: Vec<Value>,
    #[serde(default)]
    pub assertions: Vec<Assertion>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: &str, result: impl Into<Value>) -> Self {
        Report {
            command: command.to_owned(),
            inputs: Vec::new(),
            result: result.into(),
            breakdown: Vec::new(),
            assertions: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn assert_eq(&mut self, name: impl Into<String>, lhs: i64, rhs: i64) -> &mut Self {
        self.assertions.push(Assertion { name: name.into(), lhs, rhs, pass: lhs == rhs });
        self
    }

    pub fn warn(&mut self, msg: impl Into<String>) -> &mut Self {
        self.warnings.push(msg.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            exit::OK
        } else {
            exit::DISAGREEMENT
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.command, render_value(&self.result));
        if !self.breakdown.is_empty() {
            out.push_str("breakdown:\n");
            for row in &self.breakdown {
                let _ = writeln!(out, "  {}", render_value(row));
            }
        }
        for a in &self.assertions {
            let status = if a.pass { "pass" } else { "FAIL" };
            let _ = writeln!(out, "[{status}] {}: {} = {}", a.name, a.lhs, a.rhs);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        for i in &self.inputs {
            let _ = writeln!(out, "input {} sha256:{}", i.path, i.sha256);
        }
        out
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}={}", render_value(v))).collect::<Vec<_>>().join(" "),
        Value::Array(items) => format!("[{}]", items.iter().map(render_value).collect::<Vec<_>>().join(", ")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Machine-readable form of a failed command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub command: String,
    pub error: ErrorBody,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub presentation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stratum: Option<String>,
}

impl ErrorReport {
    pub fn new(command: &str, err: &CliError) -> Self {
        let (model, presentation, stratum) = match unsupported_of(err) {
            Some(u) => (Some(u.model.clone()), Some(u.presentation.clone()), u.cell.clone()),
            None => (None, None, None),
        };
        ErrorReport {
            command: command.to_owned(),
            error: ErrorBody {
                kind: err.kind().to_owned(),
                message: err.to_string(),
                exit_code: err.exit_code(),
                model,
                presentation,
                stratum,
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn unsupported_of(err: &CliError) -> Option<&eulerchi_core::error::Unsupported> {
    use eulerchi_core::Error;
    let mut e = match err {
        CliError::Compute(e) => e,
        _ => return None,
    };
    loop {
        match e {
            Error::Unsupported(u) => return Some(u),
            Error::AtlasPiece { source, .. } => e = source,
            _ => return None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn failing_assertion_sets_exit_three() {
        let mut r = Report::new("translation", json!({"strata": 3}));
        r.assert_eq("a", 3, 3);
        assert_eq!(r.exit_code(), exit::OK);
        r.assert_eq("b", 3, 4);
        assert_eq!(r.exit_code(), exit::DISAGREEMENT);
        assert!(r.to_text().contains("[FAIL] b: 3 = 4"));
    }

    #[test]
    fn text_rendering_is_flat() {
        let mut r = Report::new("chi", 1);
        r.breakdown.push(json!({"cell": "e", "dim": 1}));
        let text = r.to_text();
        assert!(text.starts_with("chi: 1\n"));
        assert!(text.contains("  cell=e dim=1\n"));
    }
}
