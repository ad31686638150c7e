use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    CheckFailed,
    Error,
}

#[derive(Debug, Serialize)]
pub struct CommandOutcome {
    pub command: String,
    pub params: Value,
    pub results: Value,
    pub status: Status,
    pub summary: String,
}

impl CommandOutcome {
    pub fn new(command: &str, params: Value, results: Value, passed: bool, summary: String) -> Self {
        Self {
            command: command.to_string(),
            params,
            results,
            status: if passed { Status::Ok } else { Status::CheckFailed },
            summary,
        }
    }

    pub fn error(command: &str, params: Value, err: impl std::fmt::Display) -> Self {
        Self {
            command: command.to_string(),
            params,
            results: Value::Null,
            status: Status::Error,
            summary: format!("error: {err}"),
        }
    }
}
