//! Failure kinds and their exit codes.

use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Config or flag violates the schema; exit 2.
    #[error("{pointer}: {message}")]
    Schema { pointer: String, message: String },
    /// An exact computation would exceed its enumeration budget; exit 3.
    #[error("{0}")]
    Budget(String),
    /// A computed result broke an invariant it must satisfy; exit 4.
    #[error("{0}")]
    Invariant(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } => 2,
            CliError::Budget(_) => 3,
            CliError::Invariant(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Schema { .. } => "schema",
            CliError::Budget(_) => "budget",
            CliError::Invariant(_) => "invariant",
            CliError::Io(_) => "io",
        };
        let mut err = json!({ "kind": kind, "message": self.to_string(), "exit_code": self.exit_code() });
        if let CliError::Schema { pointer, message } = self {
            err["pointer"] = json!(pointer);
            err["message"] = json!(message);
        }
        json!({ "error": err })
    }
}

const MODEL_FIELDS: [&str; 6] = ["D", "k", "L", "a", "lambda", "mu"];

impl From<toric_core::Error> for CliError {
    fn from(e: toric_core::Error) -> Self {
        use toric_core::Error as E;
        match e {
            E::Argument { field, message } => {
                let block = if MODEL_FIELDS.contains(&field) { "model" } else { "task" };
                CliError::schema(format!("/{block}/{field}"), message)
            }
            E::Budget { .. } => CliError::Budget(e.to_string()),
            // Too few samples for an error estimate: the run length was set too short.
            E::InsufficientData(m) => CliError::schema("/task", m),
            E::Invariant(m) => CliError::Invariant(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
