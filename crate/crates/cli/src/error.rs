use conespec::{Error as CoreError, ErrorClass};
use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 bad arguments, 3 numerical failure, 4 refusal.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e.class() {
                ErrorClass::InvalidInput => 2,
                ErrorClass::Numerical => 3,
                ErrorClass::Refused => 4,
            },
            CliError::Io(_) => 3,
        }
    }

    fn class(&self) -> &'static str {
        match self.exit_code() {
            2 => "invalid-input",
            4 => "refused",
            _ => "numerical",
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": {
                "class": self.class(),
                "exit_code": self.exit_code(),
                "message": self.to_string(),
            }
        });
        if let CliError::Core(CoreError::NoiseFloor { indices }) = self {
            v["error"]["noise_floor_points"] = json!(indices);
        }
        v
    }
}
