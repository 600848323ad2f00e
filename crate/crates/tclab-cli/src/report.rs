use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use tclab::Error;

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Check(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) | Failure::Io(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Positivity(_)
            | Error::NotMetricPoint(_)
            | Error::Inconsistent(_)
            | Error::Rejected(_)
            | Error::NotFound(_)
            | Error::Singular(_)
            | Error::Degenerate(_)
            | Error::IndeterminateSign => Failure::Check(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Raw bytes that determine a run: the arguments and every file read.
pub struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    pub fn new(argv: &[String]) -> Self {
        let mut hasher = Sha256::new();
        for a in argv {
            hasher.update(a.as_bytes());
            hasher.update([0u8]);
        }
        Inputs { hasher }
    }

    pub fn read(&mut self, path: &str) -> Result<String, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Io(format!("cannot read {path}: {e}")))?;
        self.hasher.update(path.as_bytes());
        self.hasher.update([0u8]);
        self.hasher.update(text.as_bytes());
        Ok(text)
    }

    fn digest(&self) -> String {
        self.hasher
            .clone()
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// What a subcommand hands back to the dispatcher.
pub struct Outcome {
    pub passed: bool,
    pub results: Value,
    pub certificates: Value,
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub argv: Vec<String>,
    pub inputs_digest: String,
    pub status: &'static str,
    pub results: Value,
    pub certificates: Value,
}

impl Outcome {
    pub fn into_report(self, command: &str, argv: &[String], inputs: &Inputs) -> RunReport {
        RunReport {
            command: command.to_string(),
            argv: argv.to_vec(),
            inputs_digest: inputs.digest(),
            status: if self.passed { "pass" } else { "fail" },
            results: self.results,
            certificates: self.certificates,
        }
    }
}
