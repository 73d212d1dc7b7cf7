//! The line-oriented report printed by every subcommand.
//!
//! ```text
//! command <name>
//! digest <sha256 of the input document and the normalized arguments>
//! outcome <ok | conjugate | not_conjugate | invalid | failed | undecided | budget_exceeded | error>
//! <body lines, `key value...`>
//! ```
//!
//! With `--timings` a final `timing total_ms <n>` line is added. Timings are
//! the only part of a report that varies between identical runs.

use std::fmt::Write as _;
use std::process::ExitCode;

use sha2::{Digest, Sha256};

/// Exit status of a command.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    /// A definite outcome.
    Definite = 0,
    /// The input violates an invariant or a check failed.
    Failed = 1,
    /// Unusable input or arguments.
    InputError = 2,
    /// A semi-decision ran out of budget.
    Undecided = 3,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> ExitCode {
        ExitCode::from(s as u8)
    }
}

pub struct Report {
    pub command: String,
    pub digest: String,
    pub outcome: String,
    pub status: Status,
    pub body: Vec<String>,
}

impl Report {
    pub fn new(command: &str, digest: String) -> Report {
        Report { command: command.into(), digest, outcome: "ok".into(), status: Status::Definite, body: Vec::new() }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.body.push(text.into());
    }

    /// Adds every line of a block of text.
    pub fn block(&mut self, text: &str) {
        self.body.extend(text.lines().map(str::to_string));
    }

    pub fn finish(&mut self, outcome: &str, status: Status) {
        self.outcome = outcome.into();
        self.status = status;
    }

    pub fn error(&mut self, message: impl std::fmt::Display) {
        self.finish("error", Status::InputError);
        self.line(format!("error {message}"));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command {}", self.command);
        let _ = writeln!(out, "digest {}", self.digest);
        let _ = writeln!(out, "outcome {}", self.outcome);
        for l in &self.body {
            let _ = writeln!(out, "{l}");
        }
        out
    }
}

/// Hash of the input document followed by the arguments that affect the
/// outcome, each terminated by a zero byte.
pub fn digest(document: Option<&str>, args: &[String]) -> String {
    let mut h = Sha256::new();
    h.update(document.unwrap_or("").as_bytes());
    h.update([0]);
    for a in args {
        h.update(a.as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}

/// Drops the arguments that cannot change an outcome: `--jobs`, `--timings`
/// and the input path (its contents are hashed instead).
pub fn normalized_args(raw: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip_value = false;
    for a in raw {
        if skip_value {
            skip_value = false;
            continue;
        }
        match a.as_str() {
            "--jobs" | "--input" => skip_value = true,
            "--timings" => {}
            s if s.starts_with("--jobs=") || s.starts_with("--input=") => {}
            _ => out.push(a.clone()),
        }
    }
    out
}
