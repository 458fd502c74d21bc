use serde::Serialize;
use serde_json::Value;

use crate::commands::Context;

/// What a subcommand found.
pub struct Outcome {
    pub passed: bool,
    pub verdict: String,
    pub result: Value,
    /// Extra lines for the human summary.
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(passed: bool, verdict: impl Into<String>, result: impl Serialize) -> Self {
        let result = serde_json::to_value(result).expect("reports serialize");
        Outcome { passed, verdict: verdict.into(), result, notes: Vec::new() }
    }

    pub fn note(mut self, line: impl Into<String>) -> Self {
        self.notes.push(line.into());
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub version: &'static str,
    pub inputs: Vec<InputDigest>,
    pub seed: Option<u64>,
    pub passed: bool,
    pub verdict: String,
    pub result: Value,
    #[serde(skip)]
    notes: Vec<String>,
}

impl RunReport {
    pub fn new(command: &'static str, ctx: Context<'_>, outcome: Outcome) -> Self {
        RunReport {
            command,
            version: env!("CARGO_PKG_VERSION"),
            inputs: ctx.inputs,
            seed: ctx.seed_used,
            passed: outcome.passed,
            verdict: outcome.verdict,
            result: outcome.result,
            notes: outcome.notes,
        }
    }

    pub fn emit(&self) {
        println!("{}", serde_json::to_string_pretty(self).expect("reports serialize"));
        eprintln!("{}: {} [{}]", self.command, self.verdict, if self.passed { "pass" } else { "FAIL" });
        for line in &self.notes {
            eprintln!("  {}", line);
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, or a violated precondition (exit 2).
    Input { message: String, line: Option<usize>, column: Option<usize> },
    /// A computation that could not complete (exit 1).
    Internal(String),
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    command: &'a str,
    version: &'a str,
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
    line: Option<usize>,
    column: Option<usize>,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure::Input { message: message.into(), line: None, column: None }
    }

    pub fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Failure::Input { message: message.into(), line: Some(line), column: Some(column) }
    }

    pub fn code(&self) -> u8 {
        match self {
            Failure::Input { .. } => 2,
            Failure::Internal(_) => 1,
        }
    }

    pub fn emit(&self, command: &str) {
        let body = match self {
            Failure::Input { message, line, column } => {
                ErrorBody { kind: "input", message, line: *line, column: *column }
            }
            Failure::Internal(message) => ErrorBody { kind: "internal", message, line: None, column: None },
        };
        let report = ErrorReport { command, version: env!("CARGO_PKG_VERSION"), error: body };
        println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
        match self {
            Failure::Input { message, line: Some(l), column: Some(c) } => {
                eprintln!("{}: input error at line {}, column {}: {}", command, l, c, message)
            }
            Failure::Input { message, .. } => eprintln!("{}: input error: {}", command, message),
            Failure::Internal(message) => eprintln!("{}: error: {}", command, message),
        }
    }
}
