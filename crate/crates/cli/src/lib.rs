//! Report generation for `tmtool`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::{json, Map, Value};
use twisted_poisson::json::{parse_input, poly_structure_from_json, structure_from_json, InputJson};
use twisted_poisson::Error;

mod algebra;
mod fields;
pub mod text;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Verify,
    Modular,
    Elw,
    Cohomology,
    Identities,
    Poly,
    Gauge,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Modular => "modular",
            Command::Elw => "elw",
            Command::Cohomology => "cohomology",
            Command::Identities => "identities",
            Command::Poly => "poly",
            Command::Gauge => "gauge",
            Command::All => "all",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: PathBuf,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub degree_bound: Option<u32>,
    pub trials: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(command: Command, input: impl Into<PathBuf>) -> Self {
        RunConfig { command, input: input.into(), out: None, format: Format::Json, degree_bound: None, trials: 20, seed: 0 }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_IDENTITY: i32 = 2;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Value,
}

/// Accumulates sections, asserted identities and failures.
#[derive(Default)]
pub(crate) struct Report {
    sections: Map<String, Value>,
    identities: BTreeMap<String, bool>,
    unasserted: BTreeMap<String, bool>,
    failures: Vec<Value>,
}

impl Report {
    pub(crate) fn section(&mut self, key: &str, v: Value) {
        self.sections.insert(key.to_string(), v);
    }

    /// Records an asserted identity; repeated checks are combined and only the
    /// first failure builds a counterexample.
    pub(crate) fn check(&mut self, name: &str, holds: bool, counterexample: impl FnOnce() -> Value) {
        let e = self.identities.entry(name.to_string()).or_insert(true);
        let was = *e;
        *e = was && holds;
        if !holds && was {
            self.failures.push(json!({ "identity": name, "counterexample": counterexample() }));
        }
    }

    /// Records a result that is reported but does not affect the exit code.
    pub(crate) fn note(&mut self, name: &str, holds: bool) {
        self.unasserted.insert(name.to_string(), holds);
    }

    /// Drops identities (and their failures) that a suite does not assert.
    pub(crate) fn identities_remove(&mut self, names: &[&str]) {
        for n in names {
            self.identities.remove(*n);
        }
        self.failures.retain(|f| !names.iter().any(|n| f["identity"] == *n));
    }

    /// Merges another report; existing sections win.
    pub(crate) fn absorb(&mut self, other: Report) {
        for (k, v) in other.sections {
            self.sections.entry(k).or_insert(v);
        }
        for (k, v) in other.identities {
            let e = self.identities.entry(k).or_insert(true);
            *e = *e && v;
        }
        self.unasserted.extend(other.unasserted);
        self.failures.extend(other.failures);
    }

    fn finish(self, command: Command) -> Outcome {
        let pass = self.identities.values().all(|&b| b);
        let mut out = self.sections;
        out.insert("command".into(), json!(command.name()));
        out.insert("status".into(), json!(if pass { "pass" } else { "fail" }));
        out.insert("identities".into(), json!(self.identities));
        if !self.unasserted.is_empty() {
            out.insert("unasserted".into(), json!(self.unasserted));
        }
        out.insert("failures".into(), Value::Array(self.failures));
        Outcome { code: if pass { EXIT_PASS } else { EXIT_IDENTITY }, report: Value::Object(out) }
    }
}

fn input_error(command: Command, msg: String) -> Outcome {
    Outcome { code: EXIT_INPUT, report: json!({ "command": command.name(), "status": "input_error", "error": msg }) }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let text = match std::fs::read_to_string(&cfg.input) {
        Ok(t) => t,
        Err(e) => return input_error(cfg.command, format!("{}: {e}", cfg.input.display())),
    };
    run_text(cfg, &text)
}

/// Runs a suite on the contents of a structure file.
pub fn run_text(cfg: &RunConfig, text: &str) -> Outcome {
    let mut report = Report::default();
    let result = parse_input(text).and_then(|input| match input {
        InputJson::Algebra(j) => {
            let s = structure_from_json(&j)?;
            algebra::run(cfg, &s, &mut report)
        }
        InputJson::Poly(j) => {
            let s = poly_structure_from_json(&j)?;
            fields::run(cfg, &s, &mut report)
        }
    });
    match result {
        Ok(()) => report.finish(cfg.command),
        Err(e) => input_error(cfg.command, e.to_string()),
    }
}

pub(crate) fn unsupported(command: Command, kind: &str) -> Error {
    Error::Invalid(format!("command {:?} does not apply to {kind} structure files", command.name()))
}

/// Serializes a report in the requested format, with a trailing newline.
pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => text::render(report),
    }
}

/// Greedy term deletion: drops items one at a time while `fails` stays true.
pub(crate) fn minimize<T: Clone>(items: Vec<T>, fails: impl Fn(&[T]) -> bool) -> Vec<T> {
    let mut cur = items;
    let mut i = 0;
    while i < cur.len() {
        let mut trial = cur.clone();
        trial.remove(i);
        if fails(&trial) {
            cur = trial;
        } else {
            i += 1;
        }
    }
    cur
}
