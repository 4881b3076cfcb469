//! The command pipeline behind the `wfav` binary: parse, validate, analyse,
//! map and verify, collected into one [`RunReport`].

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::datalog::emit_facts;
use crate::iq::{analyze_all, extract_facts, IqVerdict};
use crate::mapper::{identify_blocks, map_to_net, MappingTrace};
use crate::model::{validate_model, GoalModel};
use crate::parser::{parse_goal_model, parse_wfa_net, print_wfa_net, Diagnostic, SourceSpan};
use crate::properties::{check_all, CheckOptions, Violation};
use crate::wfa::{net_to_dot, reachability_graph, reachability_to_dot, ExecNet, Semantics, SoundnessReport, WfaNet};

pub const TOOL_VERSION: &str = concat!("wfav ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Flags {
    pub check: CheckOptions,
    pub format: Format,
    /// Where to write the Datalog fact dump of the model.
    pub emit_facts: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub color: bool,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
}

fn read(path: &Path) -> Result<String, PipelineError> {
    fs::read_to_string(path).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    fs::write(path, text).map_err(|source| PipelineError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub status: StageStatus,
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

/// Everything one command found, in a deterministic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub inputs: Vec<InputFile>,
    pub stages: Vec<Stage>,
    pub diagnostics: Vec<Diagnostic>,
    pub warnings: Vec<String>,
    pub verdicts: Vec<IqVerdict>,
    pub violations: Vec<Violation>,
    pub soundness: Option<SoundnessReport>,
    pub exit_code: i32,
}

impl RunReport {
    fn new() -> Self {
        RunReport {
            tool_version: TOOL_VERSION.to_string(),
            inputs: Vec::new(),
            stages: Vec::new(),
            diagnostics: Vec::new(),
            warnings: Vec::new(),
            verdicts: Vec::new(),
            violations: Vec::new(),
            soundness: None,
            exit_code: 0,
        }
    }

    fn input(&mut self, path: &Path, text: &str) {
        self.inputs.push(InputFile {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
        });
    }

    fn stage(&mut self, name: &str, status: StageStatus, detail: Option<String>) {
        self.stages.push(Stage { name: name.to_string(), status, detail });
    }

    fn finish(mut self) -> Self {
        let errors = self.diagnostics.iter().any(Diagnostic::is_error)
            || self.stages.iter().any(|s| s.status == StageStatus::Failed);
        self.exit_code = i32::from(errors || !self.violations.is_empty());
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn from_json(text: &str) -> serde_json::Result<RunReport> {
        serde_json::from_str(text)
    }

    /// Line-oriented rendering; violations use the `ID category elements: message` form.
    pub fn to_text(&self, color: bool) -> String {
        let paint = |code: &str, s: &str| if color { format!("\x1b[{code}m{s}\x1b[0m") } else { s.to_string() };
        let mut out = String::new();
        writeln!(out, "{}", self.tool_version).unwrap();
        for i in &self.inputs {
            writeln!(out, "input {} sha256={}", i.path, i.sha256).unwrap();
        }
        for s in &self.stages {
            let status = match s.status {
                StageStatus::Ok => paint("32", "ok"),
                StageStatus::Failed => paint("31", "failed"),
                StageStatus::Skipped => "skipped".to_string(),
            };
            match &s.detail {
                Some(d) => writeln!(out, "stage {} {status}: {d}", s.name).unwrap(),
                None => writeln!(out, "stage {} {status}", s.name).unwrap(),
            }
        }
        for d in &self.diagnostics {
            writeln!(out, "{d}").unwrap();
        }
        for w in &self.warnings {
            writeln!(out, "{}: {w}", paint("33", "warning")).unwrap();
        }
        for v in self.verdicts.iter().filter(|v| !v.satisfied) {
            writeln!(out, "verdict {v}").unwrap();
        }
        for v in &self.violations {
            let line = v.to_string();
            let (id, rest) = line.split_at(2);
            writeln!(out, "{}{rest}", paint("31", id)).unwrap();
        }
        if let Some(s) = &self.soundness {
            writeln!(out, "soundness: {} ({} states, {} edges)", if s.sound { "sound" } else { "unsound" }, s.states, s.edges).unwrap();
        }
        writeln!(
            out,
            "summary: {} violation(s), {} error diagnostic(s), exit {}",
            self.violations.len(),
            self.diagnostics.iter().filter(|d| d.is_error()).count(),
            self.exit_code
        )
        .unwrap();
        out
    }

    pub fn render(&self, flags: &Flags) -> String {
        match flags.format {
            Format::Text => self.to_text(flags.color),
            Format::Json => self.to_json() + "\n",
        }
    }
}

/// Parses and validates a model; `None` when it is not usable further.
fn load_model(path: &Path, r: &mut RunReport) -> Result<Option<GoalModel>, PipelineError> {
    let text = read(path)?;
    r.input(path, &text);
    let file = path.display().to_string();
    let model = match parse_goal_model(&text, &file) {
        Ok(p) => {
            r.diagnostics.extend(p.warnings);
            r.stage("parse", StageStatus::Ok, None);
            p.value
        }
        Err(diags) => {
            r.diagnostics.extend(diags);
            r.stage("parse", StageStatus::Failed, None);
            return Ok(None);
        }
    };
    let errors = validate_model(&model);
    if errors.is_empty() {
        r.stage("validate", StageStatus::Ok, None);
        Ok(Some(model))
    } else {
        let span = SourceSpan { file, line: 0, column: 0 };
        r.diagnostics.extend(errors.iter().map(|e| Diagnostic::error(span.clone(), e.to_string())));
        r.stage("validate", StageStatus::Failed, Some(format!("{} structural error(s)", errors.len())));
        Ok(None)
    }
}

fn load_net(path: &Path, r: &mut RunReport) -> Result<Option<WfaNet>, PipelineError> {
    let text = read(path)?;
    r.input(path, &text);
    match parse_wfa_net(&text, &path.display().to_string()) {
        Ok(p) => {
            r.diagnostics.extend(p.warnings);
            r.stage("parse-net", StageStatus::Ok, None);
            Ok(Some(p.value))
        }
        Err(diags) => {
            r.diagnostics.extend(diags);
            r.stage("parse-net", StageStatus::Failed, None);
            Ok(None)
        }
    }
}

fn load_trace(path: &Path, r: &mut RunReport) -> Result<MappingTrace, PipelineError> {
    let text = read(path)?;
    r.input(path, &text);
    MappingTrace::parse(&text).map_err(|(line, msg)| PipelineError::Input(format!("{}:{line}: {msg}", path.display())))
}

fn emit(model: &GoalModel, flags: &Flags) -> Result<(), PipelineError> {
    if let Some(p) = &flags.emit_facts {
        write(p, &emit_facts(extract_facts(model).iter()))?;
    }
    Ok(())
}

/// Parse, validate, IQ analysis, mapping and all property checks for one model.
pub fn cmd_check(path: &Path, flags: &Flags) -> Result<RunReport, PipelineError> {
    let mut r = RunReport::new();
    let Some(model) = load_model(path, &mut r)? else { return Ok(r.finish()) };
    emit(&model, flags)?;
    let verdicts = match analyze_all(&model) {
        Ok(v) => {
            r.stage("iq", StageStatus::Ok, None);
            v
        }
        Err(e) => {
            r.stage("iq", StageStatus::Failed, Some(e.to_string()));
            return Ok(r.finish());
        }
    };
    let mapped = identify_blocks(&model)
        .map_err(crate::mapper::MappingError::from)
        .and_then(|b| map_to_net(&model, &b, &verdicts));
    let (net, trace) = match mapped {
        Ok(x) => {
            r.stage("map", StageStatus::Ok, None);
            x
        }
        Err(e) => {
            r.verdicts = verdicts;
            r.stage("map", StageStatus::Failed, Some(e.to_string()));
            return Ok(r.finish());
        }
    };
    if let Some(out) = &flags.output {
        write(out, &print_wfa_net(&net))?;
        write(&out.with_extension("trace"), &trace.to_text())?;
    }
    verify_into(&model, &net, Some(&trace), flags, &mut r);
    Ok(r.finish())
}

fn verify_into(model: &GoalModel, net: &WfaNet, trace: Option<&MappingTrace>, flags: &Flags, r: &mut RunReport) {
    match check_all(model, net, trace, &flags.check) {
        Ok(c) => {
            r.stage("verify", StageStatus::Ok, None);
            r.violations = c.violations;
            r.warnings = c.warnings;
            r.verdicts = c.verdicts;
            r.soundness = c.soundness;
        }
        Err(e) => r.stage("verify", StageStatus::Failed, Some(e.to_string())),
    }
}

/// Maps a model; the net goes to `flags.output` (with its trace next to it)
/// or to standard output.
pub fn cmd_map(path: &Path, flags: &Flags) -> Result<(RunReport, Option<String>), PipelineError> {
    let mut r = RunReport::new();
    let Some(model) = load_model(path, &mut r)? else { return Ok((r.finish(), None)) };
    emit(&model, flags)?;
    let verdicts = match analyze_all(&model) {
        Ok(v) => v,
        Err(e) => {
            r.stage("iq", StageStatus::Failed, Some(e.to_string()));
            return Ok((r.finish(), None));
        }
    };
    r.stage("iq", StageStatus::Ok, None);
    let mapped = identify_blocks(&model)
        .map_err(crate::mapper::MappingError::from)
        .and_then(|b| map_to_net(&model, &b, &verdicts));
    match mapped {
        Ok((net, trace)) => {
            r.stage("map", StageStatus::Ok, None);
            let text = print_wfa_net(&net);
            match &flags.output {
                Some(out) => {
                    write(out, &text)?;
                    write(&out.with_extension("trace"), &trace.to_text())?;
                    Ok((r.finish(), None))
                }
                None => Ok((r.finish(), Some(text))),
            }
        }
        Err(e) => {
            r.stage("map", StageStatus::Failed, Some(e.to_string()));
            Ok((r.finish(), None))
        }
    }
}

/// Checks a given, possibly hand-written, net against its goal model.
pub fn cmd_verify(goal: &Path, net: &Path, flags: &Flags) -> Result<RunReport, PipelineError> {
    let mut r = RunReport::new();
    let model = load_model(goal, &mut r)?;
    let wfa = load_net(net, &mut r)?;
    let trace = match &flags.trace {
        Some(p) => Some(load_trace(p, &mut r)?),
        None => None,
    };
    if let (Some(model), Some(wfa)) = (model, wfa) {
        emit(&model, flags)?;
        verify_into(&model, &wfa, trace.as_ref(), flags, &mut r);
    }
    Ok(r.finish())
}

/// DOT text of a net, or of its reachability graph.
pub fn cmd_export(net: &Path, reachability: bool, flags: &Flags) -> Result<(RunReport, Option<String>), PipelineError> {
    let mut r = RunReport::new();
    let Some(wfa) = load_net(net, &mut r)? else { return Ok((r.finish(), None)) };
    let dot = if reachability {
        let exec = ExecNet::new(&wfa);
        match reachability_graph(&exec, &Semantics::control_flow(), exec.initial_configuration(), flags.check.bound) {
            Ok(g) => reachability_to_dot(&exec, &g),
            Err(e) => {
                r.stage("explore", StageStatus::Failed, Some(e.to_string()));
                return Ok((r.finish(), None));
            }
        }
    } else {
        net_to_dot(&wfa)
    };
    r.stage("export", StageStatus::Ok, None);
    match &flags.output {
        Some(out) => {
            write(out, &dot)?;
            Ok((r.finish(), None))
        }
        None => Ok((r.finish(), Some(dot))),
    }
}
