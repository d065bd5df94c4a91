//! The `qdef` command line. [`run`] parses arguments and returns the exit code
//! and the text for stdout and stderr, so the binary and tests share one path.
//!
//! Exit codes: 0 success, 1 semantic failure, 2 parse or load failure,
//! 3 fuel exhausted.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::audit::{audit_subexpression, audit_subformula, classify, AuditReport};
use crate::base::SubatomicBase;
use crate::defs::{definiteness_degree, descriptions_in, elaborate, expand_all};
use crate::derivation::Derivation;
use crate::kernel::{check_derivation, CheckReport, Mode};
use crate::normalize::{normalize, ConversionTrace, NormalizeError, DEFAULT_FUEL};
use crate::parse::parse_formula;
use crate::script::{load_base, load_script, pointer, resolve, script_to_value, to_pretty, NamedDerivation, Script};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FUEL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "qdef", version, about = "Check, normalize, audit, elaborate and classify derivations with qualified definiteness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every derivation of a script against its base.
    Check(ScriptArgs),
    /// Normalize every derivation of a script.
    Normalize(NormalizeArgs),
    /// Normalize, then run the subformula and subexpression audits.
    Audit(AuditArgs),
    /// Print the elaboration and expansion of a formula, with description degrees.
    Elaborate(ElaborateArgs),
    /// Classify each derivation as canonical proof, canonical derivation or neither.
    Classify(ScriptArgs),
}

#[derive(Args, Debug)]
pub struct ScriptArgs {
    /// Proof script (JSON). A `corpus:` prefix resolves inside the corpus directory.
    #[arg(long)]
    pub script: String,
    /// Base file overriding the one the script refers to.
    #[arg(long)]
    pub base: Option<String>,
    /// Proof system; defaults to the script's own mode.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Emit one JSON document instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct NormalizeArgs {
    #[command(flatten)]
    pub common: ScriptArgs,
    /// List every conversion step.
    #[arg(long)]
    pub trace: bool,
    /// Maximum number of conversion steps per derivation.
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: usize,
    /// Write the normalized script here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: ScriptArgs,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    pub fuel: usize,
}

#[derive(Args, Debug)]
pub struct ElaborateArgs {
    /// Formula in surface syntax.
    pub formula: String,
    /// Base whose signature the formula is read against.
    #[arg(long)]
    pub base: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    I0,
    M0,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::I0 => Mode::I0,
            ModeArg::M0 => Mode::M0,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn text(code: i32, stdout: String) -> Self {
        Outcome { code, stdout, stderr: String::new() }
    }

    fn json(code: i32, doc: Value) -> Self {
        Outcome { code, stdout: to_pretty(&doc), stderr: String::new() }
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli.command),
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: rendered }
            } else {
                Outcome::text(EXIT_OK, rendered)
            }
        }
    }
}

pub fn execute(command: &Command) -> Outcome {
    match command {
        Command::Check(a) => cmd_check(a),
        Command::Normalize(a) => cmd_normalize(a),
        Command::Audit(a) => cmd_audit(a),
        Command::Elaborate(a) => cmd_elaborate(a),
        Command::Classify(a) => cmd_classify(a),
    }
}

struct Loaded {
    base: SubatomicBase,
    script: Script,
    mode: Mode,
    /// Script indices sorted by derivation name.
    order: Vec<usize>,
}

impl Loaded {
    fn entries(&self) -> impl Iterator<Item = (usize, &NamedDerivation)> {
        self.order.iter().map(|&i| (i, &self.script.derivations[i]))
    }
}

fn load(command: &str, a: &ScriptArgs) -> Result<Loaded, Outcome> {
    let script_path = resolve(&a.script, None);
    let base_path = a.base.as_deref().map(|b| resolve(b, None));
    match load_script(&script_path, base_path.as_deref()) {
        Ok((base, script)) => {
            let mode = a.mode.map(Mode::from).unwrap_or(script.mode);
            let mut order: Vec<usize> = (0..script.derivations.len()).collect();
            order.sort_by(|&x, &y| script.derivations[x].name.cmp(&script.derivations[y].name));
            Ok(Loaded { base, script, mode, order })
        }
        Err(e) => Err(load_failure(command, a.json, &e.to_string())),
    }
}

fn load_failure(command: &str, as_json: bool, message: &str) -> Outcome {
    if as_json {
        Outcome::json(EXIT_PARSE, json!({ "command": command, "ok": false, "error": { "kind": "load", "message": message } }))
    } else {
        Outcome { code: EXIT_PARSE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

fn count(n: usize, noun: &str) -> String {
    if n == 1 {
        format!("1 {noun}")
    } else {
        format!("{n} {noun}s")
    }
}

fn mode_str(mode: Mode) -> &'static str {
    match mode {
        Mode::I0 => "i0",
        Mode::M0 => "m0",
    }
}

/// Open assumption formulas without repetition, in leaf order.
fn open_set(report: &CheckReport) -> Vec<String> {
    let mut seen = Vec::new();
    for f in &report.open_assumptions {
        let s = f.to_string();
        if !seen.contains(&s) {
            seen.push(s);
        }
    }
    seen
}

fn sequent(report: &CheckReport) -> String {
    let open = open_set(report);
    if open.is_empty() {
        report.conclusion.to_string()
    } else {
        format!("{} |- {}", open.join("; "), report.conclusion)
    }
}

fn error_values(index: usize, report: &CheckReport) -> Vec<Value> {
    report
        .errors
        .iter()
        .map(|e| json!({ "pointer": pointer(index, &e.path), "kind": e.error.kind(), "message": e.error.to_string() }))
        .collect()
}

fn write_errors(out: &mut String, index: usize, report: &CheckReport) {
    for e in &report.errors {
        let _ = writeln!(out, "  {}: {}: {}", pointer(index, &e.path), e.error.kind(), e.error);
    }
}

fn cmd_check(a: &ScriptArgs) -> Outcome {
    let loaded = match load("check", a) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let mut out = String::new();
    let mut docs = Vec::new();
    let (mut valid, mut invalid) = (0usize, 0usize);
    for (i, entry) in loaded.entries() {
        let report = check_derivation(&loaded.base, &entry.derivation, loaded.mode);
        if report.valid {
            valid += 1;
            let _ = writeln!(out, "{}: valid: {}", entry.name, sequent(&report));
        } else {
            invalid += 1;
            match &entry.expect_error {
                Some(k) => {
                    let met = if report.error_kinds().contains(&k.as_str()) { "as expected" } else { "expected" };
                    let _ = writeln!(out, "{}: invalid ({met} {k})", entry.name);
                }
                None => {
                    let _ = writeln!(out, "{}: invalid", entry.name);
                }
            }
            write_errors(&mut out, i, &report);
        }
        docs.push(json!({
            "name": entry.name,
            "valid": report.valid,
            "conclusion": report.conclusion.to_string(),
            "open_assumptions": open_set(&report),
            "expect_error": entry.expect_error,
            "errors": error_values(i, &report),
        }));
    }
    let code = if invalid == 0 { EXIT_OK } else { EXIT_FAILURE };
    if a.json {
        return Outcome::json(
            code,
            json!({ "command": "check", "mode": mode_str(loaded.mode), "ok": invalid == 0, "derivations": docs }),
        );
    }
    let _ = writeln!(out, "{valid} valid, {invalid} invalid");
    Outcome::text(code, out)
}

fn cmd_classify(a: &ScriptArgs) -> Outcome {
    let loaded = match load("classify", a) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let mut out = String::new();
    let mut docs = Vec::new();
    let mut code = EXIT_OK;
    let width = loaded.entries().map(|(_, e)| e.name.len()).max().unwrap_or(0);
    for (i, entry) in loaded.entries() {
        let report = check_derivation(&loaded.base, &entry.derivation, loaded.mode);
        if !report.valid {
            code = EXIT_FAILURE;
            let _ = writeln!(out, "{:width$}  invalid", entry.name);
            write_errors(&mut out, i, &report);
            docs.push(json!({ "name": entry.name, "valid": false, "errors": error_values(i, &report) }));
            continue;
        }
        let c = classify(&loaded.base, &entry.derivation, loaded.mode);
        let _ = writeln!(out, "{:width$}  {:<36}  {}", entry.name, c.to_string(), sequent(&report));
        docs.push(json!({
            "name": entry.name,
            "valid": true,
            "canonicity": c.canonicity,
            "status": c.status,
            "conclusion": report.conclusion.to_string(),
            "open_assumptions": open_set(&report),
        }));
    }
    if a.json {
        return Outcome::json(
            code,
            json!({ "command": "classify", "mode": mode_str(loaded.mode), "ok": code == EXIT_OK, "derivations": docs }),
        );
    }
    Outcome::text(code, out)
}

enum Normalized {
    Done(ConversionTrace),
    Fuel(ConversionTrace),
    Failed(String),
}

fn run_normalize(base: &SubatomicBase, d: &Derivation, fuel: usize) -> Normalized {
    match normalize(base, d, fuel) {
        Ok(mut trace) => {
            if !trace.steps.is_empty() {
                trace.result = trace.result.canonicalize_labels();
            }
            Normalized::Done(trace)
        }
        Err(NormalizeError::FuelExhausted { partial }) => Normalized::Fuel(*partial),
        Err(e) => Normalized::Failed(e.to_string()),
    }
}

fn trace_values(index: usize, trace: &ConversionTrace) -> Vec<Value> {
    trace
        .steps
        .iter()
        .map(|s| {
            json!({
                "kind": s.redex.kind,
                "pointer": pointer(index, &s.redex.path),
                "before_size": s.before_size,
                "after_size": s.after_size,
            })
        })
        .collect()
}

fn write_trace(out: &mut String, index: usize, trace: &ConversionTrace) {
    for (n, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(
            out,
            "  {}. {} at {} (size {} -> {})",
            n + 1,
            s.redex.kind,
            pointer(index, &s.redex.path),
            s.before_size,
            s.after_size
        );
    }
}

fn cmd_normalize(a: &NormalizeArgs) -> Outcome {
    let loaded = match load("normalize", &a.common) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let mut out = String::new();
    let mut docs = Vec::new();
    let mut code = EXIT_OK;
    let mut results: Vec<Derivation> = loaded.script.derivations.iter().map(|e| e.derivation.clone()).collect();
    for (i, entry) in loaded.entries() {
        let report = check_derivation(&loaded.base, &entry.derivation, loaded.mode);
        if !report.valid {
            code = code.max(EXIT_FAILURE);
            let _ = writeln!(out, "{}: invalid, not normalized", entry.name);
            write_errors(&mut out, i, &report);
            docs.push(json!({ "name": entry.name, "status": "invalid", "errors": error_values(i, &report) }));
            continue;
        }
        match run_normalize(&loaded.base, &entry.derivation, a.fuel) {
            Normalized::Done(trace) => {
                let after = check_derivation(&loaded.base, &trace.result, loaded.mode);
                let status = if after.valid { "normal" } else { "invalid-normal-form" };
                if !after.valid {
                    code = code.max(EXIT_FAILURE);
                }
                let _ = writeln!(out, "{}: {} after {}: {}", entry.name, status, count(trace.steps.len(), "step"), sequent(&after));
                if a.trace {
                    write_trace(&mut out, i, &trace);
                }
                let mut doc = json!({
                    "name": entry.name,
                    "status": status,
                    "steps": trace.steps.len(),
                    "conclusion": after.conclusion.to_string(),
                    "open_assumptions": open_set(&after),
                });
                if a.trace {
                    doc["trace"] = Value::Array(trace_values(i, &trace));
                }
                docs.push(doc);
                results[i] = trace.result;
            }
            Normalized::Fuel(trace) => {
                code = code.max(EXIT_FUEL);
                let _ = writeln!(out, "{}: fuel exhausted after {}", entry.name, count(trace.steps.len(), "step"));
                if a.trace {
                    write_trace(&mut out, i, &trace);
                }
                let mut doc = json!({ "name": entry.name, "status": "fuel-exhausted", "steps": trace.steps.len() });
                if a.trace {
                    doc["trace"] = Value::Array(trace_values(i, &trace));
                }
                docs.push(doc);
                results[i] = trace.result;
            }
            Normalized::Failed(message) => {
                code = code.max(EXIT_FAILURE);
                let _ = writeln!(out, "{}: normalization failed: {message}", entry.name);
                docs.push(json!({ "name": entry.name, "status": "failed", "message": message }));
            }
        }
    }
    let mut normalized = loaded.script.clone();
    for (entry, d) in normalized.derivations.iter_mut().zip(results) {
        entry.derivation = d;
    }
    let value = script_to_value(&normalized);
    let mut stderr = String::new();
    if let Some(path) = &a.out {
        if let Err(e) = std::fs::write(path, to_pretty(&value)) {
            code = code.max(EXIT_FAILURE);
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
        }
    }
    if a.common.json {
        let doc = json!({
            "command": "normalize",
            "mode": mode_str(loaded.mode),
            "ok": code == EXIT_OK,
            "derivations": docs,
            "script": value,
        });
        return Outcome { code, stdout: to_pretty(&doc), stderr };
    }
    Outcome { code, stdout: out, stderr }
}

fn audit_line(name: &str, report: &AuditReport) -> String {
    if report.passed {
        format!("{name} pass ({})", count(report.entries.len(), "unit"))
    } else {
        format!("{name} FAIL ({} of {} unwitnessed)", report.violations().count(), count(report.entries.len(), "unit"))
    }
}

fn audit_value(index: usize, report: &AuditReport) -> Value {
    let violations: Vec<Value> = report
        .violations()
        .map(|v| json!({ "pointer": pointer(index, &v.path), "unit": v.unit }))
        .collect();
    json!({ "passed": report.passed, "units": report.entries.len(), "violations": violations })
}

fn cmd_audit(a: &AuditArgs) -> Outcome {
    let loaded = match load("audit", &a.common) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let mut out = String::new();
    let mut docs = Vec::new();
    let mut code = EXIT_OK;
    for (i, entry) in loaded.entries() {
        let report = check_derivation(&loaded.base, &entry.derivation, loaded.mode);
        if !report.valid {
            code = code.max(EXIT_FAILURE);
            let _ = writeln!(out, "{}: invalid, not audited", entry.name);
            write_errors(&mut out, i, &report);
            docs.push(json!({ "name": entry.name, "status": "invalid", "errors": error_values(i, &report) }));
            continue;
        }
        let trace = match run_normalize(&loaded.base, &entry.derivation, a.fuel) {
            Normalized::Done(t) => t,
            Normalized::Fuel(t) => {
                code = code.max(EXIT_FUEL);
                let _ = writeln!(out, "{}: fuel exhausted after {}, not audited", entry.name, count(t.steps.len(), "step"));
                docs.push(json!({ "name": entry.name, "status": "fuel-exhausted", "steps": t.steps.len() }));
                continue;
            }
            Normalized::Failed(message) => {
                code = code.max(EXIT_FAILURE);
                let _ = writeln!(out, "{}: normalization failed: {message}", entry.name);
                docs.push(json!({ "name": entry.name, "status": "failed", "message": message }));
                continue;
            }
        };
        let normal = &trace.result;
        let audits = audit_subformula(&loaded.base, normal, loaded.mode)
            .and_then(|sf| audit_subexpression(&loaded.base, normal, loaded.mode).map(|se| (sf, se)));
        match audits {
            Ok((sf, se)) => {
                if !(sf.passed && se.passed) {
                    code = code.max(EXIT_FAILURE);
                }
                let _ = writeln!(
                    out,
                    "{}: {}; {}; {}",
                    entry.name,
                    count(trace.steps.len(), "step"),
                    audit_line("subformula", &sf),
                    audit_line("subexpression", &se)
                );
                for (label, r) in [("subformula", &sf), ("subexpression", &se)] {
                    for v in r.violations() {
                        let _ = writeln!(out, "  {label}: {} at {} (normal form)", v.unit, pointer(i, &v.path));
                    }
                }
                docs.push(json!({
                    "name": entry.name,
                    "status": if sf.passed && se.passed { "pass" } else { "fail" },
                    "steps": trace.steps.len(),
                    "subformula": audit_value(i, &sf),
                    "subexpression": audit_value(i, &se),
                }));
            }
            Err(e) => {
                code = code.max(EXIT_FAILURE);
                let _ = writeln!(out, "{}: audit refused: {e}", entry.name);
                docs.push(json!({ "name": entry.name, "status": "refused", "kind": e.kind(), "message": e.to_string() }));
            }
        }
    }
    if a.common.json {
        return Outcome::json(
            code,
            json!({ "command": "audit", "mode": mode_str(loaded.mode), "ok": code == EXIT_OK, "derivations": docs }),
        );
    }
    Outcome::text(code, out)
}

/// The text report of `qdef elaborate`, also used for the shipped goldens.
pub fn elaboration_report(formula: &str, base: &SubatomicBase) -> Result<(String, Value), (i32, String)> {
    let sig = base.signature();
    let f = parse_formula(formula, sig).map_err(|e| (EXIT_PARSE, e.to_string()))?;
    let elaborated = elaborate(&f);
    let expanded = expand_all(&f).map_err(|e| (EXIT_FAILURE, e.to_string()))?;
    let mut degrees = Vec::new();
    for d in descriptions_in(&f) {
        let degree = definiteness_degree(d, sig).map_err(|e| (EXIT_FAILURE, e.to_string()))?;
        degrees.push((format!("iota{} {}. {}", d.q, d.var, d.body), degree));
    }
    let mut out = String::new();
    let _ = writeln!(out, "formula: {f}");
    let _ = writeln!(out, "elaboration: {elaborated}");
    let _ = writeln!(out, "expansion: {expanded}");
    for (d, degree) in &degrees {
        let _ = writeln!(out, "degree: {d}: {degree}");
    }
    let doc = json!({
        "command": "elaborate",
        "ok": true,
        "formula": f.to_string(),
        "elaboration": elaborated.to_string(),
        "expansion": expanded.to_string(),
        "degrees": degrees.iter().map(|(d, g)| json!({ "description": d, "degree": g })).collect::<Vec<_>>(),
    });
    Ok((out, doc))
}

fn cmd_elaborate(a: &ElaborateArgs) -> Outcome {
    let base = match load_base(&resolve(&a.base, None)) {
        Ok(b) => b,
        Err(e) => return load_failure("elaborate", a.json, &e.to_string()),
    };
    match elaboration_report(&a.formula, &base) {
        Ok((text, doc)) => {
            if a.json {
                Outcome::json(EXIT_OK, doc)
            } else {
                Outcome::text(EXIT_OK, text)
            }
        }
        Err((code, message)) => {
            if a.json {
                Outcome::json(code, json!({ "command": "elaborate", "ok": false, "error": { "message": message } }))
            } else {
                Outcome { code, stdout: String::new(), stderr: format!("error: {message}\n") }
            }
        }
    }
}
